#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testio {

/// Whole file as bytes; throws when unreadable so tests fail loudly.
inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string fixture(const std::string& name) {
  return std::string(FM_FIXTURE_DIR) + "/" + name;
}

inline std::string golden(const std::string& name) {
  return std::string(FM_GOLDEN_DIR) + "/" + name;
}

}  // namespace testio
