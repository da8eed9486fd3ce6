#pragma once

#include <stdexcept>
#include <string>

namespace fm {

/// Base error for failures that are not representable as report data:
/// unreadable files, malformed JSON, broken invariants.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// An operation was called outside its contract (e.g. rendering an invalid
/// model, reducing a record that is not compound).
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error(what) {}
};

}  // namespace fm
