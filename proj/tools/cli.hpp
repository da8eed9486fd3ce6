#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fm::cli {

/// Whole CLI behind a callable seam: `args` excludes the program name.
/// Returns the process exit code (0 clean, 1 findings, 2 usage/IO trouble).
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace fm::cli
