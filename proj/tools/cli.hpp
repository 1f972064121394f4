#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chandiv::cli {

/// Exit codes: 0 success, 1 malformed input (JSON, files, flags),
/// 2 validation failure, 3 indeterminate classification.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chandiv::cli
