#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mgk::cli {

inline constexpr int kOk = 0;
inline constexpr int kFalse = 1;
inline constexpr int kInputError = 2;

/// args excludes the program name. Reports go to `out`, errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mgk::cli
