#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mevr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitInternal = 2;

/// Runs one subcommand. `args` excludes the program name. Reports go to
/// `--out` when given, otherwise to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

}  // namespace mevr::cli
