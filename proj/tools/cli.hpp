#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ibrt::tools {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "ibrt-csv/1";

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitNumerical = 4;

/// Runs one subcommand. `args` excludes the program name. Tables go to `out`
/// (or the --out file), diagnostics to `err`. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// printf %.17g; round-trips every double. NaN prints as "nan".
std::string format_real(double v);

}  // namespace ibrt::tools
