#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace codegenlink {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // runtime failure: empty query, provider down, I/O
inline constexpr int kExitUsage = 2;    // bad flags or configuration

using EnvLookup = std::function<std::optional<std::string>(std::string_view name)>;

/// Reads the process environment.
std::optional<std::string> process_env(std::string_view name);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env = process_env);

}  // namespace codegenlink
