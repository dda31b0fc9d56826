#pragma once

#include "sddhopf/config.hpp"

#include <optional>
#include <ostream>
#include <string>

namespace sddhopf::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_numerical = 1;
inline constexpr int exit_usage = 2;

/// Runs one subcommand. CSV goes to `out` unless `out_dir` is given, in which
/// case `<command>.csv` and `<command>.json` are written there. Errors are
/// reported on `err` and mapped to the exit codes above.
int run(const std::string& command, const RunConfig& cfg, const std::optional<std::string>& out_dir, std::ostream& out,
        std::ostream& err);

/// Full command line: `sdd_hopf <command> --config PATH [--set k=v]... [--out DIR]`.
int main(int argc, char** argv);

}  // namespace sddhopf::cli
