#pragma once

// Command-line front end. Every subcommand has a flat table of typed
// parameters; values resolve as flag > --config JSON > default.
//
// Exit codes: 0 success, 1 usage, 2 invalid configuration, 3 numerical
// failure reported by a module.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace zenolab::cli {

enum class ParamType { Real, Integer, Flag, Text, Path };

struct ParamSpec {
    std::string name;
    ParamType type;
    std::string default_value;
    std::string description;
    std::vector<std::string> choices;  // Text parameters only; empty = free
};

struct SubcommandInfo {
    std::string name;
    std::string description;
    std::string topic;
    std::vector<ParamSpec> params;
};

const std::vector<SubcommandInfo>& subcommands();

/// Which subcommand and mode reaches each library operation.
struct OperationCoverage {
    std::string module;
    std::string operation;
    std::string subcommand;
    std::string mode;
};

const std::vector<OperationCoverage>& operation_coverage();

/// Closest known subcommand by edit distance, or empty if nothing is close.
std::string suggest_subcommand(std::string_view name);

/// Runs one invocation; `args` excludes the program name. CSV/JSON goes to
/// `out` unless --out is given, diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace zenolab::cli
