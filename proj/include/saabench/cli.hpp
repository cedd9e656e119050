#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "saabench/config.hpp"
#include "saabench/errors.hpp"

namespace saabench {

/// Malformed command line. The CLI exits with status 2.
class UsageError : public Error {
public:
    using Error::Error;
};

enum class Verb { Run, List, Validate };

struct CliCommand {
    Verb verb = Verb::List;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> workers;
    std::optional<std::vector<MethodKind>> methods;
    bool mc_predictive = false;
    bool mc_eval = false;
    bool quiet = false;
    std::string help;  ///< non-empty when --help was requested
};

/// Parses the arguments after the program name. Throws UsageError.
CliCommand parse_args(const std::vector<std::string>& args);

/// Applies command-line overrides. `env_workers` is the value of
/// SAABENCH_WORKERS (nullptr when unset); --workers wins over it.
void apply_overrides(ExperimentConfig& cfg, const CliCommand& cmd, const char* env_workers);

/// Built-in cost functions, distributions and covariance matrices.
std::string describe_builtins();

/// Full CLI: returns the process exit status (0 ok, 1 runtime, 2 usage/config).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace saabench
