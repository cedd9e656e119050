#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "saabench/bayes.hpp"
#include "saabench/errors.hpp"
#include "saabench/estimators.hpp"
#include "saabench/method.hpp"
#include "saabench/portfolio.hpp"
#include "saabench/quadratic.hpp"

namespace saabench {

enum class Family { Quadratic, Portfolio };
enum class EvaluationMode { Exact, MonteCarlo };

std::string to_string(Family family);

struct BetaParams {
    double alpha = 2.0;
    double beta = 2.0;
    bool operator==(const BetaParams&) const = default;
};

struct MixtureParams {
    double mu1 = 0.0;
    double mu2 = 0.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double rho = 0.5;  ///< weight of the first component
    bool operator==(const MixtureParams&) const = default;
};

struct DistributionEntry {
    int id = 0;
    std::variant<BetaParams, MixtureParams> params;
    bool operator==(const DistributionEntry&) const = default;
};

struct CostEntry {
    int id = 0;
    QuadraticCost cost;
    bool operator==(const CostEntry&) const = default;
};

struct CovarianceEntry {
    int id = 0;
    int dim = 5;
    std::vector<double> values;  ///< row-major dim x dim
    bool operator==(const CovarianceEntry&) const = default;

    Eigen::MatrixXd matrix() const;
};

/// Everything one experiment run needs. Defaults reproduce the benchmark
/// settings; see default_config().
struct ExperimentConfig {
    Family family = Family::Quadratic;
    std::vector<int> distribution_ids;  ///< distributions, or covariances for portfolios
    std::vector<int> cost_ids;          ///< quadratic only
    std::vector<std::size_t> sample_sizes;
    std::size_t replications = 1000;  ///< K
    std::size_t eval_size = 100000;   ///< L, Monte Carlo evaluation only
    EvaluationMode evaluation = EvaluationMode::Exact;
    std::vector<MethodKind> methods;
    std::uint64_t master_seed = 20200101;
    std::size_t workers = 0;  ///< 0: hardware concurrency
    std::string output_dir = "results";
    std::string basename;

    DecisionBox box{};
    BaggingSpec bagging{};
    KernelSpec kernel{};
    bool mc_predictive = false;
    std::size_t predictive_draws = 100000;
    MleOptions mle{};
    ChainSettings chain{};
    BetaPrior beta_prior{};
    MixturePrior mixture_prior{};
    PortfolioPrior portfolio_prior{};
    PortfolioKernel portfolio_kernel = PortfolioKernel::Spherical;
    TFitOptions t_fit{};
    double true_nu = 3.0;  ///< degrees of freedom of the true return distribution

    std::vector<CostEntry> costs;
    std::vector<DistributionEntry> distributions;
    std::vector<CovarianceEntry> covariances;

    bool operator==(const ExperimentConfig&) const = default;

    const CostEntry& cost(int id) const;
    const DistributionEntry& distribution(int id) const;
    const CovarianceEntry& covariance(int id) const;
};

/// Built-in catalogues.
std::vector<CostEntry> default_cost_entries();
std::vector<DistributionEntry> default_distribution_entries();
std::vector<CovarianceEntry> default_covariance_entries();

ExperimentConfig default_config(Family family);

/// Config parse/validation failure. `errors` lists every problem found.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

/// Semantic checks; returns one message per violation (empty when valid).
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

/// Parses TOML text; `origin` is used in error messages.
ExperimentConfig parse_config(std::string_view text, const std::string& origin = "<config>");

/// Reads and validates a config file. Throws ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace saabench
