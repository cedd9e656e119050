#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "saabench/bayes.hpp"
#include "saabench/estimators.hpp"
#include "saabench/method.hpp"
#include "saabench/rng.hpp"

namespace saabench {

/// Smallest-eigenvalue threshold (relative to trace/n) below which a
/// covariance is ridge-regularized, and the ridge size used.
inline constexpr double kRidgeTrigger = 1e-10;
inline constexpr double kRidgeSize = 1e-8;

struct MinVarianceResult {
    Eigen::VectorXd weights;
    bool ridged = false;
};

/// Centered covariance with the 1/N divisor. Requires N >= 2.
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& sample);

/// Throws InvalidArgumentError unless the matrix is square, symmetric to
/// 1e-12 (relative to its largest entry) and positive semi-definite.
void validate_covariance(const Eigen::MatrixXd& sigma);

/// w = Sigma^-1 1 / (1^T Sigma^-1 1), ridge-regularized when Sigma is
/// numerically singular. Throws SingularMatrixError if that is not enough.
MinVarianceResult min_variance_weights_ex(const Eigen::MatrixXd& sigma);

inline Eigen::VectorXd min_variance_weights(const Eigen::MatrixXd& sigma) {
    return min_variance_weights_ex(sigma).weights;
}

/// w^T Sigma_true w.
double out_of_sample_variance(const Eigen::VectorXd& w, const Eigen::MatrixXd& true_cov);

// ---------------------------------------------------------------------------
// Per-method covariance estimates

enum class PortfolioKernel {
    /// sample covariance + h^2 I, h = N^(-1/9) * mean marginal std
    Spherical,
    /// sample covariance + N^(-2/9) * (unbiased sample covariance)
    ScottCovariance,
};

/// Bandwidth of the spherical kernel at dimension d: N^(-1/(d+4)) times the
/// average marginal standard deviation (1/(N-1) divisor).
double portfolio_kernel_bandwidth(const Eigen::MatrixXd& sample);

Eigen::MatrixXd kernel_covariance(const Eigen::MatrixXd& sample, PortfolioKernel kind);
Eigen::MatrixXd kernel_covariance_with_bandwidth(const Eigen::MatrixXd& sample, double h);

struct TFitOptions {
    double nu = 3.0;
    std::size_t max_iterations = 1000;
    double tolerance = 1e-10;

    bool operator==(const TFitOptions&) const = default;
};

struct TFit {
    Eigen::VectorXd mu;
    Eigen::MatrixXd scale;
    std::size_t iterations = 0;

    Eigen::MatrixXd covariance(double nu) const { return scale * (nu / (nu - 2.0)); }
};

/// EM for the location and scale of a multivariate t with fixed nu.
/// Throws EstimationFailedError on non-convergence.
TFit fit_multivariate_t(const Eigen::MatrixXd& sample, const TFitOptions& options = {});

// ---------------------------------------------------------------------------
// Bagging

struct BaggedWeights {
    Eigen::VectorXd weights;
    std::size_t used = 0;
    std::size_t excluded = 0;    ///< resamples singular beyond the ridge
    std::size_t ridge_count = 0; ///< resamples that needed the ridge
};

/// Average of per-resample minimum-variance weights.
BaggedWeights bagged_weights(const Eigen::MatrixXd& sample, const BaggingSpec& spec, Rng& rng);

// ---------------------------------------------------------------------------
// Method dispatch

struct PortfolioMethodSettings {
    BaggingSpec bagging{};
    PortfolioKernel kernel = PortfolioKernel::Spherical;
    TFitOptions t_fit{};
    PortfolioPrior prior{};
    ChainSettings chain{};
    bool mc_predictive = false;
    std::size_t predictive_draws = 100000;
};

/// Covariance the method hands to the min-variance solver (Saa, Kernel, Mle,
/// Bayes). Bagging averages weights instead; see bagged_weights.
Eigen::MatrixXd method_covariance(const Eigen::MatrixXd& sample, MethodKind method,
                                  const PortfolioMethodSettings& settings, Rng& rng);

struct PortfolioDecision {
    Eigen::VectorXd weights;
    std::size_t ridge_count = 0;
    std::size_t excluded_resamples = 0;
};

/// Weights produced by a method on one training sample.
PortfolioDecision portfolio_decision(const Eigen::MatrixXd& sample, MethodKind method,
                                     const PortfolioMethodSettings& settings, Rng& rng);

/// Five frozen "true" weekly-return covariance matrices (id = index + 1).
const std::vector<Eigen::MatrixXd>& builtin_covariances();

/// The procedure that produced builtin_covariances(): LKJ(2) correlation and
/// per-asset volatilities uniform in [0.02, 0.06].
Eigen::MatrixXd generate_true_covariance(Rng& rng, Eigen::Index dim = 5);

}  // namespace saabench
