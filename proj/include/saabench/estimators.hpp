#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "saabench/distributions.hpp"
#include "saabench/quadratic.hpp"
#include "saabench/rng.hpp"

namespace saabench {

// ---------------------------------------------------------------------------
// Bagging

struct BaggingSpec {
    std::size_t replicates = 400;   ///< B
    std::size_t resample_size = 0;  ///< M; 0 means "same as the sample" (M = N)
    bool with_replacement = true;   ///< false: subsampling, requires M <= N

    bool operator==(const BaggingSpec&) const = default;
};

/// Draws the resample index set of one bootstrap/subsample replicate.
std::vector<std::size_t> draw_resample_indices(std::size_t n, const BaggingSpec& spec, Rng& rng);

/// Moments of each of the B resamples. Each entry is bit-identical to
/// sample_moments() of the corresponding resample.
std::vector<MomentPair> bootstrap_moments(std::span<const double> sample, const BaggingSpec& spec,
                                          Rng& rng);

/// Average of the SAA decisions over precomputed resample moments.
double bag_decision_from_moments(std::span<const MomentPair> resample_moments,
                                 const QuadraticCost& cost, const DecisionBox& box = {});

/// x_bag = (1/B) sum_j x_SAA(S^(j)).
double bag_decision(std::span<const double> sample, const QuadraticCost& cost,
                    const BaggingSpec& spec, Rng& rng, const DecisionBox& box = {});

// ---------------------------------------------------------------------------
// Kernel smoothing

struct ScottBandwidth {
    bool operator==(const ScottBandwidth&) const = default;
};
struct FixedBandwidth {
    double h = 0.0;
    bool operator==(const FixedBandwidth&) const = default;
};

struct KernelSpec {
    std::variant<ScottBandwidth, FixedBandwidth> rule = ScottBandwidth{};

    bool operator==(const KernelSpec&) const = default;
};

/// Sample standard deviation with the 1/(N-1) divisor (0 for N < 2).
double sample_std(std::span<const double> sample);

/// Scott's rule for a d-dimensional Gaussian kernel: std * N^(-1/(d+4)).
double scott_factor(std::size_t n, std::size_t dim);

/// Bandwidth under the spec. Throws DegenerateBandwidthError when Scott's
/// rule meets a zero-spread sample.
double kernel_bandwidth(std::span<const double> sample, const KernelSpec& spec);

/// Exact moments of the Gaussian-kernel density estimate: (m1, m2 + h^2).
MomentPair kernel_moments(std::span<const double> sample, double h);

/// n draws from the kernel density estimate (pick a point, add h * N(0,1)).
std::vector<double> sample_kernel_density(std::span<const double> sample, double h, std::size_t n,
                                          Rng& rng);

double kernel_decision(std::span<const double> sample, const QuadraticCost& cost,
                       const KernelSpec& spec, const DecisionBox& box = {});

// ---------------------------------------------------------------------------
// Maximum likelihood

enum class MleFamilyKind { ScaledBeta, GaussianMixture2 };

struct MleOptions {
    double beta_min_shape = 1.0;      ///< fitted alpha, beta > this
    double sigma_floor = 0.1;         ///< fitted mixture sigmas >= this
    std::size_t simplex_iterations = 500;
    double simplex_tolerance = 1e-8;
    std::size_t em_restarts = 10;
    std::size_t em_iterations = 1000;
    double em_tolerance = 1e-10;
    std::uint64_t restart_seed = 0x6d6c65;  ///< fixed so a fit depends only on the sample

    bool operator==(const MleOptions&) const = default;
};

struct MleFamily {
    MleFamilyKind kind = MleFamilyKind::ScaledBeta;
    MleOptions options{};
};

/// Inward clamp applied to sample points on the beta support boundary.
inline constexpr double kBetaBoundaryClamp = 1e-9;

/// Constrained beta MLE on [-1,1] (alpha, beta > beta_min_shape) via a
/// Nelder-Mead search in log(shape - min) coordinates, started at the
/// moment-matched estimate. Throws EstimationFailedError on non-convergence.
ScaledBeta fit_scaled_beta(std::span<const double> sample, const MleOptions& options = {});

/// Mixture MLE via EM with a sigma floor and seeded restarts; best likelihood
/// wins. Throws EstimationFailedError if no restart converges.
GaussianMixture2 fit_gaussian_mixture(std::span<const double> sample,
                                      const MleOptions& options = {});

/// Log-likelihood of the sample (boundary points clamped as in the fit).
double log_likelihood(const ScaledBeta& dist, std::span<const double> sample);
double log_likelihood(const GaussianMixture2& dist, std::span<const double> sample);

/// Fitted distribution for the family.
std::variant<ScaledBeta, GaussianMixture2> mle_fit(std::span<const double> sample,
                                                   const MleFamily& family);

double mle_decision(std::span<const double> sample, const QuadraticCost& cost,
                    const MleFamily& family, const DecisionBox& box = {});

/// The unrestricted MLE is the empirical distribution; its decision is SAA.
MomentPair empirical_mle_moments(std::span<const double> sample);

// ---------------------------------------------------------------------------
// SAA

double saa_decision(std::span<const double> sample, const QuadraticCost& cost,
                    const DecisionBox& box = {});

}  // namespace saabench
