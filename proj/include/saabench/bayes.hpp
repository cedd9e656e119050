#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "saabench/distributions.hpp"
#include "saabench/quadratic.hpp"
#include "saabench/rng.hpp"

namespace saabench {

struct ChainSettings {
    std::size_t draws = 5000;  ///< stored draws after burn-in and thinning
    std::size_t burn_in = 1000;
    std::size_t thin = 1;

    bool operator==(const ChainSettings&) const = default;
};

/// Independent uniform priors on [lo, hi] for both beta shape parameters.
struct BetaPrior {
    double lo = 1.0;
    double hi = 7.0;

    bool operator==(const BetaPrior&) const = default;
};

/// Conjugate mixture prior:
///   rho ~ Dir(delta, delta), 1/sigma_k^2 ~ Gamma(n/2, rate 1/(2V)),
///   mu_k | sigma_k ~ N(m, sigma_k^2 / alpha_prec).
/// The precision prior is the one-dimensional Wishart(V, n).
struct MixturePrior {
    double delta = 10.0;
    double V = 0.1;
    double n = 2.0;
    double alpha_prec = 0.1;
    std::optional<double> m;  ///< prior mean; sample mean when unset

    bool operator==(const MixturePrior&) const = default;
};

/// sigma_i ~ Gamma(shape, rate) per asset, correlation factor ~ LKJ(eta),
/// mu | L ~ N(0, L L^T), returns ~ t(mu, L L^T, nu).
struct PortfolioPrior {
    double gamma_shape = 3.0;
    double gamma_rate = 1.0;
    double eta = 2.0;
    double nu = 3.0;
    Eigen::Index n_assets = 5;

    bool operator==(const PortfolioPrior&) const = default;
};

enum class PosteriorFamily { ScaledBeta, GaussianMixture2, Portfolio };

/// Stored MCMC output. Rows are draws; column layout by family:
///   ScaledBeta:       alpha, beta
///   GaussianMixture2: rho, mu1, mu2, var1, var2   (ordered mu1 <= mu2)
///   Portfolio:        mu[0..n), sigma[0..n), then L L^T row-major (n*n)
struct PosteriorDraws {
    PosteriorFamily family = PosteriorFamily::ScaledBeta;
    Eigen::MatrixXd draws;
    std::vector<std::string> names;
    double acceptance_rate = 1.0;
    /// effective sample size per identifying parameter (first columns)
    std::vector<double> ess;
    std::vector<std::string> warnings;

    std::size_t size() const { return static_cast<std::size_t>(draws.rows()); }
    Eigen::VectorXd mean() const { return draws.colwise().mean().transpose(); }
};

/// Test hooks for the mixture sampler.
struct MixtureChainHooks {
    /// Sample from the prior (latent assignments ignored).
    bool suppress_likelihood = false;
    /// Put every point in component 0 with this fixed sd; mu1 then has the
    /// conjugate normal posterior.
    std::optional<double> known_sigma;
};

struct PortfolioChainHooks {
    bool suppress_likelihood = false;
};

/// Random-walk Metropolis for (alpha, beta) with reflection at the prior
/// bounds; proposal covariance adapted during burn-in. An empty sample yields
/// the prior. Sample points on +-1 are clamped inward as in the MLE.
PosteriorDraws posterior_beta(std::span<const double> sample, const BetaPrior& prior,
                              const ChainSettings& chain, Rng& rng);

/// Blocked Gibbs sampler over latent assignments and conjugate parameters.
PosteriorDraws posterior_mixture(std::span<const double> sample, const MixturePrior& prior,
                                 const ChainSettings& chain, Rng& rng,
                                 const MixtureChainHooks& hooks = {});

/// Metropolis-within-Gibbs on (log sigma, atanh of canonical partial
/// correlations, mu). Every stored draw has an SPD scale matrix.
PosteriorDraws posterior_portfolio(const Eigen::MatrixXd& sample, const PortfolioPrior& prior,
                                   const ChainSettings& chain, Rng& rng,
                                   const PortfolioChainHooks& hooks = {});

/// Moments of the posterior-predictive mixture: per-draw analytic moments
/// averaged over draws.
MomentPair predictive_moments_1d(const PosteriorDraws& draws);

/// Analytic moments of f(.; theta) for row j of a univariate posterior.
MomentPair draw_moments(const PosteriorDraws& draws, Eigen::Index j);

/// n draws from the univariate posterior predictive: pick theta, then y.
std::vector<double> sample_predictive_1d(const PosteriorDraws& draws, std::size_t n, Rng& rng);

struct PortfolioDraw {
    Eigen::VectorXd mu;
    Eigen::MatrixXd scale;  ///< L L^T
};

PortfolioDraw portfolio_draw(const PosteriorDraws& draws, Eigen::Index j);

/// Average over draws of nu/(nu-2) * Sigma_j + mu_j mu_j^T.
Eigen::MatrixXd predictive_second_moment_matrix(const PosteriorDraws& draws, double nu);

/// Average of mu_j over draws.
Eigen::VectorXd predictive_mean(const PosteriorDraws& draws);

/// Second-moment matrix minus the outer product of the predictive mean.
Eigen::MatrixXd predictive_covariance(const PosteriorDraws& draws, double nu);

/// n draws (rows) from the portfolio posterior predictive.
Eigen::MatrixXd sample_predictive_portfolio(const PosteriorDraws& draws, double nu, std::size_t n,
                                            Rng& rng);

using QuadraticPrior = std::variant<BetaPrior, MixturePrior>;

/// Runs the posterior for the prior's family and minimizes expected cost
/// under the predictive moments.
double bayes_decision_quadratic(std::span<const double> sample, const QuadraticCost& cost,
                                const QuadraticPrior& prior, const ChainSettings& chain,
                                Rng& rng, const DecisionBox& box = {});

/// Geyer initial-positive-sequence effective sample size of one chain.
double effective_sample_size(std::span<const double> chain);

}  // namespace saabench
