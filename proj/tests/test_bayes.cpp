#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "saabench/bayes.hpp"
#include "saabench/errors.hpp"

using namespace saabench;

namespace {

std::vector<double> draw(const TrueDistribution& d, std::size_t n, std::uint64_t seed) {
    Rng rng = make_stream(seed, n, StreamRole::TrainingSample);
    const Eigen::MatrixXd y = sample(d, n, rng);
    return {y.data(), y.data() + y.size()};
}

double column_mean(const PosteriorDraws& d, Eigen::Index c) { return d.draws.col(c).mean(); }

}  // namespace

TEST_CASE("beta posterior stays in the prior box and is reproducible") {
    const auto y = draw(ScaledBeta(2, 5), 20, 1);
    Rng a = make_stream(1, 0, StreamRole::Mcmc);
    Rng b = make_stream(1, 0, StreamRole::Mcmc);
    const ChainSettings chain{2000, 500, 1};
    const auto d1 = posterior_beta(y, BetaPrior{}, chain, a);
    const auto d2 = posterior_beta(y, BetaPrior{}, chain, b);
    CHECK(d1.size() == 2000);
    CHECK(d1.draws == d2.draws);
    CHECK(d1.draws.minCoeff() >= 1.0);
    CHECK(d1.draws.maxCoeff() <= 7.0);
    CHECK(d1.acceptance_rate > 0.1);
    CHECK(d1.acceptance_rate < 0.9);
}

TEST_CASE("beta posterior of an empty sample is the uniform prior") {
    Rng rng = make_stream(2, 0, StreamRole::Mcmc);
    const auto d = posterior_beta(std::vector<double>{}, BetaPrior{}, ChainSettings{40000, 1000, 1}, rng);
    // U[1,7]: mean 4, sd sqrt(3)
    for (Eigen::Index c = 0; c < 2; ++c) {
        const std::vector<double> col(d.draws.col(c).data(), d.draws.col(c).data() + d.size());
        const double se = std::sqrt(3.0 / effective_sample_size(col));
        CHECK(std::abs(column_mean(d, c) - 4.0) < 4.0 * se);
    }
}

TEST_CASE("beta posterior mean agrees with grid quadrature") {
    const auto y = draw(ScaledBeta(2, 2), 20, 3);
    Rng rng = make_stream(3, 0, StreamRole::Mcmc);
    const auto d = posterior_beta(y, BetaPrior{}, ChainSettings{40000, 2000, 1}, rng);
    const auto ref = oracle::beta_posterior_mean_grid(y, 1.0, 7.0, 200);
    CHECK(std::abs(column_mean(d, 0) - ref.alpha) < 0.05);
    CHECK(std::abs(column_mean(d, 1) - ref.beta) < 0.05);
}

TEST_CASE("mixture chain under the known-sigma hook is the conjugate normal posterior") {
    const std::vector<double> y = {0.2, 0.5, -0.1, 0.4, 0.3, 0.9, 0.0, 0.25};
    MixturePrior prior;
    prior.m = 0.0;
    const double sigma = 0.5;
    Rng rng = make_stream(4, 0, StreamRole::Mcmc);
    const std::size_t draws = 20000;
    const auto d = posterior_mixture(y, prior, ChainSettings{draws, 200, 1}, rng, MixtureChainHooks{false, sigma});
    // N((a0 m0 + n ybar) / (a0 + n), sigma^2 / (a0 + n))
    double sum = 0.0;
    for (double v : y) sum += v;
    const double n = static_cast<double>(y.size());
    const double mean = sum / (prior.alpha_prec + n);
    const double var = sigma * sigma / (prior.alpha_prec + n);
    const double se = std::sqrt(var / static_cast<double>(draws));
    CHECK(std::abs(column_mean(d, 1) - mean) < 3.0 * se);
    const double s2 = (d.draws.col(1).array() - column_mean(d, 1)).square().mean();
    CHECK(std::abs(s2 - var) < 3.0 * var * std::sqrt(2.0 / static_cast<double>(draws)));
}

TEST_CASE("mixture chain without likelihood samples the prior") {
    Rng rng = make_stream(5, 0, StreamRole::Mcmc);
    const std::vector<double> y = {0.0, 1.0};
    MixturePrior prior;
    prior.m = 0.0;
    const auto d =
        posterior_mixture(y, prior, ChainSettings{40000, 100, 1}, rng, MixtureChainHooks{true, std::nullopt});
    // rho ~ Beta(10, 10) (the label swap maps it to 1 - rho, same law)
    CHECK(std::abs(column_mean(d, 0) - 0.5) < 4.0 * std::sqrt(0.25 / 21.0 / 40000.0));
    // precisions ~ Gamma(n/2 = 1, rate 1/(2V) = 5): mean 0.2
    const double prec = 0.5 * ((1.0 / d.draws.col(3).array()).mean() + (1.0 / d.draws.col(4).array()).mean());
    CHECK(prec == doctest::Approx(0.2).epsilon(0.03));
}

TEST_CASE("mixture posterior orders components and concentrates on the truth") {
    const auto y = draw(GaussianMixture2(-0.5, 0.4, 0.15, 0.3, 0.6), 500, 6);
    Rng rng = make_stream(6, 0, StreamRole::Mcmc);
    const auto d = posterior_mixture(y, MixturePrior{}, ChainSettings{3000, 1000, 1}, rng);
    for (Eigen::Index j = 0; j < d.draws.rows(); ++j) CHECK(d.draws(j, 1) <= d.draws(j, 2));
    CHECK(column_mean(d, 1) == doctest::Approx(-0.5).epsilon(0.1));
    CHECK(column_mean(d, 2) == doctest::Approx(0.4).epsilon(0.15));
}

TEST_CASE("predictive moments average the per-draw moments") {
    const auto y = draw(ScaledBeta(2, 5), 15, 7);
    Rng rng = make_stream(7, 0, StreamRole::Mcmc);
    const auto d = posterior_beta(y, BetaPrior{}, ChainSettings{500, 100, 1}, rng);
    double m1 = 0.0, m2 = 0.0;
    for (Eigen::Index j = 0; j < d.draws.rows(); ++j) {
        const ScaledBeta b(d.draws(j, 0), d.draws(j, 1));
        m1 += b.moments().m1;
        m2 += b.moments().m2;
    }
    const auto p = predictive_moments_1d(d);
    CHECK(p.m1 == doctest::Approx(m1 / 500.0).epsilon(1e-12));
    CHECK(p.m2 == doctest::Approx(m2 / 500.0).epsilon(1e-12));

    Rng prng = make_stream(7, 0, StreamRole::Predictive);
    const auto z = sample_predictive_1d(d, 200000, prng);
    const auto mz = sample_moments(z);
    CHECK(std::abs(mz.m1 - p.m1) < 4.0 * std::sqrt(p.variance() / 200000.0));
}

TEST_CASE("bayes decision minimizes the predictive expected cost") {
    const auto y = draw(ScaledBeta(2, 2), 10, 8);
    const auto& c = builtin_costs()[0];
    Rng a = make_stream(8, 0, StreamRole::Mcmc);
    Rng b = make_stream(8, 0, StreamRole::Mcmc);
    const ChainSettings chain{1000, 200, 1};
    const double x = bayes_decision_quadratic(y, c, BetaPrior{}, chain, a);
    const auto d = posterior_beta(y, BetaPrior{}, chain, b);
    CHECK(x == saa_minimize(c, predictive_moments_1d(d)));
}

TEST_CASE("portfolio posterior draws are SPD and finite") {
    Eigen::MatrixXd sigma(5, 5);
    sigma.setIdentity();
    sigma *= 1e-3;
    sigma(0, 1) = sigma(1, 0) = 3e-4;
    const auto t = MultivariateT::with_covariance(Eigen::VectorXd::Zero(5), sigma, 3.0);
    Rng rng = make_stream(9, 0, StreamRole::TrainingSample);
    const Eigen::MatrixXd y = t.sample(50, rng);
    Rng mc = make_stream(9, 0, StreamRole::Mcmc);
    const auto d = posterior_portfolio(y, PortfolioPrior{}, ChainSettings{1000, 500, 1}, mc);
    CHECK(d.draws.allFinite());
    for (Eigen::Index j = 0; j < d.draws.rows(); ++j) {
        const auto pd = portfolio_draw(d, j);
        CHECK(pd.scale.llt().info() == Eigen::Success);
        CHECK((pd.scale - pd.scale.transpose()).norm() == 0.0);
    }
    const Eigen::MatrixXd cov = predictive_covariance(d, 3.0);
    const Eigen::VectorXd mu = predictive_mean(d);
    CHECK((predictive_second_moment_matrix(d, 3.0) - (cov + mu * mu.transpose())).norm() < 1e-15);
}

TEST_CASE("portfolio chain without likelihood samples the sigma prior") {
    Rng rng = make_stream(10, 0, StreamRole::Mcmc);
    PortfolioPrior prior;
    prior.n_assets = 3;
    const auto d = posterior_portfolio(Eigen::MatrixXd(0, 3), prior, ChainSettings{20000, 2000, 1}, rng,
                                       PortfolioChainHooks{true});
    // sigma_i ~ Gamma(3, 1): mean 3
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(column_mean(d, 3 + i) == doctest::Approx(3.0).epsilon(0.1));
}

TEST_CASE("effective sample size") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n;
    std::vector<double> iid(10000);
    for (auto& v : iid) v = n(rng);
    const double ess = effective_sample_size(iid);
    CHECK(ess > 8000.0);
    CHECK(ess <= 10000.0 * 4.0);
    // AR(1) with phi = 0.9: ess ~ n (1 - phi) / (1 + phi)
    std::vector<double> ar(20000);
    double x = 0.0;
    for (auto& v : ar) v = x = 0.9 * x + n(rng);
    CHECK(effective_sample_size(ar) == doctest::Approx(20000.0 * 0.1 / 1.9).epsilon(0.35));
}

TEST_CASE("chain settings are validated") {
    Rng rng = make_stream(1, 0, StreamRole::Mcmc);
    CHECK_THROWS_AS(posterior_beta(std::vector<double>{0.1}, BetaPrior{}, ChainSettings{0, 10, 1}, rng),
                    InvalidArgumentError);
    CHECK_THROWS_AS(posterior_mixture(std::vector<double>{}, MixturePrior{}, ChainSettings{}, rng), EmptySampleError);
}
