#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "saabench/errors.hpp"
#include "saabench/estimators.hpp"

using namespace saabench;

namespace {

std::vector<double> draw(const TrueDistribution& d, std::size_t n, std::uint64_t seed) {
    Rng rng = make_stream(seed, n, StreamRole::TrainingSample);
    const Eigen::MatrixXd y = sample(d, n, rng);
    return {y.data(), y.data() + y.size()};
}

}  // namespace

TEST_CASE("bootstrap moments equal sample moments of the resample") {
    const auto y = draw(GaussianMixture2(-0.5, 0.4, 0.15, 0.3, 0.6), 23, 1);
    const BaggingSpec spec{50, 0, true};
    Rng a = make_stream(4, 0, StreamRole::Bootstrap);
    Rng b = make_stream(4, 0, StreamRole::Bootstrap);
    const auto bm = bootstrap_moments(y, spec, a);
    REQUIRE(bm.size() == 50);
    for (const auto& m : bm) {
        const auto idx = draw_resample_indices(y.size(), spec, b);
        std::vector<double> r;
        for (auto i : idx) r.push_back(y[i]);
        const auto ref = sample_moments(r);
        CHECK(m.m1 == ref.m1);
        CHECK(m.m2 == ref.m2);
    }
}

TEST_CASE("subsampling draws distinct indices") {
    Rng rng = make_stream(1, 0, StreamRole::Bootstrap);
    const auto idx = draw_resample_indices(10, BaggingSpec{1, 6, false}, rng);
    CHECK(idx.size() == 6);
    CHECK(std::set<std::size_t>(idx.begin(), idx.end()).size() == 6);
    CHECK_THROWS_AS(draw_resample_indices(5, BaggingSpec{1, 6, false}, rng), InvalidArgumentError);
}

TEST_CASE("bagging a constant sample reproduces SAA exactly") {
    const std::vector<double> y(12, 0.37);
    Rng rng = make_stream(2, 0, StreamRole::Bootstrap);
    for (const auto& c : builtin_costs()) CHECK(bag_decision(y, c, BaggingSpec{}, rng) == saa_decision(y, c));
}

TEST_CASE("bagging with one replicate is one bootstrap SAA") {
    const auto y = draw(ScaledBeta(2, 5), 10, 3);
    const auto& c = builtin_costs()[4];
    Rng a = make_stream(8, 1, StreamRole::Bootstrap);
    Rng b = make_stream(8, 1, StreamRole::Bootstrap);
    const double x = bag_decision(y, c, BaggingSpec{1, 0, true}, a);
    const auto idx = draw_resample_indices(y.size(), BaggingSpec{1, 0, true}, b);
    std::vector<double> r;
    for (auto i : idx) r.push_back(y[i]);
    CHECK(x == saa_decision(r, c));
}

TEST_CASE("bagging errors") {
    Rng rng = make_stream(1, 0, StreamRole::Bootstrap);
    CHECK_THROWS_AS(bag_decision(std::vector<double>{}, builtin_costs()[0], BaggingSpec{}, rng), EmptySampleError);
    CHECK_THROWS_AS(bag_decision(std::vector<double>{1.0}, builtin_costs()[0], BaggingSpec{0, 0, true}, rng),
                    InvalidArgumentError);
}

TEST_CASE("Scott bandwidth") {
    const std::vector<double> y = {1.0, 2.0, 3.0, 4.0};
    // sd (1/(N-1)) = sqrt(5/3), factor 4^(-1/5)
    CHECK(kernel_bandwidth(y, KernelSpec{}) == doctest::Approx(std::sqrt(5.0 / 3.0) * std::pow(4.0, -0.2)));
    CHECK(kernel_bandwidth(y, KernelSpec{FixedBandwidth{0.25}}) == 0.25);
    CHECK_THROWS_AS(kernel_bandwidth(std::vector<double>(5, 1.0), KernelSpec{}), DegenerateBandwidthError);
    CHECK_THROWS_AS(kernel_bandwidth(y, KernelSpec{FixedBandwidth{-1.0}}), InvalidArgumentError);
}

TEST_CASE("kernel moments and decisions") {
    const auto y = draw(ScaledBeta(2, 2), 10, 5);
    const auto m = sample_moments(y);
    const auto k = kernel_moments(y, 0.3);
    CHECK(k.m1 == m.m1);
    CHECK(k.m2 == doctest::Approx(m.m2 + 0.09));
    for (const auto& c : builtin_costs())
        CHECK(kernel_decision(y, c, KernelSpec{FixedBandwidth{0.0}}) == saa_decision(y, c));
}

TEST_CASE("kernel density draws have the kernel moments") {
    const std::vector<double> y = {-0.4, 0.1, 0.3, 0.8};
    const double h = 0.2;
    Rng rng = make_stream(6, 0, StreamRole::Predictive);
    const auto z = sample_kernel_density(y, h, 400000, rng);
    const auto mz = sample_moments(z);
    const auto mk = kernel_moments(y, h);
    const double var = mk.m2 - mk.m1 * mk.m1;
    CHECK(std::abs(mz.m1 - mk.m1) < 4.0 * std::sqrt(var / 400000.0));
    CHECK(mz.m2 == doctest::Approx(mk.m2).epsilon(0.01));
}

TEST_CASE("beta MLE") {
    SUBCASE("recovers parameters from a large sample") {
        const auto y = draw(ScaledBeta(2, 5), 20000, 7);
        const auto fit = fit_scaled_beta(y);
        CHECK(fit.alpha() == doctest::Approx(2.0).epsilon(0.05));
        CHECK(fit.beta() == doctest::Approx(5.0).epsilon(0.05));
    }
    SUBCASE("is a likelihood maximum") {
        const auto y = draw(ScaledBeta(2, 2), 20, 8);
        const auto fit = fit_scaled_beta(y);
        const double best = log_likelihood(fit, y);
        for (double da : {-0.05, 0.05})
            for (double db : {-0.05, 0.05}) {
                const double a = std::max(1.0 + 1e-9, fit.alpha() + da);
                const double b = std::max(1.0 + 1e-9, fit.beta() + db);
                CHECK(log_likelihood(ScaledBeta(a, b), y) <= best + 1e-9);
            }
        // against the independent log density
        double ref = 0.0;
        for (double v : y) ref += oracle::scaled_beta_logpdf(fit.alpha(), fit.beta(), v);
        CHECK(best == doctest::Approx(ref).epsilon(1e-10));
    }
    SUBCASE("respects the shape constraint") {
        const auto y = draw(ScaledBeta(0.5, 0.5), 200, 9);
        const auto fit = fit_scaled_beta(y);
        CHECK(fit.alpha() >= 1.0);
        CHECK(fit.beta() >= 1.0);
    }
    SUBCASE("boundary points do not break the fit") {
        const std::vector<double> y = {-1.0, -0.5, 0.0, 0.5, 1.0};
        const auto fit = fit_scaled_beta(y);
        CHECK(std::isfinite(fit.alpha()));
        CHECK(std::isfinite(fit.beta()));
    }
}

TEST_CASE("mixture MLE") {
    SUBCASE("recovers parameters from a large sample") {
        const auto y = draw(GaussianMixture2(-0.5, 0.4, 0.15, 0.3, 0.6), 20000, 10);
        const auto fit = fit_gaussian_mixture(y);
        // label order is free; put the lower mean first
        const bool swap = fit.mu1() > fit.mu2();
        CHECK((swap ? fit.mu2() : fit.mu1()) == doctest::Approx(-0.5).epsilon(0.05));
        CHECK((swap ? fit.mu1() : fit.mu2()) == doctest::Approx(0.4).epsilon(0.05));
        CHECK((swap ? 1.0 - fit.rho() : fit.rho()) == doctest::Approx(0.6).epsilon(0.05));
    }
    SUBCASE("sigma floor holds") {
        const std::vector<double> y = {0.0, 0.0, 0.001, 1.0, 1.0, 1.001, 0.5};
        MleOptions opt;
        opt.sigma_floor = 0.2;
        const auto fit = fit_gaussian_mixture(y, opt);
        CHECK(fit.sigma1() >= 0.2);
        CHECK(fit.sigma2() >= 0.2);
    }
    SUBCASE("deterministic given the sample") {
        const auto y = draw(GaussianMixture2(-0.1, 0.4, 0.3, 0.1, 0.7), 30, 11);
        const auto a = fit_gaussian_mixture(y);
        const auto b = fit_gaussian_mixture(y);
        CHECK(a.mu1() == b.mu1());
        CHECK(a.sigma2() == b.sigma2());
        CHECK(a.rho() == b.rho());
    }
    SUBCASE("invalid options") {
        MleOptions opt;
        opt.sigma_floor = -1.0;
        CHECK_THROWS_AS(fit_gaussian_mixture(std::vector<double>{1, 2, 3}, opt), InvalidArgumentError);
        CHECK_THROWS_AS(fit_gaussian_mixture(std::vector<double>{}), EmptySampleError);
    }
}

TEST_CASE("MLE decisions use the fitted moments") {
    const auto y = draw(ScaledBeta(2, 5), 50, 12);
    const auto fit = fit_scaled_beta(y);
    const auto& c = builtin_costs()[2];
    CHECK(mle_decision(y, c, MleFamily{MleFamilyKind::ScaledBeta, {}}) == saa_minimize(c, fit.moments()));
    // unrestricted MLE is the empirical distribution: SAA
    CHECK(saa_minimize(c, empirical_mle_moments(y)) == saa_decision(y, c));
}
