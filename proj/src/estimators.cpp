#include "saabench/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "nelder_mead.hpp"
#include "saabench/errors.hpp"

namespace saabench {

double saa_decision(std::span<const double> sample, const QuadraticCost& cost,
                    const DecisionBox& box) {
    return saa_minimize(cost, sample_moments(sample), box);
}

// ---------------------------------------------------------------------------
// Bagging

std::vector<std::size_t> draw_resample_indices(std::size_t n, const BaggingSpec& spec, Rng& rng) {
    if (n == 0) throw EmptySampleError("bagging: sample is empty");
    const std::size_t m = spec.resample_size == 0 ? n : spec.resample_size;
    std::vector<std::size_t> idx(m);
    if (spec.with_replacement) {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (auto& i : idx) i = pick(rng);
        return idx;
    }
    if (m > n) throw InvalidArgumentError("bagging: subsample size exceeds sample size");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
        idx[i] = pool[i];
    }
    return idx;
}

std::vector<MomentPair> bootstrap_moments(std::span<const double> sample, const BaggingSpec& spec,
                                          Rng& rng) {
    if (sample.empty()) throw EmptySampleError("bagging: sample is empty");
    if (spec.replicates == 0) throw InvalidArgumentError("bagging: B must be at least 1");
    const std::size_t n = sample.size();

    // rank[i] = position of sample[i] in ascending order; summing by rank
    // reproduces sample_moments() on the resample bit for bit
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sample[a] < sample[b]; });
    std::vector<std::size_t> rank(n);
    std::vector<double> sorted(n);
    for (std::size_t r = 0; r < n; ++r) {
        rank[order[r]] = r;
        sorted[r] = sample[order[r]];
    }

    std::vector<MomentPair> out;
    out.reserve(spec.replicates);
    std::vector<std::size_t> counts(n);
    for (std::size_t b = 0; b < spec.replicates; ++b) {
        const auto idx = draw_resample_indices(n, spec, rng);
        std::fill(counts.begin(), counts.end(), std::size_t{0});
        for (std::size_t i : idx) ++counts[rank[i]];
        double s1 = 0.0;
        double s2 = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double y = sorted[r];
            for (std::size_t c = 0; c < counts[r]; ++c) {
                s1 += y;
                s2 += y * y;
            }
        }
        const auto m = static_cast<double>(idx.size());
        out.push_back({s1 / m, s2 / m});
    }
    return out;
}

double bag_decision_from_moments(std::span<const MomentPair> resample_moments,
                                 const QuadraticCost& cost, const DecisionBox& box) {
    if (resample_moments.empty()) throw InvalidArgumentError("bagging: no resamples");
    // running mean: B identical decisions average to exactly that decision
    double mean = 0.0;
    std::size_t j = 0;
    for (const auto& m : resample_moments) {
        const double x = saa_minimize(cost, m, box);
        ++j;
        mean += (x - mean) / static_cast<double>(j);
    }
    return mean;
}

double bag_decision(std::span<const double> sample, const QuadraticCost& cost,
                    const BaggingSpec& spec, Rng& rng, const DecisionBox& box) {
    const auto moments = bootstrap_moments(sample, spec, rng);
    return bag_decision_from_moments(moments, cost, box);
}

// ---------------------------------------------------------------------------
// Kernel smoothing

double sample_std(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 2) return 0.0;
    const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double y : sample) ss += (y - mean) * (y - mean);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

double scott_factor(std::size_t n, std::size_t dim) {
    return std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(dim) + 4.0));
}

double kernel_bandwidth(std::span<const double> sample, const KernelSpec& spec) {
    if (sample.empty()) throw EmptySampleError("kernel: sample is empty");
    if (const auto* fixed = std::get_if<FixedBandwidth>(&spec.rule)) {
        if (!(fixed->h >= 0.0)) throw InvalidArgumentError("kernel: fixed bandwidth must be >= 0");
        return fixed->h;
    }
    const double sd = sample_std(sample);
    if (!(sd > 0.0))
        throw DegenerateBandwidthError("kernel: Scott's rule needs a sample with positive spread");
    return sd * scott_factor(sample.size(), 1);
}

MomentPair kernel_moments(std::span<const double> sample, double h) {
    auto m = sample_moments(sample);
    m.m2 += h * h;
    return m;
}

std::vector<double> sample_kernel_density(std::span<const double> sample, double h, std::size_t n,
                                          Rng& rng) {
    if (sample.empty()) throw EmptySampleError("kernel: sample is empty");
    std::uniform_int_distribution<std::size_t> pick(0, sample.size() - 1);
    std::normal_distribution<double> norm(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& y : out) {
        const double base = sample[pick(rng)];
        y = base + h * norm(rng);
    }
    return out;
}

double kernel_decision(std::span<const double> sample, const QuadraticCost& cost,
                       const KernelSpec& spec, const DecisionBox& box) {
    const double h = kernel_bandwidth(sample, spec);
    return saa_minimize(cost, kernel_moments(sample, h), box);
}

// ---------------------------------------------------------------------------
// Maximum likelihood

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double clamp_to_open_support(double y) {
    return std::clamp(y, -1.0 + kBetaBoundaryClamp, 1.0 - kBetaBoundaryClamp);
}

struct BetaStats {
    double sum_log_u = 0.0;
    double sum_log_1mu = 0.0;
    double n = 0.0;
};

BetaStats beta_stats(std::span<const double> sample) {
    BetaStats s;
    for (double y : sample) {
        const double u = 0.5 * (clamp_to_open_support(y) + 1.0);
        s.sum_log_u += std::log(u);
        s.sum_log_1mu += std::log1p(-u);
    }
    s.n = static_cast<double>(sample.size());
    return s;
}

double beta_loglik(const BetaStats& s, double a, double b) {
    const double log_b = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    return (a - 1.0) * s.sum_log_u + (b - 1.0) * s.sum_log_1mu - s.n * (log_b + std::numbers::ln2);
}

}  // namespace

double log_likelihood(const ScaledBeta& dist, std::span<const double> sample) {
    return beta_loglik(beta_stats(sample), dist.alpha(), dist.beta());
}

double log_likelihood(const GaussianMixture2& dist, std::span<const double> sample) {
    double ll = 0.0;
    for (double y : sample) ll += dist.log_pdf(y);
    return ll;
}

ScaledBeta fit_scaled_beta(std::span<const double> sample, const MleOptions& options) {
    if (sample.empty()) throw EmptySampleError("beta MLE: sample is empty");
    const double floor = options.beta_min_shape;
    const BetaStats stats = beta_stats(sample);

    // moment-matched start on the unit interval
    double mean = 0.0;
    for (double y : sample) mean += 0.5 * (clamp_to_open_support(y) + 1.0);
    mean /= stats.n;
    double var = 0.0;
    for (double y : sample) {
        const double u = 0.5 * (clamp_to_open_support(y) + 1.0);
        var += (u - mean) * (u - mean);
    }
    var /= stats.n;
    double a0 = 2.0;
    double b0 = 2.0;
    if (var > 0.0) {
        const double common = mean * (1.0 - mean) / var - 1.0;
        if (common > 0.0) {
            a0 = mean * common;
            b0 = (1.0 - mean) * common;
        }
    }
    a0 = std::max(a0, floor + 0.5);
    b0 = std::max(b0, floor + 0.5);

    auto shape = [floor](double t) { return floor + std::exp(std::clamp(t, -40.0, 40.0)); };
    auto objective = [&](const std::vector<double>& t) {
        const double ll = beta_loglik(stats, shape(t[0]), shape(t[1]));
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };
    std::vector<double> start{std::log(a0 - floor), std::log(b0 - floor)};
    auto res = detail::nelder_mead(objective, start, 0.5, options.simplex_tolerance,
                                   options.simplex_iterations);
    if (res.converged) {
        // one restart from the optimum guards against a collapsed simplex
        const std::size_t left = options.simplex_iterations - res.iterations;
        auto again = detail::nelder_mead(objective, res.x, 0.1, options.simplex_tolerance,
                                         std::max<std::size_t>(left, 1));
        if (again.converged && again.value <= res.value) res = again;
    }
    if (!res.converged)
        throw EstimationFailedError("beta MLE: simplex search did not converge");
    return ScaledBeta(shape(res.x[0]), shape(res.x[1]));
}

namespace {

struct EmState {
    double mu1, mu2, s1, s2, rho;
};

double mixture_loglik_and_resp(const EmState& st, std::span<const double> y,
                               std::vector<double>& resp) {
    const double c1 = std::log(st.rho) - std::log(st.s1);
    const double c2 = std::log1p(-st.rho) - std::log(st.s2);
    double ll = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double z1 = (y[i] - st.mu1) / st.s1;
        const double z2 = (y[i] - st.mu2) / st.s2;
        const double l1 = c1 - 0.5 * z1 * z1;
        const double l2 = c2 - 0.5 * z2 * z2;
        const double hi = std::max(l1, l2);
        const double e1 = std::exp(l1 - hi);
        const double e2 = std::exp(l2 - hi);
        resp[i] = e1 / (e1 + e2);
        ll += hi + std::log(e1 + e2);
    }
    return ll - 0.5 * std::log(2.0 * std::numbers::pi) * static_cast<double>(y.size());
}

}  // namespace

GaussianMixture2 fit_gaussian_mixture(std::span<const double> sample, const MleOptions& options) {
    if (sample.empty()) throw EmptySampleError("mixture MLE: sample is empty");
    if (!(options.sigma_floor > 0.0))
        throw InvalidArgumentError("mixture MLE: sigma floor must be positive");
    const std::size_t n = sample.size();
    const double nd = static_cast<double>(n);
    const double floor = options.sigma_floor;
    constexpr double kRhoEps = 1e-12;

    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double spread = std::max(sample_std(sample), floor);

    Rng rng = make_stream(options.restart_seed, n, StreamRole::Restart);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_real_distribution<double> unif(0.2, 0.8);

    bool have_best = false;
    EmState best{};
    double best_ll = kNegInf;
    std::vector<double> resp(n);

    const std::size_t restarts = std::max<std::size_t>(options.em_restarts, 1);
    for (std::size_t r = 0; r < restarts; ++r) {
        EmState st{};
        if (r == 0) {
            st.mu1 = sorted[n / 4];
            st.mu2 = sorted[(3 * n) / 4];
            st.s1 = st.s2 = std::max(0.5 * spread, floor);
            st.rho = 0.5;
        } else {
            st.mu1 = sample[pick(rng)];
            st.mu2 = sample[pick(rng)];
            st.s1 = st.s2 = spread;
            st.rho = unif(rng);
        }

        double ll_prev = kNegInf;
        bool converged = false;
        double ll = kNegInf;
        for (std::size_t it = 0; it < options.em_iterations; ++it) {
            ll = mixture_loglik_and_resp(st, sample, resp);
            if (std::isfinite(ll_prev) &&
                std::abs(ll - ll_prev) <= options.em_tolerance * (1.0 + std::abs(ll))) {
                converged = true;
                break;
            }
            ll_prev = ll;

            double n1 = 0.0, sy1 = 0.0, sy2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                n1 += resp[i];
                sy1 += resp[i] * sample[i];
                sy2 += (1.0 - resp[i]) * sample[i];
            }
            const double n2 = nd - n1;
            if (n1 > kRhoEps) st.mu1 = sy1 / n1;
            if (n2 > kRhoEps) st.mu2 = sy2 / n2;
            double ss1 = 0.0, ss2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                ss1 += resp[i] * (sample[i] - st.mu1) * (sample[i] - st.mu1);
                ss2 += (1.0 - resp[i]) * (sample[i] - st.mu2) * (sample[i] - st.mu2);
            }
            st.s1 = n1 > kRhoEps ? std::max(std::sqrt(ss1 / n1), floor) : floor;
            st.s2 = n2 > kRhoEps ? std::max(std::sqrt(ss2 / n2), floor) : floor;
            st.rho = std::clamp(n1 / nd, kRhoEps, 1.0 - kRhoEps);
        }
        if (converged && ll > best_ll) {
            best = st;
            best_ll = ll;
            have_best = true;
        }
    }
    if (!have_best) throw EstimationFailedError("mixture MLE: no EM restart converged");
    return GaussianMixture2(best.mu1, best.mu2, best.s1, best.s2, best.rho);
}

std::variant<ScaledBeta, GaussianMixture2> mle_fit(std::span<const double> sample,
                                                   const MleFamily& family) {
    if (family.kind == MleFamilyKind::ScaledBeta) return fit_scaled_beta(sample, family.options);
    return fit_gaussian_mixture(sample, family.options);
}

double mle_decision(std::span<const double> sample, const QuadraticCost& cost,
                    const MleFamily& family, const DecisionBox& box) {
    const auto fitted = mle_fit(sample, family);
    const MomentPair m = std::visit([](const auto& d) { return d.moments(); }, fitted);
    return saa_minimize(cost, m, box);
}

MomentPair empirical_mle_moments(std::span<const double> sample) { return sample_moments(sample); }

}  // namespace saabench
