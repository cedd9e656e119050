#include "saabench/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "saabench/errors.hpp"
#include "saabench/estimators.hpp"

namespace saabench {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPivotFloor = 1e-12;
constexpr std::size_t kAdaptWindow = 50;

void validate_chain(const ChainSettings& chain) {
    if (chain.draws == 0) throw InvalidArgumentError("chain: draws must be at least 1");
    if (chain.thin == 0) throw InvalidArgumentError("chain: thin must be at least 1");
}

void attach_acceptance_warning(PosteriorDraws& out) {
    if (out.acceptance_rate < 0.05 || out.acceptance_rate > 0.95)
        out.warnings.push_back("acceptance rate " + std::to_string(out.acceptance_rate) +
                               " outside [0.05, 0.95]");
}

void attach_ess(PosteriorDraws& out, Eigen::Index identifying_columns) {
    out.ess.clear();
    std::vector<double> col(out.size());
    for (Eigen::Index c = 0; c < identifying_columns; ++c) {
        for (Eigen::Index r = 0; r < out.draws.rows(); ++r) col[static_cast<std::size_t>(r)] = out.draws(r, c);
        out.ess.push_back(effective_sample_size(col));
    }
}

/// Adapts a multiplicative proposal scale toward a target acceptance rate.
struct ScaleAdapter {
    double scale;
    double target;
    std::size_t accepted = 0;
    std::size_t proposed = 0;

    void record(bool acc) {
        accepted += acc ? 1 : 0;
        ++proposed;
    }
    void maybe_adapt() {
        if (proposed < kAdaptWindow) return;
        const double rate = static_cast<double>(accepted) / static_cast<double>(proposed);
        scale *= std::exp(2.0 * (rate - target));
        scale = std::clamp(scale, 1e-4, 1e4);
        accepted = proposed = 0;
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// Effective sample size

double effective_sample_size(std::span<const double> chain) {
    const std::size_t n = chain.size();
    if (n < 4) return static_cast<double>(n);
    const double mean = std::accumulate(chain.begin(), chain.end(), 0.0) / static_cast<double>(n);
    auto autocov = [&](std::size_t lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) s += (chain[i] - mean) * (chain[i + lag] - mean);
        return s / static_cast<double>(n);
    };
    const double g0 = autocov(0);
    if (!(g0 > 0.0)) return static_cast<double>(n);
    double sum_pairs = 0.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
        double pair = autocov(2 * k) + autocov(2 * k + 1);
        if (pair <= 0.0) break;
        pair = std::min(pair, prev_pair);  // initial monotone sequence
        prev_pair = pair;
        sum_pairs += pair;
    }
    const double tau = std::max(-1.0 + 2.0 * sum_pairs / g0, 1.0 / static_cast<double>(n));
    return std::min(static_cast<double>(n) / tau, static_cast<double>(n) * std::log10(static_cast<double>(n)));
}

// ---------------------------------------------------------------------------
// Beta posterior

PosteriorDraws posterior_beta(std::span<const double> sample, const BetaPrior& prior,
                              const ChainSettings& chain, Rng& rng) {
    validate_chain(chain);
    if (!(prior.lo >= 1.0 && prior.lo < prior.hi))
        throw InvalidArgumentError("beta prior: need 1 <= lo < hi");

    double s_log_u = 0.0;
    double s_log_1mu = 0.0;
    double mean_u = 0.0;
    for (double y : sample) {
        const double u =
            0.5 * (std::clamp(y, -1.0 + kBetaBoundaryClamp, 1.0 - kBetaBoundaryClamp) + 1.0);
        s_log_u += std::log(u);
        s_log_1mu += std::log1p(-u);
        mean_u += u;
    }
    const double n = static_cast<double>(sample.size());
    auto log_post = [&](double a, double b) {
        if (sample.empty()) return 0.0;
        const double log_b = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
        return (a - 1.0) * s_log_u + (b - 1.0) * s_log_1mu - n * log_b;
    };

    const double width = prior.hi - prior.lo;
    const double margin = 0.01 * width;
    double a = 0.5 * (prior.lo + prior.hi);
    double b = a;
    if (sample.size() >= 2) {
        mean_u /= n;
        double var = 0.0;
        for (double y : sample) {
            const double u = 0.5 * (std::clamp(y, -1.0, 1.0) + 1.0);
            var += (u - mean_u) * (u - mean_u);
        }
        var /= n;
        if (var > 0.0) {
            const double common = mean_u * (1.0 - mean_u) / var - 1.0;
            if (common > 0.0) {
                a = std::clamp(mean_u * common, prior.lo + margin, prior.hi - margin);
                b = std::clamp((1.0 - mean_u) * common, prior.lo + margin, prior.hi - margin);
            }
        }
    }
    double lp = log_post(a, b);

    Eigen::Matrix2d prop_chol = Eigen::Matrix2d::Identity() * (0.1 * width);
    ScaleAdapter adapt{1.0, 0.3};
    std::normal_distribution<double> norm(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    auto step = [&]() {
        const Eigen::Vector2d z(norm(rng), norm(rng));
        const Eigen::Vector2d d = adapt.scale * (prop_chol * z);
        // Outside the box the target is zero. Rejecting keeps the proposal
        // symmetric; per-coordinate reflection would not once it is correlated.
        const double a2 = a + d(0);
        const double b2 = b + d(1);
        if (a2 < prior.lo || a2 > prior.hi || b2 < prior.lo || b2 > prior.hi) return false;
        const double lp2 = log_post(a2, b2);
        const bool accept = std::log(unif(rng)) < lp2 - lp;
        if (accept) {
            a = a2;
            b = b2;
            lp = lp2;
        }
        return accept;
    };

    std::vector<Eigen::Vector2d> history;
    history.reserve(chain.burn_in);
    for (std::size_t i = 0; i < chain.burn_in; ++i) {
        adapt.record(step());
        adapt.maybe_adapt();
        history.emplace_back(a, b);
        if (i + 1 == chain.burn_in / 2 && history.size() >= 100) {
            Eigen::Vector2d mean = Eigen::Vector2d::Zero();
            for (const auto& h : history) mean += h;
            mean /= static_cast<double>(history.size());
            Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
            for (const auto& h : history) cov += (h - mean) * (h - mean).transpose();
            cov /= static_cast<double>(history.size() - 1);
            cov *= 2.38 * 2.38 / 2.0;
            cov += Eigen::Matrix2d::Identity() * 1e-8 * width * width;
            Eigen::LLT<Eigen::Matrix2d> llt(cov);
            if (llt.info() == Eigen::Success) {
                prop_chol = llt.matrixL();
                adapt.scale = 1.0;
            }
        }
    }

    PosteriorDraws out;
    out.family = PosteriorFamily::ScaledBeta;
    out.names = {"alpha", "beta"};
    out.draws.resize(static_cast<Eigen::Index>(chain.draws), 2);
    std::size_t accepted = 0;
    std::size_t proposed = 0;
    for (std::size_t d = 0; d < chain.draws; ++d) {
        for (std::size_t t = 0; t < chain.thin; ++t) {
            accepted += step() ? 1 : 0;
            ++proposed;
        }
        out.draws(static_cast<Eigen::Index>(d), 0) = a;
        out.draws(static_cast<Eigen::Index>(d), 1) = b;
    }
    out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(proposed);
    attach_acceptance_warning(out);
    attach_ess(out, 2);
    return out;
}

// ---------------------------------------------------------------------------
// Mixture posterior

PosteriorDraws posterior_mixture(std::span<const double> sample, const MixturePrior& prior,
                                 const ChainSettings& chain, Rng& rng,
                                 const MixtureChainHooks& hooks) {
    validate_chain(chain);
    if (sample.empty()) throw EmptySampleError("mixture posterior: sample is empty");
    if (!(prior.delta > 0.0 && prior.V > 0.0 && prior.n > 0.0 && prior.alpha_prec > 0.0))
        throw InvalidArgumentError("mixture prior: delta, V, n, alpha must be positive");
    if (hooks.known_sigma && !(*hooks.known_sigma > 0.0))
        throw InvalidArgumentError("mixture posterior: known sigma must be positive");

    const std::size_t n = sample.size();
    const double sample_mean =
        std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(n);
    const double m0 = prior.m.value_or(sample_mean);
    const double shape0 = 0.5 * prior.n;
    const double rate0 = 1.0 / (2.0 * prior.V);
    const double alpha0 = prior.alpha_prec;

    std::normal_distribution<double> norm(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto draw_gamma = [&](double shape, double rate) {
        std::gamma_distribution<double> g(shape, 1.0 / rate);
        return g(rng);
    };

    PosteriorDraws out;
    out.family = PosteriorFamily::GaussianMixture2;
    out.names = {"rho", "mu1", "mu2", "var1", "var2"};
    out.draws.resize(static_cast<Eigen::Index>(chain.draws), 5);
    out.acceptance_rate = 1.0;

    // initial split at the median
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[n / 2];
    std::vector<unsigned char> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = sample[i] < median ? 0 : 1;
    // known-sigma hook: every point in component 0 with fixed precision, so
    // mu1 follows the single-Gaussian conjugate posterior
    const bool known = hooks.known_sigma.has_value();
    const double known_prec = known ? 1.0 / (*hooks.known_sigma * *hooks.known_sigma) : 0.0;
    if (known) std::fill(z.begin(), z.end(), 0);

    double rho = 0.5;
    double mu[2] = {m0, m0};
    double prec[2] = {1.0, 1.0};

    const std::size_t total = chain.burn_in + chain.draws * chain.thin;
    std::size_t stored = 0;
    for (std::size_t it = 0; it < total; ++it) {
        // parameters | assignments
        double cnt[2] = {0.0, 0.0};
        double sum[2] = {0.0, 0.0};
        if (!hooks.suppress_likelihood) {
            for (std::size_t i = 0; i < n; ++i) {
                cnt[z[i]] += 1.0;
                sum[z[i]] += sample[i];
            }
        }
        for (int k = 0; k < 2; ++k) {
            const double ybar = cnt[k] > 0.0 ? sum[k] / cnt[k] : 0.0;
            double ss = 0.0;
            if (!hooks.suppress_likelihood && cnt[k] > 0.0)
                for (std::size_t i = 0; i < n; ++i)
                    if (z[i] == k) ss += (sample[i] - ybar) * (sample[i] - ybar);
            const double alpha_k = alpha0 + cnt[k];
            const double m_k = (alpha0 * m0 + cnt[k] * ybar) / alpha_k;
            const double shape_k = shape0 + 0.5 * cnt[k];
            const double rate_k =
                rate0 + 0.5 * ss + alpha0 * cnt[k] * (ybar - m0) * (ybar - m0) / (2.0 * alpha_k);
            prec[k] = known ? known_prec : draw_gamma(shape_k, rate_k);
            mu[k] = m_k + norm(rng) / std::sqrt(alpha_k * prec[k]);
        }
        {
            const double g1 = draw_gamma(prior.delta + cnt[0], 1.0);
            const double g2 = draw_gamma(prior.delta + cnt[1], 1.0);
            rho = g1 / (g1 + g2);
        }

        // assignments | parameters
        if (!hooks.suppress_likelihood && !known) {
            const double c0 = std::log(rho) + 0.5 * std::log(prec[0]);
            const double c1 = std::log1p(-rho) + 0.5 * std::log(prec[1]);
            for (std::size_t i = 0; i < n; ++i) {
                const double d0 = sample[i] - mu[0];
                const double d1 = sample[i] - mu[1];
                const double l0 = c0 - 0.5 * prec[0] * d0 * d0;
                const double l1 = c1 - 0.5 * prec[1] * d1 * d1;
                const double p0 = 1.0 / (1.0 + std::exp(l1 - l0));
                z[i] = unif(rng) < p0 ? 0 : 1;
            }
        }

        if (it >= chain.burn_in && (it - chain.burn_in) % chain.thin == 0) {
            double r = rho, a = mu[0], b = mu[1], va = 1.0 / prec[0], vb = 1.0 / prec[1];
            if (a > b && !known) {
                std::swap(a, b);
                std::swap(va, vb);
                r = 1.0 - r;
            }
            out.draws.row(static_cast<Eigen::Index>(stored++)) << r, a, b, va, vb;
        }
    }
    attach_ess(out, 5);
    return out;
}

// ---------------------------------------------------------------------------
// Portfolio posterior

namespace {

class PortfolioTarget {
public:
    PortfolioTarget(const Eigen::MatrixXd& sample, const PortfolioPrior& prior, bool use_likelihood)
        : prior_(prior), p_(prior.n_assets), q_(p_ * (p_ - 1) / 2), use_lik_(use_likelihood) {
        if (use_lik_) data_t_ = sample.transpose();
    }

    Eigen::Index p() const { return p_; }
    Eigen::Index q() const { return q_; }
    Eigen::Index dim() const { return 2 * p_ + q_; }

    /// Builds L = diag(sigma) Lc; returns false when a pivot is not safely positive.
    bool build(const Eigen::VectorXd& theta, Eigen::MatrixXd& L, double& log_jac_corr) const {
        L.setZero(p_, p_);
        log_jac_corr = 0.0;
        L(0, 0) = 1.0;
        Eigen::Index k = p_;
        for (Eigen::Index i = 1; i < p_; ++i) {
            double sum_sq = 0.0;
            for (Eigen::Index j = 0; j < i; ++j) {
                const double zc = std::tanh(theta(k++));
                log_jac_corr += std::log1p(-zc * zc) + 0.5 * std::log1p(-sum_sq);
                L(i, j) = zc * std::sqrt(1.0 - sum_sq);
                sum_sq += L(i, j) * L(i, j);
            }
            if (!(sum_sq < 1.0)) return false;
            L(i, i) = std::sqrt(1.0 - sum_sq);
        }
        // LKJ density on the correlation Cholesky factor
        for (Eigen::Index i = 1; i < p_; ++i)
            log_jac_corr += (static_cast<double>(p_ - i - 1) + 2.0 * prior_.eta - 2.0) * std::log(L(i, i));
        for (Eigen::Index i = 0; i < p_; ++i) {
            const double sigma = std::exp(theta(i));
            L.row(i) *= sigma;
        }
        for (Eigen::Index i = 0; i < p_; ++i)
            if (!(L(i, i) > kPivotFloor) || !std::isfinite(L(i, i))) return false;
        return L.allFinite();
    }

    double log_post(const Eigen::VectorXd& theta) const {
        Eigen::MatrixXd L;
        double lp = 0.0;
        if (!build(theta, L, lp)) return kNegInf;
        for (Eigen::Index i = 0; i < p_; ++i) {
            if (std::abs(theta(i)) > 50.0) return kNegInf;
            lp += prior_.gamma_shape * theta(i) - prior_.gamma_rate * std::exp(theta(i));
        }
        const double log_det = L.diagonal().array().log().sum();
        const Eigen::VectorXd mu = theta.tail(p_);
        const Eigen::VectorXd wmu = L.triangularView<Eigen::Lower>().solve(mu);
        lp += -log_det - 0.5 * wmu.squaredNorm();
        if (use_lik_) {
            Eigen::MatrixXd centered = data_t_.colwise() - mu;
            L.triangularView<Eigen::Lower>().solveInPlace(centered);
            const double nu = prior_.nu;
            const double pd = static_cast<double>(p_);
            const Eigen::ArrayXd d2 = centered.colwise().squaredNorm().transpose().array();
            lp += -static_cast<double>(data_t_.cols()) * log_det -
                  0.5 * (nu + pd) * (d2 / nu).log1p().sum();
        }
        return std::isfinite(lp) ? lp : kNegInf;
    }

private:
    PortfolioPrior prior_;
    Eigen::Index p_;
    Eigen::Index q_;
    bool use_lik_;
    Eigen::MatrixXd data_t_;  // p x N
};

}  // namespace

PosteriorDraws posterior_portfolio(const Eigen::MatrixXd& sample, const PortfolioPrior& prior,
                                   const ChainSettings& chain, Rng& rng,
                                   const PortfolioChainHooks& hooks) {
    validate_chain(chain);
    if (!(prior.gamma_shape > 0.0 && prior.gamma_rate > 0.0 && prior.eta > 0.0 && prior.nu > 0.0))
        throw InvalidArgumentError("portfolio prior: all constants must be positive");
    if (prior.n_assets < 2) throw InvalidArgumentError("portfolio prior: need at least 2 assets");
    const Eigen::Index p = prior.n_assets;
    const bool use_lik = !hooks.suppress_likelihood;
    if (use_lik) {
        if (sample.rows() < 2) throw InvalidArgumentError("portfolio posterior: need N >= 2");
        if (sample.cols() != p)
            throw InvalidArgumentError("portfolio posterior: sample width must equal n_assets");
    }
    PortfolioTarget target(sample, prior, use_lik);
    const Eigen::Index q = target.q();
    const Eigen::Index dim = target.dim();
    const double n_obs = use_lik ? static_cast<double>(sample.rows()) : 0.0;

    // start at the sample moments
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd sd = Eigen::VectorXd::Ones(p);
    if (use_lik) {
        const Eigen::VectorXd mean = sample.colwise().mean().transpose();
        const Eigen::MatrixXd c = sample.rowwise() - mean.transpose();
        const Eigen::MatrixXd cov = (c.transpose() * c) / (n_obs - 1.0);
        sd = cov.diagonal().cwiseSqrt().cwiseMax(1e-8);
        const Eigen::MatrixXd corr = sd.cwiseInverse().asDiagonal() * cov * sd.cwiseInverse().asDiagonal();
        Eigen::LLT<Eigen::MatrixXd> llt(corr);
        if (llt.info() == Eigen::Success) {
            const Eigen::MatrixXd Lc = llt.matrixL();
            Eigen::Index k = p;
            for (Eigen::Index i = 1; i < p; ++i) {
                double sum_sq = 0.0;
                for (Eigen::Index j = 0; j < i; ++j) {
                    const double denom = std::sqrt(std::max(1e-12, 1.0 - sum_sq));
                    const double zc = std::clamp(Lc(i, j) / denom, -0.95, 0.95);
                    theta(k++) = std::atanh(zc);
                    sum_sq += Lc(i, j) * Lc(i, j);
                }
            }
        }
        theta.head(p) = sd.array().log().matrix();
        theta.tail(p) = mean;
    } else {
        theta.head(p).setConstant(std::log(prior.gamma_shape / prior.gamma_rate));
        sd.setConstant(prior.gamma_shape / prior.gamma_rate);
    }
    double lp = target.log_post(theta);
    if (!std::isfinite(lp)) {
        theta.segment(p, q).setZero();
        lp = target.log_post(theta);
    }
    if (!std::isfinite(lp)) throw EstimationFailedError("portfolio posterior: invalid starting point");

    struct Block {
        Eigen::Index offset;
        Eigen::Index size;
        Eigen::VectorXd base;
        ScaleAdapter adapt;
    };
    const double root_n = std::sqrt(n_obs + 1.0);
    std::vector<Block> blocks;
    blocks.push_back({0, p, Eigen::VectorXd::Constant(p, 1.0 / std::sqrt(2.0 * n_obs + 2.0)),
                      ScaleAdapter{2.38 / std::sqrt(static_cast<double>(p)), 0.3}});
    blocks.push_back({p, q, Eigen::VectorXd::Constant(q, 1.0 / root_n),
                      ScaleAdapter{2.38 / std::sqrt(static_cast<double>(q)), 0.3}});
    blocks.push_back({p + q, p, sd / root_n,
                      ScaleAdapter{2.38 / std::sqrt(static_cast<double>(p)), 0.3}});

    std::normal_distribution<double> norm(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd proposal(dim);

    auto sweep = [&](std::size_t& accepted, std::size_t& proposed) {
        for (auto& blk : blocks) {
            proposal = theta;
            for (Eigen::Index j = 0; j < blk.size; ++j)
                proposal(blk.offset + j) += blk.adapt.scale * blk.base(j) * norm(rng);
            const double lp2 = target.log_post(proposal);
            const bool accept = std::isfinite(lp2) && std::log(unif(rng)) < lp2 - lp;
            if (accept) {
                theta = proposal;
                lp = lp2;
            }
            blk.adapt.record(accept);
            accepted += accept ? 1 : 0;
            ++proposed;
        }
    };

    std::vector<Eigen::VectorXd> history;
    history.reserve(chain.burn_in);
    std::size_t acc_burn = 0, prop_burn = 0;
    for (std::size_t i = 0; i < chain.burn_in; ++i) {
        sweep(acc_burn, prop_burn);
        for (auto& blk : blocks) blk.adapt.maybe_adapt();
        history.push_back(theta);
        if (i + 1 == chain.burn_in / 2 && history.size() >= 100) {
            // rescale proposals to the marginal spread seen so far
            Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
            for (const auto& h : history) mean += h;
            mean /= static_cast<double>(history.size());
            Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
            for (const auto& h : history) var += (h - mean).cwiseAbs2();
            var /= static_cast<double>(history.size() - 1);
            for (auto& blk : blocks) {
                for (Eigen::Index j = 0; j < blk.size; ++j) {
                    const double s = std::sqrt(var(blk.offset + j));
                    if (s > 1e-10) blk.base(j) = s;
                }
                blk.adapt.scale = 2.38 / std::sqrt(static_cast<double>(blk.size));
                blk.adapt.accepted = blk.adapt.proposed = 0;
            }
        }
    }

    PosteriorDraws out;
    out.family = PosteriorFamily::Portfolio;
    for (Eigen::Index i = 0; i < p; ++i) out.names.push_back("mu" + std::to_string(i));
    for (Eigen::Index i = 0; i < p; ++i) out.names.push_back("sigma" + std::to_string(i));
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
            out.names.push_back("scale" + std::to_string(i) + std::to_string(j));
    out.draws.resize(static_cast<Eigen::Index>(chain.draws), 2 * p + p * p);

    std::size_t accepted = 0, proposed = 0;
    Eigen::MatrixXd L;
    double unused = 0.0;
    for (std::size_t d = 0; d < chain.draws; ++d) {
        for (std::size_t t = 0; t < chain.thin; ++t) sweep(accepted, proposed);
        target.build(theta, L, unused);
        const Eigen::MatrixXd scale = L * L.transpose();
        auto row = out.draws.row(static_cast<Eigen::Index>(d));
        row.head(p) = theta.tail(p).transpose();
        for (Eigen::Index i = 0; i < p; ++i) row(p + i) = std::exp(theta(i));
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index j = 0; j < p; ++j) row(2 * p + i * p + j) = scale(i, j);
    }
    out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(proposed);
    attach_acceptance_warning(out);
    attach_ess(out, 2 * p);
    return out;
}

// ---------------------------------------------------------------------------
// Predictive summaries

MomentPair draw_moments(const PosteriorDraws& draws, Eigen::Index j) {
    const auto row = draws.draws.row(j);
    switch (draws.family) {
        case PosteriorFamily::ScaledBeta:
            return ScaledBeta(row(0), row(1)).moments();
        case PosteriorFamily::GaussianMixture2: {
            const double rho = row(0);
            const double m1 = rho * row(1) + (1.0 - rho) * row(2);
            const double m2 =
                rho * (row(1) * row(1) + row(3)) + (1.0 - rho) * (row(2) * row(2) + row(4));
            return {m1, m2};
        }
        case PosteriorFamily::Portfolio:
            break;
    }
    throw UnsupportedDistributionError("scalar predictive moments need a univariate posterior");
}

MomentPair predictive_moments_1d(const PosteriorDraws& draws) {
    if (draws.size() == 0) throw EmptySampleError("predictive: no posterior draws");
    double s1 = 0.0;
    double s2 = 0.0;
    for (Eigen::Index j = 0; j < draws.draws.rows(); ++j) {
        const auto m = draw_moments(draws, j);
        s1 += m.m1;
        s2 += m.m2;
    }
    const auto n = static_cast<double>(draws.size());
    return {s1 / n, s2 / n};
}

std::vector<double> sample_predictive_1d(const PosteriorDraws& draws, std::size_t n, Rng& rng) {
    if (draws.size() == 0) throw EmptySampleError("predictive: no posterior draws");
    std::uniform_int_distribution<Eigen::Index> pick(0, draws.draws.rows() - 1);
    std::vector<double> out(n);
    for (auto& y : out) {
        const auto row = draws.draws.row(pick(rng));
        switch (draws.family) {
            case PosteriorFamily::ScaledBeta:
                y = ScaledBeta(row(0), row(1)).draw(rng);
                break;
            case PosteriorFamily::GaussianMixture2:
                y = GaussianMixture2(row(1), row(2), std::sqrt(row(3)), std::sqrt(row(4)),
                                     std::clamp(row(0), 0.0, 1.0))
                        .draw(rng);
                break;
            case PosteriorFamily::Portfolio:
                throw UnsupportedDistributionError("sample_predictive_1d: portfolio posterior");
        }
    }
    return out;
}

PortfolioDraw portfolio_draw(const PosteriorDraws& draws, Eigen::Index j) {
    if (draws.family != PosteriorFamily::Portfolio)
        throw UnsupportedDistributionError("portfolio_draw: not a portfolio posterior");
    const Eigen::Index cols = draws.draws.cols();
    // cols = 2p + p^2
    const auto p = static_cast<Eigen::Index>(std::lround(std::sqrt(1.0 + static_cast<double>(cols)) - 1.0));
    PortfolioDraw d;
    const auto row = draws.draws.row(j);
    d.mu = row.head(p).transpose();
    d.scale.resize(p, p);
    for (Eigen::Index a = 0; a < p; ++a)
        for (Eigen::Index b = 0; b < p; ++b) d.scale(a, b) = row(2 * p + a * p + b);
    return d;
}

Eigen::MatrixXd predictive_second_moment_matrix(const PosteriorDraws& draws, double nu) {
    if (draws.size() == 0) throw EmptySampleError("predictive: no posterior draws");
    if (!(nu > 2.0)) throw InvalidArgumentError("predictive: nu must exceed 2");
    const double factor = nu / (nu - 2.0);
    Eigen::MatrixXd acc;
    for (Eigen::Index j = 0; j < draws.draws.rows(); ++j) {
        const auto d = portfolio_draw(draws, j);
        const Eigen::MatrixXd term = factor * d.scale + d.mu * d.mu.transpose();
        if (j == 0)
            acc = term;
        else
            acc += term;
    }
    acc /= static_cast<double>(draws.size());
    return 0.5 * (acc + acc.transpose());
}

Eigen::VectorXd predictive_mean(const PosteriorDraws& draws) {
    if (draws.size() == 0) throw EmptySampleError("predictive: no posterior draws");
    Eigen::VectorXd acc;
    for (Eigen::Index j = 0; j < draws.draws.rows(); ++j) {
        const auto d = portfolio_draw(draws, j);
        if (j == 0)
            acc = d.mu;
        else
            acc += d.mu;
    }
    return acc / static_cast<double>(draws.size());
}

Eigen::MatrixXd predictive_covariance(const PosteriorDraws& draws, double nu) {
    const Eigen::VectorXd mean = predictive_mean(draws);
    Eigen::MatrixXd cov = predictive_second_moment_matrix(draws, nu) - mean * mean.transpose();
    return 0.5 * (cov + cov.transpose());
}

Eigen::MatrixXd sample_predictive_portfolio(const PosteriorDraws& draws, double nu, std::size_t n,
                                            Rng& rng) {
    if (draws.size() == 0) throw EmptySampleError("predictive: no posterior draws");
    std::uniform_int_distribution<Eigen::Index> pick(0, draws.draws.rows() - 1);
    const auto first = portfolio_draw(draws, 0);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), first.mu.size());
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const auto d = portfolio_draw(draws, pick(rng));
        MultivariateT t(d.mu, d.scale, nu);
        out.row(i) = t.sample(1, rng).row(0);
    }
    return out;
}

double bayes_decision_quadratic(std::span<const double> sample, const QuadraticCost& cost,
                                const QuadraticPrior& prior, const ChainSettings& chain,
                                Rng& rng, const DecisionBox& box) {
    const PosteriorDraws draws = std::visit(
        [&](const auto& pr) -> PosteriorDraws {
            using T = std::decay_t<decltype(pr)>;
            if constexpr (std::is_same_v<T, BetaPrior>)
                return posterior_beta(sample, pr, chain, rng);
            else
                return posterior_mixture(sample, pr, chain, rng);
        },
        prior);
    return saa_minimize(cost, predictive_moments_1d(draws), box);
}

}  // namespace saabench
