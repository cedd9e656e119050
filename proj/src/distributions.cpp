#include "saabench/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "saabench/errors.hpp"

namespace saabench {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_beta_fn(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

double normal_pdf(double y, double mu, double sigma) {
    const double z = (y - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double draw_beta(double a, double b, Rng& rng) {
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    return x / (x + y);
}

// ---------------------------------------------------------------------------
// ScaledBeta

ScaledBeta::ScaledBeta(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
        throw InvalidArgumentError("ScaledBeta: shape parameters must be positive and finite");
    log_norm_ = log_beta_fn(alpha, beta) + std::numbers::ln2;
}

double ScaledBeta::draw(Rng& rng) const { return 2.0 * draw_beta(alpha_, beta_, rng) - 1.0; }

std::vector<double> ScaledBeta::sample(std::size_t n, Rng& rng) const {
    std::gamma_distribution<double> ga(alpha_, 1.0);
    std::gamma_distribution<double> gb(beta_, 1.0);
    std::vector<double> out(n);
    for (auto& y : out) {
        const double x = ga(rng);
        const double z = gb(rng);
        y = 2.0 * (x / (x + z)) - 1.0;
    }
    return out;
}

double ScaledBeta::log_pdf(double y) const {
    if (!(y > -1.0 && y < 1.0)) return kNegInf;
    const double u = 0.5 * (y + 1.0);
    return (alpha_ - 1.0) * std::log(u) + (beta_ - 1.0) * std::log1p(-u) - log_norm_;
}

double ScaledBeta::pdf(double y) const {
    if (y < -1.0 || y > 1.0) return 0.0;
    if (y == -1.0 || y == 1.0) {
        // boundary: finite only when the corresponding shape is >= 1
        const double shape = (y == -1.0) ? alpha_ : beta_;
        if (shape > 1.0) return 0.0;
        if (shape < 1.0) return std::numeric_limits<double>::infinity();
        return std::exp(-log_norm_);
    }
    return std::exp(log_pdf(y));
}

MomentPair ScaledBeta::moments() const {
    const double s = alpha_ + beta_;
    const double eu = alpha_ / s;
    const double eu2 = alpha_ * (alpha_ + 1.0) / (s * (s + 1.0));
    return {2.0 * eu - 1.0, 4.0 * eu2 - 4.0 * eu + 1.0};
}

// ---------------------------------------------------------------------------
// GaussianMixture2

GaussianMixture2::GaussianMixture2(double mu1, double mu2, double sigma1, double sigma2,
                                   double rho)
    : mu1_(mu1), mu2_(mu2), sigma1_(sigma1), sigma2_(sigma2), rho_(rho) {
    if (!std::isfinite(mu1) || !std::isfinite(mu2))
        throw InvalidArgumentError("GaussianMixture2: locations must be finite");
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0))
        throw InvalidArgumentError("GaussianMixture2: scales must be positive");
    if (!(rho >= 0.0 && rho <= 1.0))
        throw InvalidArgumentError("GaussianMixture2: mixing weight must lie in [0,1]");
}

double GaussianMixture2::draw(Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> norm(0.0, 1.0);
    const bool first = unif(rng) < rho_;
    const double z = norm(rng);
    return first ? mu1_ + sigma1_ * z : mu2_ + sigma2_ * z;
}

std::vector<double> GaussianMixture2::sample(std::size_t n, Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> norm(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& y : out) {
        const bool first = unif(rng) < rho_;
        const double z = norm(rng);
        y = first ? mu1_ + sigma1_ * z : mu2_ + sigma2_ * z;
    }
    return out;
}

double GaussianMixture2::pdf(double y) const {
    return rho_ * normal_pdf(y, mu1_, sigma1_) + (1.0 - rho_) * normal_pdf(y, mu2_, sigma2_);
}

double GaussianMixture2::log_pdf(double y) const {
    // log-sum-exp over the two components
    const double z1 = (y - mu1_) / sigma1_;
    const double z2 = (y - mu2_) / sigma2_;
    const double l1 = rho_ > 0.0 ? std::log(rho_) - std::log(sigma1_) - 0.5 * z1 * z1 : kNegInf;
    const double l2 =
        rho_ < 1.0 ? std::log1p(-rho_) - std::log(sigma2_) - 0.5 * z2 * z2 : kNegInf;
    const double hi = std::max(l1, l2);
    const double lo = std::min(l1, l2);
    return hi + std::log1p(std::exp(lo - hi)) - 0.5 * std::log(2.0 * std::numbers::pi);
}

MomentPair GaussianMixture2::moments() const {
    const double m1 = rho_ * mu1_ + (1.0 - rho_) * mu2_;
    const double m2 = rho_ * (mu1_ * mu1_ + sigma1_ * sigma1_) +
                      (1.0 - rho_) * (mu2_ * mu2_ + sigma2_ * sigma2_);
    return {m1, m2};
}

// ---------------------------------------------------------------------------
// MultivariateT

MultivariateT::MultivariateT(Eigen::VectorXd mu, Eigen::MatrixXd scale, double nu)
    : mu_(std::move(mu)), scale_(std::move(scale)), nu_(nu) {
    const auto d = mu_.size();
    if (d == 0) throw InvalidArgumentError("MultivariateT: empty location vector");
    if (scale_.rows() != d || scale_.cols() != d)
        throw InvalidArgumentError("MultivariateT: scale matrix shape does not match location");
    if (!(nu > 2.0)) throw InvalidArgumentError("MultivariateT: degrees of freedom must exceed 2");
    if (!scale_.isApprox(scale_.transpose(), 1e-12))
        throw InvalidArgumentError("MultivariateT: scale matrix is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(scale_);
    if (llt.info() != Eigen::Success || (llt.matrixL().toDenseMatrix().diagonal().array() <= 0.0).any())
        throw InvalidArgumentError("MultivariateT: scale matrix is not positive definite");
    chol_ = llt.matrixL();
    const double p = static_cast<double>(d);
    log_norm_ = std::lgamma(0.5 * (nu_ + p)) - std::lgamma(0.5 * nu_) -
                0.5 * p * std::log(nu_ * std::numbers::pi) -
                chol_.diagonal().array().log().sum();
}

MultivariateT MultivariateT::with_covariance(const Eigen::VectorXd& mu,
                                             const Eigen::MatrixXd& covariance, double nu) {
    if (!(nu > 2.0)) throw InvalidArgumentError("MultivariateT: degrees of freedom must exceed 2");
    return MultivariateT(mu, covariance * ((nu - 2.0) / nu), nu);
}

Eigen::MatrixXd MultivariateT::covariance() const { return scale_ * (nu_ / (nu_ - 2.0)); }

Eigen::MatrixXd MultivariateT::sample(std::size_t n, Rng& rng) const {
    const auto d = mu_.size();
    std::normal_distribution<double> norm(0.0, 1.0);
    std::chi_squared_distribution<double> chi2(nu_);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
    Eigen::VectorXd g(d);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
        for (Eigen::Index j = 0; j < d; ++j) g(j) = norm(rng);
        const double w = std::sqrt(chi2(rng) / nu_);
        out.row(i) = (mu_ + chol_.triangularView<Eigen::Lower>() * g / w).transpose();
    }
    return out;
}

double MultivariateT::log_pdf(const Eigen::VectorXd& y) const {
    const Eigen::VectorXd z = chol_.triangularView<Eigen::Lower>().solve(y - mu_);
    const double p = static_cast<double>(mu_.size());
    return log_norm_ - 0.5 * (nu_ + p) * std::log1p(z.squaredNorm() / nu_);
}

double MultivariateT::pdf(const Eigen::VectorXd& y) const { return std::exp(log_pdf(y)); }

// ---------------------------------------------------------------------------
// variant dispatch

Eigen::MatrixXd sample(const TrueDistribution& dist, std::size_t n, Rng& rng) {
    return std::visit(
        [&](const auto& d) -> Eigen::MatrixXd {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, MultivariateT>) {
                return d.sample(n, rng);
            } else {
                const auto v = d.sample(n, rng);
                return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(n));
            }
        },
        dist);
}

double pdf(const TrueDistribution& dist, std::span<const double> y) {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, MultivariateT>) {
                if (static_cast<Eigen::Index>(y.size()) != d.dimension())
                    throw InvalidArgumentError("pdf: point dimension does not match distribution");
                return d.pdf(Eigen::Map<const Eigen::VectorXd>(y.data(), d.dimension()));
            } else {
                if (y.size() != 1) throw InvalidArgumentError("pdf: univariate density needs one coordinate");
                return d.pdf(y[0]);
            }
        },
        dist);
}

MomentPair analytic_moments(const TrueDistribution& dist) {
    return std::visit(
        [](const auto& d) -> MomentPair {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, MultivariateT>) {
                throw UnsupportedDistributionError(
                    "analytic_moments: scalar moments are undefined for a multivariate t");
            } else {
                return d.moments();
            }
        },
        dist);
}

// ---------------------------------------------------------------------------
// LKJ correlation factors

Eigen::MatrixXd correlation_cholesky_from_cpcs(std::span<const double> cpcs, Eigen::Index dim) {
    if (static_cast<Eigen::Index>(cpcs.size()) != dim * (dim - 1) / 2)
        throw InvalidArgumentError("correlation_cholesky_from_cpcs: wrong number of partial correlations");
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(dim, dim);
    L(0, 0) = 1.0;
    std::size_t k = 0;
    for (Eigen::Index i = 1; i < dim; ++i) {
        double sum_sq = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            L(i, j) = cpcs[k++] * std::sqrt(std::max(0.0, 1.0 - sum_sq));
            sum_sq += L(i, j) * L(i, j);
        }
        L(i, i) = std::sqrt(std::max(0.0, 1.0 - sum_sq));
    }
    return L;
}

Eigen::MatrixXd draw_lkj_correlation_cholesky(Eigen::Index dim, double eta, Rng& rng) {
    if (!(eta > 0.0)) throw InvalidArgumentError("LKJ concentration must be positive");
    std::vector<double> cpcs;
    cpcs.reserve(static_cast<std::size_t>(dim * (dim - 1) / 2));
    // the partial correlation in column j is 2*Beta(a_j, a_j) - 1 with
    // a_j = eta + (dim - 2 - j) / 2
    for (Eigen::Index i = 1; i < dim; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            const double a = eta + 0.5 * static_cast<double>(dim - 2 - j);
            cpcs.push_back(2.0 * draw_beta(a, a, rng) - 1.0);
        }
    }
    return correlation_cholesky_from_cpcs(cpcs, dim);
}

}  // namespace saabench
