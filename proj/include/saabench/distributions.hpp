#pragma once

#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "saabench/rng.hpp"

namespace saabench {

/// First two raw moments of a scalar random variable. The quadratic cost
/// family depends on the distribution only through these.
struct MomentPair {
    double m1 = 0.0;  ///< E[y]
    double m2 = 0.0;  ///< E[y^2]

    double variance() const { return m2 - m1 * m1; }
    bool operator==(const MomentPair&) const = default;
};

/// Beta(alpha, beta) mapped affinely from [0,1] onto [-1,1].
class ScaledBeta {
public:
    ScaledBeta(double alpha, double beta);

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

    std::vector<double> sample(std::size_t n, Rng& rng) const;
    double draw(Rng& rng) const;
    double pdf(double y) const;
    /// -inf outside the open support.
    double log_pdf(double y) const;
    MomentPair moments() const;

private:
    double alpha_;
    double beta_;
    double log_norm_;  // log B(alpha, beta) + log 2
};

/// Two-component Gaussian mixture. `rho` is the weight of the first component.
class GaussianMixture2 {
public:
    GaussianMixture2(double mu1, double mu2, double sigma1, double sigma2, double rho);

    double mu1() const { return mu1_; }
    double mu2() const { return mu2_; }
    double sigma1() const { return sigma1_; }
    double sigma2() const { return sigma2_; }
    double rho() const { return rho_; }

    std::vector<double> sample(std::size_t n, Rng& rng) const;
    double draw(Rng& rng) const;
    double pdf(double y) const;
    double log_pdf(double y) const;
    MomentPair moments() const;

private:
    double mu1_, mu2_, sigma1_, sigma2_, rho_;
};

/// Multivariate Student t with location `mu`, scale matrix `scale` and `nu` > 2
/// degrees of freedom. Covariance is scale * nu / (nu - 2).
class MultivariateT {
public:
    MultivariateT(Eigen::VectorXd mu, Eigen::MatrixXd scale, double nu);

    /// t distribution whose covariance (not scale) equals `covariance`.
    static MultivariateT with_covariance(const Eigen::VectorXd& mu,
                                         const Eigen::MatrixXd& covariance, double nu);

    const Eigen::VectorXd& mu() const { return mu_; }
    const Eigen::MatrixXd& scale() const { return scale_; }
    const Eigen::MatrixXd& scale_cholesky() const { return chol_; }
    double nu() const { return nu_; }
    Eigen::Index dimension() const { return mu_.size(); }
    Eigen::MatrixXd covariance() const;

    /// n x d matrix, one draw per row.
    Eigen::MatrixXd sample(std::size_t n, Rng& rng) const;
    double log_pdf(const Eigen::VectorXd& y) const;
    double pdf(const Eigen::VectorXd& y) const;

private:
    Eigen::VectorXd mu_;
    Eigen::MatrixXd scale_;
    Eigen::MatrixXd chol_;
    double nu_;
    double log_norm_;
};

using TrueDistribution = std::variant<ScaledBeta, GaussianMixture2, MultivariateT>;

/// n draws as an n x d matrix (d = 1 for the univariate families).
Eigen::MatrixXd sample(const TrueDistribution& dist, std::size_t n, Rng& rng);

/// Density at a point; zero outside the support.
double pdf(const TrueDistribution& dist, std::span<const double> y);

/// Closed-form first and second raw moments. Throws
/// UnsupportedDistributionError for MultivariateT.
MomentPair analytic_moments(const TrueDistribution& dist);

/// Normal density N(y; mu, sigma^2).
double normal_pdf(double y, double mu, double sigma);

/// Draws a Beta(a, b) variate from two gamma variates.
double draw_beta(double a, double b, Rng& rng);

/// Cholesky factor of a random correlation matrix from LKJ(eta), generated
/// from independent canonical partial correlations.
Eigen::MatrixXd draw_lkj_correlation_cholesky(Eigen::Index dim, double eta, Rng& rng);

/// Lower Cholesky factor of a correlation matrix built from canonical partial
/// correlations, listed row by row over the strict lower triangle.
Eigen::MatrixXd correlation_cholesky_from_cpcs(std::span<const double> cpcs, Eigen::Index dim);

}  // namespace saabench
