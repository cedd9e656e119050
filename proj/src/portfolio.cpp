#include "saabench/portfolio.hpp"

#include <cmath>

#include "saabench/errors.hpp"

namespace saabench {

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& sample) {
    if (sample.rows() < 2) throw InvalidArgumentError("sample_covariance: need at least 2 observations");
    const Eigen::RowVectorXd mean = sample.colwise().mean();
    const Eigen::MatrixXd centered = sample.rowwise() - mean;
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(sample.rows());
    return 0.5 * (cov + cov.transpose());
}

void validate_covariance(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() == 0 || sigma.rows() != sigma.cols())
        throw InvalidArgumentError("covariance must be a non-empty square matrix");
    if (!sigma.allFinite()) throw InvalidArgumentError("covariance has non-finite entries");
    const double scale = std::max(sigma.cwiseAbs().maxCoeff(), 1e-300);
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidArgumentError("covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-12 * scale)
        throw InvalidArgumentError("covariance is not positive semi-definite");
}

MinVarianceResult min_variance_weights_ex(const Eigen::MatrixXd& sigma) {
    const Eigen::Index n = sigma.rows();
    if (n == 0 || sigma.cols() != n)
        throw InvalidArgumentError("min_variance_weights: covariance must be square");
    MinVarianceResult out;
    const double avg_var = sigma.trace() / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma, Eigen::EigenvaluesOnly);
    const double lambda_min = eig.eigenvalues().minCoeff();

    Eigen::MatrixXd work = sigma;
    if (!(lambda_min >= kRidgeTrigger * avg_var) || !(avg_var > 0.0)) {
        const double ridge = avg_var > 0.0 ? kRidgeSize * avg_var : kRidgeSize;
        work.diagonal().array() += ridge;
        out.ridged = true;
    }
    // LDLT has no square roots: scaling sigma by a power of two leaves the
    // weights bit-identical
    Eigen::LDLT<Eigen::MatrixXd> ldlt(work);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw SingularMatrixError("min_variance_weights: covariance singular after ridge");
    const Eigen::VectorXd x = ldlt.solve(Eigen::VectorXd::Ones(n));
    const double total = x.sum();
    if (!x.allFinite() || !(total > 0.0))
        throw SingularMatrixError("min_variance_weights: covariance singular after ridge");
    out.weights = x / total;
    return out;
}

double out_of_sample_variance(const Eigen::VectorXd& w, const Eigen::MatrixXd& true_cov) {
    return std::max(0.0, w.dot(true_cov * w));
}

// ---------------------------------------------------------------------------
// Kernel

double portfolio_kernel_bandwidth(const Eigen::MatrixXd& sample) {
    const Eigen::Index n = sample.rows();
    const Eigen::Index d = sample.cols();
    if (n < 2) throw InvalidArgumentError("kernel bandwidth: need at least 2 observations");
    const Eigen::RowVectorXd mean = sample.colwise().mean();
    const Eigen::RowVectorXd var =
        (sample.rowwise() - mean).colwise().squaredNorm() / static_cast<double>(n - 1);
    const double avg_std = var.cwiseSqrt().mean();
    return avg_std * scott_factor(static_cast<std::size_t>(n), static_cast<std::size_t>(d));
}

Eigen::MatrixXd kernel_covariance_with_bandwidth(const Eigen::MatrixXd& sample, double h) {
    Eigen::MatrixXd cov = sample_covariance(sample);
    cov.diagonal().array() += h * h;
    return cov;
}

Eigen::MatrixXd kernel_covariance(const Eigen::MatrixXd& sample, PortfolioKernel kind) {
    if (kind == PortfolioKernel::Spherical)
        return kernel_covariance_with_bandwidth(sample, portfolio_kernel_bandwidth(sample));
    const double n = static_cast<double>(sample.rows());
    const double d = static_cast<double>(sample.cols());
    const Eigen::MatrixXd cov = sample_covariance(sample);
    return cov + std::pow(n, -2.0 / (d + 4.0)) * (cov * (n / (n - 1.0)));
}

// ---------------------------------------------------------------------------
// t MLE

TFit fit_multivariate_t(const Eigen::MatrixXd& sample, const TFitOptions& options) {
    const Eigen::Index n = sample.rows();
    const Eigen::Index p = sample.cols();
    if (n < 2) throw InvalidArgumentError("t MLE: need at least 2 observations");
    if (!(options.nu > 0.0)) throw InvalidArgumentError("t MLE: nu must be positive");

    TFit fit;
    fit.mu = sample.colwise().mean().transpose();
    fit.scale = sample_covariance(sample);
    const double nu = options.nu;
    const double pd = static_cast<double>(p);
    Eigen::VectorXd w(n);
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        Eigen::LLT<Eigen::MatrixXd> llt(fit.scale);
        if (llt.info() != Eigen::Success)
            throw EstimationFailedError("t MLE: scale matrix lost positive definiteness");
        Eigen::MatrixXd centered = (sample.rowwise() - fit.mu.transpose()).transpose();
        llt.matrixL().solveInPlace(centered);
        const Eigen::VectorXd d2 = centered.colwise().squaredNorm().transpose();
        w = (nu + pd) / (nu + d2.array());

        const Eigen::VectorXd mu_new = (sample.transpose() * w) / w.sum();
        const Eigen::MatrixXd c = sample.rowwise() - mu_new.transpose();
        Eigen::MatrixXd scale_new = (c.transpose() * w.asDiagonal() * c) / static_cast<double>(n);
        scale_new = 0.5 * (scale_new + scale_new.transpose());

        const double ds = (scale_new - fit.scale).norm();
        const double dm = (mu_new - fit.mu).norm();
        const double ref = scale_new.norm();
        fit.mu = mu_new;
        fit.scale = scale_new;
        fit.iterations = it;
        if (ds <= options.tolerance * ref && dm <= options.tolerance * (mu_new.norm() + std::sqrt(scale_new.trace())))
            return fit;
    }
    throw EstimationFailedError("t MLE: EM did not converge");
}

// ---------------------------------------------------------------------------
// Bagging

BaggedWeights bagged_weights(const Eigen::MatrixXd& sample, const BaggingSpec& spec, Rng& rng) {
    const auto n = static_cast<std::size_t>(sample.rows());
    if (n == 0) throw EmptySampleError("bagged_weights: sample is empty");
    if (spec.replicates == 0) throw InvalidArgumentError("bagging: B must be at least 1");
    BaggedWeights out;
    Eigen::VectorXd mean;
    Eigen::MatrixXd resample(0, sample.cols());
    for (std::size_t b = 0; b < spec.replicates; ++b) {
        const auto idx = draw_resample_indices(n, spec, rng);
        resample.resize(static_cast<Eigen::Index>(idx.size()), sample.cols());
        for (std::size_t i = 0; i < idx.size(); ++i)
            resample.row(static_cast<Eigen::Index>(i)) = sample.row(static_cast<Eigen::Index>(idx[i]));
        MinVarianceResult r;
        try {
            r = min_variance_weights_ex(sample_covariance(resample));
        } catch (const SingularMatrixError&) {
            ++out.excluded;
            continue;
        }
        out.ridge_count += r.ridged ? 1 : 0;
        ++out.used;
        if (out.used == 1)
            mean = r.weights;
        else
            mean += (r.weights - mean) / static_cast<double>(out.used);
    }
    if (out.used == 0) throw SingularMatrixError("bagged_weights: every resample was singular");
    out.weights = mean;
    return out;
}

// ---------------------------------------------------------------------------
// Dispatch

Eigen::MatrixXd method_covariance(const Eigen::MatrixXd& sample, MethodKind method,
                                  const PortfolioMethodSettings& settings, Rng& rng) {
    switch (method) {
        case MethodKind::Saa:
            return sample_covariance(sample);
        case MethodKind::Kernel:
            return kernel_covariance(sample, settings.kernel);
        case MethodKind::Mle:
            return fit_multivariate_t(sample, settings.t_fit).covariance(settings.t_fit.nu);
        case MethodKind::Bayes: {
            PortfolioPrior prior = settings.prior;
            prior.n_assets = sample.cols();
            const auto draws = posterior_portfolio(sample, prior, settings.chain, rng);
            if (settings.mc_predictive) {
                const Eigen::MatrixXd y =
                    sample_predictive_portfolio(draws, prior.nu, settings.predictive_draws, rng);
                return sample_covariance(y);
            }
            return predictive_covariance(draws, prior.nu);
        }
        case MethodKind::Bagging:
            break;
    }
    throw InvalidArgumentError("method_covariance: bagging averages weights, not covariances");
}

PortfolioDecision portfolio_decision(const Eigen::MatrixXd& sample, MethodKind method,
                                     const PortfolioMethodSettings& settings, Rng& rng) {
    PortfolioDecision out;
    if (method == MethodKind::Bagging) {
        auto bag = bagged_weights(sample, settings.bagging, rng);
        out.weights = std::move(bag.weights);
        out.ridge_count = bag.ridge_count;
        out.excluded_resamples = bag.excluded;
        return out;
    }
    const auto r = min_variance_weights_ex(method_covariance(sample, method, settings, rng));
    out.weights = r.weights;
    out.ridge_count = r.ridged ? 1 : 0;
    return out;
}

// ---------------------------------------------------------------------------
// True covariances

Eigen::MatrixXd generate_true_covariance(Rng& rng, Eigen::Index dim) {
    const Eigen::MatrixXd Lc = draw_lkj_correlation_cholesky(dim, 2.0, rng);
    std::uniform_real_distribution<double> vol(0.02, 0.06);
    Eigen::VectorXd s(dim);
    for (Eigen::Index i = 0; i < dim; ++i) s(i) = vol(rng);
    const Eigen::MatrixXd corr = Lc * Lc.transpose();
    Eigen::MatrixXd cov = s.asDiagonal() * corr * s.asDiagonal();
    return 0.5 * (cov + cov.transpose());
}

// Output of generate_true_covariance(make_stream(20200214, id, Evaluation)),
// ids 1..5, frozen so the benchmark does not depend on the sampler.
const std::vector<Eigen::MatrixXd>& builtin_covariances() {
    static const std::vector<Eigen::MatrixXd> covs = [] {
        constexpr double values[5][25] = {
        {
            0.00057280152271004046, 0.00020389270212416022, -0.00064017068964117318, 0.00066913533685190939, -0.0003988059376325556,
            0.00020389270212416022, 0.0021590870893815994, -0.0009564858491416696, 0.00019647893875174001, -0.00054197200541742448,
            -0.00064017068964117318, -0.0009564858491416696, 0.0025284506159720384, -0.00099726570788226279, 0.0013012011193183092,
            0.00066913533685190939, 0.00019647893875174001, -0.00099726570788226279, 0.0017296775926632772, -0.0005208895227320333,
            -0.0003988059376325556, -0.00054197200541742448, 0.0013012011193183092, -0.0005208895227320333, 0.0016888914487495209,
        },
        {
            0.002044631134210747, -0.00024807378706374428, 0.001101663281689951, -0.00059306011026430264, 0.00053565678758907211,
            -0.00024807378706374428, 0.0012853350601219394, -0.0010056146183369766, 0.0005642086014018327, 0.00053427588802737349,
            0.001101663281689951, -0.0010056146183369766, 0.00213671195642683, -0.0011804935510380122, -0.00039599567543828658,
            -0.00059306011026430264, 0.0005642086014018327, -0.0011804935510380122, 0.0022955276581272345, 0.00026113659474541977,
            0.00053565678758907211, 0.00053427588802737349, -0.00039599567543828658, 0.00026113659474541977, 0.0018564004543113264,
        },
        {
            0.00048631828579944158, 6.8120744163739533e-05, -0.00029162941363140729, -0.00041585655423707923, 0.00047321480149876695,
            6.8120744163739533e-05, 0.00044512412433070077, 0.00020140855822423765, -3.3081695950222856e-05, 0.00028464465330330405,
            -0.00029162941363140729, 0.00020140855822423765, 0.0011940738640278893, -0.00032050856903394052, -6.6899257875879082e-05,
            -0.00041585655423707923, -3.3081695950222856e-05, -0.00032050856903394052, 0.0029795186021517707, -0.00065856927192552758,
            0.00047321480149876695, 0.00028464465330330405, -6.6899257875879082e-05, -0.00065856927192552758, 0.0012722839856550957,
        },
        {
            0.0018584158148203245, 0.00014745686150315247, -0.00065004274741668527, -8.7843570623718774e-05, -0.00051561433198606663,
            0.00014745686150315247, 0.00061065296350547012, -2.9934969461004728e-05, -0.00040649619293623427, -0.00039921858011498986,
            -0.00065004274741668527, -2.9934969461004728e-05, 0.0025988971785664674, -0.00034241014302322122, 0.00067093899731965573,
            -8.7843570623718774e-05, -0.00040649619293623427, -0.00034241014302322122, 0.00077042788816051146, 0.00028717172791910923,
            -0.00051561433198606663, -0.00039921858011498986, 0.00067093899731965573, 0.00028717172791910923, 0.00057758423020910028,
        },
        {
            0.003303037947563061, 0.00073576559526638511, 0.0010492294473899411, -0.0015136253489538417, 4.7290918158221283e-05,
            0.00073576559526638511, 0.00064161461819483895, -0.00065559869244473054, -0.00015173552217666417, 1.1922611298105277e-05,
            0.0010492294473899411, -0.00065559869244473054, 0.0032341289884784195, -0.0010066794608258284, 0.00021705587719523346,
            -0.0015136253489538417, -0.00015173552217666417, -0.0010066794608258284, 0.0022612730238862661, -0.0016194589928711614,
            4.7290918158221283e-05, 1.1922611298105277e-05, 0.00021705587719523346, -0.0016194589928711614, 0.002839176001786133,
        },
        };
        std::vector<Eigen::MatrixXd> v;
        for (const auto& m : values)
            v.push_back(Eigen::Map<const Eigen::Matrix<double, 5, 5, Eigen::RowMajor>>(m));
        return v;
    }();
    return covs;
}

}  // namespace saabench
