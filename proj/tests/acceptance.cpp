// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>

#include <fmt/format.h>

#include "oracles.hpp"
#include "saabench/bayes.hpp"
#include "saabench/estimators.hpp"
#include "saabench/harness.hpp"
#include "saabench/portfolio.hpp"
#include "saabench/quadratic.hpp"

using namespace saabench;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::vector<double> draw(const TrueDistribution& d, std::size_t n, Rng& rng) {
    const Eigen::MatrixXd y = sample(d, n, rng);
    return {y.data(), y.data() + y.size()};
}

const ImprovementRecord* find(const std::vector<ImprovementRecord>& recs, const std::string& problem, int dist,
                              MethodKind m, std::size_t n) {
    for (const auto& r : recs)
        if (r.problem_id == problem && r.distribution_id == dist && r.method == m && r.n == n) return &r;
    return nullptr;
}

// 1. closed-form SAA against golden-section search
Outcome closed_form_oracle() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> ua(-1.5, 1.5), ubg(-4.0, 4.0), uy(-1.0, 1.0);
    std::uniform_int_distribution<int> un(5, 50);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const QuadraticCost c{ua(rng), ubg(rng), ubg(rng)};
        std::vector<double> y(static_cast<std::size_t>(un(rng)));
        for (auto& v : y) v = uy(rng);
        const double x = saa_decision(y, c);
        const double ref = oracle::golden_section_min(
            [&](double t) { return oracle::sample_objective(c.alpha, c.beta, c.gamma, y, t); }, -10.0, 10.0, 1e-11);
        worst = std::max(worst, std::abs(x - ref));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.require(worst <= 1e-6, fmt::format("max |dx| = {:.3g}", worst));
    out.require(secs < 5.0, fmt::format("runtime {:.2f}s", secs));
    if (out.pass) out.detail = fmt::format("max |dx| = {:.2g} over 100 instances, {:.3f}s", worst, secs);
    return out;
}

// 2. kernel moment identity and the small-h limit
Outcome kernel_identity() {
    Outcome out;
    Rng rng = make_stream(202, 0, StreamRole::TrainingSample);
    double worst_z = 0.0;
    for (int i = 0; i < 10; ++i) {
        const auto y = draw(GaussianMixture2(-0.5, 0.4, 0.15, 0.3, 0.6), 10 + 4 * static_cast<std::size_t>(i), rng);
        const double h = kernel_bandwidth(y, KernelSpec{});
        const auto km = kernel_moments(y, h);
        Rng kr = make_stream(202, static_cast<std::uint64_t>(i), StreamRole::Predictive);
        const auto z = sample_kernel_density(y, h, 1000000, kr);
        double s1 = 0, s2 = 0, s4 = 0;
        for (double v : z) {
            s1 += v;
            s2 += v * v;
            s4 += v * v * v * v;
        }
        const double n = static_cast<double>(z.size());
        const double m1 = s1 / n, m2 = s2 / n;
        const double se1 = std::sqrt((m2 - m1 * m1) / n);
        const double se2 = std::sqrt((s4 / n - m2 * m2) / n);
        const double z1 = std::abs(m1 - km.m1) / se1, z2 = std::abs(m2 - km.m2) / se2;
        worst_z = std::max({worst_z, z1, z2});
        out.require(z1 <= 4.0 && z2 <= 4.0, fmt::format("sample {}: z = {:.2f}, {:.2f}", i, z1, z2));
        for (const auto& c : builtin_costs()) {
            const double dx = std::abs(kernel_decision(y, c, KernelSpec{FixedBandwidth{1e-8}}) - saa_decision(y, c));
            out.require(dx <= 1e-6, fmt::format("h=1e-8 differs from SAA by {:.3g}", dx));
        }
    }
    if (out.pass) out.detail = fmt::format("worst moment z-score {:.2f} (limit 4); h=1e-8 matches SAA", worst_z);
    return out;
}

// 3. min-variance weights against the null-space QP oracle
Outcome min_variance_oracle() {
    Outcome out;
    std::mt19937_64 rng(303);
    double worst_gap = 0.0, worst_sum = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Eigen::MatrixXd S = oracle::random_spd(rng, 5);
        const Eigen::VectorXd w = min_variance_weights(S);
        const Eigen::VectorXd ref = oracle::null_space_min_variance(S);
        worst_gap = std::max(worst_gap, std::abs(w.dot(S * w) - ref.dot(S * ref)));
        worst_sum = std::max(worst_sum, std::abs(w.sum() - 1.0));
    }
    out.require(worst_gap <= 1e-8, fmt::format("objective gap {:.3g}", worst_gap));
    out.require(worst_sum <= 1e-10, fmt::format("sum error {:.3g}", worst_sum));
    if (out.pass) out.detail = fmt::format("max objective gap {:.2g}, max |sum - 1| {:.2g}", worst_gap, worst_sum);
    return out;
}

// 4. MCMC correctness
Outcome mcmc_correctness() {
    Outcome out;
    const TrueDistribution truths[] = {ScaledBeta(2, 2), ScaledBeta(5, 5), ScaledBeta(2, 5), ScaledBeta(2, 2),
                                       ScaledBeta(2, 5)};
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        Rng rng = make_stream(404, s, StreamRole::TrainingSample);
        const auto y = draw(truths[s], 20, rng);
        Rng mc = make_stream(404, s, StreamRole::Mcmc);
        const auto d = posterior_beta(y, BetaPrior{}, ChainSettings{200000, 5000, 1}, mc);
        const auto ref = oracle::beta_posterior_mean_grid(y, 1.0, 7.0, 200);
        const double da = std::abs(d.draws.col(0).mean() - ref.alpha);
        const double db = std::abs(d.draws.col(1).mean() - ref.beta);
        worst = std::max({worst, da, db});
        out.require(da <= 0.05 && db <= 0.05, fmt::format("beta sample {}: |d alpha| {:.3f}, |d beta| {:.3f}", s, da, db));
    }

    // known-sigma hook against the conjugate normal posterior
    const std::vector<double> y = {0.2, 0.5, -0.1, 0.4, 0.3, 0.9, 0.0, 0.25, -0.3, 0.6};
    MixturePrior prior;
    prior.m = 0.1;
    const double sigma = 0.4;
    Rng mc = make_stream(404, 99, StreamRole::Mcmc);
    const std::size_t draws = 50000;
    const auto d = posterior_mixture(y, prior, ChainSettings{draws, 500, 1}, mc, MixtureChainHooks{false, sigma});
    double sum = 0.0;
    for (double v : y) sum += v;
    const double n = static_cast<double>(y.size());
    const double post_mean = (prior.alpha_prec * *prior.m + sum) / (prior.alpha_prec + n);
    const double post_var = sigma * sigma / (prior.alpha_prec + n);
    const double chain_mean = d.draws.col(1).mean();
    const double z = std::abs(chain_mean - post_mean) / std::sqrt(post_var / static_cast<double>(draws));
    out.require(z <= 3.0, fmt::format("conjugate hook off by {:.2f} standard errors", z));

    // every portfolio draw SPD
    std::size_t checked = 0, bad = 0;
    for (std::size_t c = 0; c < builtin_covariances().size(); ++c) {
        const auto t = MultivariateT::with_covariance(Eigen::VectorXd::Zero(5), builtin_covariances()[c], 3.0);
        Rng rng = make_stream(404, 200 + c, StreamRole::TrainingSample);
        const Eigen::MatrixXd ys = t.sample(50, rng);
        Rng pm = make_stream(404, 200 + c, StreamRole::Mcmc);
        const auto pd = posterior_portfolio(ys, PortfolioPrior{}, ChainSettings{}, pm);
        for (Eigen::Index j = 0; j < pd.draws.rows(); ++j) {
            const auto draw_j = portfolio_draw(pd, j);
            ++checked;
            if (!draw_j.scale.allFinite() || draw_j.scale.llt().info() != Eigen::Success) ++bad;
        }
    }
    out.require(bad == 0, fmt::format("{} of {} portfolio draws not SPD", bad, checked));
    if (out.pass)
        out.detail = fmt::format("beta chain vs grid max diff {:.3f} (limit 0.05); conjugate hook z = {:.2f}; {} portfolio draws SPD",
                                 worst, z, checked);
    return out;
}

// 5. quadratic set: kernel loses, Bayes wins
Outcome quadratic_qualitative() {
    Outcome out;
    ExperimentConfig cfg = default_config(Family::Quadratic);
    cfg.distribution_ids = {1};
    cfg.sample_sizes = {10};
    cfg.replications = 1000;
    const auto res = run_experiment(cfg);
    const auto* kernel = find(res.records, "mean", 1, MethodKind::Kernel, 10);
    const auto* bayes = find(res.records, "mean", 1, MethodKind::Bayes, 10);
    const auto* bag = find(res.records, "mean", 1, MethodKind::Bagging, 10);
    if (!kernel || !bayes || !bag) return {false, "missing records"};
    out.require(kernel->mean_improvement < 0.0 && kernel->ci_high < 0.0,
                fmt::format("kernel {:.4g} [{:.4g}, {:.4g}]", kernel->mean_improvement, kernel->ci_low, kernel->ci_high));
    out.require(bayes->mean_improvement >= kernel->mean_improvement, "bayes below kernel");
    out.require(bayes->mean_improvement >= bag->mean_improvement, "bayes below bagging");
    int kernel_negative = 0;
    for (int c = 1; c <= 10; ++c) {
        const auto* r = find(res.records, std::to_string(c), 1, MethodKind::Kernel, 10);
        kernel_negative += r && r->ci_high < 0.0 ? 1 : 0;
    }
    out.detail = fmt::format(
        "{}cost-averaged improvement: kernel {:.4g} [{:.4g}, {:.4g}], bagging {:.4g}, bayes {:.4g}; kernel significantly "
        "negative on {}/10 costs",
        out.detail.empty() ? "" : out.detail + "; ", kernel->mean_improvement, kernel->ci_low, kernel->ci_high,
        bag->mean_improvement, bayes->mean_improvement, kernel_negative);
    return out;
}

// 6. portfolio set: bagging beats SAA
Outcome portfolio_qualitative() {
    Outcome out;
    ExperimentConfig cfg = default_config(Family::Portfolio);
    cfg.sample_sizes = {50};
    cfg.replications = 500;
    cfg.methods = {MethodKind::Saa, MethodKind::Bagging};
    const auto res = run_experiment(cfg);
    double mean = 0.0, var = 0.0;
    std::string per;
    int positive = 0;
    for (int id : cfg.distribution_ids) {
        const auto* r = find(res.records, "minvar", id, MethodKind::Bagging, 50);
        if (!r) return {false, "missing records"};
        const double se = (r->ci_high - r->ci_low) / (2.0 * kCiMultiplier);
        mean += r->mean_improvement;
        var += se * se;
        positive += r->mean_improvement > 0.0 ? 1 : 0;
        per += fmt::format("{}{:.3g}", per.empty() ? "" : ", ", r->mean_improvement);
    }
    const double k = static_cast<double>(cfg.distribution_ids.size());
    mean /= k;
    const double se = std::sqrt(var) / k;
    const double lo = mean - kCiMultiplier * se, hi = mean + kCiMultiplier * se;
    out.require(mean > 0.0 && lo > 0.0, fmt::format("pooled bagging improvement {:.4g} [{:.4g}, {:.4g}]", mean, lo, hi));
    if (out.pass)
        out.detail = fmt::format("pooled bagging improvement {:.4g} [{:.4g}, {:.4g}]; per covariance: {}; positive on {}/5",
                                 mean, lo, hi, per, positive);
    return out;
}

// Shared by 7 and 8: the full default quadratic experiment.
const std::string& default_quadratic_csv(std::size_t workers) {
    static std::map<std::size_t, std::string> cache;
    auto it = cache.find(workers);
    if (it != cache.end()) return it->second;
    ExperimentConfig cfg = default_config(Family::Quadratic);
    cfg.workers = workers;
    return cache[workers] = format_csv(run_experiment(cfg).records);
}

// 7. degenerate exactness
Outcome degenerate_exactness() {
    Outcome out;
    for (double v : {-0.9, -0.25, 0.0, 0.4, 1.0}) {
        for (std::size_t n : {1u, 2u, 10u, 50u}) {
            const std::vector<double> y(n, v);
            Rng rng = make_stream(707, n, StreamRole::Bootstrap);
            const auto bm = bootstrap_moments(y, BaggingSpec{}, rng);
            for (const auto& c : builtin_costs())
                out.require(bag_decision_from_moments(bm, c) == saa_decision(y, c),
                            fmt::format("bagging != SAA on constant sample {} (N={})", v, n));
        }
    }
    const std::string& csv = default_quadratic_csv(1);
    std::size_t saa_rows = 0;
    std::size_t start = csv.find('\n') + 1;
    while (start < csv.size()) {
        const std::size_t end = csv.find('\n', start);
        const std::string line = csv.substr(start, end - start);
        start = end + 1;
        if (line.find(",saa,") == std::string::npos) continue;
        ++saa_rows;
        // mean_improvement, ci_low, ci_high are columns 7-9
        std::vector<std::string> cols;
        std::size_t p = 0;
        for (std::size_t q; (q = line.find(',', p)) != std::string::npos; p = q + 1) cols.push_back(line.substr(p, q - p));
        cols.push_back(line.substr(p));
        out.require(cols[6] == "0" && cols[7] == "0" && cols[8] == "0", "non-zero SAA row: " + line);
    }
    ExperimentConfig pcfg = default_config(Family::Portfolio);
    pcfg.methods = {MethodKind::Saa};
    std::size_t portfolio_rows = 0;
    for (const auto& r : run_experiment(pcfg).records) {
        ++portfolio_rows;
        out.require(r.mean_improvement == 0.0 && r.ci_low == 0.0 && r.ci_high == 0.0, "non-zero portfolio SAA row");
    }
    out.require(saa_rows == 5 * 3 * 11, fmt::format("expected 165 SAA rows, found {}", saa_rows));
    if (out.pass)
        out.detail = fmt::format(
            "bagging == SAA bit-for-bit on 20 constant samples x 10 costs; {} quadratic and {} portfolio SAA rows are 0 "
            "with zero-width CI",
            saa_rows, portfolio_rows);
    return out;
}

// 8. determinism across worker counts
Outcome determinism() {
    Outcome out;
    const std::string& one = default_quadratic_csv(1);
    const std::string& eight = default_quadratic_csv(8);
    out.require(one == eight, "CSV differs between 1 and 8 workers");
    out.require(!one.empty() && std::count(one.begin(), one.end(), '\n') == 1 + 5 * 3 * 11 * 5, "unexpected row count");
    if (out.pass) out.detail = fmt::format("{} bytes identical under 1 and 8 workers", one.size());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"closed-form SAA matches golden-section search", closed_form_oracle},
        {"kernel moment identity and small-h limit", kernel_identity},
        {"min-variance weights match the null-space QP", min_variance_oracle},
        {"MCMC correctness", mcmc_correctness},
        {"quadratic set: kernel loses, Bayes wins", quadratic_qualitative},
        {"portfolio set: bagging beats SAA", portfolio_qualitative},
        {"degenerate exactness", degenerate_exactness},
        {"determinism under 1 and 8 workers", determinism},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %d: %s (%s) [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
