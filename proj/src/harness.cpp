#include "saabench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "saabench/bayes.hpp"
#include "saabench/errors.hpp"
#include "saabench/estimators.hpp"
#include "saabench/portfolio.hpp"
#include "saabench/quadratic.hpp"

#ifndef SAABENCH_VERSION
#define SAABENCH_VERSION "0.0.0"
#endif

namespace saabench {

std::string library_version() { return SAABENCH_VERSION; }

PairedImprovement paired_improvement(std::span<const double> costs_saa, std::span<const double> costs_m) {
    if (costs_saa.size() != costs_m.size())
        throw InvalidArgumentError(fmt::format("paired_improvement: length mismatch ({} vs {})",
                                               costs_saa.size(), costs_m.size()));
    const std::size_t k = costs_saa.size();
    if (k < 2) throw InvalidArgumentError("paired_improvement: need at least 2 pairs");
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += costs_saa[i] - costs_m[i];
    const double mean = sum / static_cast<double>(k);
    double ss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double d = (costs_saa[i] - costs_m[i]) - mean;
        ss += d * d;
    }
    const double se = std::sqrt(ss / static_cast<double>(k - 1)) / std::sqrt(static_cast<double>(k));
    return {mean, mean - kCiMultiplier * se, mean + kCiMultiplier * se};
}

std::size_t resolve_workers(std::size_t requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

TrueDistribution make_distribution(const DistributionEntry& entry) {
    return std::visit(
        [](const auto& p) -> TrueDistribution {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, BetaParams>)
                return ScaledBeta(p.alpha, p.beta);
            else
                return GaussianMixture2(p.mu1, p.mu2, p.sigma1, p.sigma2, p.rho);
        },
        entry.params);
}

namespace {

// Slot 0 is always SAA, the baseline every other method is paired with.
std::vector<MethodKind> method_slots(const ExperimentConfig& cfg) {
    std::vector<MethodKind> slots{MethodKind::Saa};
    for (auto m : cfg.methods)
        if (m != MethodKind::Saa) slots.push_back(m);
    return slots;
}

std::size_t slot_of(const std::vector<MethodKind>& slots, MethodKind m) {
    return static_cast<std::size_t>(std::find(slots.begin(), slots.end(), m) - slots.begin());
}

struct Task {
    std::size_t dist_index;
    std::size_t n;
    std::size_t k;
};

struct TaskOutput {
    std::vector<double> costs;  ///< [slot * problems + problem]
    std::vector<char> failed;   ///< per slot
    std::size_t ridge_events = 0;
    std::size_t excluded_resamples = 0;
    std::size_t chain_warnings = 0;
};

std::uint64_t task_index(int dist_id, std::size_t n, std::size_t k) {
    return pack_index(static_cast<std::uint64_t>(dist_id), n, k);
}

Rng method_stream(const ExperimentConfig& cfg, std::uint64_t index, MethodKind m, StreamRole role) {
    return make_stream(cfg.master_seed, index, role, static_cast<std::uint64_t>(m));
}

MomentPair moments_of(const Eigen::MatrixXd& y) {
    return sample_moments(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
}

// ---------------------------------------------------------------------------
// Quadratic

class QuadraticRunner {
public:
    explicit QuadraticRunner(const ExperimentConfig& cfg) : cfg_(cfg), slots_(method_slots(cfg)) {
        for (int id : cfg.cost_ids) costs_.push_back(cfg.cost(id).cost);
        for (int id : cfg.distribution_ids) {
            dists_.push_back(make_distribution(cfg.distribution(id)));
            if (cfg.evaluation == EvaluationMode::Exact) {
                truth_.push_back(analytic_moments(dists_.back()));
            } else {
                // one evaluation sample per distribution, shared by every
                // replication and method
                Rng rng = make_stream(cfg.master_seed, task_index(id, 0, 0), StreamRole::Evaluation);
                truth_.push_back(moments_of(sample(dists_.back(), cfg.eval_size, rng)));
            }
        }
    }

    std::size_t problems() const { return costs_.size(); }
    const std::vector<MethodKind>& slots() const { return slots_; }

    TaskOutput run(const Task& t) const {
        const int dist_id = cfg_.distribution_ids[t.dist_index];
        const TrueDistribution& dist = dists_[t.dist_index];
        const MomentPair& truth = truth_[t.dist_index];
        const std::uint64_t index = task_index(dist_id, t.n, t.k);
        Rng train = make_stream(cfg_.master_seed, index, StreamRole::TrainingSample);
        const Eigen::MatrixXd y = sample(dist, t.n, train);
        const std::span<const double> s(y.data(), t.n);
        const bool is_beta = std::holds_alternative<ScaledBeta>(dist);

        TaskOutput out;
        out.costs.assign(slots_.size() * costs_.size(), std::numeric_limits<double>::quiet_NaN());
        out.failed.assign(slots_.size(), 0);
        for (std::size_t slot = 0; slot < slots_.size(); ++slot) {
            const MethodKind m = slots_[slot];
            try {
                std::vector<double> x(costs_.size());
                if (m == MethodKind::Bagging) {
                    Rng rng = method_stream(cfg_, index, m, StreamRole::Bootstrap);
                    const auto bm = bootstrap_moments(s, cfg_.bagging, rng);
                    for (std::size_t c = 0; c < costs_.size(); ++c)
                        x[c] = bag_decision_from_moments(bm, costs_[c], cfg_.box);
                } else {
                    const MomentPair mom = method_moments(m, s, is_beta, index, out);
                    for (std::size_t c = 0; c < costs_.size(); ++c)
                        x[c] = saa_minimize(costs_[c], mom, cfg_.box);
                }
                for (std::size_t c = 0; c < costs_.size(); ++c)
                    out.costs[slot * costs_.size() + c] = expected_cost(costs_[c], x[c], truth);
            } catch (const Error&) {
                out.failed[slot] = 1;
            }
        }
        return out;
    }

private:
    MomentPair method_moments(MethodKind m, std::span<const double> s, bool is_beta, std::uint64_t index,
                              TaskOutput& out) const {
        const bool mc = cfg_.mc_predictive;
        switch (m) {
            case MethodKind::Saa:
                return sample_moments(s);
            case MethodKind::Kernel: {
                const double h = kernel_bandwidth(s, cfg_.kernel);
                if (!mc) return kernel_moments(s, h);
                Rng rng = method_stream(cfg_, index, m, StreamRole::Predictive);
                return sample_moments(sample_kernel_density(s, h, cfg_.predictive_draws, rng));
            }
            case MethodKind::Mle: {
                const MleFamily family{is_beta ? MleFamilyKind::ScaledBeta : MleFamilyKind::GaussianMixture2,
                                       cfg_.mle};
                const auto fit = mle_fit(s, family);
                if (!mc) return std::visit([](const auto& d) { return d.moments(); }, fit);
                Rng rng = method_stream(cfg_, index, m, StreamRole::Predictive);
                return std::visit(
                    [&](const auto& d) { return sample_moments(d.sample(cfg_.predictive_draws, rng)); }, fit);
            }
            case MethodKind::Bayes: {
                Rng rng = method_stream(cfg_, index, m, StreamRole::Mcmc);
                const PosteriorDraws draws = is_beta
                                                 ? posterior_beta(s, cfg_.beta_prior, cfg_.chain, rng)
                                                 : posterior_mixture(s, cfg_.mixture_prior, cfg_.chain, rng);
                out.chain_warnings += draws.warnings.empty() ? 0 : 1;
                if (!mc) return predictive_moments_1d(draws);
                Rng prng = method_stream(cfg_, index, m, StreamRole::Predictive);
                return sample_moments(sample_predictive_1d(draws, cfg_.predictive_draws, prng));
            }
            case MethodKind::Bagging:
                break;
        }
        throw InvalidArgumentError("bagging has no single moment pair");
    }

    const ExperimentConfig& cfg_;
    std::vector<MethodKind> slots_;
    std::vector<QuadraticCost> costs_;
    std::vector<TrueDistribution> dists_;
    std::vector<MomentPair> truth_;
};

// ---------------------------------------------------------------------------
// Portfolio

class PortfolioRunner {
public:
    explicit PortfolioRunner(const ExperimentConfig& cfg) : cfg_(cfg), slots_(method_slots(cfg)) {
        settings_.bagging = cfg.bagging;
        settings_.kernel = cfg.portfolio_kernel;
        settings_.t_fit = cfg.t_fit;
        settings_.prior = cfg.portfolio_prior;
        settings_.chain = cfg.chain;
        settings_.mc_predictive = cfg.mc_predictive;
        settings_.predictive_draws = cfg.predictive_draws;
        for (int id : cfg.distribution_ids) {
            const Eigen::MatrixXd sigma = cfg.covariance(id).matrix();
            truths_.push_back(MultivariateT::with_covariance(Eigen::VectorXd::Zero(sigma.rows()), sigma, cfg.true_nu));
            if (cfg.evaluation == EvaluationMode::Exact) {
                eval_.push_back(sigma);
            } else {
                // E[(w'z)^2] over a shared evaluation sample
                Rng rng = make_stream(cfg.master_seed, task_index(id, 0, 0), StreamRole::Evaluation);
                const Eigen::MatrixXd z = truths_.back().sample(cfg.eval_size, rng);
                eval_.push_back((z.transpose() * z) / static_cast<double>(cfg.eval_size));
            }
        }
    }

    std::size_t problems() const { return 1; }
    const std::vector<MethodKind>& slots() const { return slots_; }

    TaskOutput run(const Task& t) const {
        const int dist_id = cfg_.distribution_ids[t.dist_index];
        const std::uint64_t index = task_index(dist_id, t.n, t.k);
        Rng train = make_stream(cfg_.master_seed, index, StreamRole::TrainingSample);
        const Eigen::MatrixXd y = truths_[t.dist_index].sample(t.n, train);

        TaskOutput out;
        out.costs.assign(slots_.size(), std::numeric_limits<double>::quiet_NaN());
        out.failed.assign(slots_.size(), 0);
        for (std::size_t slot = 0; slot < slots_.size(); ++slot) {
            const MethodKind m = slots_[slot];
            const StreamRole role = m == MethodKind::Bagging ? StreamRole::Bootstrap : StreamRole::Mcmc;
            Rng rng = method_stream(cfg_, index, m, role);
            try {
                const PortfolioDecision d = portfolio_decision(y, m, settings_, rng);
                out.costs[slot] = out_of_sample_variance(d.weights, eval_[t.dist_index]);
                out.ridge_events += d.ridge_count;
                out.excluded_resamples += d.excluded_resamples;
            } catch (const Error&) {
                out.failed[slot] = 1;
            }
        }
        return out;
    }

private:
    const ExperimentConfig& cfg_;
    std::vector<MethodKind> slots_;
    PortfolioMethodSettings settings_;
    std::vector<MultivariateT> truths_;
    std::vector<Eigen::MatrixXd> eval_;
};

// ---------------------------------------------------------------------------
// Pool

template <typename Runner>
std::vector<TaskOutput> run_tasks(const Runner& runner, const std::vector<Task>& tasks, std::size_t workers,
                                  const ProgressFn& progress) {
    std::vector<TaskOutput> results(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::mutex mu;
    std::size_t done = 0;
    std::exception_ptr error;

    auto work = [&] {
        while (!abort.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                results[i] = runner.run(tasks[i]);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!error) error = std::current_exception();
                abort = true;
                return;
            }
            if (progress) {
                std::lock_guard lock(mu);
                progress(++done, tasks.size());
            }
        }
    };

    workers = std::min(workers, std::max<std::size_t>(tasks.size(), 1));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
    return results;
}

template <typename Runner>
ExperimentResult fold(const ExperimentConfig& cfg, const Runner& runner, const std::vector<Task>& tasks,
                      const std::vector<TaskOutput>& results) {
    ExperimentResult out;
    const auto& slots = runner.slots();
    const std::size_t problems = runner.problems();
    const bool quad = cfg.family == Family::Quadratic;
    const std::size_t K = cfg.replications;

    out.counters.tasks = tasks.size();
    for (auto m : slots) out.counters.failures[to_string(m)] = 0;
    for (const auto& r : results) {
        out.counters.ridge_events += r.ridge_events;
        out.counters.excluded_resamples += r.excluded_resamples;
        out.counters.chain_warnings += r.chain_warnings;
        for (std::size_t s = 0; s < slots.size(); ++s) out.counters.failures[to_string(slots[s])] += r.failed[s];
    }

    // tasks are laid out (distribution, N, k) with k fastest
    std::size_t block = 0;
    for (std::size_t d = 0; d < cfg.distribution_ids.size(); ++d) {
        for (std::size_t ni = 0; ni < cfg.sample_sizes.size(); ++ni, ++block) {
            const TaskOutput* cell = &results[block * K];
            const std::size_t n_rows = quad ? problems + 1 : 1;
            for (std::size_t p = 0; p < n_rows; ++p) {
                const bool aggregate = quad && p == problems;
                auto cost_at = [&](const TaskOutput& r, std::size_t slot) {
                    if (!aggregate) return r.costs[slot * problems + p];
                    double sum = 0.0;
                    for (std::size_t c = 0; c < problems; ++c) sum += r.costs[slot * problems + c];
                    return sum / static_cast<double>(problems);
                };
                for (auto m : cfg.methods) {
                    const std::size_t slot = slot_of(slots, m);
                    std::vector<double> saa, mc;
                    for (std::size_t k = 0; k < K; ++k) {
                        const TaskOutput& r = cell[k];
                        if (r.failed[0] || r.failed[slot]) continue;
                        saa.push_back(cost_at(r, 0));
                        mc.push_back(cost_at(r, slot));
                    }
                    ImprovementRecord rec;
                    rec.family = cfg.family;
                    rec.problem_id = quad ? (aggregate ? "mean" : std::to_string(cfg.cost_ids[p])) : "minvar";
                    rec.distribution_id = cfg.distribution_ids[d];
                    rec.method = m;
                    rec.n = cfg.sample_sizes[ni];
                    rec.k = saa.size();
                    rec.excluded = K - saa.size();
                    if (saa.size() >= 2) {
                        const auto pi = paired_improvement(saa, mc);
                        rec.mean_improvement = pi.mean;
                        rec.ci_low = pi.ci_low;
                        rec.ci_high = pi.ci_high;
                        double cs = 0.0, cm = 0.0;
                        for (std::size_t i = 0; i < saa.size(); ++i) {
                            cs += saa[i];
                            cm += mc[i];
                        }
                        rec.mean_cost_saa = cs / static_cast<double>(saa.size());
                        rec.mean_cost_method = cm / static_cast<double>(saa.size());
                    } else {
                        const double nan = std::numeric_limits<double>::quiet_NaN();
                        rec.mean_improvement = rec.ci_low = rec.ci_high = nan;
                        rec.mean_cost_saa = rec.mean_cost_method = nan;
                    }
                    out.records.push_back(std::move(rec));
                }
            }
        }
    }
    return out;
}

template <typename Runner>
ExperimentResult run_family(const ExperimentConfig& cfg, const ProgressFn& progress) {
    const Runner runner(cfg);
    std::vector<Task> tasks;
    tasks.reserve(cfg.distribution_ids.size() * cfg.sample_sizes.size() * cfg.replications);
    for (std::size_t d = 0; d < cfg.distribution_ids.size(); ++d)
        for (auto n : cfg.sample_sizes)
            for (std::size_t k = 0; k < cfg.replications; ++k) tasks.push_back({d, n, k});
    const auto results = run_tasks(runner, tasks, resolve_workers(cfg.workers), progress);
    return fold(cfg, runner, tasks, results);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
    if (auto errors = validate_config(cfg); !errors.empty()) throw ConfigError(std::move(errors));
    if (cfg.family == Family::Quadratic) return run_family<QuadraticRunner>(cfg, progress);
    return run_family<PortfolioRunner>(cfg, progress);
}

// ---------------------------------------------------------------------------
// Output

std::string format_csv(std::span<const ImprovementRecord> records) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& r : records)
        out += fmt::format("{},{},{},{},{},{},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{}\n", to_string(r.family),
                           r.problem_id, r.distribution_id, to_string(r.method), r.n, r.k, r.mean_improvement,
                           r.ci_low, r.ci_high, r.mean_cost_saa, r.mean_cost_method, r.excluded);
    return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw Error(fmt::format("cannot create directory '{}': {}", path.parent_path().string(), ec.message()));
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
    f << text;
    f.close();
    if (!f) throw Error(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace

void emit_csv(std::span<const ImprovementRecord> records, const std::filesystem::path& path) {
    if (records.empty()) throw InvalidArgumentError("emit_csv: no records to write");
    write_file(path, format_csv(records));
}

std::string render_plot(std::span<const ImprovementRecord> records, Family family, int distribution_id) {
    const std::string wanted = family == Family::Quadratic ? "mean" : "minvar";
    std::vector<const ImprovementRecord*> rows;
    for (const auto& r : records)
        if (r.family == family && r.distribution_id == distribution_id && r.problem_id == wanted &&
            std::isfinite(r.mean_improvement))
            rows.push_back(&r);
    if (rows.empty()) throw InvalidArgumentError("render_plot: no records for this distribution");

    std::vector<MethodKind> methods;
    std::set<std::size_t> ns;
    double ymin = 0.0, ymax = 0.0;
    for (const auto* r : rows) {
        if (std::find(methods.begin(), methods.end(), r->method) == methods.end()) methods.push_back(r->method);
        ns.insert(r->n);
        ymin = std::min(ymin, r->ci_low);
        ymax = std::max(ymax, r->ci_high);
    }
    if (ymax - ymin <= 0.0) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    const double W = 720, H = 440, left = 80, right = 150, top = 40, bottom = 50;
    const double nmin = static_cast<double>(*ns.begin()), nmax = static_cast<double>(*ns.rbegin());
    auto px = [&](double n) {
        return nmax > nmin ? left + (n - nmin) / (nmax - nmin) * (W - left - right) : (left + W - right) / 2;
    };
    auto py = [&](double v) { return top + (ymax - v) / (ymax - ymin) * (H - top - bottom); };

    static constexpr const char* colors[] = {"#444444", "#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::string s = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{2}\" y=\"22\" font-size=\"14\">{3} distribution {4}: improvement over SAA</text>\n",
        W, H, left, to_string(family), distribution_id);

    s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", left, top, H - bottom);
    s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", left, H - bottom,
                     W - right);
    for (int i = 0; i <= 4; ++i) {
        const double v = ymin + (ymax - ymin) * i / 4.0;
        s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n", left - 6, py(v) + 4, v);
    }
    for (auto n : ns)
        s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", px(double(n)),
                         H - bottom + 18, n);
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">N</text>\n", (left + W - right) / 2,
                     H - 10);
    if (ymin < 0.0 && ymax > 0.0)
        s += fmt::format(
            "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n",
            left, py(0.0), W - right, py(0.0));

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const char* color = colors[static_cast<std::size_t>(methods[mi]) % 5];
        std::vector<const ImprovementRecord*> series;
        for (const auto* r : rows)
            if (r->method == methods[mi]) series.push_back(r);
        std::sort(series.begin(), series.end(), [](auto* a, auto* b) { return a->n < b->n; });
        std::string band, line;
        for (const auto* r : series) band += fmt::format("{:.1f},{:.1f} ", px(double(r->n)), py(r->ci_high));
        for (auto it = series.rbegin(); it != series.rend(); ++it)
            band += fmt::format("{:.1f},{:.1f} ", px(double((*it)->n)), py((*it)->ci_low));
        for (const auto* r : series) line += fmt::format("{:.1f},{:.1f} ", px(double(r->n)), py(r->mean_improvement));
        s += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.18\" stroke=\"none\"/>\n", band, color);
        s += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", line, color);
        const double ly = top + 16.0 * static_cast<double>(mi);
        s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
                         W - right + 15, ly, W - right + 35, color);
        s += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", W - right + 40, ly + 4, to_string(methods[mi]));
    }
    s += "</svg>\n";
    return s;
}

std::vector<std::filesystem::path> emit_plots(std::span<const ImprovementRecord> records,
                                              const std::filesystem::path& dir, const std::string& basename) {
    if (records.empty()) throw InvalidArgumentError("emit_plots: no records to plot");
    std::vector<std::pair<Family, int>> keys;
    for (const auto& r : records) {
        const auto key = std::make_pair(r.family, r.distribution_id);
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    std::vector<std::filesystem::path> written;
    for (const auto& [family, id] : keys) {
        std::string svg;
        try {
            svg = render_plot(records, family, id);
        } catch (const InvalidArgumentError&) {
            continue;  // every record for this distribution was excluded
        }
        const auto path = dir / fmt::format("{}_d{}.svg", basename, id);
        write_file(path, svg);
        written.push_back(path);
    }
    return written;
}

nlohmann::json run_metadata(const ExperimentConfig& cfg, const RunCounters& counters, const std::string& timestamp) {
    nlohmann::json j;
    j["library"] = "saabench";
    j["version"] = library_version();
    j["master_seed"] = cfg.master_seed;
    j["config_hash"] = config_hash(cfg);
    j["family"] = to_string(cfg.family);
    j["replications"] = cfg.replications;
    j["sample_sizes"] = cfg.sample_sizes;
    j["evaluation"] = cfg.evaluation == EvaluationMode::Exact ? "exact" : "monte_carlo";
    if (cfg.evaluation == EvaluationMode::MonteCarlo) j["eval_size"] = cfg.eval_size;
    j["counters"] = {{"tasks", counters.tasks},
                     {"failures", counters.failures},
                     {"ridge_events", counters.ridge_events},
                     {"excluded_resamples", counters.excluded_resamples},
                     {"chain_warnings", counters.chain_warnings}};
    j["conventions"] = {
        {"improvement", "cost(saa) - cost(method), positive favors the method"},
        {"ci", "mean +/- 1.96 * paired standard error"},
        {"ridge", fmt::format("add {:g} * trace/n * I when min eigenvalue < {:g} * trace/n", kRidgeSize, kRidgeTrigger)},
        {"failures", "a failed replication is excluded for the failing method only"}};
    j["config"] = to_json(cfg);
    j["timestamp"] = timestamp;
    return j;
}

}  // namespace saabench
