#include "saabench/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

namespace saabench {

std::string to_string(Family family) {
    return family == Family::Quadratic ? "quadratic" : "portfolio";
}

Eigen::MatrixXd CovarianceEntry::matrix() const {
    Eigen::MatrixXd m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = values.at(static_cast<std::size_t>(i * dim + j));
    return m;
}

namespace {

template <typename Entry>
const Entry& find_entry(const std::vector<Entry>& entries, int id, const char* what) {
    auto it = std::find_if(entries.begin(), entries.end(), [id](const Entry& e) { return e.id == id; });
    if (it == entries.end()) throw InvalidArgumentError(fmt::format("unknown {} id {}", what, id));
    return *it;
}

}  // namespace

const CostEntry& ExperimentConfig::cost(int id) const { return find_entry(costs, id, "cost"); }
const DistributionEntry& ExperimentConfig::distribution(int id) const {
    return find_entry(distributions, id, "distribution");
}
const CovarianceEntry& ExperimentConfig::covariance(int id) const {
    return find_entry(covariances, id, "covariance");
}

std::vector<CostEntry> default_cost_entries() {
    std::vector<CostEntry> out;
    int id = 1;
    for (const auto& c : builtin_costs()) out.push_back({id++, c});
    return out;
}

std::vector<DistributionEntry> default_distribution_entries() {
    return {
        {1, BetaParams{2.0, 2.0}},
        {2, BetaParams{5.0, 5.0}},
        {3, BetaParams{2.0, 5.0}},
        {4, MixtureParams{-0.5, 0.4, 0.15, 0.3, 0.6}},
        {5, MixtureParams{-0.1, 0.4, 0.3, 0.1, 0.7}},
    };
}

std::vector<CovarianceEntry> default_covariance_entries() {
    std::vector<CovarianceEntry> out;
    int id = 1;
    for (const auto& m : builtin_covariances()) {
        CovarianceEntry e;
        e.id = id++;
        e.dim = static_cast<int>(m.rows());
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) e.values.push_back(m(i, j));
        out.push_back(std::move(e));
    }
    return out;
}

ExperimentConfig default_config(Family family) {
    ExperimentConfig cfg;
    cfg.family = family;
    cfg.methods = {MethodKind::Saa, MethodKind::Bagging, MethodKind::Kernel, MethodKind::Mle,
                   MethodKind::Bayes};
    cfg.distribution_ids = {1, 2, 3, 4, 5};
    cfg.costs = default_cost_entries();
    cfg.distributions = default_distribution_entries();
    cfg.covariances = default_covariance_entries();
    cfg.basename = to_string(family);
    if (family == Family::Quadratic) {
        cfg.cost_ids = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        cfg.sample_sizes = {10, 20, 50};
        cfg.replications = 1000;
    } else {
        cfg.sample_sizes = {30, 50, 100, 150, 200};
        cfg.replications = 500;
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Errors

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
    std::string s = "invalid configuration:";
    for (const auto& e : errors) s += "\n  " + e;
    return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : Error(join_errors(errors)), errors_(std::move(errors)) {}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> err;
    auto need = [&](bool ok, std::string msg) {
        if (!ok) err.push_back(std::move(msg));
    };
    const bool quad = cfg.family == Family::Quadratic;

    need(cfg.replications >= 2, "replications must be >= 2");
    need(cfg.eval_size >= 1, "eval_size must be >= 1");
    need(!cfg.sample_sizes.empty(), "sample_sizes must not be empty");
    for (auto n : cfg.sample_sizes) need(n >= 2, fmt::format("sample_sizes: N = {} is below 2", n));
    need(!cfg.methods.empty(), "methods must not be empty");
    need(!cfg.distribution_ids.empty(), "distributions must not be empty");
    need(!cfg.basename.empty(), "output.basename must not be empty");
    need(cfg.box.lo < cfg.box.hi, "decision_box.lo must be < decision_box.hi");
    need(cfg.bagging.replicates >= 1, "bagging.replicates must be >= 1");
    if (!cfg.bagging.with_replacement) {
        need(cfg.bagging.resample_size >= 2, "bagging.resample_size must be >= 2 when subsampling");
        for (auto n : cfg.sample_sizes)
            need(cfg.bagging.resample_size <= n,
                 fmt::format("bagging.resample_size exceeds sample size {}", n));
    }
    if (const auto* f = std::get_if<FixedBandwidth>(&cfg.kernel.rule))
        need(f->h >= 0.0 && std::isfinite(f->h), "kernel.bandwidth must be >= 0");
    need(cfg.predictive_draws >= 1, "predictive_draws must be >= 1");

    need(cfg.mle.beta_min_shape >= 0.0, "mle.beta_min_shape must be >= 0");
    need(cfg.mle.sigma_floor > 0.0, "mle.sigma_floor must be > 0");
    need(cfg.mle.simplex_iterations >= 1, "mle.simplex_iterations must be >= 1");
    need(cfg.mle.simplex_tolerance > 0.0, "mle.simplex_tolerance must be > 0");
    need(cfg.mle.em_restarts >= 1, "mle.em_restarts must be >= 1");
    need(cfg.mle.em_iterations >= 1, "mle.em_iterations must be >= 1");
    need(cfg.mle.em_tolerance > 0.0, "mle.em_tolerance must be > 0");
    need(cfg.t_fit.nu > 2.0, "mle.t_nu must be > 2");
    need(cfg.t_fit.max_iterations >= 1, "mle.t_max_iterations must be >= 1");
    need(cfg.t_fit.tolerance > 0.0, "mle.t_tolerance must be > 0");

    need(cfg.chain.draws >= 1, "bayes.draws must be >= 1");
    need(cfg.chain.thin >= 1, "bayes.thin must be >= 1");
    need(cfg.beta_prior.lo >= 1.0 && cfg.beta_prior.lo < cfg.beta_prior.hi,
         "bayes.beta_prior needs 1 <= lo < hi");
    need(cfg.mixture_prior.delta > 0.0, "bayes.mixture_prior.delta must be > 0");
    need(cfg.mixture_prior.V > 0.0, "bayes.mixture_prior.V must be > 0");
    need(cfg.mixture_prior.n > 0.0, "bayes.mixture_prior.n must be > 0");
    need(cfg.mixture_prior.alpha_prec > 0.0, "bayes.mixture_prior.alpha must be > 0");
    need(cfg.portfolio_prior.gamma_shape > 0.0, "bayes.portfolio_prior.gamma_shape must be > 0");
    need(cfg.portfolio_prior.gamma_rate > 0.0, "bayes.portfolio_prior.gamma_rate must be > 0");
    need(cfg.portfolio_prior.eta > 0.0, "bayes.portfolio_prior.eta must be > 0");
    need(cfg.portfolio_prior.nu > 2.0, "bayes.portfolio_prior.nu must be > 2");
    need(cfg.true_nu > 2.0, "portfolio.true_nu must be > 2");

    // catalogues
    std::set<int> seen;
    for (const auto& c : cfg.costs) {
        need(seen.insert(c.id).second, fmt::format("cost id {} defined twice", c.id));
        need(std::isfinite(c.cost.alpha) && std::isfinite(c.cost.beta) && std::isfinite(c.cost.gamma),
             fmt::format("cost {} has non-finite coefficients", c.id));
    }
    seen.clear();
    for (const auto& d : cfg.distributions) {
        need(seen.insert(d.id).second, fmt::format("distribution id {} defined twice", d.id));
        try {
            std::visit(
                [](const auto& p) {
                    using T = std::decay_t<decltype(p)>;
                    if constexpr (std::is_same_v<T, BetaParams>)
                        ScaledBeta(p.alpha, p.beta);
                    else
                        GaussianMixture2(p.mu1, p.mu2, p.sigma1, p.sigma2, p.rho);
                },
                d.params);
        } catch (const Error& e) {
            err.push_back(fmt::format("distribution {}: {}", d.id, e.what()));
        }
    }
    seen.clear();
    for (const auto& c : cfg.covariances) {
        need(seen.insert(c.id).second, fmt::format("covariance id {} defined twice", c.id));
        if (c.dim < 2 || c.values.size() != static_cast<std::size_t>(c.dim * c.dim)) {
            err.push_back(fmt::format("covariance {}: values must hold dim*dim numbers", c.id));
            continue;
        }
        try {
            const auto m = c.matrix();
            validate_covariance(m);
            Eigen::LLT<Eigen::MatrixXd> llt(m);
            if (llt.info() != Eigen::Success)
                throw InvalidArgumentError("covariance is not positive definite");
        } catch (const Error& e) {
            err.push_back(fmt::format("covariance {}: {}", c.id, e.what()));
        }
    }

    auto has = [](const auto& entries, int id) {
        return std::any_of(entries.begin(), entries.end(), [id](const auto& e) { return e.id == id; });
    };
    for (int id : cfg.distribution_ids) {
        if (quad)
            need(has(cfg.distributions, id), fmt::format("distributions: unknown distribution id {}", id));
        else
            need(has(cfg.covariances, id), fmt::format("distributions: unknown covariance id {}", id));
    }
    if (quad) {
        need(!cfg.cost_ids.empty(), "costs must not be empty");
        for (int id : cfg.cost_ids) need(has(cfg.costs, id), fmt::format("costs: unknown cost id {}", id));
    }
    if (!quad) {
        for (int id : cfg.distribution_ids) {
            if (!has(cfg.covariances, id)) continue;
            const int dim = cfg.covariance(id).dim;
            for (auto n : cfg.sample_sizes)
                if (static_cast<int>(n) <= dim)
                    err.push_back(fmt::format("sample_sizes: N = {} must exceed the {} assets", n, dim));
            break;
        }
    }
    return err;
}

// ---------------------------------------------------------------------------
// TOML parsing

namespace {

class TomlReader {
public:
    explicit TomlReader(std::string origin) : origin_(std::move(origin)) {}

    std::vector<std::string> errors;

    std::string where(const toml::node& n) const {
        const auto& src = n.source();
        return fmt::format("{}:{}", origin_, src.begin.line);
    }

    void error(const toml::node& n, const std::string& msg) {
        errors.push_back(fmt::format("{}: {}", where(n), msg));
    }

    void check_keys(const toml::table& tbl, const std::string& path,
                    std::initializer_list<std::string_view> known) {
        for (const auto& [k, v] : tbl) {
            const std::string_view key = k.str();
            if (std::find(known.begin(), known.end(), key) == known.end())
                error(v, fmt::format("unknown key '{}{}'", path.empty() ? "" : path + ".", key));
        }
    }

    void read(const toml::table& tbl, std::string_view key, const std::string& path, double& out) {
        const toml::node* n = tbl.get(key);
        if (!n) return;
        if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer()))
            out = *v;
        else
            error(*n, fmt::format("'{}' must be a number", path));
    }

    void read(const toml::table& tbl, std::string_view key, const std::string& path, std::size_t& out) {
        const toml::node* n = tbl.get(key);
        if (!n) return;
        if (auto v = n->as_integer(); v && v->get() >= 0)
            out = static_cast<std::size_t>(v->get());
        else
            error(*n, fmt::format("'{}' must be a non-negative integer", path));
    }

    void read(const toml::table& tbl, std::string_view key, const std::string& path, bool& out) {
        const toml::node* n = tbl.get(key);
        if (!n) return;
        if (auto v = n->as_boolean())
            out = v->get();
        else
            error(*n, fmt::format("'{}' must be true or false", path));
    }

    void read(const toml::table& tbl, std::string_view key, const std::string& path, std::string& out) {
        const toml::node* n = tbl.get(key);
        if (!n) return;
        if (auto v = n->as_string())
            out = v->get();
        else
            error(*n, fmt::format("'{}' must be a string", path));
    }

    void read(const toml::table& tbl, std::string_view key, const std::string& path, int& out) {
        const toml::node* n = tbl.get(key);
        if (!n) return;
        if (auto v = n->as_integer())
            out = static_cast<int>(v->get());
        else
            error(*n, fmt::format("'{}' must be an integer", path));
    }

    template <typename T>
    void read_int_list(const toml::table& tbl, std::string_view key, const std::string& path,
                       std::vector<T>& out, long long min_value) {
        const toml::node* n = tbl.get(key);
        if (!n) return;
        const auto* arr = n->as_array();
        if (!arr) {
            error(*n, fmt::format("'{}' must be an array of integers", path));
            return;
        }
        std::vector<T> vals;
        for (const auto& el : *arr) {
            const auto* i = el.as_integer();
            if (!i || i->get() < min_value) {
                error(el, fmt::format("'{}' entries must be integers >= {}", path, min_value));
                return;
            }
            vals.push_back(static_cast<T>(i->get()));
        }
        out = std::move(vals);
    }

    const toml::table* subtable(const toml::table& tbl, std::string_view key) {
        const toml::node* n = tbl.get(key);
        if (!n) return nullptr;
        if (const auto* t = n->as_table()) return t;
        error(*n, fmt::format("'{}' must be a table", key));
        return nullptr;
    }

private:
    std::string origin_;
};

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::string& origin) {
    toml::table root;
    try {
        root = toml::parse(text, origin);
    } catch (const toml::parse_error& e) {
        throw ConfigError({fmt::format("{}:{}:{}: parse error: {}", origin, e.source().begin.line,
                                       e.source().begin.column, e.description())});
    }

    TomlReader rd(origin);
    rd.check_keys(root, "",
                  {"family", "master_seed", "replications", "sample_sizes", "eval_size",
                   "evaluation", "methods", "distributions", "costs", "workers", "mc_predictive",
                   "predictive_draws", "output", "decision_box", "bagging", "kernel", "mle", "bayes",
                   "portfolio", "cost", "distribution", "covariance"});

    std::string family_name;
    if (const auto* n = root.get("family"); n && n->is_string()) {
        family_name = n->as_string()->get();
    } else if (n) {
        rd.error(*n, "'family' must be a string");
    }
    if (family_name != "quadratic" && family_name != "portfolio") {
        if (family_name.empty())
            rd.errors.push_back(origin + ": 'family' is required (\"quadratic\" or \"portfolio\")");
        else
            rd.errors.push_back(fmt::format("{}: family must be \"quadratic\" or \"portfolio\", got \"{}\"",
                                            origin, family_name));
        throw ConfigError(rd.errors);
    }
    ExperimentConfig cfg =
        default_config(family_name == "quadratic" ? Family::Quadratic : Family::Portfolio);

    rd.read(root, "master_seed", "master_seed", cfg.master_seed);
    rd.read(root, "replications", "replications", cfg.replications);
    rd.read_int_list(root, "sample_sizes", "sample_sizes", cfg.sample_sizes, 1);
    rd.read(root, "eval_size", "eval_size", cfg.eval_size);
    rd.read(root, "workers", "workers", cfg.workers);
    rd.read(root, "mc_predictive", "mc_predictive", cfg.mc_predictive);
    rd.read(root, "predictive_draws", "predictive_draws", cfg.predictive_draws);
    rd.read_int_list(root, "distributions", "distributions", cfg.distribution_ids, 0);
    rd.read_int_list(root, "costs", "costs", cfg.cost_ids, 0);
    if (const auto* n = root.get("evaluation")) {
        const auto* s = n->as_string();
        if (s && s->get() == "exact")
            cfg.evaluation = EvaluationMode::Exact;
        else if (s && s->get() == "monte_carlo")
            cfg.evaluation = EvaluationMode::MonteCarlo;
        else
            rd.error(*n, "'evaluation' must be \"exact\" or \"monte_carlo\"");
    }
    if (const auto* n = root.get("methods")) {
        const auto* arr = n->as_array();
        if (!arr) {
            rd.error(*n, "'methods' must be an array of strings");
        } else {
            std::vector<MethodKind> methods;
            for (const auto& el : *arr) {
                const auto* s = el.as_string();
                try {
                    if (!s) throw InvalidArgumentError("'methods' entries must be strings");
                    const auto m = method_from_string(s->get());
                    if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
                } catch (const Error& e) {
                    rd.error(el, e.what());
                }
            }
            cfg.methods = std::move(methods);
        }
    }

    if (const auto* t = rd.subtable(root, "output")) {
        rd.check_keys(*t, "output", {"dir", "basename"});
        rd.read(*t, "dir", "output.dir", cfg.output_dir);
        rd.read(*t, "basename", "output.basename", cfg.basename);
    }
    if (const auto* t = rd.subtable(root, "decision_box")) {
        rd.check_keys(*t, "decision_box", {"lo", "hi"});
        rd.read(*t, "lo", "decision_box.lo", cfg.box.lo);
        rd.read(*t, "hi", "decision_box.hi", cfg.box.hi);
    }
    if (const auto* t = rd.subtable(root, "bagging")) {
        rd.check_keys(*t, "bagging", {"replicates", "resample_size", "with_replacement"});
        rd.read(*t, "replicates", "bagging.replicates", cfg.bagging.replicates);
        rd.read(*t, "resample_size", "bagging.resample_size", cfg.bagging.resample_size);
        rd.read(*t, "with_replacement", "bagging.with_replacement", cfg.bagging.with_replacement);
    }
    if (const auto* t = rd.subtable(root, "kernel")) {
        rd.check_keys(*t, "kernel", {"bandwidth", "portfolio"});
        if (const auto* n = t->get("bandwidth")) {
            if (const auto* s = n->as_string(); s && s->get() == "scott")
                cfg.kernel.rule = ScottBandwidth{};
            else if (auto v = n->value<double>(); v && !n->is_string())
                cfg.kernel.rule = FixedBandwidth{*v};
            else
                rd.error(*n, "'kernel.bandwidth' must be \"scott\" or a number");
        }
        if (const auto* n = t->get("portfolio")) {
            const auto* s = n->as_string();
            if (s && s->get() == "spherical")
                cfg.portfolio_kernel = PortfolioKernel::Spherical;
            else if (s && s->get() == "scott_covariance")
                cfg.portfolio_kernel = PortfolioKernel::ScottCovariance;
            else
                rd.error(*n, "'kernel.portfolio' must be \"spherical\" or \"scott_covariance\"");
        }
    }
    if (const auto* t = rd.subtable(root, "mle")) {
        rd.check_keys(*t, "mle",
                      {"beta_min_shape", "sigma_floor", "simplex_iterations", "simplex_tolerance",
                       "em_restarts", "em_iterations", "em_tolerance", "t_nu", "t_max_iterations",
                       "t_tolerance"});
        rd.read(*t, "beta_min_shape", "mle.beta_min_shape", cfg.mle.beta_min_shape);
        rd.read(*t, "sigma_floor", "mle.sigma_floor", cfg.mle.sigma_floor);
        rd.read(*t, "simplex_iterations", "mle.simplex_iterations", cfg.mle.simplex_iterations);
        rd.read(*t, "simplex_tolerance", "mle.simplex_tolerance", cfg.mle.simplex_tolerance);
        rd.read(*t, "em_restarts", "mle.em_restarts", cfg.mle.em_restarts);
        rd.read(*t, "em_iterations", "mle.em_iterations", cfg.mle.em_iterations);
        rd.read(*t, "em_tolerance", "mle.em_tolerance", cfg.mle.em_tolerance);
        rd.read(*t, "t_nu", "mle.t_nu", cfg.t_fit.nu);
        rd.read(*t, "t_max_iterations", "mle.t_max_iterations", cfg.t_fit.max_iterations);
        rd.read(*t, "t_tolerance", "mle.t_tolerance", cfg.t_fit.tolerance);
    }
    if (const auto* t = rd.subtable(root, "bayes")) {
        rd.check_keys(*t, "bayes",
                      {"draws", "burn_in", "thin", "beta_prior", "mixture_prior", "portfolio_prior"});
        rd.read(*t, "draws", "bayes.draws", cfg.chain.draws);
        rd.read(*t, "burn_in", "bayes.burn_in", cfg.chain.burn_in);
        rd.read(*t, "thin", "bayes.thin", cfg.chain.thin);
        if (const auto* b = rd.subtable(*t, "beta_prior")) {
            rd.check_keys(*b, "bayes.beta_prior", {"lo", "hi"});
            rd.read(*b, "lo", "bayes.beta_prior.lo", cfg.beta_prior.lo);
            rd.read(*b, "hi", "bayes.beta_prior.hi", cfg.beta_prior.hi);
        }
        if (const auto* m = rd.subtable(*t, "mixture_prior")) {
            rd.check_keys(*m, "bayes.mixture_prior", {"delta", "V", "n", "alpha", "m"});
            rd.read(*m, "delta", "bayes.mixture_prior.delta", cfg.mixture_prior.delta);
            rd.read(*m, "V", "bayes.mixture_prior.V", cfg.mixture_prior.V);
            rd.read(*m, "n", "bayes.mixture_prior.n", cfg.mixture_prior.n);
            rd.read(*m, "alpha", "bayes.mixture_prior.alpha", cfg.mixture_prior.alpha_prec);
            if (m->contains("m")) {
                double v = 0.0;
                rd.read(*m, "m", "bayes.mixture_prior.m", v);
                cfg.mixture_prior.m = v;
            }
        }
        if (const auto* p = rd.subtable(*t, "portfolio_prior")) {
            rd.check_keys(*p, "bayes.portfolio_prior", {"gamma_shape", "gamma_rate", "eta", "nu"});
            rd.read(*p, "gamma_shape", "bayes.portfolio_prior.gamma_shape", cfg.portfolio_prior.gamma_shape);
            rd.read(*p, "gamma_rate", "bayes.portfolio_prior.gamma_rate", cfg.portfolio_prior.gamma_rate);
            rd.read(*p, "eta", "bayes.portfolio_prior.eta", cfg.portfolio_prior.eta);
            rd.read(*p, "nu", "bayes.portfolio_prior.nu", cfg.portfolio_prior.nu);
        }
    }
    if (const auto* t = rd.subtable(root, "portfolio")) {
        rd.check_keys(*t, "portfolio", {"true_nu"});
        rd.read(*t, "true_nu", "portfolio.true_nu", cfg.true_nu);
    }

    auto for_each_entry = [&](std::string_view key, auto&& fn) {
        const toml::node* n = root.get(key);
        if (!n) return;
        const auto* arr = n->as_array();
        if (!arr || !arr->is_array_of_tables()) {
            rd.error(*n, fmt::format("'{}' must be an array of tables ([[{}]])", key, key));
            return;
        }
        for (const auto& el : *arr) fn(*el.as_table());
    };
    auto upsert = [](auto& entries, auto entry) {
        auto it = std::find_if(entries.begin(), entries.end(),
                               [&](const auto& e) { return e.id == entry.id; });
        if (it == entries.end())
            entries.push_back(std::move(entry));
        else
            *it = std::move(entry);
    };

    for_each_entry("cost", [&](const toml::table& t) {
        rd.check_keys(t, "cost", {"id", "alpha", "beta", "gamma"});
        CostEntry e;
        if (!t.contains("id")) rd.error(t, "[[cost]] needs an 'id'");
        rd.read(t, "id", "cost.id", e.id);
        rd.read(t, "alpha", "cost.alpha", e.cost.alpha);
        rd.read(t, "beta", "cost.beta", e.cost.beta);
        rd.read(t, "gamma", "cost.gamma", e.cost.gamma);
        upsert(cfg.costs, e);
    });
    for_each_entry("distribution", [&](const toml::table& t) {
        DistributionEntry e;
        if (!t.contains("id")) rd.error(t, "[[distribution]] needs an 'id'");
        rd.read(t, "id", "distribution.id", e.id);
        std::string kind;
        rd.read(t, "kind", "distribution.kind", kind);
        if (kind == "beta") {
            rd.check_keys(t, "distribution", {"id", "kind", "alpha", "beta"});
            BetaParams p;
            rd.read(t, "alpha", "distribution.alpha", p.alpha);
            rd.read(t, "beta", "distribution.beta", p.beta);
            e.params = p;
        } else if (kind == "mixture") {
            rd.check_keys(t, "distribution", {"id", "kind", "mu1", "mu2", "sigma1", "sigma2", "rho"});
            MixtureParams p;
            rd.read(t, "mu1", "distribution.mu1", p.mu1);
            rd.read(t, "mu2", "distribution.mu2", p.mu2);
            rd.read(t, "sigma1", "distribution.sigma1", p.sigma1);
            rd.read(t, "sigma2", "distribution.sigma2", p.sigma2);
            rd.read(t, "rho", "distribution.rho", p.rho);
            e.params = p;
        } else {
            rd.error(t, "'distribution.kind' must be \"beta\" or \"mixture\"");
            return;
        }
        upsert(cfg.distributions, e);
    });
    for_each_entry("covariance", [&](const toml::table& t) {
        rd.check_keys(t, "covariance", {"id", "values"});
        CovarianceEntry e;
        if (!t.contains("id")) rd.error(t, "[[covariance]] needs an 'id'");
        rd.read(t, "id", "covariance.id", e.id);
        const auto* arr = t.get_as<toml::array>("values");
        if (!arr) {
            rd.error(t, "[[covariance]] needs a 'values' array (row-major)");
            return;
        }
        for (const auto& el : *arr) {
            auto v = el.value<double>();
            if (!v) {
                rd.error(el, "'covariance.values' entries must be numbers");
                return;
            }
            e.values.push_back(*v);
        }
        const auto dim = static_cast<int>(std::lround(std::sqrt(static_cast<double>(e.values.size()))));
        e.dim = dim;
        if (static_cast<std::size_t>(dim * dim) != e.values.size())
            rd.error(t, fmt::format("covariance {}: {} values is not a square matrix", e.id, e.values.size()));
        upsert(cfg.covariances, e);
    });

    auto errors = rd.errors;
    for (auto& e : validate_config(cfg)) errors.push_back(origin + ": " + e);
    if (!errors.empty()) throw ConfigError(errors);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({fmt::format("cannot read config file '{}'", path.string())});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const ExperimentConfig& cfg) {
    using nlohmann::json;
    json j;
    j["family"] = to_string(cfg.family);
    j["distributions"] = cfg.distribution_ids;
    j["costs"] = cfg.cost_ids;
    j["sample_sizes"] = cfg.sample_sizes;
    j["replications"] = cfg.replications;
    j["eval_size"] = cfg.eval_size;
    j["evaluation"] = cfg.evaluation == EvaluationMode::Exact ? "exact" : "monte_carlo";
    std::vector<std::string> methods;
    for (auto m : cfg.methods) methods.push_back(to_string(m));
    j["methods"] = methods;
    j["master_seed"] = cfg.master_seed;
    j["decision_box"] = {{"lo", cfg.box.lo}, {"hi", cfg.box.hi}};
    j["bagging"] = {{"replicates", cfg.bagging.replicates},
                    {"resample_size", cfg.bagging.resample_size},
                    {"with_replacement", cfg.bagging.with_replacement}};
    if (const auto* f = std::get_if<FixedBandwidth>(&cfg.kernel.rule))
        j["kernel"]["bandwidth"] = f->h;
    else
        j["kernel"]["bandwidth"] = "scott";
    j["kernel"]["portfolio"] =
        cfg.portfolio_kernel == PortfolioKernel::Spherical ? "spherical" : "scott_covariance";
    j["mc_predictive"] = cfg.mc_predictive;
    j["predictive_draws"] = cfg.predictive_draws;
    j["mle"] = {{"beta_min_shape", cfg.mle.beta_min_shape},
                {"sigma_floor", cfg.mle.sigma_floor},
                {"simplex_iterations", cfg.mle.simplex_iterations},
                {"simplex_tolerance", cfg.mle.simplex_tolerance},
                {"em_restarts", cfg.mle.em_restarts},
                {"em_iterations", cfg.mle.em_iterations},
                {"em_tolerance", cfg.mle.em_tolerance},
                {"t_nu", cfg.t_fit.nu},
                {"t_max_iterations", cfg.t_fit.max_iterations},
                {"t_tolerance", cfg.t_fit.tolerance}};
    j["bayes"] = {{"draws", cfg.chain.draws},
                  {"burn_in", cfg.chain.burn_in},
                  {"thin", cfg.chain.thin},
                  {"beta_prior", {{"lo", cfg.beta_prior.lo}, {"hi", cfg.beta_prior.hi}}},
                  {"portfolio_prior",
                   {{"gamma_shape", cfg.portfolio_prior.gamma_shape},
                    {"gamma_rate", cfg.portfolio_prior.gamma_rate},
                    {"eta", cfg.portfolio_prior.eta},
                    {"nu", cfg.portfolio_prior.nu}}}};
    json mp = {{"delta", cfg.mixture_prior.delta},
               {"V", cfg.mixture_prior.V},
               {"n", cfg.mixture_prior.n},
               {"alpha", cfg.mixture_prior.alpha_prec}};
    if (cfg.mixture_prior.m) mp["m"] = *cfg.mixture_prior.m;
    j["bayes"]["mixture_prior"] = mp;
    j["portfolio"] = {{"true_nu", cfg.true_nu}};
    for (const auto& c : cfg.costs)
        j["cost"].push_back({{"id", c.id}, {"alpha", c.cost.alpha}, {"beta", c.cost.beta}, {"gamma", c.cost.gamma}});
    for (const auto& d : cfg.distributions) {
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, BetaParams>)
                    j["distribution"].push_back({{"id", d.id}, {"kind", "beta"}, {"alpha", p.alpha}, {"beta", p.beta}});
                else
                    j["distribution"].push_back({{"id", d.id},
                                                 {"kind", "mixture"},
                                                 {"mu1", p.mu1},
                                                 {"mu2", p.mu2},
                                                 {"sigma1", p.sigma1},
                                                 {"sigma2", p.sigma2},
                                                 {"rho", p.rho}});
            },
            d.params);
    }
    for (const auto& c : cfg.covariances) j["covariance"].push_back({{"id", c.id}, {"values", c.values}});
    return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string text = to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return fmt::format("{:016x}", h);
}

}  // namespace saabench
