#include "saabench/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "saabench/harness.hpp"

namespace saabench {

namespace {

std::vector<MethodKind> parse_methods(const std::string& list) {
    std::vector<MethodKind> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            const auto m = method_from_string(item);
            if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
        } catch (const Error& e) {
            throw UsageError(fmt::format("--methods: {}", e.what()));
        }
    }
    if (out.empty()) throw UsageError("--methods: empty method list");
    return out;
}

}  // namespace

CliCommand parse_args(const std::vector<std::string>& args) {
    CLI::App app{"Data-driven decision methods benchmarked against SAA", "saabench"};
    app.require_subcommand(1, 1);
    CliCommand cmd;
    std::string methods;
    std::int64_t seed = 0;
    std::int64_t workers = 0;

    auto* run = app.add_subcommand("run", "Run an experiment and write CSV, SVG and metadata");
    run->add_option("--config", cmd.config_path, "TOML experiment config")->required();
    auto* seed_opt = run->add_option("--seed", seed, "Override master_seed")->check(CLI::NonNegativeNumber);
    auto* out_opt = run->add_option("--out", cmd.out_dir, "Output directory");
    auto* workers_opt = run->add_option("--workers", workers, "Worker threads (0: all cores)")
                            ->check(CLI::NonNegativeNumber);
    auto* methods_opt = run->add_option("--methods", methods, "Comma-separated method subset");
    run->add_flag("--mc-predictive", cmd.mc_predictive, "Sample predictive densities instead of exact moments");
    run->add_flag("--mc-eval", cmd.mc_eval, "Evaluate on a shared Monte Carlo sample");
    run->add_flag("--quiet,-q", cmd.quiet, "No progress output");

    auto* list = app.add_subcommand("list", "Print the built-in problems");
    auto* validate = app.add_subcommand("validate", "Check a config file");
    validate->add_option("--config", cmd.config_path, "TOML experiment config")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        cmd.help = app.help();
        return cmd;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    for (auto* sub : app.get_subcommands()) {
        if (sub->get_name() == "run") cmd.verb = Verb::Run;
        if (sub->get_name() == "list") cmd.verb = Verb::List;
        if (sub->get_name() == "validate") cmd.verb = Verb::Validate;
    }
    (void)list;
    if (seed_opt->count()) cmd.seed = static_cast<std::uint64_t>(seed);
    if (workers_opt->count()) cmd.workers = static_cast<std::size_t>(workers);
    if (methods_opt->count()) cmd.methods = parse_methods(methods);
    if (!out_opt->count()) cmd.out_dir.reset();
    return cmd;
}

void apply_overrides(ExperimentConfig& cfg, const CliCommand& cmd, const char* env_workers) {
    if (cmd.seed) cfg.master_seed = *cmd.seed;
    if (cmd.out_dir) cfg.output_dir = *cmd.out_dir;
    if (cmd.workers) {
        cfg.workers = *cmd.workers;
    } else if (env_workers && *env_workers) {
        char* end = nullptr;
        const long long v = std::strtoll(env_workers, &end, 10);
        if (*end != '\0' || v < 0)
            throw UsageError(fmt::format("SAABENCH_WORKERS must be a non-negative integer, got '{}'", env_workers));
        cfg.workers = static_cast<std::size_t>(v);
    }
    if (cmd.methods) cfg.methods = *cmd.methods;
    if (cmd.mc_predictive) cfg.mc_predictive = true;
    if (cmd.mc_eval) cfg.evaluation = EvaluationMode::MonteCarlo;
}

std::string describe_builtins() {
    std::string s = "Cost functions  c(x,y) = x^2 + alpha x^2 y + beta x y^2 + gamma x y\n";
    s += fmt::format("  {:>3}  {:>7} {:>7} {:>7}\n", "id", "alpha", "beta", "gamma");
    for (const auto& c : default_cost_entries())
        s += fmt::format("  {:>3}  {:>7.2f} {:>7.2f} {:>7.2f}\n", c.id, c.cost.alpha, c.cost.beta, c.cost.gamma);

    s += "\nDistributions\n";
    for (const auto& d : default_distribution_entries()) {
        s += std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, BetaParams>)
                    return fmt::format("  {:>3}  beta on [-1,1]      alpha={:g} beta={:g}\n", d.id, p.alpha, p.beta);
                else
                    return fmt::format("  {:>3}  gaussian mixture    mu1={:g} mu2={:g} sigma1={:g} sigma2={:g} rho={:g}\n",
                                       d.id, p.mu1, p.mu2, p.sigma1, p.sigma2, p.rho);
            },
            d.params);
    }

    s += "\nCovariance matrices (weekly returns, t with nu=3, zero mean)\n";
    for (const auto& c : default_covariance_entries()) {
        s += fmt::format("  {}:\n", c.id);
        for (int i = 0; i < c.dim; ++i) {
            s += "    ";
            for (int j = 0; j < c.dim; ++j) s += fmt::format(" {:>11.4e}", c.values[static_cast<std::size_t>(i * c.dim + j)]);
            s += "\n";
        }
    }
    return s;
}

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int do_run(const CliCommand& cmd, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg = load_config(cmd.config_path);
    apply_overrides(cfg, cmd, std::getenv("SAABENCH_WORKERS"));
    if (auto errors = validate_config(cfg); !errors.empty()) throw ConfigError(std::move(errors));

    ProgressFn progress;
    std::size_t last_pct = 101;
    if (!cmd.quiet) {
        progress = [&](std::size_t done, std::size_t total) {
            const std::size_t pct = done * 100 / total;
            if (pct != last_pct) {
                last_pct = pct;
                err << fmt::format("\r{} {}%", cfg.basename, pct) << (done == total ? "\n" : "") << std::flush;
            }
        };
    }
    const auto result = run_experiment(cfg, progress);

    const std::filesystem::path dir = cfg.output_dir;
    const auto csv = dir / (cfg.basename + ".csv");
    const auto meta = dir / (cfg.basename + ".meta.json");
    emit_csv(result.records, csv);
    const auto plots = emit_plots(result.records, dir, cfg.basename);
    {
        std::ofstream f(meta);
        if (!f) throw Error(fmt::format("cannot open '{}' for writing", meta.string()));
        f << run_metadata(cfg, result.counters, utc_timestamp()).dump(2) << '\n';
    }
    out << "wrote " << csv.string() << '\n' << "wrote " << meta.string() << '\n';
    for (const auto& p : plots) out << "wrote " << p.string() << '\n';
    for (const auto& [method, n] : result.counters.failures)
        if (n > 0) out << fmt::format("{}: {} failed replications excluded\n", method, n);
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        const CliCommand cmd = parse_args(args);
        if (!cmd.help.empty()) {
            out << cmd.help;
            return 0;
        }
        switch (cmd.verb) {
            case Verb::List:
                out << describe_builtins();
                return 0;
            case Verb::Validate: {
                const auto cfg = load_config(cmd.config_path);
                out << fmt::format("{}: ok ({}, {} distributions, N = {}, K = {})\n", cmd.config_path,
                                   to_string(cfg.family), cfg.distribution_ids.size(),
                                   fmt::join(cfg.sample_sizes, ","), cfg.replications);
                return 0;
            }
            case Verb::Run:
                return do_run(cmd, out, err);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\nrun 'saabench --help' for usage\n";
        return 2;
    } catch (const ConfigError& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace saabench
