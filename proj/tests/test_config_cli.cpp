#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "saabench/cli.hpp"
#include "saabench/config.hpp"

using namespace saabench;

namespace {

std::vector<std::string> config_errors(const std::string& text) {
    try {
        parse_config(text, "t.toml");
    } catch (const ConfigError& e) {
        return e.errors();
    }
    return {};
}

bool mentions(const std::vector<std::string>& errors, const std::string& what) {
    for (const auto& e : errors)
        if (e.find(what) != std::string::npos) return true;
    return false;
}

const std::filesystem::path kConfigs = std::filesystem::path(SAABENCH_SOURCE_DIR) / "configs";

}  // namespace

TEST_CASE("a minimal file gets the full defaults") {
    const auto cfg = parse_config("family = \"quadratic\"\n");
    CHECK(cfg == default_config(Family::Quadratic));
    CHECK(cfg.replications == 1000);
    CHECK(cfg.sample_sizes == std::vector<std::size_t>{10, 20, 50});
    CHECK(cfg.methods.size() == 5);
    CHECK(cfg.cost_ids.size() == 10);
    CHECK(cfg.bagging.replicates == 400);
    CHECK(cfg.mle.sigma_floor == 0.1);

    const auto p = parse_config("family = \"portfolio\"\n");
    CHECK(p.replications == 500);
    CHECK(p.sample_sizes == std::vector<std::size_t>{30, 50, 100, 150, 200});
    CHECK(p.covariances.size() == 5);
}

TEST_CASE("a file spelling out the defaults equals the built-in defaults") {
    CHECK(load_config(kConfigs / "defaults_quadratic.toml") == default_config(Family::Quadratic));
}

TEST_CASE("shipped configs load") {
    for (const auto& entry : std::filesystem::directory_iterator(kConfigs))
        if (entry.path().extension() == ".toml") CHECK_NOTHROW(load_config(entry.path()));
}

TEST_CASE("validation names the offending key") {
    const auto e = config_errors("family = \"quadratic\"\n[mle]\nsigma_floor = -1.0\n");
    REQUIRE(e.size() == 1);
    CHECK(mentions(e, "mle.sigma_floor"));
}

TEST_CASE("every violation is reported") {
    const auto e = config_errors(
        "family = \"quadratic\"\nreplications = 1\ndistributions = [9]\n[bagging]\nreplicates = 0\n"
        "[bayes.beta_prior]\nlo = 5.0\nhi = 2.0\n");
    CHECK(e.size() == 4);
    CHECK(mentions(e, "replications"));
    CHECK(mentions(e, "unknown distribution id 9"));
    CHECK(mentions(e, "bagging.replicates"));
    CHECK(mentions(e, "bayes.beta_prior"));
}

TEST_CASE("parse errors carry the line number") {
    const auto e = config_errors("family = \"quadratic\"\n\nreplications = = 3\n");
    REQUIRE(e.size() == 1);
    CHECK(mentions(e, "t.toml:3"));
}

TEST_CASE("unknown keys and bad types are rejected") {
    auto e = config_errors("family = \"quadratic\"\nreplicatons = 10\n");
    CHECK(mentions(e, "unknown key 'replicatons'"));
    e = config_errors("family = \"quadratic\"\n[kernel]\nbandwith = 0.1\n");
    CHECK(mentions(e, "unknown key 'kernel.bandwith'"));
    e = config_errors("family = \"quadratic\"\nreplications = \"many\"\n");
    CHECK(mentions(e, "t.toml:2"));
    e = config_errors("family = \"quadratic\"\nmethods = [\"saa\", \"magic\"]\n");
    CHECK(mentions(e, "magic"));
    e = config_errors("replications = 10\n");
    CHECK(mentions(e, "'family' is required"));
    e = config_errors("family = \"quadratic\"\nevaluation = \"fast\"\n");
    CHECK(mentions(e, "evaluation"));
}

TEST_CASE("catalogue overrides") {
    const auto cfg = parse_config(
        "family = \"quadratic\"\ncosts = [11]\ndistributions = [6]\n"
        "[[cost]]\nid = 11\nalpha = 0.1\nbeta = 0.2\ngamma = 0.3\n"
        "[[distribution]]\nid = 6\nkind = \"beta\"\nalpha = 3.0\nbeta = 4.0\n"
        "[kernel]\nbandwidth = 0.05\n");
    CHECK(cfg.cost(11).cost == QuadraticCost{0.1, 0.2, 0.3});
    CHECK(std::get<BetaParams>(cfg.distribution(6).params) == BetaParams{3.0, 4.0});
    CHECK(std::get<FixedBandwidth>(cfg.kernel.rule).h == 0.05);

    auto e = config_errors("family = \"portfolio\"\n[[covariance]]\nid = 1\nvalues = [1.0, 0.5, 0.4, 1.0]\n");
    CHECK(mentions(e, "not symmetric"));
    e = config_errors("family = \"portfolio\"\n[[covariance]]\nid = 1\nvalues = [1.0, 2.0, 2.0, 1.0]\n");
    CHECK(mentions(e, "positive"));
    e = config_errors("family = \"portfolio\"\n[[covariance]]\nid = 1\nvalues = [1.0, 2.0, 2.0]\n");
    CHECK(mentions(e, "square"));
    e = config_errors("family = \"quadratic\"\n[[distribution]]\nid = 1\nkind = \"beta\"\nalpha = -1.0\nbeta = 1.0\n");
    CHECK(mentions(e, "distribution 1"));
}

TEST_CASE("config hash") {
    auto cfg = default_config(Family::Quadratic);
    const auto h = config_hash(cfg);
    CHECK(h.size() == 16);
    CHECK(config_hash(cfg) == h);
    cfg.workers = 7;  // scheduling does not change results
    CHECK(config_hash(cfg) == h);
    cfg.master_seed = 1;
    CHECK(config_hash(cfg) != h);
}

TEST_CASE("parse_args") {
    auto cmd = parse_args({"run", "--config", "quadratic.toml", "--seed", "42"});
    CHECK(cmd.verb == Verb::Run);
    CHECK(cmd.config_path == "quadratic.toml");
    CHECK(cmd.seed == 42u);
    CHECK(!cmd.workers);

    cmd = parse_args({"run", "--config", "q.toml", "--workers", "8", "--methods", "saa,bagging", "--out", "o",
                      "--mc-eval", "--mc-predictive"});
    CHECK(cmd.workers == 8u);
    CHECK(cmd.methods == std::vector<MethodKind>{MethodKind::Saa, MethodKind::Bagging});
    CHECK(cmd.out_dir == "o");
    CHECK(cmd.mc_eval);
    CHECK(cmd.mc_predictive);

    CHECK(parse_args({"list"}).verb == Verb::List);
    CHECK(parse_args({"validate", "--config", "x.toml"}).verb == Verb::Validate);
    CHECK(!parse_args({"--help"}).help.empty());

    CHECK_THROWS_AS(parse_args({"run"}), UsageError);
    CHECK_THROWS_AS(parse_args({}), UsageError);
    CHECK_THROWS_AS(parse_args({"run", "--config", "q.toml", "--bogus"}), UsageError);
    CHECK_THROWS_AS(parse_args({"run", "--config", "q.toml", "list"}), UsageError);
    CHECK_THROWS_AS(parse_args({"run", "--config", "q.toml", "--methods", "saa,magic"}), UsageError);
    CHECK_THROWS_AS(parse_args({"run", "--config", "q.toml", "--seed", "-3"}), UsageError);
    CHECK_THROWS_AS(parse_args({"frobnicate"}), UsageError);
}

TEST_CASE("overrides and the worker environment variable") {
    auto cfg = default_config(Family::Quadratic);
    auto cmd = parse_args({"run", "--config", "q.toml", "--seed", "5", "--mc-eval"});
    apply_overrides(cfg, cmd, "3");
    CHECK(cfg.master_seed == 5);
    CHECK(cfg.workers == 3);
    CHECK(cfg.evaluation == EvaluationMode::MonteCarlo);

    cmd = parse_args({"run", "--config", "q.toml", "--workers", "2"});
    apply_overrides(cfg, cmd, "3");
    CHECK(cfg.workers == 2);
    CHECK_THROWS_AS(apply_overrides(cfg, parse_args({"run", "--config", "q.toml"}), "lots"), UsageError);
}

TEST_CASE("run_cli exit codes") {
    std::ostringstream out, err;
    CHECK(run_cli({"list"}, out, err) == 0);
    CHECK(out.str().find("alpha=5 beta=5") != std::string::npos);
    CHECK(out.str().find("-0.67") != std::string::npos);
    CHECK(out.str().find("mu1=-0.1 mu2=0.4 sigma1=0.3 sigma2=0.1 rho=0.7") != std::string::npos);

    CHECK(run_cli({"run"}, out, err) == 2);
    CHECK(run_cli({"validate", "--config", "/nonexistent.toml"}, out, err) == 2);
    CHECK(run_cli({"validate", "--config", (kConfigs / "mini.toml").string()}, out, err) == 0);

    const auto dir = std::filesystem::temp_directory_path() / "saabench_cli_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "bad.toml");
        f << "family = \"quadratic\"\n[mle]\nsigma_floor = -1.0\n";
    }
    std::ostringstream err2;
    CHECK(run_cli({"validate", "--config", (dir / "bad.toml").string()}, out, err2) == 2);
    CHECK(err2.str().find("mle.sigma_floor") != std::string::npos);

    CHECK(run_cli({"run", "--config", (kConfigs / "mini.toml").string(), "--out", (dir / "o").string(), "--quiet",
                   "--methods", "saa,kernel"},
                  out, err) == 0);
    CHECK(std::filesystem::exists(dir / "o" / "mini.csv"));
    CHECK(std::filesystem::exists(dir / "o" / "mini.meta.json"));
    CHECK(std::filesystem::exists(dir / "o" / "mini_d1.svg"));

    // unwritable output location is a runtime failure
    CHECK(run_cli({"run", "--config", (kConfigs / "mini.toml").string(), "--out", "/proc/saabench-x", "--quiet"},
                  out, err) == 1);
    std::filesystem::remove_all(dir);
}
