#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "saabench/bayes.hpp"
#include "saabench/cli.hpp"
#include "saabench/config.hpp"
#include "saabench/estimators.hpp"
#include "saabench/harness.hpp"
#include "saabench/portfolio.hpp"
#include "saabench/quadratic.hpp"

namespace py = pybind11;
using namespace saabench;

namespace {

QuadraticCost cost_from(py::object c) {
    if (py::isinstance<py::int_>(c)) {
        const auto id = c.cast<int>();
        const auto& costs = builtin_costs();
        if (id < 1 || id > static_cast<int>(costs.size())) throw py::index_error("cost id out of range");
        return costs[static_cast<std::size_t>(id - 1)];
    }
    const auto t = c.cast<std::tuple<double, double, double>>();
    return {std::get<0>(t), std::get<1>(t), std::get<2>(t)};
}

py::dict record_dict(const ImprovementRecord& r) {
    py::dict d;
    d["family"] = to_string(r.family);
    d["problem_id"] = r.problem_id;
    d["distribution_id"] = r.distribution_id;
    d["method"] = to_string(r.method);
    d["n"] = r.n;
    d["k"] = r.k;
    d["mean_improvement"] = r.mean_improvement;
    d["ci_low"] = r.ci_low;
    d["ci_high"] = r.ci_high;
    d["mean_cost_saa"] = r.mean_cost_saa;
    d["mean_cost_method"] = r.mean_cost_method;
    d["excluded"] = r.excluded;
    return d;
}

}  // namespace

PYBIND11_MODULE(_saabench, m) {
    m.doc() = "SAA, bagging, kernel, MLE and Bayes decision methods";

    py::register_exception<Error>(m, "SaabenchError", PyExc_RuntimeError);

    m.def("version", &library_version);
    m.def("builtin_costs", [] {
        std::vector<std::tuple<double, double, double>> out;
        for (const auto& c : builtin_costs()) out.emplace_back(c.alpha, c.beta, c.gamma);
        return out;
    });
    m.def("builtin_covariances", &builtin_covariances);
    m.def("describe_builtins", &describe_builtins);

    m.def(
        "sample_moments",
        [](const std::vector<double>& y) {
            const auto mp = sample_moments(y);
            return std::make_pair(mp.m1, mp.m2);
        },
        py::arg("sample"));
    m.def(
        "expected_cost",
        [](py::object cost, double x, double m1, double m2) { return expected_cost(cost_from(cost), x, {m1, m2}); },
        py::arg("cost"), py::arg("x"), py::arg("m1"), py::arg("m2"));
    m.def(
        "saa_decision", [](const std::vector<double>& y, py::object cost) { return saa_decision(y, cost_from(cost)); },
        py::arg("sample"), py::arg("cost"));
    m.def(
        "bag_decision",
        [](const std::vector<double>& y, py::object cost, std::size_t replicates, std::uint64_t seed) {
            Rng rng = make_stream(seed, 0, StreamRole::Bootstrap);
            return bag_decision(y, cost_from(cost), BaggingSpec{replicates, 0, true}, rng);
        },
        py::arg("sample"), py::arg("cost"), py::arg("replicates") = 400, py::arg("seed") = 0);
    m.def(
        "kernel_bandwidth", [](const std::vector<double>& y) { return kernel_bandwidth(y, KernelSpec{}); },
        py::arg("sample"));
    m.def(
        "kernel_decision",
        [](const std::vector<double>& y, py::object cost, std::optional<double> h) {
            KernelSpec spec;
            if (h) spec.rule = FixedBandwidth{*h};
            return kernel_decision(y, cost_from(cost), spec);
        },
        py::arg("sample"), py::arg("cost"), py::arg("h") = py::none());
    m.def(
        "fit_scaled_beta",
        [](const std::vector<double>& y) {
            const auto b = fit_scaled_beta(y);
            return std::make_pair(b.alpha(), b.beta());
        },
        py::arg("sample"));
    m.def(
        "min_variance_weights", [](const Eigen::MatrixXd& sigma) { return min_variance_weights(sigma); },
        py::arg("sigma"));
    m.def(
        "paired_improvement",
        [](const std::vector<double>& saa, const std::vector<double>& method) {
            const auto p = paired_improvement(saa, method);
            return std::make_tuple(p.mean, p.ci_low, p.ci_high);
        },
        py::arg("costs_saa"), py::arg("costs_method"));

    m.def(
        "validate_config",
        [](const std::string& text) {
            try {
                parse_config(text, "<string>");
                return std::vector<std::string>{};
            } catch (const ConfigError& e) {
                return e.errors();
            }
        },
        py::arg("text"));
    m.def(
        "config_json", [](const std::string& text) { return to_json(parse_config(text, "<string>")).dump(); },
        py::arg("text"));
    m.def(
        "run_experiment",
        [](const std::string& text, std::optional<std::size_t> workers) {
            auto cfg = parse_config(text, "<string>");
            if (workers) cfg.workers = *workers;
            ExperimentResult result;
            {
                py::gil_scoped_release release;
                result = run_experiment(cfg);
            }
            py::list out;
            for (const auto& r : result.records) out.append(record_dict(r));
            return out;
        },
        py::arg("config_text"), py::arg("workers") = py::none());
    m.def(
        "run_experiment_csv",
        [](const std::string& text) {
            const auto cfg = parse_config(text, "<string>");
            ExperimentResult result;
            {
                py::gil_scoped_release release;
                result = run_experiment(cfg);
            }
            return format_csv(result.records);
        },
        py::arg("config_text"));
}
