#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "saabench/config.hpp"
#include "saabench/distributions.hpp"

namespace saabench {

/// One row of the results table: improvement of `method` over SAA on one
/// (problem, distribution, N) cell. problem_id is the cost id, "mean" for the
/// per-replication average over the configured costs, or "minvar".
struct ImprovementRecord {
    Family family = Family::Quadratic;
    std::string problem_id;
    int distribution_id = 0;
    MethodKind method = MethodKind::Saa;
    std::size_t n = 0;
    std::size_t k = 0;  ///< replications used
    double mean_improvement = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double mean_cost_saa = 0.0;
    double mean_cost_method = 0.0;
    std::size_t excluded = 0;
};

struct PairedImprovement {
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

inline constexpr double kCiMultiplier = 1.96;

/// Mean of saa - m with a normal 95% interval from the paired standard error.
/// Throws InvalidArgumentError on length mismatch or fewer than 2 pairs.
PairedImprovement paired_improvement(std::span<const double> costs_saa, std::span<const double> costs_m);

struct RunCounters {
    std::size_t tasks = 0;
    std::map<std::string, std::size_t> failures;  ///< per method
    std::size_t ridge_events = 0;
    std::size_t excluded_resamples = 0;
    std::size_t chain_warnings = 0;
};

struct ExperimentResult {
    std::vector<ImprovementRecord> records;
    RunCounters counters;
};

/// Called after each finished task with (done, total). May be invoked from
/// worker threads, serialized by the harness.
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

/// Resolves the worker count: 0 means hardware concurrency (at least 1).
std::size_t resolve_workers(std::size_t requested);

/// The true distribution behind a quadratic distribution entry.
TrueDistribution make_distribution(const DistributionEntry& entry);

/// Runs every (distribution, N, replication) task on a worker pool and folds
/// the results in task order. Output is independent of the worker count.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {});

inline constexpr const char* kCsvHeader =
    "family,problem_id,distribution_id,method,n,k,mean_improvement,ci_low,ci_high,"
    "mean_cost_saa,mean_cost_method,excluded";

std::string format_csv(std::span<const ImprovementRecord> records);

/// Writes the CSV. Throws InvalidArgumentError for an empty record list and
/// Error with the path on I/O failure.
void emit_csv(std::span<const ImprovementRecord> records, const std::filesystem::path& path);

/// SVG of improvement against N, one series per method with a CI band.
/// Quadratic records are drawn from the "mean" problem rows.
std::string render_plot(std::span<const ImprovementRecord> records, Family family, int distribution_id);

/// One SVG per (family, distribution) named <basename>_d<id>.svg in `dir`.
/// Returns the written paths.
std::vector<std::filesystem::path> emit_plots(std::span<const ImprovementRecord> records,
                                              const std::filesystem::path& dir,
                                              const std::string& basename);

/// Run metadata; `timestamp` is the only field that differs between
/// identical runs.
nlohmann::json run_metadata(const ExperimentConfig& cfg, const RunCounters& counters,
                            const std::string& timestamp);

std::string library_version();

}  // namespace saabench
