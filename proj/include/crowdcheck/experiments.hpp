#pragma once

#include "crowdcheck/graph.hpp"
#include "crowdcheck/protocol.hpp"
#include "crowdcheck/selection.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace crowdcheck {

enum class ExperimentKind { learning_curve, engagement_sweep, spammer_sweep, regret_demo };

const char* to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

// Engagement {0, .25, .5, .75, 1}; good-user fraction {.1, .3, .5, .7, .9};
// a single point 0 for the others.
std::vector<double> default_grid(ExperimentKind kind);

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::learning_curve;
    WorldConfig base;
    std::vector<PolicyKind> policies{PolicyKind::oracle,   PolicyKind::opt,      PolicyKind::detective,
                                     PolicyKind::fixed_cm, PolicyKind::no_learn, PolicyKind::random};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::vector<double> grid;  // empty = default_grid(kind)
    double regret_epsilon = 0.05;

    std::vector<double> resolved_grid() const;
};

// World config at one grid point: engagement sets every gamma to 1 - x;
// the spammer sweep uses good users (0.9, 0.9) at fraction x and spammers
// (0.1, 0.1) otherwise. Both keep the base gamma where it is not swept.
WorldConfig config_at(const ExperimentSpec& spec, double grid_value);

struct ResultRow {
    PolicyKind policy = PolicyKind::oracle;
    double grid = 0.0;
    std::uint64_t seed = 0;
    int epoch = 0;
    double util_cum = 0.0;
    double util_avg = 0.0;
    double util_norm = 0.0;  // util_cum / oracle util_cum of the same seed
    bool normalized = true;
};

struct Stat {
    double mean = 0.0;
    double std = 0.0;  // unbiased; 0 for a single seed
    std::size_t n = 0;
};

struct SummaryPoint {
    PolicyKind policy = PolicyKind::oracle;
    double grid = 0.0;
    int epoch = 0;
    Stat util_cum;
    Stat util_avg;
    Stat util_norm;
};

struct RegretRow {
    PolicyKind policy = PolicyKind::opt;
    std::uint64_t seed = 0;
    int epoch = 0;
    double regret = 0.0;
};

struct AggregateResult {
    ExperimentSpec spec;
    std::vector<ResultRow> rows;          // sorted by (policy order, grid, seed, epoch)
    std::vector<SummaryPoint> summary;    // sorted by (policy order, grid, epoch)
    std::vector<RegretRow> regret_rows;   // regret_demo only
    // (grid, seed) cells whose oracle utility was zero at some epoch.
    std::vector<std::pair<double, std::uint64_t>> unnormalized;

    const SummaryPoint* find(PolicyKind policy, double grid, int epoch) const;
    const SummaryPoint* final_point(PolicyKind policy, double grid) const;
    // Seed-mean cumulative regret of `policy` at `epoch` (regret_demo).
    double mean_regret(PolicyKind policy, int epoch) const;
};

Stat summarize(const std::vector<double>& values);

// Runs every (policy, grid point, seed) cell. All policies of one (grid,
// seed) replay the same realized world; the oracle always runs because it
// normalizes the others. `graph` is ignored by regret_demo. Output does not
// depend on `jobs`.
AggregateResult run_experiment(const ExperimentSpec& spec, std::shared_ptr<const SocialGraph> graph,
                               unsigned jobs = 1);

inline constexpr const char* kCsvHeader =
    "experiment,policy,grid,seed,epoch,util_cum,util_avg,util_norm";
inline constexpr const char* kRegretCsvHeader = "experiment,policy,seed,epoch,regret";

// <kind>.csv, <kind>_summary.json and, for regret_demo, <kind>_regret.csv.
std::vector<std::filesystem::path> write_results(const AggregateResult& result,
                                                 const std::filesystem::path& out_dir,
                                                 const nlohmann::json& config_echo);

std::string format_number(double x);
std::string version_string();

}  // namespace crowdcheck
