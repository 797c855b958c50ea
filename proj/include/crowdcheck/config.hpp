#pragma once

#include "crowdcheck/experiments.hpp"
#include "crowdcheck/protocol.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace crowdcheck {

// Raised for every user-facing configuration problem; carries all offending
// keys so the CLI can list them at once.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

nlohmann::json to_json(const WorldConfig& cfg);
// Starts from defaults; unknown keys and type errors are collected into ConfigError.
WorldConfig world_config_from_json(const nlohmann::json& doc);

struct SyntheticGraphSpec {
    SyntheticKind kind = SyntheticKind::erdos_renyi;
    std::size_t n = 0;
    double edge_prob = 0.0;
    std::uint64_t seed = 0;
};

// The whole document a CLI invocation works from, after overrides.
struct RunConfig {
    std::optional<std::string> graph_path;
    std::optional<SyntheticGraphSpec> synthetic_graph;
    std::string out = "results";
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    std::vector<PolicyKind> policies;
    WorldConfig world;
    ExperimentSpec experiment;
    nlohmann::json resolved;  // echo embedded in every output
};

RunConfig run_config_from_json(const nlohmann::json& doc);

// Applies KEY=VALUE. Bare keys resolve against world, then top-level, then
// experiment settings; dotted keys are explicit paths. VALUE is parsed as JSON
// and falls back to a plain string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// Collects CROWDCHECK_SET_<KEY>=VALUE variables; "__" in KEY stands for '.'.
std::vector<std::string> env_overrides(char** environ_begin);

inline constexpr const char* kEnvOverridePrefix = "CROWDCHECK_SET_";

nlohmann::json to_json(const RunTrace& trace);

// Line-delimited trace: header record (policy, seed, config), one record per
// epoch, then the final belief state.
void write_trace(std::ostream& out, const RunTrace& trace, const nlohmann::json& config);

}  // namespace crowdcheck
