#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace crowdcheck::cli {

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kUsageError = 2 };

struct Options {
    std::string config_path;
    std::optional<std::string> graph;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
    std::vector<std::string> sets;       // KEY=VALUE, applied after env overrides
    std::vector<std::string> env_sets;   // from CROWDCHECK_SET_* variables
};

// One simulation per configured policy on a shared world; writes
// trace_<policy>.jsonl and run.csv, prints final normalized utilities.
int cmd_run(const Options& opts, std::ostream& out, std::ostream& err);

// The configured experiment; writes <kind>.csv and <kind>_summary.json.
int cmd_sweep(const Options& opts, std::ostream& out, std::ostream& err);

int main(int argc, char** argv, char** envp, std::ostream& out, std::ostream& err);

}  // namespace crowdcheck::cli
