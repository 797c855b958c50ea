#include "crowdcheck/cli.hpp"

#include "crowdcheck/config.hpp"
#include "crowdcheck/experiments.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>

namespace crowdcheck::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Usage-level failure: reported and mapped to exit code 2.
struct UsageFailure {
    std::string message;
};

RunConfig load_config(const Options& opts) {
    if (opts.config_path.empty()) throw UsageFailure{"--config is required"};
    std::ifstream in(opts.config_path);
    if (!in) throw UsageFailure{"config file not found: " + opts.config_path};
    json doc = json::parse(in, nullptr, false, true);
    if (doc.is_discarded()) throw UsageFailure{"config file is not valid JSON: " + opts.config_path};

    try {
        for (const auto& s : opts.env_sets) apply_override(doc, s);
        for (const auto& s : opts.sets) apply_override(doc, s);
        if (opts.graph) doc["graph"] = *opts.graph;
        if (opts.out) doc["out"] = *opts.out;
        if (opts.seed) doc["seed"] = *opts.seed;
        if (opts.jobs) doc["jobs"] = *opts.jobs;
        return run_config_from_json(doc);
    } catch (const ConfigError& e) {
        std::string msg = "invalid configuration:";
        for (const auto& p : e.problems()) msg += "\n  " + p;
        throw UsageFailure{msg};
    }
}

std::shared_ptr<const SocialGraph> load_graph(const RunConfig& rc) {
    if (rc.synthetic_graph) {
        const auto& s = *rc.synthetic_graph;
        return std::make_shared<const SocialGraph>(synthetic_graph(s.kind, s.n, s.edge_prob, s.seed));
    }
    if (!rc.graph_path) throw UsageFailure{"no graph configured (set \"graph\" or pass --graph)"};
    if (!fs::exists(*rc.graph_path)) throw UsageFailure{"graph file not found: " + *rc.graph_path};
    return std::make_shared<const SocialGraph>(load_edge_list_file(*rc.graph_path).graph);
}

template <typename Body>
int guarded(std::ostream& err, Body body) {
    try {
        return body();
    } catch (const UsageFailure& u) {
        err << "error: " << u.message << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
}

}  // namespace

int cmd_run(const Options& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig rc = load_config(opts);
        const auto graph = load_graph(rc);
        const World world = build_world(graph, rc.world, rc.seed);
        const auto news = realize_news(world);

        const RunTrace oracle = run_policy(world, news, PolicyKind::oracle);
        const fs::path dir(rc.out);
        fs::create_directories(dir);

        std::ofstream csv(dir / "run.csv", std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write " + (dir / "run.csv").string());
        csv << kCsvHeader << '\n';

        for (PolicyKind kind : rc.policies) {
            const RunTrace trace = kind == PolicyKind::oracle ? oracle : run_policy(world, news, kind);
            const fs::path trace_path = dir / ("trace_" + trace.policy + ".jsonl");
            std::ofstream tf(trace_path, std::ios::binary);
            if (!tf) throw std::runtime_error("cannot write " + trace_path.string());
            write_trace(tf, trace, rc.resolved);

            for (std::size_t i = 0; i < trace.epochs.size(); ++i) {
                const double cum = trace.epochs[i].cumulative_utility;
                const double ref = oracle.epochs[i].cumulative_utility;
                const int t = static_cast<int>(i) + 1;
                csv << "run," << trace.policy << ",0," << rc.seed << ',' << t << ','
                    << format_number(cum) << ',' << format_number(cum / t) << ','
                    << format_number(ref > 0.0 ? cum / ref : cum / t) << '\n';
            }
            const double ref = oracle.final_utility();
            out << std::left << std::setw(16) << trace.policy << ' '
                << (ref > 0.0 ? format_number(trace.final_utility() / ref) : "unnormalized") << '\n';
        }
        return static_cast<int>(kOk);
    });
}

int cmd_sweep(const Options& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig rc = load_config(opts);
        std::shared_ptr<const SocialGraph> graph;
        if (rc.experiment.kind != ExperimentKind::regret_demo) graph = load_graph(rc);
        const auto result = run_experiment(rc.experiment, graph, rc.jobs);
        const auto files = write_results(result, rc.out, rc.resolved);
        for (const auto& f : files) out << "wrote " << f.string() << '\n';
        for (PolicyKind p : rc.experiment.policies) {
            for (double g : rc.experiment.resolved_grid()) {
                if (const auto* point = result.final_point(p, g)) {
                    out << std::left << std::setw(16) << to_string(p) << " grid=" << format_number(g)
                        << " util_norm=" << format_number(point->util_norm.mean) << " +- "
                        << format_number(point->util_norm.std) << '\n';
                }
            }
        }
        return static_cast<int>(kOk);
    });
}

int main(int argc, char** argv, char** envp, std::ostream& out, std::ostream& err) {
    CLI::App app{"Crowd-flag fake news detection simulator"};
    app.require_subcommand(1);
    Options opts;
    opts.env_sets = env_overrides(envp);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "JSON run configuration")->required();
        sub->add_option("--graph", opts.graph, "SNAP edge list (overrides config)");
        sub->add_option("--out", opts.out, "output directory");
        sub->add_option("--seed", opts.seed, "master seed");
        sub->add_option("--jobs", opts.jobs, "parallel sweep cells");
        sub->add_option("--set", opts.sets, "KEY=VALUE override (repeatable)");
    };
    CLI::App* run = app.add_subcommand("run", "simulate each configured policy once");
    CLI::App* sweep = app.add_subcommand("sweep", "run the configured experiment");
    add_common(run);
    add_common(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return kUsageError;
    }
    if (run->parsed()) return cmd_run(opts, out, err);
    return cmd_sweep(opts, out, err);
}

}  // namespace crowdcheck::cli
