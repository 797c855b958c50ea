#include "crowdcheck/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

#ifndef CROWDCHECK_VERSION
#define CROWDCHECK_VERSION "unknown"
#endif

namespace crowdcheck {

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::learning_curve: return "learning_curve";
        case ExperimentKind::engagement_sweep: return "engagement_sweep";
        case ExperimentKind::spammer_sweep: return "spammer_sweep";
        case ExperimentKind::regret_demo: return "regret_demo";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
    for (auto k : {ExperimentKind::learning_curve, ExperimentKind::engagement_sweep,
                   ExperimentKind::spammer_sweep, ExperimentKind::regret_demo})
        if (name == to_string(k)) return k;
    throw std::invalid_argument("unknown experiment kind: " + name);
}

std::vector<double> default_grid(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::engagement_sweep: return {0.0, 0.25, 0.5, 0.75, 1.0};
        case ExperimentKind::spammer_sweep: return {0.1, 0.3, 0.5, 0.7, 0.9};
        default: return {0.0};
    }
}

std::vector<double> ExperimentSpec::resolved_grid() const {
    return grid.empty() ? default_grid(kind) : grid;
}

WorldConfig config_at(const ExperimentSpec& spec, double x) {
    WorldConfig cfg = spec.base;
    switch (spec.kind) {
        case ExperimentKind::learning_curve: break;
        case ExperimentKind::engagement_sweep:
            if (x < 0.0 || x > 1.0) throw std::invalid_argument("engagement must be in [0,1]");
            for (auto& e : cfg.population) e.profile.gamma = 1.0 - x;
            break;
        case ExperimentKind::spammer_sweep: {
            if (x < 0.0 || x > 1.0) throw std::invalid_argument("good-user fraction must be in [0,1]");
            const double gamma = cfg.population.empty() ? 0.0 : cfg.population.front().profile.gamma;
            cfg.population = {{{0.9, 0.9, gamma}, x}, {{0.1, 0.1, gamma}, 1.0 - x}};
            break;
        }
        case ExperimentKind::regret_demo:
            cfg = make_regret_scenario(spec.regret_epsilon, spec.base.epochs).config;
            break;
    }
    return cfg;
}

Stat summarize(const std::vector<double>& values) {
    Stat s;
    s.n = values.size();
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

const SummaryPoint* AggregateResult::find(PolicyKind policy, double grid, int epoch) const {
    for (const auto& p : summary)
        if (p.policy == policy && p.grid == grid && p.epoch == epoch) return &p;
    return nullptr;
}

const SummaryPoint* AggregateResult::final_point(PolicyKind policy, double grid) const {
    const SummaryPoint* best = nullptr;
    for (const auto& p : summary)
        if (p.policy == policy && p.grid == grid && (!best || p.epoch > best->epoch)) best = &p;
    return best;
}

double AggregateResult::mean_regret(PolicyKind policy, int epoch) const {
    std::vector<double> values;
    for (const auto& r : regret_rows)
        if (r.policy == policy && r.epoch == epoch) values.push_back(r.regret);
    if (values.empty()) throw std::invalid_argument("no regret rows for that policy/epoch");
    return summarize(values).mean;
}

namespace {

std::vector<PolicyKind> unique_policies(const std::vector<PolicyKind>& in) {
    std::vector<PolicyKind> out;
    for (auto p : in)
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    return out;
}

// Cumulative utility per epoch, per policy, for one (grid, seed) cell.
using CellCurves = std::vector<std::vector<double>>;

std::vector<double> cumulative_curve(const RunTrace& trace) {
    std::vector<double> out;
    out.reserve(trace.epochs.size());
    for (const auto& e : trace.epochs) out.push_back(e.cumulative_utility);
    return out;
}

}  // namespace

AggregateResult run_experiment(const ExperimentSpec& spec, std::shared_ptr<const SocialGraph> graph,
                               unsigned jobs) {
    if (spec.seeds.empty()) throw std::invalid_argument("experiment needs at least one seed");
    if (spec.policies.empty()) throw std::invalid_argument("experiment needs at least one policy");
    const auto grid = spec.resolved_grid();
    if (grid.empty()) throw std::invalid_argument("experiment grid is empty");

    if (spec.kind == ExperimentKind::regret_demo) {
        graph = make_regret_scenario(spec.regret_epsilon, spec.base.epochs).graph;
    }
    if (!graph) throw std::invalid_argument("experiment needs a graph");

    const auto requested = unique_policies(spec.policies);
    std::vector<PolicyKind> to_run = requested;
    to_run.push_back(PolicyKind::oracle);
    if (spec.kind == ExperimentKind::regret_demo) to_run.push_back(PolicyKind::opt);
    to_run = unique_policies(to_run);
    const auto index_of = [&](PolicyKind k) {
        return static_cast<std::size_t>(std::find(to_run.begin(), to_run.end(), k) - to_run.begin());
    };

    // Validate every grid point up front so errors surface before work starts.
    std::vector<WorldConfig> configs;
    for (double x : grid) {
        configs.push_back(config_at(spec, x));
        configs.back().validate();
    }

    const std::size_t n_seeds = spec.seeds.size();
    // curves[seed][grid][policy] -> cumulative utility per epoch
    std::vector<std::vector<CellCurves>> curves(n_seeds, std::vector<CellCurves>(grid.size()));
    std::vector<std::string> errors(n_seeds);

    auto run_seed = [&](std::size_t si) {
        const std::uint64_t seed = spec.seeds[si];
        std::vector<NewsItem> base_news;
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            const World world = build_world(graph, configs[gi], seed);
            // Grid points differ only in user profiles, so cascades and labels
            // are realized once per seed and only the flags are redrawn.
            std::vector<NewsItem> news = gi == 0 ? realize_news(world) : reflag_news(world, base_news);
            CellCurves cell(to_run.size());
            for (std::size_t pi = 0; pi < to_run.size(); ++pi)
                cell[pi] = cumulative_curve(run_policy(world, news, to_run[pi]));
            curves[si][gi] = std::move(cell);
            if (gi == 0) base_news = std::move(news);
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n_seeds)));
    if (workers == 1) {
        for (std::size_t si = 0; si < n_seeds; ++si) run_seed(si);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t si; (si = next.fetch_add(1)) < n_seeds;) {
                    try {
                        run_seed(si);
                    } catch (const std::exception& e) {
                        errors[si] = e.what();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& e : errors)
            if (!e.empty()) throw std::runtime_error(e);
    }

    AggregateResult result;
    result.spec = spec;
    const std::size_t oracle = index_of(PolicyKind::oracle);
    const int epochs = configs.front().epochs;

    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        for (std::size_t si = 0; si < n_seeds; ++si) {
            const auto& ref = curves[si][gi][oracle];
            if (std::any_of(ref.begin(), ref.end(), [](double u) { return u <= 0.0; }))
                result.unnormalized.emplace_back(grid[gi], spec.seeds[si]);
        }
    }

    for (PolicyKind p : requested) {
        const std::size_t pi = index_of(p);
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            std::vector<std::vector<double>> cum(epochs), avg(epochs), norm(epochs);
            for (std::size_t si = 0; si < n_seeds; ++si) {
                const auto& curve = curves[si][gi][pi];
                const auto& ref = curves[si][gi][oracle];
                for (int t = 1; t <= epochs; ++t) {
                    ResultRow row;
                    row.policy = p;
                    row.grid = grid[gi];
                    row.seed = spec.seeds[si];
                    row.epoch = t;
                    row.util_cum = curve[t - 1];
                    row.util_avg = row.util_cum / t;
                    row.normalized = ref[t - 1] > 0.0;
                    row.util_norm = row.normalized ? row.util_cum / ref[t - 1] : row.util_avg;
                    result.rows.push_back(row);
                    cum[t - 1].push_back(row.util_cum);
                    avg[t - 1].push_back(row.util_avg);
                    norm[t - 1].push_back(row.util_norm);
                }
            }
            for (int t = 1; t <= epochs; ++t) {
                result.summary.push_back({p, grid[gi], t, summarize(cum[t - 1]), summarize(avg[t - 1]),
                                          summarize(norm[t - 1])});
            }
        }
    }

    if (spec.kind == ExperimentKind::regret_demo) {
        const std::size_t opt = index_of(PolicyKind::opt);
        for (PolicyKind p : requested) {
            const std::size_t pi = index_of(p);
            for (std::size_t si = 0; si < n_seeds; ++si) {
                const auto& mine = curves[si][0][pi];
                const auto& best = curves[si][0][opt];
                for (int t = 1; t <= epochs; ++t)
                    result.regret_rows.push_back({p, spec.seeds[si], t, best[t - 1] - mine[t - 1]});
            }
        }
    }
    return result;
}

std::string format_number(double x) {
    if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", x);
        return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string version_string() { return CROWDCHECK_VERSION; }

std::vector<std::filesystem::path> write_results(const AggregateResult& result,
                                                 const std::filesystem::path& out_dir,
                                                 const nlohmann::json& config_echo) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " + ec.message());

    const std::string kind = to_string(result.spec.kind);
    std::vector<fs::path> written;
    auto open = [&](const fs::path& path) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        written.push_back(path);
        return f;
    };

    {
        auto f = open(out_dir / (kind + ".csv"));
        f << kCsvHeader << '\n';
        for (const auto& r : result.rows) {
            f << kind << ',' << to_string(r.policy) << ',' << format_number(r.grid) << ',' << r.seed
              << ',' << r.epoch << ',' << format_number(r.util_cum) << ','
              << format_number(r.util_avg) << ',' << format_number(r.util_norm) << '\n';
        }
        if (!f) throw std::runtime_error("failed writing " + written.back().string());
    }

    if (result.spec.kind == ExperimentKind::regret_demo) {
        auto f = open(out_dir / (kind + "_regret.csv"));
        f << kRegretCsvHeader << '\n';
        for (const auto& r : result.regret_rows) {
            f << kind << ',' << to_string(r.policy) << ',' << r.seed << ',' << r.epoch << ','
              << format_number(r.regret) << '\n';
        }
        if (!f) throw std::runtime_error("failed writing " + written.back().string());
    }

    {
        nlohmann::json summary;
        summary["experiment"] = kind;
        summary["version"] = version_string();
        summary["spec"] = config_echo;
        summary["seeds"] = result.spec.seeds;
        summary["grid"] = result.spec.resolved_grid();
        nlohmann::json finals = nlohmann::json::array();
        for (PolicyKind p : unique_policies(result.spec.policies)) {
            for (double g : result.spec.resolved_grid()) {
                const SummaryPoint* point = result.final_point(p, g);
                if (!point) continue;
                finals.push_back({{"policy", to_string(p)},
                                  {"grid", g},
                                  {"epoch", point->epoch},
                                  {"util_norm_mean", point->util_norm.mean},
                                  {"util_norm_std", point->util_norm.std},
                                  {"util_cum_mean", point->util_cum.mean},
                                  {"util_cum_std", point->util_cum.std}});
            }
        }
        summary["final"] = finals;
        nlohmann::json flagged = nlohmann::json::array();
        for (const auto& [g, s] : result.unnormalized) flagged.push_back({{"grid", g}, {"seed", s}});
        summary["unnormalized"] = flagged;
        auto f = open(out_dir / (kind + "_summary.json"));
        f << summary.dump(2) << '\n';
    }
    return written;
}

}  // namespace crowdcheck
