#include "crowdcheck/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace crowdcheck;
namespace fs = std::filesystem;

namespace {

std::shared_ptr<const SocialGraph> small_graph() {
    static auto g = std::make_shared<const SocialGraph>(synthetic_graph(SyntheticKind::erdos_renyi, 400, 0.02, 3));
    return g;
}

ExperimentSpec small_spec(ExperimentKind kind) {
    ExperimentSpec s;
    s.kind = kind;
    s.base.epochs = 15;
    s.base.sources_per_epoch = 10;
    s.seeds = {1, 2, 3};
    return s;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("crowdcheck_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("grids and names") {
    CHECK(default_grid(ExperimentKind::engagement_sweep) == std::vector<double>{0, 0.25, 0.5, 0.75, 1.0});
    CHECK(default_grid(ExperimentKind::spammer_sweep) == std::vector<double>{0.1, 0.3, 0.5, 0.7, 0.9});
    CHECK(default_grid(ExperimentKind::learning_curve) == std::vector<double>{0});
    for (auto k : {ExperimentKind::learning_curve, ExperimentKind::engagement_sweep, ExperimentKind::spammer_sweep,
                   ExperimentKind::regret_demo})
        CHECK(parse_experiment_kind(to_string(k)) == k);
    CHECK_THROWS(parse_experiment_kind("fig9"));
}

TEST_CASE("grid points rewrite the population") {
    ExperimentSpec s = small_spec(ExperimentKind::engagement_sweep);
    const auto cfg = config_at(s, 0.25);
    for (const auto& e : cfg.population) CHECK(e.profile.gamma == doctest::Approx(0.75));

    s.kind = ExperimentKind::spammer_sweep;
    const auto sp = config_at(s, 0.3);
    double good = 0.0, bad = 0.0;
    for (const auto& e : sp.population) {
        if (e.profile.alpha == 0.9 && e.profile.beta == 0.9) good += e.fraction;
        if (e.profile.alpha == 0.1 && e.profile.beta == 0.1) bad += e.fraction;
    }
    CHECK(good == doctest::Approx(0.3));
    CHECK(bad == doctest::Approx(0.7));
}

TEST_CASE("summary statistics use the unbiased estimator") {
    const auto s = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.n == 4);
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(summarize({7.0}).std == 0.0);
}

TEST_CASE("oracle normalizes to one at every epoch") {
    ExperimentSpec s = small_spec(ExperimentKind::learning_curve);
    s.policies = {PolicyKind::oracle};
    const auto r = run_experiment(s, small_graph());
    CHECK(r.rows.size() == 3 * 15);
    for (const auto& p : r.summary)
        if (p.util_cum.mean > 0) CHECK(p.util_norm.mean == 1.0);
}

TEST_CASE("common random numbers: every cell of a seed replays one world") {
    ExperimentSpec s = small_spec(ExperimentKind::engagement_sweep);
    s.policies = {PolicyKind::no_learn, PolicyKind::random, PolicyKind::detective};
    const auto r = run_experiment(s, small_graph());
    CHECK(r.find(PolicyKind::oracle, 0.0, 1) == nullptr);  // runs, but only to normalize

    // Flag-blind policies see the same cascades at every grid point.
    for (const auto& row : r.rows) {
        if (row.policy == PolicyKind::detective) continue;
        for (const auto& other : r.rows)
            if (other.policy == row.policy && other.seed == row.seed && other.epoch == row.epoch)
                CHECK(other.util_cum == row.util_cum);
    }
    // A cell equals a standalone simulation of the same (config, seed).
    for (auto seed : s.seeds) {
        const auto trace = run_simulation(small_graph(), config_at(s, 0.5), PolicyKind::detective, seed);
        for (const auto& row : r.rows)
            if (row.policy == PolicyKind::detective && row.grid == 0.5 && row.seed == seed && row.epoch == 15)
                CHECK(row.util_cum == trace.final_utility());
    }
}

TEST_CASE("flags without information leave learners at no_learn") {
    ExperimentSpec s = small_spec(ExperimentKind::engagement_sweep);
    s.base.epochs = 40;
    s.grid = {0.0};
    s.seeds = {1, 2, 3, 4, 5};
    s.policies = {PolicyKind::detective, PolicyKind::fixed_cm, PolicyKind::no_learn};
    const auto r = run_experiment(s, small_graph());
    const double base = r.final_point(PolicyKind::no_learn, 0.0)->util_norm.mean;
    CHECK(std::abs(r.final_point(PolicyKind::detective, 0.0)->util_norm.mean - base) <= 0.05);
    CHECK(std::abs(r.final_point(PolicyKind::fixed_cm, 0.0)->util_norm.mean - base) <= 0.05);
}

TEST_CASE("with only good users fixed_cm tracks opt") {
    ExperimentSpec s = small_spec(ExperimentKind::spammer_sweep);
    s.base.epochs = 40;
    s.grid = {1.0};
    s.seeds = {1, 2, 3, 4, 5};
    s.policies = {PolicyKind::opt, PolicyKind::fixed_cm};
    const auto r = run_experiment(s, small_graph());
    CHECK(std::abs(r.final_point(PolicyKind::opt, 1.0)->util_norm.mean -
                   r.final_point(PolicyKind::fixed_cm, 1.0)->util_norm.mean) <= 0.1);
}

TEST_CASE("zero oracle utility is reported unnormalized") {
    ExperimentSpec s = small_spec(ExperimentKind::learning_curve);
    s.base.fake_classes = {{1.0, 0.0}};
    s.policies = {PolicyKind::random};
    s.seeds = {4};
    const auto r = run_experiment(s, small_graph());
    CHECK_FALSE(r.unnormalized.empty());
    for (const auto& row : r.rows) {
        CHECK_FALSE(row.normalized);
        CHECK(row.util_norm == row.util_avg);
    }
}

TEST_CASE("result files") {
    ExperimentSpec s = small_spec(ExperimentKind::learning_curve);
    s.policies = {PolicyKind::oracle, PolicyKind::detective, PolicyKind::random};
    const auto dir = scratch("results");
    const auto r = run_experiment(s, small_graph(), 1);
    const auto files = write_results(r, dir, nlohmann::json{{"echo", 1}});
    REQUIRE(files.size() == 2);

    const std::string csv = slurp(dir / "learning_curve.csv");
    CHECK(csv.substr(0, csv.find('\n')) == "experiment,policy,grid,seed,epoch,util_cum,util_avg,util_norm");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 3 * 15);

    const auto summary = nlohmann::json::parse(slurp(dir / "learning_curve_summary.json"));
    CHECK(summary.at("spec").contains("echo"));
    CHECK(summary.contains("version"));
    CHECK(summary.at("final").size() == 3);

    SUBCASE("reruns are byte-identical regardless of jobs") {
        const auto again = scratch("results_again");
        write_results(run_experiment(s, small_graph(), 4), again, nlohmann::json{{"echo", 1}});
        CHECK(slurp(again / "learning_curve.csv") == csv);
        CHECK(slurp(again / "learning_curve_summary.json") == slurp(dir / "learning_curve_summary.json"));
    }
    SUBCASE("empty result writes only the header") {
        AggregateResult empty;
        empty.spec = s;
        const auto d = scratch("empty");
        write_results(empty, d, nlohmann::json::object());
        CHECK(slurp(d / "learning_curve.csv") == std::string(kCsvHeader) + "\n");
    }
    SUBCASE("unwritable destinations name the path") {
        const auto blocker = scratch("blocker");
        std::ofstream(blocker.string()) << "x";
        try {
            write_results(r, blocker / "sub", nlohmann::json::object());
            FAIL("expected an error");
        } catch (const std::exception& e) {
            CHECK(std::string(e.what()).find(blocker.string()) != std::string::npos);
        }
        fs::remove(blocker);
    }
}

TEST_CASE("regret demo") {
    ExperimentSpec s = small_spec(ExperimentKind::regret_demo);
    s.base.epochs = 40;
    s.policies = {PolicyKind::detective, PolicyKind::point_estimate};
    const auto r = run_experiment(s, nullptr);
    CHECK(r.regret_rows.size() == 2 * 3 * 40);
    for (const auto& row : r.regret_rows) CHECK(std::isfinite(row.regret));
    CHECK(r.mean_regret(PolicyKind::point_estimate, 40) >= 0.0);

    const auto dir = scratch("regret");
    const auto files = write_results(r, dir, nlohmann::json::object());
    CHECK(files.size() == 3);
    const std::string csv = slurp(dir / "regret_demo_regret.csv");
    CHECK(csv.substr(0, csv.find('\n')) == kRegretCsvHeader);
}

TEST_CASE("number formatting") {
    CHECK(format_number(3.0) == "3");
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(-2.0) == "-2");
    CHECK_FALSE(version_string().empty());
}
