#include "crowdcheck/cascade.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace crowdcheck;

TEST_CASE("p = 1 on a star activates every leaf in round 1") {
    const auto g = synthetic_graph(SyntheticKind::star, 6);
    Rng rng(1);
    const auto t = simulate_cascade(g, 0, 1.0, 600, rng);
    CHECK(t.eventual_size() == 6);
    CHECK(t.last_round() == 1);
    for (UserId u = 1; u < 6; ++u) CHECK(t.activation_round(u) == 1);
}

TEST_CASE("p = 0 activates only the source") {
    const auto g = synthetic_graph(SyntheticKind::complete, 8);
    Rng rng(2);
    const auto t = simulate_cascade(g, 3, 0.0, 600, rng);
    CHECK(t.eventual_size() == 1);
    CHECK(t.activation_round(3) == 0);
    CHECK_FALSE(t.activation_round(0).has_value());
    CHECK(eventual_exposure(t).size() == 1);
}

TEST_CASE("path hand trace") {
    const auto g = synthetic_graph(SyntheticKind::path, 4);
    Rng rng(3);
    const auto t = simulate_cascade(g, 0, 1.0, 600, rng);
    for (UserId u = 0; u < 4; ++u) CHECK(t.activation_round(u) == static_cast<int>(u));

    auto e0 = exposure_at(t, 0, 2);
    CHECK(std::vector<UserId>(e0.begin(), e0.end()) == std::vector<UserId>{0});
    auto e1 = exposure_at(t, 1, 2);
    CHECK(std::vector<UserId>(e1.begin(), e1.end()) == std::vector<UserId>{0, 1, 2});
    CHECK(remaining_value(t, 1, 2) == 1);
    CHECK(exhaustion_epoch(t, 2) == 2);
    CHECK(exposure_at(t, 2, 2).size() == 4);
    CHECK(remaining_value(t, 7, 2) == 0);
}

TEST_CASE("max_rounds caps the cascade") {
    const auto g = synthetic_graph(SyntheticKind::path, 10);
    Rng rng(4);
    const auto t = simulate_cascade(g, 0, 1.0, 3, rng);
    CHECK(t.eventual_size() == 4);
}

TEST_CASE("argument checks") {
    const auto g = synthetic_graph(SyntheticKind::path, 3);
    Rng rng(5);
    CHECK_THROWS_AS(simulate_cascade(g, 0, 1.5, 600, rng), std::invalid_argument);
    CHECK_THROWS_AS(simulate_cascade(g, 0, 0.5, 0, rng), std::invalid_argument);
    CHECK_THROWS_AS(simulate_cascade(g, 9, 0.5, 600, rng), std::out_of_range);
    const auto t = simulate_cascade(g, 0, 1.0, 600, rng);
    CHECK_THROWS_AS(exposure_count_at(t, -1, 2), std::invalid_argument);
    CHECK_THROWS_AS(exposure_count_at(t, 1, 0), std::invalid_argument);
}

TEST_CASE("p = 1 reaches the whole connected component") {
    const auto g = synthetic_graph(SyntheticKind::erdos_renyi, 300, 0.05, 8);
    Rng rng(6);
    const auto t = simulate_cascade(g, 0, 1.0, 600, rng);
    CHECK(t.eventual_size() == 300);
}

TEST_CASE("trajectory properties on random graphs") {
    const auto g = synthetic_graph(SyntheticKind::erdos_renyi, 400, 0.02, 9);
    Rng rng(7);
    for (int rep = 0; rep < 40; ++rep) {
        const auto src = static_cast<UserId>(rng.uniform_index(g.node_count()));
        const auto t = simulate_cascade(g, src, 0.15, 600, rng);
        const int rpe = 1 + rep % 3;
        const int last = exhaustion_epoch(t, rpe);

        // Prefix monotonicity and the value telescoping identity.
        for (int e = 0; e <= last + 1; ++e) {
            const auto now = exposure_at(t, e, rpe);
            const auto next = exposure_at(t, e + 1, rpe);
            CHECK(now.size() <= next.size());
            CHECK(std::equal(now.begin(), now.end(), next.begin()));
            CHECK(remaining_value(t, e, rpe) - remaining_value(t, e + 1, rpe) ==
                  next.size() - now.size());
        }
        CHECK(exposure_at(t, last, rpe).size() == t.eventual_size());
        if (last > 0) CHECK(exposure_at(t, last - 1, rpe).size() < t.eventual_size());

        // Frontier validity: each activation has a neighbor from the previous round.
        std::set<UserId> seen;
        for (UserId u : t.activation_order()) {
            CHECK(seen.insert(u).second);
            const int r = *t.activation_round(u);
            if (u == src) {
                CHECK(r == 0);
                continue;
            }
            bool has_parent = false;
            for (UserId v : g.neighbors(u))
                if (auto rv = t.activation_round(v); rv && *rv == r - 1) has_parent = true;
            CHECK(has_parent);
        }
    }
}

TEST_CASE("two-node activation frequency matches p") {
    const auto g = synthetic_graph(SyntheticKind::path, 2);
    Rng rng(12345);
    const int n = 10000;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += simulate_cascade(g, 0, 0.3, 600, rng).eventual_size() == 2;
    CHECK(std::abs(static_cast<double>(hits) / n - 0.3) <= 0.02);
}
