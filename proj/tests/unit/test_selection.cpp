#include "crowdcheck/selection.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

using namespace crowdcheck;

namespace {

// Owns the storage behind a set of ActiveNewsViews.
struct ViewFixture {
    std::vector<std::vector<UserId>> exposed;
    std::vector<std::vector<std::uint8_t>> flagged;
    std::vector<ActiveNewsView> views;

    void add(NewsId id, UserId source, std::size_t value, std::vector<UserId> ex, std::vector<std::uint8_t> fl) {
        exposed.push_back(std::move(ex));
        flagged.push_back(std::move(fl));
        views.push_back({id, source, value, {}, {}});
    }
    EpochView view(std::size_t budget, double omega = 0.2) {
        for (std::size_t i = 0; i < views.size(); ++i) {
            views[i].exposed = exposed[i];
            views[i].flagged = flagged[i];
        }
        return EpochView{1, views, omega, budget};
    }
};

double total_score(const std::vector<Candidate>& cands, const std::vector<NewsId>& picked) {
    std::vector<double> s;
    for (NewsId id : picked)
        for (const auto& c : cands)
            if (c.id == id) s.push_back(c.score());
    std::sort(s.begin(), s.end(), std::greater<>());
    double sum = 0.0;
    for (double x : s) sum += x;
    return sum;
}

}  // namespace

TEST_CASE("topx picks the largest scores") {
    Rng rng(1);
    const std::vector<Candidate> c{{0, 0.9, 10}, {1, 0.5, 8}, {2, 1.0, 20}};
    CHECK(topx(c, 2, rng) == std::vector<NewsId>{2, 0});
    const auto all = topx(c, 10, rng);
    CHECK(std::set<NewsId>(all.begin(), all.end()) == std::set<NewsId>{0, 1, 2});
    CHECK_THROWS_AS(topx(c, 0, rng), std::invalid_argument);
    CHECK(topx({}, 3, rng).empty());
}

TEST_CASE("topx ties are broken uniformly") {
    Rng rng(2);
    const std::vector<Candidate> c{{0, 0.5, 4}, {1, 0.5, 4}, {2, 0.5, 4}, {3, 0.5, 4}, {4, 0.5, 4}};
    std::map<NewsId, int> counts;
    const int n = 10000;
    for (int i = 0; i < n; ++i) counts[topx(c, 1, rng)[0]]++;
    for (NewsId id = 0; id < 5; ++id) CHECK(std::abs(counts[id] / double(n) - 0.2) <= 0.02);
}

TEST_CASE("topx matches exhaustive search") {
    Rng rng(3);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t n = rng.uniform_index(9);
        std::vector<Candidate> c;
        for (std::size_t i = 0; i < n; ++i)
            c.push_back({static_cast<NewsId>(i), rng.uniform_index(5) / 4.0, rng.uniform_index(6)});
        const std::size_t k = 1 + rng.uniform_index(3);
        const auto picked = topx(c, k, rng);
        CHECK(picked.size() == std::min(k, n));
        CHECK(total_score(c, picked) == oracle::exhaustive_best(c, k));
    }
}

TEST_CASE("topx is invariant under rescaling values") {
    Rng setup(4);
    std::vector<Candidate> c, scaled;
    for (NewsId i = 0; i < 30; ++i) {
        c.push_back({i, setup.uniform(), 1 + setup.uniform_index(1000)});
        scaled.push_back(c.back());
        scaled.back().value *= 7;
    }
    Rng a(9), b(9);
    CHECK(topx(c, 5, a) == topx(scaled, 5, b));
}

TEST_CASE("policy names round-trip") {
    for (PolicyKind k : all_policy_kinds()) CHECK(parse_policy_kind(to_string(k)) == k);
    CHECK(all_policy_kinds().size() == 7);
    CHECK_THROWS_AS(parse_policy_kind("greedy"), std::invalid_argument);
}

TEST_CASE("policies that need privileged inputs refuse to build without them") {
    CHECK_THROWS_AS(make_policy(PolicyKind::opt, {}), std::invalid_argument);
    CHECK_THROWS_AS(make_policy(PolicyKind::oracle, {}), std::invalid_argument);
    for (PolicyKind k : {PolicyKind::detective, PolicyKind::point_estimate, PolicyKind::fixed_cm,
                         PolicyKind::no_learn, PolicyKind::random})
        CHECK(make_policy(k, {})->kind() == k);
}

TEST_CASE("oracle returns only fakes, without padding") {
    ViewFixture fx;
    for (NewsId id = 0; id < 10; ++id) fx.add(id, 0, 10 + id, {0}, {0});
    PolicyResources res;
    res.label_oracle = [](NewsId id) { return id == 3 || id == 7 ? Label::fake : Label::not_fake; };
    auto oracle = make_policy(PolicyKind::oracle, res);
    BeliefState belief(1);
    Rng rng(5);
    const auto picked = oracle->select(fx.view(5), belief, rng);
    CHECK(std::set<NewsId>(picked.begin(), picked.end()) == std::set<NewsId>{3, 7});
}

TEST_CASE("no_learn picks by value") {
    ViewFixture fx;
    fx.add(0, 0, 5, {0}, {0});
    fx.add(1, 0, 3, {0}, {0});
    fx.add(2, 0, 9, {0}, {0});
    auto p = make_policy(PolicyKind::no_learn, {});
    BeliefState belief(1);
    Rng rng(6);
    CHECK(p->select(fx.view(1), belief, rng) == std::vector<NewsId>{2});
}

TEST_CASE("random picks a uniform subset of the budget size") {
    ViewFixture fx;
    for (NewsId id = 0; id < 6; ++id) fx.add(id, 0, 1, {0}, {0});
    auto p = make_policy(PolicyKind::random, {});
    BeliefState belief(1);
    Rng rng(7);
    std::map<NewsId, int> counts;
    for (int i = 0; i < 6000; ++i) {
        const auto picked = p->select(fx.view(2), belief, rng);
        CHECK(std::set<NewsId>(picked.begin(), picked.end()).size() == 2);
        for (NewsId id : picked) counts[id]++;
    }
    for (NewsId id = 0; id < 6; ++id) CHECK(std::abs(counts[id] / 6000.0 - 1.0 / 3.0) <= 0.03);
}

TEST_CASE("fixed_cm treats every user as 0.6-accurate") {
    // Fixed 0.6 params make a flag evidence for fake; the flagged news wins.
    ViewFixture fx;
    fx.add(0, 0, 10, {0, 1, 2}, {0, 0, 0});
    fx.add(1, 0, 10, {0, 1, 2}, {0, 1, 1});
    auto p = make_policy(PolicyKind::fixed_cm, {});
    BeliefState belief(3);
    Rng rng(8);
    CHECK(p->select(fx.view(1), belief, rng) == std::vector<NewsId>{1});
}

TEST_CASE("opt uses the true parameters") {
    // User 1 is a spammer: their flag points away from fake.
    ViewFixture fx;
    fx.add(0, 0, 10, {0, 1}, {0, 1});
    fx.add(1, 0, 10, {0, 1}, {0, 0});
    PolicyResources res;
    res.true_params = std::vector<FlaggingParams>{{0.5, 0.5}, {0.1, 0.1}};
    auto p = make_policy(PolicyKind::opt, res);
    BeliefState belief(2);
    Rng rng(9);
    CHECK(p->select(fx.view(1), belief, rng) == std::vector<NewsId>{1});
}

TEST_CASE("detective with concentrated beliefs agrees with opt") {
    Rng setup(10);
    const std::size_t users = 20;
    std::vector<FlaggingParams> truth(users);
    for (auto& t : truth) t = {0.05 + 0.9 * setup.uniform(), 0.05 + 0.9 * setup.uniform()};

    ViewFixture fx;
    for (NewsId id = 0; id < 12; ++id) {
        std::vector<UserId> ex{0};
        std::vector<std::uint8_t> fl{0};
        for (UserId u = 1; u < users; ++u)
            if (setup.bernoulli(0.5)) {
                ex.push_back(u);
                fl.push_back(setup.bernoulli(0.5));
            }
        fx.add(id, 0, 5 + setup.uniform_index(50), ex, fl);
    }

    BeliefState belief(users);
    for (UserId u = 0; u < users; ++u)
        belief.set_prior_override(u, {1e4 * truth[u].theta_notfake, 1e4 * (1 - truth[u].theta_notfake)},
                                  {1e4 * truth[u].theta_fake, 1e4 * (1 - truth[u].theta_fake)});

    PolicyResources res;
    res.true_params = truth;
    auto opt = make_policy(PolicyKind::opt, res);
    auto det = make_policy(PolicyKind::detective, res);
    const EpochView view = fx.view(3);

    Rng r1(11);
    auto opt_pick = opt->select(view, belief, r1);
    const std::set<NewsId> target(opt_pick.begin(), opt_pick.end());
    int agree = 0;
    Rng r2(12);
    for (int trial = 0; trial < 200; ++trial) {
        const auto pick = det->select(view, belief, r2);
        agree += std::set<NewsId>(pick.begin(), pick.end()) == target;
    }
    CHECK(agree >= 190);
}

TEST_CASE("point estimate is deterministic given the belief") {
    ViewFixture fx;
    fx.add(0, 0, 10, {0, 1}, {0, 1});
    fx.add(1, 0, 12, {0, 1}, {0, 0});
    BeliefState belief(2);
    belief.histories()[1].fake_given_fake = 20;
    belief.histories()[1].notfake_given_notfake = 20;
    auto p = make_policy(PolicyKind::point_estimate, {});
    Rng rng(13);
    for (int i = 0; i < 20; ++i) CHECK(p->select(fx.view(1), belief, rng) == std::vector<NewsId>{0});
}

TEST_CASE("zero-value candidates score zero") {
    ViewFixture fx;
    fx.add(0, 0, 0, {0, 1}, {0, 1});
    fx.add(1, 0, 1, {0, 1}, {0, 0});
    const std::vector<FlaggingParams> params{{0.5, 0.5}, {0.99, 0.99}};
    Rng rng(14);
    CHECK(topx_with_params(fx.view(1), params, rng) == std::vector<NewsId>{1});
}
