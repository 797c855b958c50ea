#pragma once

#include "crowdcheck/cascade.hpp"
#include "crowdcheck/graph.hpp"
#include "crowdcheck/inference.hpp"
#include "crowdcheck/rng.hpp"
#include "crowdcheck/selection.hpp"
#include "crowdcheck/usermodel.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace crowdcheck {

class ProtocolError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class HistoryUpdate {
    at_label,    // histories change only when an expert reviews a news
    continuous,  // cleared news keep feeding histories as they spread
};

const char* to_string(HistoryUpdate mode);
HistoryUpdate parse_history_update(const std::string& name);

struct FakeClass {
    double fraction = 1.0;
    double fake_prob = 0.2;
};

// Pins a user's profile; one of `choices` is drawn uniformly at world build.
struct ProfileOverride {
    UserId user = 0;
    std::vector<UserProfile> choices;
};

// A user whose parameters the learning policies already know: their prior is
// Beta(strength * theta, strength * (1 - theta)) for each parameter.
struct KnownUser {
    UserId user = 0;
    FlaggingParams params;
    double strength = 1e6;
};

PopulationSpec equal_thirds_population(double gamma = 0.0);

struct WorldConfig {
    int epochs = 100;
    std::size_t budget = 5;
    std::size_t sources_per_epoch = 25;
    double news_prior = 0.2;
    int rounds_per_epoch = kDefaultRoundsPerEpoch;
    int max_rounds = kDefaultMaxRounds;
    double infection_prob_base = 0.1;
    double infection_prob_spread = 0.1;
    std::vector<FakeClass> fake_classes{{0.2, 0.6}, {0.4, 0.2}, {0.4, 0.01}};
    double frequent_spreader_fraction = 0.1;
    PopulationSpec population = equal_thirds_population();
    BetaPrior prior_notfake;
    BetaPrior prior_fake;
    HistoryUpdate history_update = HistoryUpdate::continuous;
    double fixed_cm_theta = 0.6;
    // Multiplicative noise on the val^t the policies see (0 = exact).
    double value_noise = 0.0;

    // Scenario hooks. When fixed_sources is non-empty every epoch seeds one
    // news from each listed user instead of drawing sources.
    std::vector<UserId> fixed_sources;
    std::vector<ProfileOverride> profile_overrides;
    std::vector<KnownUser> known_users;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
    std::size_t news_per_epoch() const {
        return fixed_sources.empty() ? sources_per_epoch : fixed_sources.size();
    }
};

// Immutable ground truth for one (graph, config, seed).
struct World {
    std::shared_ptr<const SocialGraph> graph;
    WorldConfig config;
    std::uint64_t seed = 0;
    std::vector<UserProfile> profiles;
    std::vector<FlaggingParams> true_params;
    std::vector<double> fake_prob;  // per source user
    std::vector<char> frequent;     // membership in the frequent-spreader set
    std::vector<UserId> frequent_users;
    std::vector<UserId> occasional_users;
};

World build_world(std::shared_ptr<const SocialGraph> graph, const WorldConfig& cfg,
                  std::uint64_t seed);

// A seeded news with its full realized future. Flags are drawn once per
// (news, user) at first exposure and stored parallel to the activation order.
struct NewsItem {
    NewsId id = 0;
    UserId source = 0;
    Label true_label = Label::not_fake;
    int seeded_epoch = 0;
    std::shared_ptr<const CascadeTrajectory> trajectory;
    std::vector<std::uint8_t> flags;

    // Age in epochs at the end of `epoch` (1 in the seeding epoch).
    int age_at(int epoch) const { return epoch - seeded_epoch + 1; }
};

// Seeds the news of one epoch. Draws sources, labels and infection
// probabilities from `rng`; each cascade and flag set uses its own substream
// keyed by news id.
std::vector<NewsItem> seed_news(const World& world, int epoch, Rng& rng);

// Every news of epochs 1..T. Policy-independent, so all policies of one
// (world, seed) can replay the same realization.
std::vector<NewsItem> realize_news(const World& world);

// Redraws flags for news realized in a world that differs from `world` only
// in user profiles; equals realize_news(world).
std::vector<NewsItem> reflag_news(const World& world, std::span<const NewsItem> news);

enum class NewsStatus : std::uint8_t { pending, active, blocked, cleared };

struct EpochRecord {
    int epoch = 0;
    std::vector<NewsId> seeded;
    std::vector<NewsId> selected;
    std::vector<Label> verdicts;
    std::vector<std::size_t> values;  // true val^t of each selected news
    double utility = 0.0;
    double cumulative_utility = 0.0;
};

struct RunTrace {
    std::string policy;
    std::uint64_t seed = 0;
    std::vector<EpochRecord> epochs;
    std::vector<UserHistory> final_histories;
    BetaPrior prior_notfake;
    BetaPrior prior_fake;

    double final_utility() const { return epochs.empty() ? 0.0 : epochs.back().cumulative_utility; }
};

// One policy playing the epoch loop against a realized world.
class Simulation {
public:
    Simulation(const World& world, std::span<const NewsItem> news, std::unique_ptr<Policy> policy);

    // Seed, spread and flag, select, review, update histories, accrue utility.
    EpochRecord run_epoch(int epoch);

    RunTrace run();

    const BeliefState& belief() const { return belief_; }
    NewsStatus status(NewsId id) const { return status_.at(id); }
    // Users who have seen the news by the end of `epoch`; frozen once blocked.
    std::size_t visible_exposure(NewsId id, int epoch) const;
    std::span<const NewsId> active() const { return active_; }
    double cumulative_utility() const { return cumulative_; }

private:
    std::size_t perceived_value(const NewsItem& item, std::size_t value, int epoch);

    const World& world_;
    std::span<const NewsItem> news_;
    std::unique_ptr<Policy> policy_;
    BeliefState belief_;
    Rng policy_rng_;
    std::vector<NewsStatus> status_;
    std::vector<int> blocked_age_;
    std::vector<NewsId> active_;
    std::vector<NewsId> cleared_;
    std::vector<EpochRecord> records_;
    double cumulative_ = 0.0;
    int last_epoch_ = 0;
};

PolicyResources policy_resources(const World& world, std::span<const NewsItem> news);

RunTrace run_policy(const World& world, std::span<const NewsItem> news, PolicyKind kind);

RunTrace run_simulation(std::shared_ptr<const SocialGraph> graph, const WorldConfig& cfg,
                        PolicyKind kind, std::uint64_t seed);

// Util(t, opt) - Util(t, algo) for every epoch.
std::vector<double> regret(const RunTrace& opt_trace, const RunTrace& algo_trace);

// Two flagging users: `known` has params (0.5+eps, 0.5+eps) and is known to
// the learners; `unknown` is an expert (1,1) or a spammer (0,0), drawn per
// seed. Sources reaching the known user outnumber those reaching the unknown
// one, every news is worth the same, and value vanishes one epoch after
// seeding. Everyone else abstains.
struct RegretScenario {
    std::shared_ptr<const SocialGraph> graph;
    WorldConfig config;
    UserId known_user = 0;
    UserId unknown_user = 1;
};

RegretScenario make_regret_scenario(double epsilon = 0.05, int epochs = 200);

}  // namespace crowdcheck
