#include "crowdcheck/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace crowdcheck {

const char* to_string(HistoryUpdate mode) {
    return mode == HistoryUpdate::at_label ? "at_label" : "continuous";
}

HistoryUpdate parse_history_update(const std::string& name) {
    if (name == "at_label") return HistoryUpdate::at_label;
    if (name == "continuous") return HistoryUpdate::continuous;
    throw std::invalid_argument("unknown history_update mode: " + name);
}

PopulationSpec equal_thirds_population(double gamma) {
    const double third = 1.0 / 3.0;
    return {{{0.9, 0.9, gamma}, third}, {{0.1, 0.1, gamma}, third}, {{0.5, 0.5, gamma}, third}};
}

namespace {

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw std::invalid_argument(field + ": " + why);
}

bool is_probability(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void WorldConfig::validate() const {
    require(epochs >= 1, "epochs", "must be >= 1");
    require(budget >= 1, "budget", "must be >= 1");
    require(fixed_sources.empty() ? sources_per_epoch >= 1 : true, "sources_per_epoch", "must be >= 1");
    require(news_prior > 0.0 && news_prior < 1.0, "news_prior", "must be in (0,1)");
    require(rounds_per_epoch >= 1, "rounds_per_epoch", "must be >= 1");
    require(max_rounds >= 1, "max_rounds", "must be >= 1");
    require(is_probability(infection_prob_base) && infection_prob_spread >= 0.0 &&
                infection_prob_base + infection_prob_spread <= 1.0,
            "infection_prob_base", "base + spread must be a probability");
    require(!fake_classes.empty(), "fake_classes", "must not be empty");
    double total = 0.0;
    for (const auto& c : fake_classes) {
        require(c.fraction >= 0.0, "fake_classes", "fractions must be non-negative");
        require(is_probability(c.fake_prob), "fake_classes", "fake_prob must be in [0,1]");
        total += c.fraction;
    }
    require(std::abs(total - 1.0) <= 1e-9, "fake_classes", "fractions must sum to 1");
    require(is_probability(frequent_spreader_fraction), "frequent_spreader_fraction",
            "must be in [0,1]");
    try {
        crowdcheck::validate(population);
        crowdcheck::validate(prior_notfake);
        crowdcheck::validate(prior_fake);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("population/priors: ") + e.what());
    }
    require(fixed_cm_theta >= 0.0 && fixed_cm_theta <= 1.0, "fixed_cm_theta", "must be in [0,1]");
    require(value_noise >= 0.0, "value_noise", "must be >= 0");
    for (const auto& o : profile_overrides) {
        require(!o.choices.empty(), "profile_overrides", "needs at least one choice");
        for (const auto& p : o.choices) crowdcheck::validate(p);
    }
    for (const auto& k : known_users) require(k.strength > 0.0, "known_users", "strength must be > 0");
}

World build_world(std::shared_ptr<const SocialGraph> graph, const WorldConfig& cfg,
                  std::uint64_t seed) {
    if (!graph) throw std::invalid_argument("world needs a graph");
    cfg.validate();
    const std::size_t n = graph->node_count();
    if (n == 0) throw std::invalid_argument("world graph has no users");
    if (cfg.fixed_sources.empty() && cfg.sources_per_epoch > n)
        throw std::invalid_argument("sources_per_epoch exceeds the number of users");
    for (UserId s : cfg.fixed_sources)
        if (s >= n) throw std::invalid_argument("fixed source out of range");

    World w;
    w.graph = std::move(graph);
    w.config = cfg;
    w.seed = seed;

    // Fake-generation class per user: exact counts, random permutation.
    {
        std::vector<double> fractions;
        for (const auto& c : cfg.fake_classes) fractions.push_back(c.fraction);
        const auto counts = largest_remainder_counts(fractions, n);
        w.fake_prob.reserve(n);
        for (std::size_t i = 0; i < counts.size(); ++i)
            w.fake_prob.insert(w.fake_prob.end(), counts[i], cfg.fake_classes[i].fake_prob);
        Rng rng = substream(seed, "fake_classes");
        for (std::size_t i = n; i > 1; --i) std::swap(w.fake_prob[i - 1], w.fake_prob[rng.uniform_index(i)]);
    }

    // Frequent spreaders U_n.
    {
        const double frac = cfg.frequent_spreader_fraction;
        const std::vector<double> fractions{frac, 1.0 - frac};
        const auto counts = largest_remainder_counts(fractions, n);
        w.frequent.assign(n, 0);
        std::fill(w.frequent.begin(), w.frequent.begin() + static_cast<std::ptrdiff_t>(counts[0]), 1);
        Rng rng = substream(seed, "spreaders");
        for (std::size_t i = n; i > 1; --i) std::swap(w.frequent[i - 1], w.frequent[rng.uniform_index(i)]);
        for (UserId u = 0; u < n; ++u) (w.frequent[u] ? w.frequent_users : w.occasional_users).push_back(u);
    }

    {
        Rng rng = substream(seed, "population");
        w.profiles = assign_population(cfg.population, n, rng);
        Rng pick = substream(seed, "profile_overrides");
        for (const auto& o : cfg.profile_overrides) {
            if (o.user >= n) throw std::invalid_argument("profile override for unknown user");
            w.profiles[o.user] = o.choices[pick.uniform_index(o.choices.size())];
        }
    }
    w.true_params = flagging_params(w.profiles);
    for (const auto& k : cfg.known_users)
        if (k.user >= n) throw std::invalid_argument("known user out of range");
    return w;
}

namespace {

UserId draw_source(const World& w, Rng& rng) {
    const bool use_frequent =
        w.occasional_users.empty() || (!w.frequent_users.empty() && rng.uniform() < 0.5);
    const auto& pool = use_frequent ? w.frequent_users : w.occasional_users;
    return pool[rng.uniform_index(pool.size())];
}

std::vector<std::uint8_t> draw_flags(const World& w, const NewsItem& item) {
    Rng rng = substream(w.seed, "flags", item.id);
    return sample_flag_mask(item.true_label, item.trajectory->activation_order(), item.source,
                            w.true_params, rng);
}

}  // namespace

std::vector<NewsItem> seed_news(const World& w, int epoch, Rng& rng) {
    if (epoch < 1) throw std::invalid_argument("epochs are numbered from 1");
    const WorldConfig& cfg = w.config;
    const std::size_t count = cfg.news_per_epoch();

    std::vector<UserId> sources;
    if (!cfg.fixed_sources.empty()) {
        sources = cfg.fixed_sources;
    } else {
        if (count > w.graph->node_count())
            throw std::invalid_argument("sources_per_epoch exceeds the number of users");
        std::unordered_set<UserId> seen;
        while (sources.size() < count) {
            const UserId s = draw_source(w, rng);
            if (seen.insert(s).second) sources.push_back(s);
        }
    }

    std::vector<NewsItem> out;
    out.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        NewsItem item;
        item.id = static_cast<NewsId>(static_cast<std::size_t>(epoch - 1) * count + j);
        item.source = sources[j];
        item.seeded_epoch = epoch;
        item.true_label = rng.bernoulli(w.fake_prob[item.source]) ? Label::fake : Label::not_fake;
        const double p = cfg.infection_prob_base + cfg.infection_prob_spread * rng.uniform();
        Rng cascade_rng = substream(w.seed, "cascade", item.id);
        item.trajectory = std::make_shared<const CascadeTrajectory>(
            simulate_cascade(*w.graph, item.source, p, cfg.max_rounds, cascade_rng));
        item.flags = draw_flags(w, item);
        out.push_back(std::move(item));
    }
    return out;
}

std::vector<NewsItem> realize_news(const World& w) {
    Rng rng = substream(w.seed, "seeding");
    std::vector<NewsItem> all;
    all.reserve(static_cast<std::size_t>(w.config.epochs) * w.config.news_per_epoch());
    for (int t = 1; t <= w.config.epochs; ++t) {
        auto batch = seed_news(w, t, rng);
        std::move(batch.begin(), batch.end(), std::back_inserter(all));
    }
    return all;
}

std::vector<NewsItem> reflag_news(const World& w, std::span<const NewsItem> news) {
    std::vector<NewsItem> out(news.begin(), news.end());
    for (auto& item : out) item.flags = draw_flags(w, item);
    return out;
}

PolicyResources policy_resources(const World& world, std::span<const NewsItem> news) {
    PolicyResources r;
    r.true_params = world.true_params;
    r.fixed_cm_theta = world.config.fixed_cm_theta;
    r.label_oracle = [news](NewsId id) { return news[id].true_label; };
    return r;
}

Simulation::Simulation(const World& world, std::span<const NewsItem> news,
                       std::unique_ptr<Policy> policy)
    : world_(world),
      news_(news),
      policy_(std::move(policy)),
      belief_(world.graph->node_count(), world.config.prior_notfake, world.config.prior_fake),
      policy_rng_(substream(world.seed, "policy")),
      status_(news.size(), NewsStatus::pending),
      blocked_age_(news.size(), 0) {
    if (!policy_) throw std::invalid_argument("simulation needs a policy");
    for (std::size_t i = 0; i < news_.size(); ++i)
        if (news_[i].id != i) throw std::invalid_argument("news ids must be dense and ordered");
    for (const auto& k : world.config.known_users) {
        const auto prior = [&](double theta) {
            const double t = clamp_theta(theta);
            return BetaPrior{k.strength * t, k.strength * (1.0 - t)};
        };
        belief_.set_prior_override(k.user, prior(k.params.theta_notfake), prior(k.params.theta_fake));
    }
}

std::size_t Simulation::perceived_value(const NewsItem& item, std::size_t value, int epoch) {
    if (world_.config.value_noise <= 0.0 || value == 0) return value;
    Rng rng = substream(world_.seed, "value_noise",
                        static_cast<std::uint64_t>(item.id) * 1000003ULL + static_cast<std::uint64_t>(epoch));
    const double factor = std::max(0.0, 1.0 + world_.config.value_noise * rng.normal());
    return static_cast<std::size_t>(std::llround(static_cast<double>(value) * factor));
}

std::size_t Simulation::visible_exposure(NewsId id, int epoch) const {
    const NewsItem& item = news_[id];
    switch (status_.at(id)) {
        case NewsStatus::pending: return 0;
        case NewsStatus::blocked:
            return exposure_count_at(*item.trajectory, blocked_age_[id], world_.config.rounds_per_epoch);
        default:
            return exposure_count_at(*item.trajectory, std::max(0, item.age_at(epoch)),
                                     world_.config.rounds_per_epoch);
    }
}

EpochRecord Simulation::run_epoch(int epoch) {
    const WorldConfig& cfg = world_.config;
    if (epoch != last_epoch_ + 1) throw ProtocolError("epochs must run in order");
    last_epoch_ = epoch;
    const int rpe = cfg.rounds_per_epoch;

    EpochRecord rec;
    rec.epoch = epoch;

    // (1) Newly seeded news join the active set.
    for (const auto& item : news_) {
        if (item.seeded_epoch == epoch) {
            status_[item.id] = NewsStatus::active;
            active_.push_back(item.id);
            rec.seeded.push_back(item.id);
        }
    }

    // (2) Spread and flagging are realized; cleared news keep teaching us.
    if (cfg.history_update == HistoryUpdate::continuous) {
        for (NewsId id : cleared_) {
            const NewsItem& item = news_[id];
            const int age = item.age_at(epoch);
            const std::size_t before = exposure_count_at(*item.trajectory, age - 1, rpe);
            const std::size_t now = exposure_count_at(*item.trajectory, age, rpe);
            if (now == before) continue;
            const auto order = item.trajectory->activation_order();
            record_expert_feedback(belief_.histories(), Label::not_fake,
                                   order.subspan(before, now - before),
                                   std::span<const std::uint8_t>(item.flags).subspan(before, now - before),
                                   item.source);
        }
    }

    // (3) Selection.
    std::vector<ActiveNewsView> views;
    views.reserve(active_.size());
    for (NewsId id : active_) {
        const NewsItem& item = news_[id];
        const int age = item.age_at(epoch);
        const std::size_t exposed = exposure_count_at(*item.trajectory, age, rpe);
        ActiveNewsView v;
        v.id = id;
        v.source = item.source;
        v.value = perceived_value(item, remaining_value(*item.trajectory, age, rpe), epoch);
        v.exposed = item.trajectory->activation_order().first(exposed);
        v.flagged = std::span<const std::uint8_t>(item.flags).first(exposed);
        views.push_back(v);
    }
    const EpochView view{epoch, views, cfg.news_prior, cfg.budget};
    rec.selected = policy_->select(view, belief_, policy_rng_);

    if (rec.selected.size() > cfg.budget) throw ProtocolError("policy exceeded the budget");
    {
        std::unordered_set<NewsId> seen;
        for (NewsId id : rec.selected) {
            if (id >= status_.size() || status_[id] != NewsStatus::active)
                throw ProtocolError("policy selected news " + std::to_string(id) +
                                    " outside the active set");
            if (!seen.insert(id).second) throw ProtocolError("policy selected a news twice");
        }
    }

    // (4)-(6) Expert review, blocking, history update, utility.
    for (NewsId id : rec.selected) {
        const NewsItem& item = news_[id];
        const int age = item.age_at(epoch);
        const std::size_t exposed = exposure_count_at(*item.trajectory, age, rpe);
        const std::size_t value = remaining_value(*item.trajectory, age, rpe);
        const Label verdict = item.true_label;
        rec.verdicts.push_back(verdict);
        rec.values.push_back(value);

        record_expert_feedback(belief_.histories(), verdict,
                               item.trajectory->activation_order().first(exposed),
                               std::span<const std::uint8_t>(item.flags).first(exposed), item.source);
        if (verdict == Label::fake) {
            status_[id] = NewsStatus::blocked;
            blocked_age_[id] = age;
            rec.utility += static_cast<double>(value);
        } else {
            status_[id] = NewsStatus::cleared;
            cleared_.push_back(id);
        }
    }
    std::erase_if(active_, [&](NewsId id) { return status_[id] != NewsStatus::active; });

    cumulative_ += rec.utility;
    rec.cumulative_utility = cumulative_;
    records_.push_back(rec);
    return rec;
}

RunTrace Simulation::run() {
    for (int t = last_epoch_ + 1; t <= world_.config.epochs; ++t) run_epoch(t);
    RunTrace trace;
    trace.policy = to_string(policy_->kind());
    trace.seed = world_.seed;
    trace.epochs = records_;
    trace.final_histories.assign(belief_.histories().begin(), belief_.histories().end());
    trace.prior_notfake = belief_.prior_notfake();
    trace.prior_fake = belief_.prior_fake();
    return trace;
}

RunTrace run_policy(const World& world, std::span<const NewsItem> news, PolicyKind kind) {
    Simulation sim(world, news, make_policy(kind, policy_resources(world, news)));
    return sim.run();
}

RunTrace run_simulation(std::shared_ptr<const SocialGraph> graph, const WorldConfig& cfg,
                        PolicyKind kind, std::uint64_t seed) {
    const World world = build_world(std::move(graph), cfg, seed);
    const auto news = realize_news(world);
    return run_policy(world, news, kind);
}

std::vector<double> regret(const RunTrace& opt_trace, const RunTrace& algo_trace) {
    if (opt_trace.epochs.size() != algo_trace.epochs.size())
        throw std::invalid_argument("regret needs traces of equal length");
    std::vector<double> out;
    out.reserve(opt_trace.epochs.size());
    for (std::size_t i = 0; i < opt_trace.epochs.size(); ++i)
        out.push_back(opt_trace.epochs[i].cumulative_utility - algo_trace.epochs[i].cumulative_utility);
    return out;
}

RegretScenario make_regret_scenario(double epsilon, int epochs) {
    if (!(epsilon > 0.0 && epsilon <= 0.5)) throw std::invalid_argument("epsilon must be in (0, 0.5]");
    // Layout: 0 known user, 1 unknown user, then sources, then audiences.
    constexpr UserId kKnown = 0;
    constexpr UserId kUnknown = 1;
    constexpr std::size_t kKnownSources = 20;
    constexpr std::size_t kUnknownSources = 5;
    constexpr std::size_t kValue = 100;
    // News from a known-side source reaches the known user in round 1, then
    // the other known-side sources and the audience in round 2.
    const std::size_t known_audience = kValue - (kKnownSources - 1);
    const std::size_t unknown_audience = kValue - (kUnknownSources - 1);

    std::vector<std::pair<UserId, UserId>> edges;
    std::vector<UserId> sources;
    UserId next = 2;
    for (std::size_t i = 0; i < kKnownSources; ++i, ++next) {
        edges.emplace_back(kKnown, next);
        sources.push_back(next);
    }
    for (std::size_t i = 0; i < kUnknownSources; ++i, ++next) {
        edges.emplace_back(kUnknown, next);
        sources.push_back(next);
    }
    for (std::size_t i = 0; i < known_audience; ++i, ++next) edges.emplace_back(kKnown, next);
    for (std::size_t i = 0; i < unknown_audience; ++i, ++next) edges.emplace_back(kUnknown, next);

    RegretScenario s;
    s.graph = std::make_shared<const SocialGraph>(SocialGraph::from_edges(next, edges));
    s.known_user = kKnown;
    s.unknown_user = kUnknown;

    WorldConfig& cfg = s.config;
    cfg.epochs = epochs;
    cfg.budget = 1;
    cfg.news_prior = 0.5;
    cfg.rounds_per_epoch = 1;
    cfg.max_rounds = 2;
    cfg.infection_prob_base = 1.0;
    cfg.infection_prob_spread = 0.0;
    cfg.fake_classes = {{1.0, 0.5}};
    cfg.frequent_spreader_fraction = 0.0;
    cfg.population = {{{0.5, 0.5, 1.0}, 1.0}};
    cfg.history_update = HistoryUpdate::at_label;
    cfg.fixed_sources = sources;
    cfg.sources_per_epoch = sources.size();
    const double known = 0.5 + epsilon;
    cfg.profile_overrides = {{kKnown, {{known, known, 0.0}}},
                             {kUnknown, {{1.0, 1.0, 0.0}, {0.0, 0.0, 0.0}}}};
    cfg.known_users = {{kKnown, {known, known}, 1e6}};
    return s;
}

}  // namespace crowdcheck
