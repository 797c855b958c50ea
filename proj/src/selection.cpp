#include "crowdcheck/selection.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace crowdcheck {

std::vector<NewsId> topx(std::span<const Candidate> candidates, std::size_t k, Rng& rng) {
    if (k == 0) throw std::invalid_argument("topx budget must be >= 1");
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    // Shuffle, then a stable sort: equal scores end up in uniform random order.
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return candidates[a].score() > candidates[b].score();
    });
    const std::size_t take = std::min(k, candidates.size());
    std::vector<NewsId> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(candidates[order[i]].id);
    return out;
}

const char* to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::detective: return "detective";
        case PolicyKind::opt: return "opt";
        case PolicyKind::oracle: return "oracle";
        case PolicyKind::fixed_cm: return "fixed_cm";
        case PolicyKind::no_learn: return "no_learn";
        case PolicyKind::random: return "random";
        case PolicyKind::point_estimate: return "point_estimate";
    }
    return "?";
}

PolicyKind parse_policy_kind(const std::string& name) {
    for (auto kind : all_policy_kinds())
        if (name == to_string(kind)) return kind;
    throw std::invalid_argument("unknown policy: " + name);
}

std::vector<PolicyKind> all_policy_kinds() {
    return {PolicyKind::detective, PolicyKind::opt,    PolicyKind::oracle,
            PolicyKind::fixed_cm,  PolicyKind::no_learn, PolicyKind::random,
            PolicyKind::point_estimate};
}

std::vector<NewsId> topx_with_params(const EpochView& view, std::span<const FlaggingParams> params,
                                     Rng& rng) {
    const PosteriorEvaluator evaluator(params);
    std::vector<Candidate> candidates;
    candidates.reserve(view.active.size());
    for (const auto& news : view.active) {
        Candidate c{news.id, 0.0, news.value};
        if (news.value > 0)
            c.prob_fake = evaluator.prob_fake(view.omega, news.exposed, news.flagged, news.source);
        candidates.push_back(c);
    }
    return topx(candidates, view.budget, rng);
}

namespace {

class DetectivePolicy final : public Policy {
public:
    PolicyKind kind() const override { return PolicyKind::detective; }
    std::vector<NewsId> select(const EpochView& view, const BeliefState& belief, Rng& rng) override {
        const auto params = sample_params(belief, rng);
        return topx_with_params(view, params, rng);
    }
};

class PointEstimatePolicy final : public Policy {
public:
    PolicyKind kind() const override { return PolicyKind::point_estimate; }
    std::vector<NewsId> select(const EpochView& view, const BeliefState& belief, Rng& rng) override {
        return topx_with_params(view, mean_params(belief), rng);
    }
};

// TopX with a parameter vector fixed at construction (opt, fixed_cm).
class FixedParamsPolicy final : public Policy {
public:
    FixedParamsPolicy(PolicyKind kind, std::vector<FlaggingParams> params)
        : kind_(kind), params_(std::move(params)) {}
    PolicyKind kind() const override { return kind_; }
    std::vector<NewsId> select(const EpochView& view, const BeliefState&, Rng& rng) override {
        return topx_with_params(view, params_, rng);
    }

private:
    PolicyKind kind_;
    std::vector<FlaggingParams> params_;
};

// Fixed-CM sees every user the same way, whatever the population size.
class FixedCmPolicy final : public Policy {
public:
    explicit FixedCmPolicy(double theta) : theta_(theta) {}
    PolicyKind kind() const override { return PolicyKind::fixed_cm; }
    std::vector<NewsId> select(const EpochView& view, const BeliefState& belief, Rng& rng) override {
        if (params_.size() != belief.user_count())
            params_.assign(belief.user_count(), FlaggingParams{theta_, theta_});
        return topx_with_params(view, params_, rng);
    }

private:
    double theta_;
    std::vector<FlaggingParams> params_;
};

class OraclePolicy final : public Policy {
public:
    explicit OraclePolicy(std::function<Label(NewsId)> labels) : labels_(std::move(labels)) {}
    PolicyKind kind() const override { return PolicyKind::oracle; }
    std::vector<NewsId> select(const EpochView& view, const BeliefState&, Rng& rng) override {
        std::vector<Candidate> fakes;
        for (const auto& news : view.active)
            if (labels_(news.id) == Label::fake) fakes.push_back({news.id, 1.0, news.value});
        if (fakes.empty()) return {};
        return topx(fakes, view.budget, rng);
    }

private:
    std::function<Label(NewsId)> labels_;
};

class NoLearnPolicy final : public Policy {
public:
    PolicyKind kind() const override { return PolicyKind::no_learn; }
    std::vector<NewsId> select(const EpochView& view, const BeliefState&, Rng& rng) override {
        std::vector<Candidate> candidates;
        candidates.reserve(view.active.size());
        for (const auto& news : view.active) candidates.push_back({news.id, 1.0, news.value});
        return topx(candidates, view.budget, rng);
    }
};

class RandomPolicy final : public Policy {
public:
    PolicyKind kind() const override { return PolicyKind::random; }
    std::vector<NewsId> select(const EpochView& view, const BeliefState&, Rng& rng) override {
        std::vector<NewsId> ids;
        ids.reserve(view.active.size());
        for (const auto& news : view.active) ids.push_back(news.id);
        const std::size_t take = std::min(view.budget, ids.size());
        for (std::size_t i = 0; i < take; ++i)
            std::swap(ids[i], ids[i + rng.uniform_index(ids.size() - i)]);
        ids.resize(take);
        return ids;
    }
};

}  // namespace

std::unique_ptr<Policy> make_policy(PolicyKind kind, const PolicyResources& resources) {
    switch (kind) {
        case PolicyKind::detective: return std::make_unique<DetectivePolicy>();
        case PolicyKind::point_estimate: return std::make_unique<PointEstimatePolicy>();
        case PolicyKind::opt:
            if (!resources.true_params)
                throw std::invalid_argument("opt policy requires the true user parameters");
            return std::make_unique<FixedParamsPolicy>(PolicyKind::opt, *resources.true_params);
        case PolicyKind::fixed_cm:
            return std::make_unique<FixedCmPolicy>(resources.fixed_cm_theta);
        case PolicyKind::oracle:
            if (!resources.label_oracle)
                throw std::invalid_argument("oracle policy requires the true news labels");
            return std::make_unique<OraclePolicy>(resources.label_oracle);
        case PolicyKind::no_learn: return std::make_unique<NoLearnPolicy>();
        case PolicyKind::random: return std::make_unique<RandomPolicy>();
    }
    throw std::invalid_argument("unknown policy kind");
}

}  // namespace crowdcheck
