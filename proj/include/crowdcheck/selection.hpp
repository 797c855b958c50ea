#pragma once

#include "crowdcheck/inference.hpp"
#include "crowdcheck/rng.hpp"
#include "crowdcheck/usermodel.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crowdcheck {

using NewsId = std::uint32_t;

struct Candidate {
    NewsId id = 0;
    double prob_fake = 0.0;
    std::size_t value = 0;

    double score() const { return prob_fake * static_cast<double>(value); }
};

// The min(k, n) candidates with the largest prob_fake * value. Equal scores
// are ordered uniformly at random. The result is sorted by descending score.
std::vector<NewsId> topx(std::span<const Candidate> candidates, std::size_t k, Rng& rng);

// What a policy may see about one active news at selection time.
struct ActiveNewsView {
    NewsId id = 0;
    UserId source = 0;
    std::size_t value = 0;                   // val^t as perceived by the policy
    std::span<const UserId> exposed;         // activation order prefix
    std::span<const std::uint8_t> flagged;   // parallel to exposed
};

struct EpochView {
    int epoch = 0;
    std::span<const ActiveNewsView> active;
    double omega = 0.2;
    std::size_t budget = 5;
};

enum class PolicyKind { detective, opt, oracle, fixed_cm, no_learn, random, point_estimate };

const char* to_string(PolicyKind kind);
PolicyKind parse_policy_kind(const std::string& name);
std::vector<PolicyKind> all_policy_kinds();

class Policy {
public:
    virtual ~Policy() = default;
    virtual PolicyKind kind() const = 0;
    virtual std::vector<NewsId> select(const EpochView& view, const BeliefState& belief,
                                       Rng& rng) = 0;
};

// Privileged inputs. Each policy receives only what it is allowed to read.
struct PolicyResources {
    // Ground-truth flagging parameters; consumed by opt only.
    std::optional<std::vector<FlaggingParams>> true_params;
    // Ground-truth label lookup; consumed by oracle only.
    std::function<Label(NewsId)> label_oracle;
    double fixed_cm_theta = 0.6;
};

// Throws std::invalid_argument when a policy's required input is missing.
std::unique_ptr<Policy> make_policy(PolicyKind kind, const PolicyResources& resources);

// TopX under a fixed parameter set. Candidates whose value is zero skip the
// posterior: their score is zero whatever the probability.
std::vector<NewsId> topx_with_params(const EpochView& view, std::span<const FlaggingParams> params,
                                     Rng& rng);

}  // namespace crowdcheck
