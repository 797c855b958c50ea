#pragma once

#include "crowdcheck/graph.hpp"
#include "crowdcheck/rng.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace crowdcheck {

inline constexpr int kDefaultMaxRounds = 600;
inline constexpr int kDefaultRoundsPerEpoch = 2;

// One fully realized independent-cascade outcome. Activated users are kept in
// (round, id) order, so the users exposed by any round cutoff form a prefix.
class CascadeTrajectory {
public:
    CascadeTrajectory(UserId source, double infection_prob, int max_rounds);

    UserId source() const { return source_; }
    double infection_prob() const { return infection_prob_; }
    int max_rounds() const { return max_rounds_; }

    // Last round in which somebody was activated (0 when only the source).
    int last_round() const { return static_cast<int>(round_end_.size()) - 1; }

    std::optional<int> activation_round(UserId u) const;

    // Activated users ordered by (round, id); source first.
    std::span<const UserId> activation_order() const { return order_; }

    // Number of users activated at rounds <= round.
    std::size_t activated_by_round(int round) const;
    std::size_t eventual_size() const { return order_.size(); }

    // Appends the users activated in `round`, which must be last_round() + 1.
    void push_round(std::span<const UserId> users);

private:
    UserId source_;
    double infection_prob_;
    int max_rounds_;
    std::vector<UserId> order_;
    std::vector<std::size_t> round_end_;  // round_end_[r] = activated_by_round(r)
};

// Standard IC semantics: each user, in the round after its activation, makes
// one attempt per not-yet-activated neighbor, succeeding with probability p.
// Stops after max_rounds or when a round activates nobody.
CascadeTrajectory simulate_cascade(const SocialGraph& g, UserId source, double p, int max_rounds,
                                   Rng& rng);

// Rounds visible after `epoch` epochs since seeding.
inline int round_cutoff(int epoch, int rounds_per_epoch) { return epoch * rounds_per_epoch; }

std::size_t exposure_count_at(const CascadeTrajectory& traj, int epoch, int rounds_per_epoch);

// {u : activation_round(u) <= epoch * rounds_per_epoch}, in activation order.
std::span<const UserId> exposure_at(const CascadeTrajectory& traj, int epoch,
                                    int rounds_per_epoch);

std::span<const UserId> eventual_exposure(const CascadeTrajectory& traj);

// |eventual| - |exposed at epoch|: users saved by blocking now.
std::size_t remaining_value(const CascadeTrajectory& traj, int epoch, int rounds_per_epoch);

// First epoch at which the exposure equals the eventual exposure.
int exhaustion_epoch(const CascadeTrajectory& traj, int rounds_per_epoch);

}  // namespace crowdcheck
