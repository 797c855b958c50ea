#include "crowdcheck/cascade.hpp"

#include <algorithm>
#include <stdexcept>

namespace crowdcheck {

CascadeTrajectory::CascadeTrajectory(UserId source, double infection_prob, int max_rounds)
    : source_(source), infection_prob_(infection_prob), max_rounds_(max_rounds) {
    order_.push_back(source);
    round_end_.push_back(1);
}

std::optional<int> CascadeTrajectory::activation_round(UserId u) const {
    const auto it = std::find(order_.begin(), order_.end(), u);
    if (it == order_.end()) return std::nullopt;
    const auto pos = static_cast<std::size_t>(it - order_.begin());
    const auto r = std::upper_bound(round_end_.begin(), round_end_.end(), pos) - round_end_.begin();
    return static_cast<int>(r);
}

std::size_t CascadeTrajectory::activated_by_round(int round) const {
    if (round < 0) return 0;
    if (round >= static_cast<int>(round_end_.size())) return order_.size();
    return round_end_[static_cast<std::size_t>(round)];
}

void CascadeTrajectory::push_round(std::span<const UserId> users) {
    order_.insert(order_.end(), users.begin(), users.end());
    round_end_.push_back(order_.size());
}

CascadeTrajectory simulate_cascade(const SocialGraph& g, UserId source, double p, int max_rounds,
                                   Rng& rng) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("infection probability must be in [0,1]");
    if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
    if (source >= g.node_count()) throw std::out_of_range("cascade source out of range");

    CascadeTrajectory traj(source, p, max_rounds);
    std::vector<char> active(g.node_count(), 0);
    active[source] = 1;
    std::vector<UserId> frontier{source};
    std::vector<UserId> next;

    for (int round = 1; round <= max_rounds && !frontier.empty(); ++round) {
        next.clear();
        for (UserId u : frontier) {
            for (UserId v : g.neighbors(u)) {
                // includes users activated earlier in this round
                if (active[v]) continue;
                if (rng.bernoulli(p)) {
                    active[v] = 1;
                    next.push_back(v);
                }
            }
        }
        if (next.empty()) break;
        std::sort(next.begin(), next.end());
        traj.push_round(next);
        frontier.swap(next);
    }
    return traj;
}

std::size_t exposure_count_at(const CascadeTrajectory& traj, int epoch, int rounds_per_epoch) {
    if (epoch < 0) throw std::invalid_argument("epoch must be >= 0");
    if (rounds_per_epoch < 1) throw std::invalid_argument("rounds_per_epoch must be >= 1");
    return traj.activated_by_round(round_cutoff(epoch, rounds_per_epoch));
}

std::span<const UserId> exposure_at(const CascadeTrajectory& traj, int epoch,
                                    int rounds_per_epoch) {
    return traj.activation_order().first(exposure_count_at(traj, epoch, rounds_per_epoch));
}

std::span<const UserId> eventual_exposure(const CascadeTrajectory& traj) {
    return traj.activation_order();
}

std::size_t remaining_value(const CascadeTrajectory& traj, int epoch, int rounds_per_epoch) {
    return traj.eventual_size() - exposure_count_at(traj, epoch, rounds_per_epoch);
}

int exhaustion_epoch(const CascadeTrajectory& traj, int rounds_per_epoch) {
    if (rounds_per_epoch < 1) throw std::invalid_argument("rounds_per_epoch must be >= 1");
    return (traj.last_round() + rounds_per_epoch - 1) / rounds_per_epoch;
}

}  // namespace crowdcheck
