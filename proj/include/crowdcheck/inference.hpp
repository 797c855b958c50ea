#pragma once

#include "crowdcheck/graph.hpp"
#include "crowdcheck/rng.hpp"
#include "crowdcheck/usermodel.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace crowdcheck {

// Parameters are clamped to [kThetaClamp, 1 - kThetaClamp] before logs.
inline constexpr double kThetaClamp = 1e-9;

// Expert-verified flagging counts for one user, named <user label>_given_<expert label>.
struct UserHistory {
    std::uint64_t notfake_given_notfake = 0;
    std::uint64_t notfake_given_fake = 0;
    std::uint64_t fake_given_notfake = 0;
    std::uint64_t fake_given_fake = 0;

    std::uint64_t total() const {
        return notfake_given_notfake + notfake_given_fake + fake_given_notfake + fake_given_fake;
    }
    friend bool operator==(const UserHistory&, const UserHistory&) = default;
};

struct BetaPrior {
    double a = 1.0;
    double b = 1.0;

    double mean() const { return a / (a + b); }
    friend bool operator==(const BetaPrior&, const BetaPrior&) = default;
};

void validate(const BetaPrior& prior);

enum class ThetaKind { notfake, fake };

// Per-user Beta posteriors over (theta_notfake, theta_fake). Priors are
// shared across users unless a user has an explicit override (used to model
// users whose parameters are already known).
class BeliefState {
public:
    BeliefState(std::size_t user_count, BetaPrior prior_notfake = {}, BetaPrior prior_fake = {});

    std::size_t user_count() const { return histories_.size(); }

    const BetaPrior& prior_notfake() const { return prior_notfake_; }
    const BetaPrior& prior_fake() const { return prior_fake_; }

    void set_prior_override(UserId u, BetaPrior notfake, BetaPrior fake);
    BetaPrior prior_for(UserId u, ThetaKind which) const;

    const UserHistory& history(UserId u) const { return histories_.at(u); }
    std::span<UserHistory> histories() { return histories_; }
    std::span<const UserHistory> histories() const { return histories_; }

private:
    std::vector<UserHistory> histories_;
    BetaPrior prior_notfake_;
    BetaPrior prior_fake_;
    std::map<UserId, std::pair<BetaPrior, BetaPrior>> overrides_;
};

inline double clamp_theta(double theta) {
    return theta < kThetaClamp ? kThetaClamp : (theta > 1.0 - kThetaClamp ? 1.0 - kThetaClamp : theta);
}

// Per-user log-likelihood tables for scoring many news against one parameter
// set.
class PosteriorEvaluator {
public:
    explicit PosteriorEvaluator(std::span<const FlaggingParams> params);

    // P(fake | flags) for an exposure list with a parallel flag mask. The
    // source is skipped wherever it appears.
    double prob_fake(double omega, std::span<const UserId> exposed,
                     std::span<const std::uint8_t> flagged, UserId source) const;

private:
    struct LogTerms {
        double flag_if_fake;       // log theta_fake
        double no_flag_if_fake;    // log(1 - theta_fake)
        double flag_if_notfake;    // log(1 - theta_notfake)
        double no_flag_if_notfake; // log theta_notfake
    };
    std::vector<LogTerms> terms_;
};

// P(news is fake | flags) with independent users:
//   f:  log w + sum_{flaggers} log th_f + sum_{silent exposed} log(1 - th_f)
//   nf: log(1-w) + sum_{flaggers} log(1 - th_nf) + sum_{silent exposed} log th_nf
// normalized. The source is excluded from both sums. Throws
// std::invalid_argument when flaggers is not a subset of exposed.
double news_fake_posterior(double omega, std::span<const FlaggingParams> params,
                           std::span<const UserId> exposed, std::span<const UserId> flaggers,
                           UserId source);

// Adds one expert-verified observation for each exposed non-source user.
void record_expert_feedback(std::span<UserHistory> histories, Label verdict,
                            std::span<const UserId> exposed, std::span<const UserId> flaggers,
                            UserId source);

// Mask form used by the epoch loop; flagged is parallel to exposed.
void record_expert_feedback(std::span<UserHistory> histories, Label verdict,
                            std::span<const UserId> exposed, std::span<const std::uint8_t> flagged,
                            UserId source);

BetaPrior beta_posterior(const BetaPrior& prior, const UserHistory& h, ThetaKind which);

// One Beta draw per user per parameter, clamped to the open interval.
std::vector<FlaggingParams> sample_params(const BeliefState& belief, Rng& rng);

std::vector<FlaggingParams> mean_params(const BeliefState& belief);

}  // namespace crowdcheck
