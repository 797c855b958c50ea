#include "crowdcheck/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crowdcheck {

void validate(const BetaPrior& prior) {
    if (!(prior.a > 0.0) || !(prior.b > 0.0))
        throw std::invalid_argument("Beta prior parameters must be positive");
}

BeliefState::BeliefState(std::size_t user_count, BetaPrior prior_notfake, BetaPrior prior_fake)
    : histories_(user_count), prior_notfake_(prior_notfake), prior_fake_(prior_fake) {
    validate(prior_notfake_);
    validate(prior_fake_);
}

void BeliefState::set_prior_override(UserId u, BetaPrior notfake, BetaPrior fake) {
    if (u >= histories_.size()) throw std::out_of_range("prior override for unknown user");
    validate(notfake);
    validate(fake);
    overrides_[u] = {notfake, fake};
}

BetaPrior BeliefState::prior_for(UserId u, ThetaKind which) const {
    if (auto it = overrides_.find(u); it != overrides_.end())
        return which == ThetaKind::notfake ? it->second.first : it->second.second;
    return which == ThetaKind::notfake ? prior_notfake_ : prior_fake_;
}

PosteriorEvaluator::PosteriorEvaluator(std::span<const FlaggingParams> params) {
    terms_.reserve(params.size());
    for (const auto& p : params) {
        const double tf = clamp_theta(p.theta_fake);
        const double tn = clamp_theta(p.theta_notfake);
        terms_.push_back({std::log(tf), std::log1p(-tf), std::log1p(-tn), std::log(tn)});
    }
}

double PosteriorEvaluator::prob_fake(double omega, std::span<const UserId> exposed,
                                     std::span<const std::uint8_t> flagged, UserId source) const {
    if (!(omega > 0.0 && omega < 1.0)) throw std::invalid_argument("omega must be in (0,1)");
    double log_fake = std::log(omega);
    double log_notfake = std::log1p(-omega);
    for (std::size_t i = 0; i < exposed.size(); ++i) {
        const UserId u = exposed[i];
        if (u == source) continue;
        const LogTerms& t = terms_[u];
        if (flagged[i]) {
            log_fake += t.flag_if_fake;
            log_notfake += t.flag_if_notfake;
        } else {
            log_fake += t.no_flag_if_fake;
            log_notfake += t.no_flag_if_notfake;
        }
    }
    // Logistic of the log-odds; stable in both tails.
    const double log_odds = log_fake - log_notfake;
    if (log_odds >= 0.0) return 1.0 / (1.0 + std::exp(-log_odds));
    const double e = std::exp(log_odds);
    return e / (1.0 + e);
}

namespace {

std::vector<std::uint8_t> flag_mask(std::span<const UserId> exposed,
                                    std::span<const UserId> flaggers) {
    std::vector<std::uint8_t> mask(exposed.size(), 0);
    for (UserId f : flaggers) {
        const auto it = std::find(exposed.begin(), exposed.end(), f);
        if (it == exposed.end())
            throw std::invalid_argument("flagger " + std::to_string(f) + " is not exposed");
        mask[static_cast<std::size_t>(it - exposed.begin())] = 1;
    }
    return mask;
}

}  // namespace

double news_fake_posterior(double omega, std::span<const FlaggingParams> params,
                           std::span<const UserId> exposed, std::span<const UserId> flaggers,
                           UserId source) {
    const auto mask = flag_mask(exposed, flaggers);
    for (UserId u : exposed)
        if (u >= params.size()) throw std::out_of_range("exposed user without parameters");
    return PosteriorEvaluator(params).prob_fake(omega, exposed, mask, source);
}

void record_expert_feedback(std::span<UserHistory> histories, Label verdict,
                            std::span<const UserId> exposed, std::span<const std::uint8_t> flagged,
                            UserId source) {
    for (std::size_t i = 0; i < exposed.size(); ++i) {
        const UserId u = exposed[i];
        if (u == source) continue;
        UserHistory& h = histories[u];
        if (flagged[i]) {
            ++(verdict == Label::fake ? h.fake_given_fake : h.fake_given_notfake);
        } else {
            ++(verdict == Label::fake ? h.notfake_given_fake : h.notfake_given_notfake);
        }
    }
}

void record_expert_feedback(std::span<UserHistory> histories, Label verdict,
                            std::span<const UserId> exposed, std::span<const UserId> flaggers,
                            UserId source) {
    const auto mask = flag_mask(exposed, flaggers);
    for (UserId u : exposed)
        if (u >= histories.size()) throw std::out_of_range("exposed user without history");
    record_expert_feedback(histories, verdict, exposed, std::span<const std::uint8_t>(mask), source);
}

BetaPrior beta_posterior(const BetaPrior& prior, const UserHistory& h, ThetaKind which) {
    validate(prior);
    if (which == ThetaKind::notfake) {
        return {prior.a + static_cast<double>(h.notfake_given_notfake),
                prior.b + static_cast<double>(h.fake_given_notfake)};
    }
    return {prior.a + static_cast<double>(h.fake_given_fake),
            prior.b + static_cast<double>(h.notfake_given_fake)};
}

std::vector<FlaggingParams> sample_params(const BeliefState& belief, Rng& rng) {
    std::vector<FlaggingParams> out(belief.user_count());
    for (UserId u = 0; u < belief.user_count(); ++u) {
        const UserHistory& h = belief.history(u);
        const auto pn = beta_posterior(belief.prior_for(u, ThetaKind::notfake), h, ThetaKind::notfake);
        const auto pf = beta_posterior(belief.prior_for(u, ThetaKind::fake), h, ThetaKind::fake);
        out[u].theta_notfake = clamp_theta(rng.beta(pn.a, pn.b));
        out[u].theta_fake = clamp_theta(rng.beta(pf.a, pf.b));
    }
    return out;
}

std::vector<FlaggingParams> mean_params(const BeliefState& belief) {
    std::vector<FlaggingParams> out(belief.user_count());
    for (UserId u = 0; u < belief.user_count(); ++u) {
        const UserHistory& h = belief.history(u);
        out[u].theta_notfake =
            beta_posterior(belief.prior_for(u, ThetaKind::notfake), h, ThetaKind::notfake).mean();
        out[u].theta_fake =
            beta_posterior(belief.prior_for(u, ThetaKind::fake), h, ThetaKind::fake).mean();
    }
    return out;
}

}  // namespace crowdcheck
