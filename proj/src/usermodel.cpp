#include "crowdcheck/usermodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crowdcheck {

const char* to_string(Label label) { return label == Label::fake ? "f" : "nf"; }

namespace {

bool is_probability(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void validate(const UserProfile& p) {
    if (!is_probability(p.alpha) || !is_probability(p.beta) || !is_probability(p.gamma)) {
        throw std::invalid_argument("user profile fields must lie in [0,1]");
    }
}

FlaggingParams flagging_params(const UserProfile& p) {
    validate(p);
    return {p.gamma + (1.0 - p.gamma) * p.alpha, (1.0 - p.gamma) * p.beta};
}

std::vector<FlaggingParams> flagging_params(std::span<const UserProfile> profiles) {
    std::vector<FlaggingParams> out;
    out.reserve(profiles.size());
    for (const auto& p : profiles) out.push_back(flagging_params(p));
    return out;
}

void validate(const PopulationSpec& spec) {
    if (spec.empty()) throw std::invalid_argument("population spec is empty");
    double total = 0.0;
    for (const auto& e : spec) {
        validate(e.profile);
        if (!(e.fraction >= 0.0)) throw std::invalid_argument("population fraction is negative");
        total += e.fraction;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("population fractions sum to " + std::to_string(total));
    }
}

std::vector<std::size_t> largest_remainder_counts(std::span<const double> fractions,
                                                  std::size_t n) {
    if (fractions.empty()) throw std::invalid_argument("no fractions to apportion");
    double total = 0.0;
    for (double f : fractions) {
        if (!(f >= 0.0)) throw std::invalid_argument("fraction is negative");
        total += f;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("fractions sum to " + std::to_string(total));
    }

    std::vector<std::size_t> counts(fractions.size());
    std::vector<double> remainders(fractions.size());
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        const double quota = fractions[i] * static_cast<double>(n);
        const auto whole = std::min(static_cast<std::size_t>(std::floor(quota)), n);
        counts[i] = whole;
        remainders[i] = quota - static_cast<double>(whole);
        assigned += whole;
    }
    std::vector<std::size_t> order(fractions.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
    for (std::size_t i = 0; assigned < n; i = (i + 1) % order.size()) {
        ++counts[order[i]];
        ++assigned;
    }
    return counts;
}

std::vector<UserProfile> assign_population(const PopulationSpec& spec, std::size_t n, Rng& rng) {
    validate(spec);
    std::vector<double> fractions;
    for (const auto& e : spec) fractions.push_back(e.fraction);
    const auto counts = largest_remainder_counts(fractions, n);

    std::vector<UserProfile> profiles;
    profiles.reserve(n);
    for (std::size_t i = 0; i < spec.size(); ++i)
        profiles.insert(profiles.end(), counts[i], spec[i].profile);
    for (std::size_t i = profiles.size(); i > 1; --i) {
        std::swap(profiles[i - 1], profiles[rng.uniform_index(i)]);
    }
    return profiles;
}

std::vector<std::uint8_t> sample_flag_mask(Label news_label, std::span<const UserId> newly_exposed,
                                           UserId source, std::span<const FlaggingParams> params,
                                           Rng& rng) {
    std::vector<std::uint8_t> mask(newly_exposed.size(), 0);
    for (std::size_t i = 0; i < newly_exposed.size(); ++i) {
        const UserId u = newly_exposed[i];
        if (u == source) continue;
        mask[i] = rng.uniform() < flag_probability(params[u], news_label) ? 1 : 0;
    }
    return mask;
}

std::vector<UserId> sample_flags(Label news_label, std::span<const UserId> newly_exposed,
                                 UserId source, std::span<const UserProfile> profiles, Rng& rng) {
    std::vector<UserId> flaggers;
    for (UserId u : newly_exposed) {
        if (u == source) continue;
        if (rng.uniform() < flag_probability(flagging_params(profiles[u]), news_label))
            flaggers.push_back(u);
    }
    return flaggers;
}

}  // namespace crowdcheck
