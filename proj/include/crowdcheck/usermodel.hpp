#pragma once

#include "crowdcheck/graph.hpp"
#include "crowdcheck/rng.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace crowdcheck {

enum class Label : std::uint8_t { not_fake = 0, fake = 1 };

const char* to_string(Label label);

// Ground-truth behavior of one user.
//   alpha: P(no flag | not fake, reviewing)
//   beta:  P(flag | fake, reviewing)
//   gamma: P(abstain from reviewing); an abstaining user never flags.
struct UserProfile {
    double alpha = 0.5;
    double beta = 0.5;
    double gamma = 0.0;

    friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

// Observed flagging behavior.
//   theta_notfake = P(no flag | not fake)
//   theta_fake    = P(flag | fake)
struct FlaggingParams {
    double theta_notfake = 0.5;
    double theta_fake = 0.5;

    friend bool operator==(const FlaggingParams&, const FlaggingParams&) = default;
};

void validate(const UserProfile& profile);

// Mixes abstention into the review accuracies:
//   theta_notfake = gamma + (1 - gamma) alpha,  theta_fake = (1 - gamma) beta.
FlaggingParams flagging_params(const UserProfile& profile);

// Probability that a user with these params flags a news with this label.
inline double flag_probability(const FlaggingParams& params, Label label) {
    return label == Label::fake ? params.theta_fake : 1.0 - params.theta_notfake;
}

struct PopulationEntry {
    UserProfile profile;
    double fraction = 0.0;
};

using PopulationSpec = std::vector<PopulationEntry>;

void validate(const PopulationSpec& spec);

// Largest-remainder apportionment of n items; remainder ties go to the
// earlier entry. Fractions must sum to 1.
std::vector<std::size_t> largest_remainder_counts(std::span<const double> fractions,
                                                  std::size_t n);

// Exact type counts by largest remainder, then a random permutation.
std::vector<UserProfile> assign_population(const PopulationSpec& spec, std::size_t n, Rng& rng);

std::vector<FlaggingParams> flagging_params(std::span<const UserProfile> profiles);

// Draws first-exposure flags. The source never flags; every other user flags
// independently with flag_probability. Users are visited in the given order
// with one uniform draw each.
std::vector<UserId> sample_flags(Label news_label, std::span<const UserId> newly_exposed,
                                 UserId source, std::span<const UserProfile> profiles, Rng& rng);

// Same draw sequence as sample_flags, as a mask parallel to newly_exposed.
std::vector<std::uint8_t> sample_flag_mask(Label news_label, std::span<const UserId> newly_exposed,
                                           UserId source, std::span<const FlaggingParams> params,
                                           Rng& rng);

}  // namespace crowdcheck
