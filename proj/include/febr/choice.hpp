#pragma once

#include <optional>
#include <span>
#include <vector>

#include "febr/domain.hpp"

namespace febr::choice {

struct ChoiceConfig {
  /// Unnormalized weight of the null item. Zero recovers the plain ratio form.
  double no_click_mass = 1.0;
};

/// Conditional-logit probabilities. Entry j is u_j / (no_click_mass + sum u);
/// the extra last entry is the no-click probability.
std::vector<double> choice_probabilities(std::span<const double> utilities, double no_click_mass);

/// Draws an outcome. Returns the item index, or nullopt for the last (no-click) entry.
std::optional<std::size_t> sample_choice(std::span<const double> probabilities, Rng& rng);

}  // namespace febr::choice
