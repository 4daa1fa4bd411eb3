#include "febr/choice.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace febr::choice {

std::vector<double> choice_probabilities(std::span<const double> utilities, double no_click_mass) {
  if (!(no_click_mass >= 0.0) || !std::isfinite(no_click_mass))
    throw std::invalid_argument("no_click_mass must be finite and nonnegative");
  double total = no_click_mass;
  for (double u : utilities) {
    if (!(u >= 0.0) || !std::isfinite(u)) throw std::invalid_argument("utilities must be finite and nonnegative");
    total += u;
  }
  if (!(total > 0.0)) throw std::invalid_argument("total choice mass is zero");

  std::vector<double> p;
  p.reserve(utilities.size() + 1);
  for (double u : utilities) p.push_back(u / total);
  p.push_back(no_click_mass / total);
  return p;
}

std::optional<std::size_t> sample_choice(std::span<const double> probabilities, Rng& rng) {
  if (probabilities.empty()) throw std::invalid_argument("empty probability vector");
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("probabilities must be nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("probabilities do not sum to 1");

  const double r = std::uniform_real_distribution<double>(0.0, sum)(rng);
  double acc = 0.0;
  const std::size_t last = probabilities.size() - 1;
  for (std::size_t i = 0; i < last; ++i) {
    acc += probabilities[i];
    if (r < acc) return i;
  }
  // the tail belongs to the last entry; skip it only if it has no mass
  if (probabilities[last] > 0.0) return std::nullopt;
  for (std::size_t i = last; i-- > 0;)
    if (probabilities[i] > 0.0) return i;
  return std::nullopt;
}

}  // namespace febr::choice
