#include "febr/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace febr {

namespace {

struct Candidate {
  double key;
  std::size_t index;
};

// Upper-tail normal quantile: x with P(Z > x) = w.
double upper_quantile(double w) { return std::sqrt(2.0) * boost::math::erfc_inv(2.0 * w); }

// r distinct values from [0, n), in random order (Floyd's algorithm + shuffle).
std::vector<std::size_t> random_subset(std::size_t n, std::size_t r, Rng& rng) {
  std::vector<std::size_t> picked;
  picked.reserve(r);
  for (std::size_t j = n - r; j < n; ++j) {
    std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
    if (std::find(picked.begin(), picked.end(), t) != picked.end()) t = j;
    picked.push_back(t);
  }
  std::shuffle(picked.begin(), picked.end(), rng);
  return picked;
}

}  // namespace

RetrievalIndex::RetrievalIndex(const Catalog& catalog, int n_topics) {
  if (n_topics < 1) throw std::invalid_argument("n_topics must be positive");
  by_topic_.resize(static_cast<std::size_t>(n_topics));
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto t = catalog[i].topic;
    if (t < 0 || t >= n_topics) throw std::invalid_argument("video topic out of range");
    by_topic_[static_cast<std::size_t>(t)].push_back(i);
  }
}

std::vector<std::size_t> RetrievalIndex::sample(std::span<const double> interests, std::size_t m,
                                                double noise_sd, Rng& rng) const {
  if (interests.size() != by_topic_.size()) throw std::invalid_argument("interest vector has wrong length");
  if (m == 0) throw std::invalid_argument("corpus size must be positive");
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("retrieval noise must be nonnegative");

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Candidate> candidates;
  for (std::size_t t = 0; t < by_topic_.size(); ++t) {
    const auto& videos = by_topic_[t];
    const std::size_t n = videos.size();
    if (n == 0) continue;
    const std::size_t r = std::min(m, n);

    // Smallest r of n uniform tail probabilities, generated in increasing order.
    std::vector<double> tail(r);
    double w = 0.0;
    for (std::size_t j = 0; j < r; ++j) {
      double v = unif(rng);
      while (v <= 0.0) v = unif(rng);
      const double step = -std::expm1(std::log(v) / static_cast<double>(n - j));
      w = w + (1.0 - w) * step;
      tail[j] = std::min(w, 1.0 - 1e-16);
    }
    const auto members = random_subset(n, r, rng);
    for (std::size_t j = 0; j < r; ++j) {
      const double noise = noise_sd > 0.0 ? noise_sd * upper_quantile(tail[j]) : 0.0;
      candidates.push_back({interests[t] + noise, videos[members[j]]});
    }
  }

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.key != b.key) return a.key > b.key;
    return a.index < b.index;
  });
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min(m, candidates.size()); ++i) out.push_back(candidates[i].index);
  return out;
}

Corpus gather(const Catalog& catalog, std::span<const std::size_t> indices) {
  Corpus corpus;
  corpus.reserve(indices.size());
  for (auto i : indices) corpus.push_back(catalog.at(i));
  return corpus;
}

}  // namespace febr
