#pragma once

#include <span>
#include <vector>

#include "febr/domain.hpp"

namespace febr {

/// Candidate retrieval: the m catalog videos with the largest key
/// interests[topic] + Normal(0, noise_sd), redrawn on every call.
///
/// Instead of drawing one normal per catalog video, each topic draws only the
/// top order statistics of its N noise values and assigns them to a uniformly
/// random subset of its videos. The resulting corpus has the same distribution
/// as the brute-force ranking at O(n_topics * m) cost per call.
class RetrievalIndex {
 public:
  RetrievalIndex(const Catalog& catalog, int n_topics);

  /// Catalog indices ordered by decreasing retrieval key.
  std::vector<std::size_t> sample(std::span<const double> interests, std::size_t m, double noise_sd,
                                  Rng& rng) const;

  int n_topics() const noexcept { return static_cast<int>(by_topic_.size()); }

 private:
  std::vector<std::vector<std::size_t>> by_topic_;
};

/// Copies the selected catalog entries.
Corpus gather(const Catalog& catalog, std::span<const std::size_t> indices);

}  // namespace febr
