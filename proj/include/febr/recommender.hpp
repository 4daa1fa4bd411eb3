#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "febr/abstraction.hpp"
#include "febr/dataset.hpp"
#include "febr/user_env.hpp"

namespace febr::recommender {

struct ClassifierConfig {
  double th1 = 0.5;  // interest margin
  double th2 = 0.1;  // corpus margin
  /// Off: first record in stored order within both margins. On: the
  /// qualifying record with the smallest combined distance.
  bool nearest_neighbor = false;
};

double euclidean(std::span<const double> a, std::span<const double> b);

/// Index of the matching record, or nullopt when no record is within both
/// margins. Throws std::invalid_argument if a vector layout disagrees with the dataset.
std::optional<std::size_t> classify(std::span<const double> user_interests, std::span<const double> user_corpus,
                                    std::span<const dataset::ExpertStateRecord> records,
                                    const ClassifierConfig& config);

/// On a match, the matched record's policy action realized on the user's
/// corpus; otherwise a uniformly random slate from the corpus.
user::Recommendation febr_recommend(std::span<const double> user_interests, std::span<const Video> corpus,
                                    TopicId dominant, std::span<const dataset::ExpertStateRecord> records,
                                    const irl::Discretizer& disc, const ClassifierConfig& config, Rng& rng);

class FebrAgent : public user::Agent {
 public:
  FebrAgent(std::shared_ptr<const std::vector<dataset::ExpertStateRecord>> records, irl::Discretizer disc,
            ClassifierConfig config);

  std::string name() const override { return "febr"; }
  user::Recommendation recommend(const user::Observation& obs, Rng& rng) override;

 private:
  std::shared_ptr<const std::vector<dataset::ExpertStateRecord>> records_;
  irl::Discretizer disc_;
  ClassifierConfig config_;
};

}  // namespace febr::recommender
