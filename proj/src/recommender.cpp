#include "febr/recommender.hpp"

#include <cmath>
#include <stdexcept>

namespace febr::recommender {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace

double euclidean(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("vectors differ in length");
  return std::sqrt(squared_distance(a, b));
}

std::optional<std::size_t> classify(std::span<const double> user_interests, std::span<const double> user_corpus,
                                    std::span<const dataset::ExpertStateRecord> records,
                                    const ClassifierConfig& config) {
  if (config.th1 < 0.0 || config.th2 < 0.0) throw std::invalid_argument("margins must be nonnegative");
  const double th1_sq = config.th1 * config.th1;
  const double th2_sq = config.th2 * config.th2;

  std::optional<std::size_t> best;
  double best_distance = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.e_s.size() != user_interests.size() || r.e_c.size() != user_corpus.size())
      throw std::invalid_argument("user state layout does not match the dataset");
    const double di = squared_distance(user_interests, r.e_s);
    if (di > th1_sq) continue;
    const double dc = squared_distance(user_corpus, r.e_c);
    if (dc > th2_sq) continue;
    if (!config.nearest_neighbor) return i;
    const double total = std::sqrt(di) + std::sqrt(dc);
    if (!best || total < best_distance) {
      best = i;
      best_distance = total;
    }
  }
  return best;
}

user::Recommendation febr_recommend(std::span<const double> user_interests, std::span<const Video> corpus,
                                    TopicId dominant, std::span<const dataset::ExpertStateRecord> records,
                                    const irl::Discretizer& disc, const ClassifierConfig& config, Rng& rng) {
  const std::size_t k = disc.slate_size();
  if (corpus.size() < k) throw std::invalid_argument("corpus smaller than the slate");
  const auto descriptor = dataset::corpus_descriptor(corpus, disc.n_topics());
  if (auto match = classify(user_interests, descriptor, records, config))
    return {irl::realize_action(records[*match].policy_action, corpus, dominant, disc), true};
  return {random_slate(corpus, k, rng), false};
}

FebrAgent::FebrAgent(std::shared_ptr<const std::vector<dataset::ExpertStateRecord>> records, irl::Discretizer disc,
                     ClassifierConfig config)
    : records_(std::move(records)), disc_(std::move(disc)), config_(config) {
  if (!records_) throw std::invalid_argument("FEBR agent needs a dataset");
}

user::Recommendation FebrAgent::recommend(const user::Observation& obs, Rng& rng) {
  return febr_recommend(obs.interests, obs.corpus, obs.dominant_topic, *records_, disc_, config_, rng);
}

}  // namespace febr::recommender
