#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "febr/expert_env.hpp"
#include "febr/mdp.hpp"

namespace febr::dataset {

struct ResponseSummary {
  int clicked_topic = -1;  // -1: no click
  double watch_time = 0.0;
  double s_v = 0.0;
  double engagement_rate = 0.0;
  double evaluated_quality = 0.0;
  bool operator==(const ResponseSummary&) const = default;
};

/// One entry of the state dataset: [expert id, expert state, response state, video state].
struct ExpertStateRecord {
  int expert_id = 0;
  std::vector<double> e_s;  // interests, length n_topics
  std::vector<double> e_c;  // corpus descriptor, see corpus_descriptor()
  ResponseSummary response;
  irl::StateId abstract_state = 0;
  irl::ActionId policy_action = 0;
  bool operator==(const ExpertStateRecord&) const = default;
};

/// Dimensions a dataset file was built under.
struct DatasetShape {
  int n_topics = kDefaultTopics;
  std::size_t corpus_size = 5;
  int n_states = 0;
  int n_actions = 0;
  bool operator==(const DatasetShape&) const = default;
};

inline constexpr int kStoredDigits = 9;

/// Rounds to the stored precision, so records survive a save/load unchanged.
double canonical(double v);

/// Fixed-layout corpus features: videos sorted by (topic, score), each
/// contributing (topic / n_topics, length, score).
std::vector<double> corpus_descriptor(std::span<const Video> corpus, int n_topics);

/// One record per trajectory step; policy_action is the argmax of the learned
/// policy at the step's abstract state.
std::vector<ExpertStateRecord> build_dataset(std::span<const expert::Trajectory> trajectories,
                                             const irl::Policy& policy, int n_topics);

void save_dataset(std::span<const ExpertStateRecord> records, const DatasetShape& shape,
                  const std::filesystem::path& path);

/// Throws ParseError naming the line for malformed content and ConfigMismatch
/// when the file's shape differs from `expected`.
std::vector<ExpertStateRecord> load_dataset(const std::filesystem::path& path, const DatasetShape& expected);

}  // namespace febr::dataset
