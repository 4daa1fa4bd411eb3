#pragma once

#include <span>
#include <vector>

#include "febr/abstraction.hpp"
#include "febr/user_env.hpp"

namespace febr::baselines {

struct QLearningParams {
  double lr = 0.1;
  double epsilon = 0.1;
  double epsilon_decay = 0.99;  // applied once per finished session
  double epsilon_floor = 0.01;
  double gamma = 0.5;
};

/// Tabular one-step Q-learning over the abstract state and action spaces.
class QLearner {
 public:
  QLearner(int n_states, int n_actions, QLearningParams params);

  double q(irl::StateId s, irl::ActionId a) const { return table_[index(s, a)]; }
  double& q(irl::StateId s, irl::ActionId a) { return table_[index(s, a)]; }
  double max_q(irl::StateId s) const;
  /// Lowest action id among the maxima.
  irl::ActionId greedy(irl::StateId s) const;
  irl::ActionId select(irl::StateId s, Rng& rng) const;
  /// `next` empty means terminal.
  void update(irl::StateId s, irl::ActionId a, double reward, std::optional<irl::StateId> next);
  void end_episode();

  double epsilon() const noexcept { return epsilon_; }
  int n_states() const noexcept { return n_states_; }
  int n_actions() const noexcept { return n_actions_; }
  const QLearningParams& params() const noexcept { return params_; }

 private:
  std::size_t index(irl::StateId s, irl::ActionId a) const;

  int n_states_;
  int n_actions_;
  QLearningParams params_;
  double epsilon_;
  std::vector<double> table_;
};

class RecFsqAgent : public user::Agent {
 public:
  RecFsqAgent(irl::Discretizer disc, QLearningParams params, double quality_weight = 1.0);

  std::string name() const override { return "recfsq"; }
  user::Recommendation recommend(const user::Observation& obs, Rng& rng) override;
  void observe(const user::Observation& obs, const user::Recommendation& rec, const Response& response,
               const user::Observation* next) override;

  const QLearner& learner() const noexcept { return learner_; }

 private:
  irl::Discretizer disc_;
  QLearner learner_;
  double quality_weight_;  // eta
  irl::ActionId last_action_ = 0;
};

/// Indices of the k largest utilities, largest first; equal utilities go to
/// the lower video id.
std::vector<std::size_t> top_k_by_utility(std::span<const Video> corpus, std::span<const double> utilities,
                                          std::size_t k);

class RecPctrAgent : public user::Agent {
 public:
  RecPctrAgent(std::size_t slate_size, user::UserEnvConfig env);

  std::string name() const override { return "recpctr"; }
  bool needs_true_user() const override { return true; }
  user::Recommendation recommend(const user::Observation& obs, Rng& rng) override;

 private:
  std::size_t slate_size_;
  user::UserEnvConfig env_;
};

/// UCB1 over topics.
class BanditState {
 public:
  explicit BanditState(int n_topics, double c = 1.4142135623730951);

  /// Unpulled arms first (lowest id), then the highest upper confidence
  /// bound. Only arms flagged in `allowed` are considered; an empty mask
  /// allows every arm.
  int select(const std::vector<bool>& allowed = {}) const;
  void update(int arm, double reward);
  double ucb(int arm) const;

  int n_arms() const noexcept { return static_cast<int>(counts_.size()); }
  long long count(int arm) const { return counts_.at(static_cast<std::size_t>(arm)); }
  double mean(int arm) const;
  long long total() const noexcept { return total_; }

 private:
  double c_;
  long long total_ = 0;
  std::vector<long long> counts_;
  std::vector<double> sums_;
};

class RecBanditAgent : public user::Agent {
 public:
  RecBanditAgent(int n_topics, std::size_t slate_size, double c = 1.4142135623730951);

  std::string name() const override { return "recbandit"; }
  user::Recommendation recommend(const user::Observation& obs, Rng& rng) override;
  void observe(const user::Observation& obs, const user::Recommendation& rec, const Response& response,
               const user::Observation* next) override;

  const BanditState& state() const noexcept { return state_; }

 private:
  BanditState state_;
  std::size_t slate_size_;
  int last_topic_ = 0;
};

/// Corpus videos sorted by score (highest first), ties to the lower id, with
/// those of `topic` placed ahead of the rest.
Slate topic_first_slate(std::span<const Video> corpus, TopicId topic, std::size_t k);

struct NaiveConfig {
  double rating_threshold = 0.5;
  bool require_positive_interest = true;
};

/// Corpus members rated above the threshold by an expert whose topic the user
/// currently likes.
std::vector<std::size_t> naive_candidates(std::span<const Video> corpus, std::span<const double> interests,
                                          const NaiveConfig& config);

Slate naive_recommend(std::span<const Video> corpus, std::span<const double> interests, std::size_t k,
                      const NaiveConfig& config, Rng& rng);

class RecNaiveAgent : public user::Agent {
 public:
  RecNaiveAgent(std::size_t slate_size, NaiveConfig config);

  std::string name() const override { return "recnaive"; }
  user::Recommendation recommend(const user::Observation& obs, Rng& rng) override;

 private:
  std::size_t slate_size_;
  NaiveConfig config_;
};

/// Picks a uniformly random corpus slate every step.
class RandomAgent : public user::Agent {
 public:
  explicit RandomAgent(std::size_t slate_size) : slate_size_(slate_size) {}
  std::string name() const override { return "random"; }
  user::Recommendation recommend(const user::Observation& obs, Rng& rng) override {
    return {random_slate(obs.corpus, slate_size_, rng), false};
  }

 private:
  std::size_t slate_size_;
};

}  // namespace febr::baselines
