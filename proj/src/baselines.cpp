#include "febr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace febr::baselines {

QLearner::QLearner(int n_states, int n_actions, QLearningParams params)
    : n_states_(n_states), n_actions_(n_actions), params_(params), epsilon_(params.epsilon) {
  if (n_states < 1 || n_actions < 1) throw std::invalid_argument("empty Q table");
  if (params.lr <= 0.0 || params.lr > 1.0) throw std::invalid_argument("learning rate must be in (0, 1]");
  if (params.epsilon < 0.0 || params.epsilon > 1.0) throw std::invalid_argument("epsilon must be in [0, 1]");
  if (params.gamma < 0.0 || params.gamma >= 1.0) throw std::invalid_argument("gamma must be in [0, 1)");
  table_.assign(static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_actions), 0.0);
}

std::size_t QLearner::index(irl::StateId s, irl::ActionId a) const {
  if (s < 0 || s >= n_states_ || a < 0 || a >= n_actions_) throw std::out_of_range("Q table index");
  return static_cast<std::size_t>(s) * static_cast<std::size_t>(n_actions_) + static_cast<std::size_t>(a);
}

double QLearner::max_q(irl::StateId s) const { return q(s, greedy(s)); }

irl::ActionId QLearner::greedy(irl::StateId s) const {
  const auto* row = &table_[index(s, 0)];
  return static_cast<irl::ActionId>(std::max_element(row, row + n_actions_) - row);
}

irl::ActionId QLearner::select(irl::StateId s, Rng& rng) const {
  if (epsilon_ > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < epsilon_)
    return std::uniform_int_distribution<irl::ActionId>(0, n_actions_ - 1)(rng);
  return greedy(s);
}

void QLearner::update(irl::StateId s, irl::ActionId a, double reward, std::optional<irl::StateId> next) {
  const double target = reward + (next ? params_.gamma * max_q(*next) : 0.0);
  double& entry = q(s, a);
  entry += params_.lr * (target - entry);
}

void QLearner::end_episode() { epsilon_ = std::max(params_.epsilon_floor, epsilon_ * params_.epsilon_decay); }

RecFsqAgent::RecFsqAgent(irl::Discretizer disc, QLearningParams params, double quality_weight)
    : disc_(std::move(disc)),
      learner_(disc_.num_states(), disc_.num_actions(), params),
      quality_weight_(quality_weight) {}

user::Recommendation RecFsqAgent::recommend(const user::Observation& obs, Rng& rng) {
  last_action_ = learner_.select(obs.abstract_state, rng);
  return {irl::realize_action(last_action_, obs.corpus, obs.dominant_topic, disc_), false};
}

void RecFsqAgent::observe(const user::Observation& obs, const user::Recommendation&, const Response& response,
                          const user::Observation* next) {
  const double q = response.has_click() ? response.observed_quality : 0.0;
  const double reward = response.watch_time + quality_weight_ * q;
  learner_.update(obs.abstract_state, last_action_, reward,
                  next ? std::optional<irl::StateId>(next->abstract_state) : std::nullopt);
  if (!next) learner_.end_episode();
}

std::vector<std::size_t> top_k_by_utility(std::span<const Video> corpus, std::span<const double> utilities,
                                          std::size_t k) {
  if (corpus.size() != utilities.size()) throw std::invalid_argument("one utility per corpus video");
  if (k > corpus.size()) throw std::invalid_argument("corpus smaller than the slate");
  std::vector<std::size_t> idx(corpus.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (utilities[a] != utilities[b]) return utilities[a] > utilities[b];
    return corpus[a].id < corpus[b].id;
  });
  idx.resize(k);
  return idx;
}

RecPctrAgent::RecPctrAgent(std::size_t slate_size, user::UserEnvConfig env) : slate_size_(slate_size), env_(env) {}

user::Recommendation RecPctrAgent::recommend(const user::Observation& obs, Rng&) {
  if (!obs.true_user) throw std::logic_error("RecPCTR requires the true user state");
  // click probability is monotone in utility within one slate, so ranking by
  // utility is ranking by pCTR
  const auto u = user::user_utilities(obs.corpus, *obs.true_user, env_);
  Slate s;
  for (auto i : top_k_by_utility(obs.corpus, u, slate_size_)) s.items.push_back(obs.corpus[i].id);
  return {s, false};
}

BanditState::BanditState(int n_topics, double c)
    : c_(c), counts_(static_cast<std::size_t>(n_topics), 0), sums_(static_cast<std::size_t>(n_topics), 0.0) {
  if (n_topics < 1) throw std::invalid_argument("bandit needs at least one arm");
  if (c < 0.0) throw std::invalid_argument("exploration constant must be nonnegative");
}

double BanditState::mean(int arm) const {
  const auto i = static_cast<std::size_t>(arm);
  return counts_.at(i) > 0 ? sums_[i] / static_cast<double>(counts_[i]) : 0.0;
}

double BanditState::ucb(int arm) const {
  const auto n = counts_.at(static_cast<std::size_t>(arm));
  if (n == 0) return std::numeric_limits<double>::infinity();
  return mean(arm) + c_ * std::sqrt(std::log(static_cast<double>(total_)) / static_cast<double>(n));
}

int BanditState::select(const std::vector<bool>& allowed) const {
  if (!allowed.empty() && allowed.size() != counts_.size()) throw std::invalid_argument("mask size mismatch");
  int best = -1;
  double best_value = 0.0;
  for (int a = 0; a < n_arms(); ++a) {
    if (!allowed.empty() && !allowed[static_cast<std::size_t>(a)]) continue;
    const double v = ucb(a);
    if (best < 0 || v > best_value) {
      best = a;
      best_value = v;
    }
  }
  if (best < 0) throw std::invalid_argument("no arm allowed");
  return best;
}

void BanditState::update(int arm, double reward) {
  const auto i = static_cast<std::size_t>(arm);
  ++counts_.at(i);
  sums_[i] += reward;
  ++total_;
}

RecBanditAgent::RecBanditAgent(int n_topics, std::size_t slate_size, double c)
    : state_(n_topics, c), slate_size_(slate_size) {}

user::Recommendation RecBanditAgent::recommend(const user::Observation& obs, Rng&) {
  std::vector<bool> present(static_cast<std::size_t>(state_.n_arms()), false);
  for (const auto& v : obs.corpus) present.at(static_cast<std::size_t>(v.topic)) = true;
  last_topic_ = state_.select(present);
  return {topic_first_slate(obs.corpus, last_topic_, slate_size_), false};
}

void RecBanditAgent::observe(const user::Observation&, const user::Recommendation&, const Response& response,
                             const user::Observation*) {
  state_.update(last_topic_, response.has_click() ? response.engagement_rate : 0.0);
}

Slate topic_first_slate(std::span<const Video> corpus, TopicId topic, std::size_t k) {
  if (k == 0 || corpus.size() < k) throw std::invalid_argument("corpus smaller than the slate");
  std::vector<std::size_t> idx(corpus.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const bool ta = corpus[a].topic == topic, tb = corpus[b].topic == topic;
    if (ta != tb) return ta;
    const double sa = video_score(corpus[a]), sb = video_score(corpus[b]);
    if (sa != sb) return sa > sb;
    return corpus[a].id < corpus[b].id;
  });
  Slate s;
  for (std::size_t i = 0; i < k; ++i) s.items.push_back(corpus[idx[i]].id);
  return s;
}

std::vector<std::size_t> naive_candidates(std::span<const Video> corpus, std::span<const double> interests,
                                          const NaiveConfig& config) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& v = corpus[i];
    if (!v.evaluated || !v.evaluated_quality || !(*v.evaluated_quality > config.rating_threshold)) continue;
    if (config.require_positive_interest && !(interests[static_cast<std::size_t>(v.topic)] > 0.0)) continue;
    out.push_back(i);
  }
  return out;
}

Slate naive_recommend(std::span<const Video> corpus, std::span<const double> interests, std::size_t k,
                      const NaiveConfig& config, Rng& rng) {
  const auto pool = naive_candidates(corpus, interests, config);
  if (pool.size() < k) return random_slate(corpus, k, rng);
  std::vector<Video> members;
  for (auto i : pool) members.push_back(corpus[i]);
  return random_slate(members, k, rng);
}

RecNaiveAgent::RecNaiveAgent(std::size_t slate_size, NaiveConfig config) : slate_size_(slate_size), config_(config) {}

user::Recommendation RecNaiveAgent::recommend(const user::Observation& obs, Rng& rng) {
  return {naive_recommend(obs.corpus, obs.interests, slate_size_, config_, rng), false};
}

}  // namespace febr::baselines
