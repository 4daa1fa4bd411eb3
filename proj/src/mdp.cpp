#include "febr/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "febr/errors.hpp"

namespace febr::irl {

TransitionModel::TransitionModel(int n_states, int n_actions) : n_states_(n_states), n_actions_(n_actions) {
  if (n_states < 1 || n_actions < 1) throw std::invalid_argument("empty state or action space");
  t_.assign(static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_actions) *
                static_cast<std::size_t>(n_states),
            0.0);
  d0_.assign(static_cast<std::size_t>(n_states), 0.0);
}

void TransitionModel::validate(double tol) const {
  for (int s = 0; s < n_states_; ++s)
    for (int a = 0; a < n_actions_; ++a) {
      double sum = 0.0;
      for (double p : row(s, a)) {
        if (p < 0.0) throw std::invalid_argument("negative transition probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > tol) throw std::invalid_argument("transition row does not sum to 1");
    }
  double sum = 0.0;
  for (double p : d0_) sum += p;
  if (std::abs(sum - 1.0) > tol) throw std::invalid_argument("initial distribution does not sum to 1");
}

TransitionModel estimate_transitions(std::span<const AbstractTrajectory> trajectories, int n_states, int n_actions,
                                     double smoothing) {
  if (trajectories.empty()) throw std::invalid_argument("no trajectories to estimate transitions from");
  if (smoothing < 0.0) throw std::invalid_argument("smoothing must be nonnegative");
  TransitionModel model(n_states, n_actions);
  auto check = [&](int s, int a) {
    if (s < 0 || s >= n_states || a < 0 || a >= n_actions) throw std::invalid_argument("abstract id out of range");
  };

  std::vector<double> starts(static_cast<std::size_t>(n_states), 0.0);
  std::size_t n_started = 0;
  for (const auto& traj : trajectories) {
    if (traj.empty()) continue;
    check(traj.front().state, 0);
    starts[static_cast<std::size_t>(traj.front().state)] += 1.0;
    ++n_started;
    for (const auto& tr : traj) {
      check(tr.state, tr.action);
      check(tr.next, 0);
      model.at(tr.state, tr.action, tr.next) += 1.0;
    }
  }
  if (n_started == 0) throw std::invalid_argument("all trajectories are empty");

  for (int s = 0; s < n_states; ++s)
    for (int a = 0; a < n_actions; ++a) {
      auto row = model.row(s, a);
      double count = 0.0;
      for (double c : row) count += c;
      const double denom = count + smoothing * n_states;
      if (denom <= 0.0) {
        std::fill(row.begin(), row.end(), 1.0 / n_states);
        continue;
      }
      for (double& c : row) c = (c + smoothing) / denom;
    }
  for (int s = 0; s < n_states; ++s)
    model.initial()[static_cast<std::size_t>(s)] = starts[static_cast<std::size_t>(s)] / static_cast<double>(n_started);
  return model;
}

Policy::Policy(int n_states, int n_actions) : n_states_(n_states), n_actions_(n_actions) {
  if (n_states < 1 || n_actions < 1) throw std::invalid_argument("empty state or action space");
  p_.assign(static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_actions), 0.0);
}

Policy Policy::uniform(int n_states, int n_actions) {
  Policy p(n_states, n_actions);
  std::fill(p.p_.begin(), p.p_.end(), 1.0 / n_actions);
  return p;
}

ActionId Policy::argmax(StateId s) const {
  auto r = row(s);
  return static_cast<ActionId>(std::max_element(r.begin(), r.end()) - r.begin());
}

void Policy::validate(double tol) const {
  for (int s = 0; s < n_states_; ++s) {
    double sum = 0.0;
    for (double p : row(s)) sum += p;
    if (std::abs(sum - 1.0) > tol) throw std::invalid_argument("policy row does not sum to 1");
  }
}

std::string to_string(FeatureKind kind) { return kind == FeatureKind::OneHot ? "one_hot" : "factored"; }

FeatureKind feature_kind_from_string(const std::string& s) {
  if (s == "one_hot") return FeatureKind::OneHot;
  if (s == "factored") return FeatureKind::Factored;
  throw std::invalid_argument("unknown feature map '" + s + "'");
}

RewardModel RewardModel::one_hot(int n_states) {
  RewardModel m;
  m.kind = FeatureKind::OneHot;
  m.n_states = n_states;
  m.n_features = n_states;
  m.features.assign(static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_states), 0.0);
  for (int s = 0; s < n_states; ++s) m.features[static_cast<std::size_t>(s * n_states + s)] = 1.0;
  m.theta.assign(static_cast<std::size_t>(n_states), 0.0);
  return m;
}

RewardModel RewardModel::make(FeatureKind kind, const Discretizer& disc) {
  if (kind == FeatureKind::OneHot) return one_hot(disc.num_states());
  RewardModel m;
  m.kind = kind;
  m.n_states = disc.num_states();
  m.n_features = disc.n_topics() + disc.quality_bins() + disc.engagement_bins();
  m.features.assign(static_cast<std::size_t>(m.n_states) * static_cast<std::size_t>(m.n_features), 0.0);
  for (int s = 1; s < m.n_states; ++s) {
    const auto d = disc.decode_state(s);
    auto* row = m.features.data() + static_cast<std::size_t>(s) * static_cast<std::size_t>(m.n_features);
    row[*d.last_topic] = 1.0;
    row[disc.n_topics() + d.quality_bin] = 1.0;
    row[disc.n_topics() + disc.quality_bins() + d.engagement_bin] = 1.0;
  }
  m.theta.assign(static_cast<std::size_t>(m.n_features), 0.0);
  return m;
}

double RewardModel::reward(StateId s) const {
  auto f = phi(s);
  double r = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) r += theta[k] * f[k];
  return r;
}

std::vector<double> RewardModel::rewards() const {
  std::vector<double> r(static_cast<std::size_t>(n_states));
  for (int s = 0; s < n_states; ++s) r[static_cast<std::size_t>(s)] = reward(s);
  return r;
}

std::vector<double> trajectory_feature_counts(const AbstractTrajectory& trajectory, const RewardModel& model) {
  std::vector<double> counts(static_cast<std::size_t>(model.n_features), 0.0);
  for (const auto& step : trajectory) {
    if (step.state < 0 || step.state >= model.n_states) throw std::invalid_argument("state id out of range");
    auto f = model.phi(step.state);
    for (std::size_t k = 0; k < f.size(); ++k) counts[k] += f[k];
  }
  return counts;
}

std::vector<double> empirical_feature_expectation(std::span<const AbstractTrajectory> trajectories,
                                                  const RewardModel& model) {
  if (trajectories.empty()) throw std::invalid_argument("no demonstrations");
  std::vector<double> mean(static_cast<std::size_t>(model.n_features), 0.0);
  for (const auto& t : trajectories) {
    auto c = trajectory_feature_counts(t, model);
    for (std::size_t k = 0; k < c.size(); ++k) mean[k] += c[k];
  }
  for (double& v : mean) v /= static_cast<double>(trajectories.size());
  return mean;
}

namespace {

// One backup; fills `q_best` with the optimal value and `best` with the argmax.
void backup(std::span<const double> reward, const TransitionModel& T, double gamma, std::span<const double> values,
            std::vector<double>& q_best, std::vector<ActionId>& best) {
  const int S = T.num_states();
  const int A = T.num_actions();
  q_best.assign(static_cast<std::size_t>(S), 0.0);
  best.assign(static_cast<std::size_t>(S), 0);
  for (int s = 0; s < S; ++s) {
    double top = 0.0;
    ActionId arg = 0;
    for (int a = 0; a < A; ++a) {
      auto row = T.row(s, a);
      double ev = 0.0;
      for (int n = 0; n < S; ++n) ev += row[static_cast<std::size_t>(n)] * values[static_cast<std::size_t>(n)];
      const double q = reward[static_cast<std::size_t>(s)] + gamma * ev;
      if (a == 0 || q > top) {
        top = q;
        arg = a;
      }
    }
    q_best[static_cast<std::size_t>(s)] = top;
    best[static_cast<std::size_t>(s)] = arg;
  }
}

void check_reward(std::span<const double> reward, const TransitionModel& T) {
  if (reward.size() != static_cast<std::size_t>(T.num_states())) throw std::invalid_argument("reward has wrong size");
}

}  // namespace

std::vector<double> bellman_backup(std::span<const double> state_reward, const TransitionModel& T, double gamma,
                                   std::span<const double> values) {
  check_reward(state_reward, T);
  std::vector<double> out;
  std::vector<ActionId> best;
  backup(state_reward, T, gamma, values, out, best);
  return out;
}

double bellman_residual(std::span<const double> state_reward, const TransitionModel& T, double gamma,
                        std::span<const double> values) {
  auto next = bellman_backup(state_reward, T, gamma, values);
  double res = 0.0;
  for (std::size_t s = 0; s < next.size(); ++s) res = std::max(res, std::abs(next[s] - values[s]));
  return res;
}

ValueIterationResult value_iteration(std::span<const double> state_reward, const TransitionModel& T,
                                     const ValueIterationOptions& options, std::span<const double> warm_start) {
  check_reward(state_reward, T);
  if (!(options.gamma >= 0.0 && options.gamma < 1.0)) throw std::invalid_argument("gamma must be in [0, 1)");
  if (!(options.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (options.softness < 0.0 || options.softness > 1.0) throw std::invalid_argument("softness must be in [0, 1]");

  const auto S = static_cast<std::size_t>(T.num_states());
  std::vector<double> v(S, 0.0);
  if (warm_start.size() == S) v.assign(warm_start.begin(), warm_start.end());

  std::vector<double> next;
  std::vector<ActionId> best;
  double residual = 0.0;
  for (int sweep = 1; sweep <= options.max_iters; ++sweep) {
    backup(state_reward, T, options.gamma, v, next, best);
    residual = 0.0;
    for (std::size_t s = 0; s < S; ++s) residual = std::max(residual, std::abs(next[s] - v[s]));
    if (!std::isfinite(residual)) break;
    if (residual < options.tol) {
      // v is returned; its Bellman residual is exactly `residual`, and `best` is greedy w.r.t. v.
      const int A = T.num_actions();
      Policy policy(T.num_states(), A);
      for (int s = 0; s < T.num_states(); ++s) {
        for (int a = 0; a < A; ++a) policy.at(s, a) = options.softness / A;
        policy.at(s, best[static_cast<std::size_t>(s)]) += 1.0 - options.softness;
      }
      return {std::move(v), std::move(policy), residual, sweep};
    }
    v.swap(next);
  }
  throw ConvergenceError(residual, options.max_iters);
}

std::vector<double> weighted_visitation_frequencies(const Policy& policy, const TransitionModel& T,
                                                    std::span<const double> weights) {
  if (policy.num_states() != T.num_states() || policy.num_actions() != T.num_actions())
    throw std::invalid_argument("policy and transition model disagree on dimensions");
  const int S = T.num_states();
  const int A = T.num_actions();
  std::vector<double> d = T.initial();
  std::vector<double> total(static_cast<std::size_t>(S), 0.0);
  std::vector<double> next(static_cast<std::size_t>(S));
  for (std::size_t t = 0; t < weights.size(); ++t) {
    for (int s = 0; s < S; ++s) total[static_cast<std::size_t>(s)] += weights[t] * d[static_cast<std::size_t>(s)];
    if (t + 1 == weights.size()) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      const double ds = d[static_cast<std::size_t>(s)];
      if (ds == 0.0) continue;
      for (int a = 0; a < A; ++a) {
        const double w = ds * policy.at(s, a);
        if (w == 0.0) continue;
        auto row = T.row(s, a);
        for (int n = 0; n < S; ++n) next[static_cast<std::size_t>(n)] += w * row[static_cast<std::size_t>(n)];
      }
    }
    d.swap(next);
  }
  return total;
}

std::vector<double> state_visitation_frequencies(const Policy& policy, const TransitionModel& T, int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  std::vector<double> ones(static_cast<std::size_t>(horizon), 1.0);
  return weighted_visitation_frequencies(policy, T, ones);
}

}  // namespace febr::irl
