#pragma once

#include <span>
#include <string>
#include <vector>

#include "febr/abstraction.hpp"

namespace febr::irl {

struct AbstractTransition {
  StateId state = 0;
  ActionId action = 0;
  StateId next = 0;
  bool operator==(const AbstractTransition&) const = default;
};
using AbstractTrajectory = std::vector<AbstractTransition>;

/// T[s, a, s'] stored densely, plus the initial-state distribution.
class TransitionModel {
 public:
  TransitionModel(int n_states, int n_actions);

  int num_states() const noexcept { return n_states_; }
  int num_actions() const noexcept { return n_actions_; }

  double& at(StateId s, ActionId a, StateId next) { return t_[index(s, a, next)]; }
  double at(StateId s, ActionId a, StateId next) const { return t_[index(s, a, next)]; }
  /// The distribution over next states for (s, a).
  std::span<const double> row(StateId s, ActionId a) const {
    return {t_.data() + index(s, a, 0), static_cast<std::size_t>(n_states_)};
  }
  std::span<double> row(StateId s, ActionId a) { return {t_.data() + index(s, a, 0), static_cast<std::size_t>(n_states_)}; }

  std::vector<double>& initial() noexcept { return d0_; }
  const std::vector<double>& initial() const noexcept { return d0_; }

  /// Throws std::invalid_argument unless every row and D0 sum to 1 within tol.
  void validate(double tol = 1e-9) const;

 private:
  std::size_t index(StateId s, ActionId a, StateId next) const {
    return (static_cast<std::size_t>(s) * static_cast<std::size_t>(n_actions_) + static_cast<std::size_t>(a)) *
               static_cast<std::size_t>(n_states_) +
           static_cast<std::size_t>(next);
  }
  int n_states_;
  int n_actions_;
  std::vector<double> t_;
  std::vector<double> d0_;
};

/// Smoothed maximum-likelihood estimate from observed transitions:
/// (count(s,a,s') + smoothing) / (count(s,a) + smoothing * |S|). D0 comes from
/// the first state of each trajectory.
TransitionModel estimate_transitions(std::span<const AbstractTrajectory> trajectories, int n_states, int n_actions,
                                     double smoothing = 0.05);

/// Stochastic policy pi(a | s), stored row-major.
class Policy {
 public:
  Policy(int n_states, int n_actions);
  static Policy uniform(int n_states, int n_actions);

  int num_states() const noexcept { return n_states_; }
  int num_actions() const noexcept { return n_actions_; }
  double& at(StateId s, ActionId a) { return p_[static_cast<std::size_t>(s * n_actions_ + a)]; }
  double at(StateId s, ActionId a) const { return p_[static_cast<std::size_t>(s * n_actions_ + a)]; }
  std::span<const double> row(StateId s) const {
    return {p_.data() + static_cast<std::size_t>(s * n_actions_), static_cast<std::size_t>(n_actions_)};
  }
  /// Most probable action, lowest id on ties.
  ActionId argmax(StateId s) const;
  void validate(double tol = 1e-9) const;

  bool operator==(const Policy&) const = default;

 private:
  int n_states_;
  int n_actions_;
  std::vector<double> p_;
};

enum class FeatureKind { OneHot, Factored };

std::string to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(const std::string& s);

/// State features phi_s and weights theta; R*(s) = theta . phi_s.
struct RewardModel {
  FeatureKind kind = FeatureKind::OneHot;
  int n_states = 0;
  int n_features = 0;
  std::vector<double> features;  // n_states x n_features, row-major
  std::vector<double> theta;

  static RewardModel make(FeatureKind kind, const Discretizer& disc);
  static RewardModel one_hot(int n_states);

  std::span<const double> phi(StateId s) const {
    return {features.data() + static_cast<std::size_t>(s) * static_cast<std::size_t>(n_features),
            static_cast<std::size_t>(n_features)};
  }
  double reward(StateId s) const;
  std::vector<double> rewards() const;
};

/// phi_zeta: sum of state features along the trajectory.
std::vector<double> trajectory_feature_counts(const AbstractTrajectory& trajectory, const RewardModel& model);

/// phi-tilde: mean per-trajectory feature count.
std::vector<double> empirical_feature_expectation(std::span<const AbstractTrajectory> trajectories,
                                                  const RewardModel& model);

struct ValueIterationOptions {
  double gamma = 0.5;
  double tol = 1e-6;
  int max_iters = 10000;
  /// 0 gives the deterministic argmax policy; eps mixes in eps/|A| uniform mass.
  double softness = 0.0;
};

struct ValueIterationResult {
  std::vector<double> values;
  Policy policy;
  double residual = 0.0;
  int sweeps = 0;
};

/// max_a over R(s) + gamma * sum_s' T[s,a,s'] V(s')
std::vector<double> bellman_backup(std::span<const double> state_reward, const TransitionModel& T, double gamma,
                                   std::span<const double> values);
double bellman_residual(std::span<const double> state_reward, const TransitionModel& T, double gamma,
                        std::span<const double> values);

/// Optimal values and greedy policy for a state reward. `warm_start`, when
/// sized |S|, seeds the iteration. Throws ConvergenceError if the residual is
/// still >= tol after max_iters sweeps.
ValueIterationResult value_iteration(std::span<const double> state_reward, const TransitionModel& T,
                                     const ValueIterationOptions& options,
                                     std::span<const double> warm_start = {});

/// sum over t < horizon of d_t, with d_0 = D0 and d_{t+1} the policy-propagated distribution.
std::vector<double> state_visitation_frequencies(const Policy& policy, const TransitionModel& T, int horizon);

/// sum over t of weights[t] * d_t; with weights[t] = P(length > t) this is the
/// expected visit count for episodes of random length.
std::vector<double> weighted_visitation_frequencies(const Policy& policy, const TransitionModel& T,
                                                    std::span<const double> weights);

}  // namespace febr::irl
