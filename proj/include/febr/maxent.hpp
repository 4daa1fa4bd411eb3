#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "febr/mdp.hpp"

namespace febr::irl {

struct MaxEntOptions {
  double gamma = 0.5;
  double learning_rate = 0.01;
  double lr_decay = 0.999;  // multiplicative, per iteration
  int iterations = 10000;
  double vi_tol = 1e-6;
  int vi_max_iters = 10000;
  /// > 0: fixed visitation horizon. 0: weight step t by the fraction of
  /// demonstrations longer than t, so both sides of the gradient cover the
  /// same (variable) episode lengths.
  int horizon = 0;
  double divergence_threshold = 1e6;
};

struct TraceRow {
  int iteration = 0;
  double grad_norm = 0.0;     // Euclidean norm of the normalized gradient
  double residual_inf = 0.0;  // its max-norm, i.e. the feature-matching residual
};

struct MaxEntResult {
  std::vector<double> theta;
  Policy policy{1, 1};          // greedy policy under the final theta
  std::vector<double> values;
  std::vector<TraceRow> trace;
  double final_residual = 0.0;  // matching residual under the final theta
  double mean_length = 0.0;
};

/// Weights w_t = P(length > t) estimated from the demonstrations.
std::vector<double> survival_weights(std::span<const AbstractTrajectory> demos);

/// Per-step feature-matching gap phi~/L - Phi^T D_w / L for a policy, where L is
/// the mean demonstration length (or the horizon) and D_w the weighted visitation.
std::vector<double> feature_matching_gap(std::span<const AbstractTrajectory> demos, const TransitionModel& T,
                                         const RewardModel& model, const Policy& policy, int horizon = 0);

/// Gradient ascent on the demonstration log-likelihood. Each iteration solves
/// value iteration under the current reward, propagates state visitation
/// frequencies under the resulting policy, and moves theta along the
/// normalized difference of empirical and expected feature counts.
/// `model.theta` is the starting point (zero-initialized by RewardModel::make).
MaxEntResult maxent_irl(std::span<const AbstractTrajectory> demos, const TransitionModel& T, RewardModel model,
                        const MaxEntOptions& options);

/// Samples an index from a discrete distribution.
std::size_t sample_index(std::span<const double> probabilities, Rng& rng);

/// Rolls a policy out on the model for `horizon` steps from D0.
AbstractTrajectory rollout(const Policy& policy, const TransitionModel& T, int horizon, Rng& rng);

struct LearnedModel {
  int n_states = 0;
  int n_actions = 0;
  double gamma = 0.5;
  FeatureKind kind = FeatureKind::OneHot;
  std::vector<double> theta;
  Policy policy{1, 1};
};

/// Versioned flat file: header lines, then theta one value per line, then policy rows.
void save_model(const LearnedModel& model, const std::filesystem::path& path);
LearnedModel load_model(const std::filesystem::path& path);

void save_trace(std::span<const TraceRow> trace, const std::filesystem::path& path);

}  // namespace febr::irl
