#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "febr/baselines.hpp"
#include "febr/domain.hpp"
#include "febr/expert_env.hpp"
#include "febr/maxent.hpp"
#include "febr/metrics.hpp"
#include "febr/recommender.hpp"
#include "febr/user_env.hpp"

namespace febr {

inline const std::vector<std::string> kAllAgents = {"febr", "recfsq", "recpctr", "recbandit", "recnaive"};

struct ExperimentConfig {
  std::string profile = "desk";
  std::uint64_t seed = 42;

  int n_topics = kDefaultTopics;
  std::size_t slate_size = 2;
  std::size_t catalog_size = 10000;
  double video_length = kDefaultVideoLength;
  InterestPrior interest_prior;

  int n_experts = 10;
  int trajectories_per_expert = 100;
  double expert_budget = 60.0;
  double quality_factor_low = 0.5;
  double quality_factor_high = 1.0;
  double behavior_epsilon = 0.1;
  expert::ExpertEnvConfig expert_env;

  irl::MaxEntOptions irl;
  irl::FeatureKind features = irl::FeatureKind::OneHot;
  double transition_smoothing = 0.05;

  recommender::ClassifierConfig classifier;

  int sessions = 500;
  user::UserProfile user_defaults;
  user::UserEnvConfig user_env;

  baselines::QLearningParams fsq;
  double fsq_quality_weight = 1.0;
  double bandit_c = 1.4142135623730951;
  baselines::NaiveConfig naive;

  metrics::MetricsOptions metrics;

  std::vector<std::string> agents = kAllAgents;
  int threads = 0;  // 0: one per arm, capped by hardware concurrency

  irl::Discretizer discretizer() const { return irl::Discretizer(n_topics, slate_size); }
};

/// "desk" (reduced scale) or "paper". Throws ConfigError for other names.
ExperimentConfig profile_config(const std::string& name);

/// Applies `section.key = value` settings from INI-style text on top of
/// `base`. Throws ConfigError naming the line for unknown keys or bad values.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base, const std::string& source = "config");
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base);

/// Throws ConfigError on the first violated constraint.
void validate(const ExperimentConfig& config);

/// Every key with its value, in a form parse_config accepts.
std::string echo(const ExperimentConfig& config);

}  // namespace febr
