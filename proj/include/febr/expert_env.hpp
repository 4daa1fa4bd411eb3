#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "febr/abstraction.hpp"
#include "febr/domain.hpp"
#include "febr/mdp.hpp"
#include "febr/retrieval.hpp"

namespace febr::expert {

struct ExpertProfile {
  int id = 0;
  std::vector<double> interests;
  std::vector<TopicId> expertise_topics;
  double quality_factor = 1.0;  // f, in [0, 1]
  double session_budget = 60.0;  // minutes
};

/// Throws std::invalid_argument if the profile breaks its invariants.
void validate(const ExpertProfile& profile, int n_topics);

struct ExpertEnvConfig {
  std::size_t corpus_size = 5;
  int max_steps = 20;
  double browse_cost = 1.0;       // minutes per step
  double sigma_eval = 0.3;        // feature noise at f = 0
  double beta_quality = 2.0;
  double beta_topic = 1.0;
  double beta_expertise = 1.0;
  double no_click_mass = 1.0;
  double retrieval_noise = 0.1;
};

/// s_m^t: what the expert saw and did at one step.
struct StateModel {
  std::vector<double> expert_state;  // interest vector snapshot
  Response response;
  Corpus video_state;  // corpus as presented (before this step's evaluation)
};

struct TrajectoryStep {
  StateModel state;
  Slate slate;
  irl::StateId abstract_state = 0;
  irl::ActionId abstract_action = 0;
  irl::StateId next_state = 0;
};

struct Trajectory {
  int expert_id = 0;
  int traj_id = 0;
  std::vector<TrajectoryStep> steps;

  irl::AbstractTrajectory abstract() const;
};

std::vector<irl::AbstractTrajectory> abstract_all(std::span<const Trajectory> trajectories);

/// Applies an evaluation: s_v is the feature mean and the evaluated quality
/// becomes clamp(latent + s_v * f).
Video apply_evaluation(const Video& v, const EvaluationFeatures& features, double quality_factor);

/// Each feature is clamp(latent + eps) with eps ~ Normal(0, sigma_eval * (1 - f)).
std::pair<EvaluationFeatures, Video> evaluate_video(const Video& v, const ExpertProfile& profile, double sigma_eval,
                                                    Rng& rng);

/// u_j = exp(b_q * latent_j + b_t * interests[topic_j] + b_e * [topic_j is an expertise topic]).
std::vector<double> expert_utilities(std::span<const Video> slate, const ExpertProfile& profile,
                                     const ExpertEnvConfig& config);

/// Epsilon-soft greedy behavior policy. The greedy action maximizes
/// sum over positions of (quality-bin center + 0.5 * on-dominant-topic), the
/// same in every state.
irl::Policy make_behavior_policy(const irl::Discretizer& disc, double epsilon = 0.1);

/// Experts: dominant topics assigned round-robin, expertise on the dominant
/// topic, quality factor ~ U(f_low, f_high).
std::vector<ExpertProfile> make_expert_profiles(int n_experts, int n_topics, std::uint64_t seed,
                                                const InterestPrior& prior = {}, double f_low = 0.5,
                                                double f_high = 1.0, double session_budget = 60.0);

/// One expert session. Evaluations are written back into `catalog`. At least
/// one step is always taken; the session ends when the time budget is spent
/// or after max_steps.
Trajectory run_expert_session(const ExpertProfile& profile, Catalog& catalog, const RetrievalIndex& index,
                              const irl::Policy& behavior, const irl::Discretizer& disc,
                              const ExpertEnvConfig& config, Rng& rng);

/// per_expert sessions for each profile, in profile order. Each session
/// draws from its own stream seeded by (seed, expert index, session index).
std::vector<Trajectory> generate_demonstrations(std::span<const ExpertProfile> profiles, int per_expert,
                                                Catalog& catalog, const irl::Policy& behavior,
                                                const irl::Discretizer& disc, const ExpertEnvConfig& config,
                                                std::uint64_t seed);

void save_trajectories(std::span<const Trajectory> trajectories, const std::filesystem::path& path);
std::vector<Trajectory> load_trajectories(const std::filesystem::path& path);

void save_profiles(std::span<const ExpertProfile> profiles, const std::filesystem::path& path);
std::vector<ExpertProfile> load_profiles(const std::filesystem::path& path);

}  // namespace febr::expert
