#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "febr/abstraction.hpp"
#include "febr/domain.hpp"
#include "febr/retrieval.hpp"

namespace febr::user {

struct UserProfile {
  std::vector<double> interests;
  double time_budget = 200.0;        // minutes
  double interest_step = 0.05;       // alpha_u
  double quality_sensitivity = 1.0;  // lambda
};

struct UserEnvConfig {
  double beta_interest = 2.0;
  double no_click_mass = 1.0;
  double browse_cost = 1.0;
  double budget_bonus = 0.2;  // kappa
  std::size_t corpus_size = 5;
  double retrieval_noise = 0.1;
  int max_session_steps = 100000;
};

/// What an agent sees before recommending.
struct Observation {
  std::span<const Video> corpus;
  std::span<const double> interests;
  std::optional<Response> last_response;
  irl::StateId abstract_state = 0;
  TopicId dominant_topic = 0;
  int step = 0;
  /// The true user state, set only for agents granted the true choice model.
  const UserProfile* true_user = nullptr;
};

struct Recommendation {
  Slate slate;
  bool expert_guided = false;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  /// Agents that assume knowledge of the true choice model return true.
  virtual bool needs_true_user() const { return false; }
  virtual Recommendation recommend(const Observation& obs, Rng& rng) = 0;
  /// Learning hook after each step; `next` is null when the session ended.
  virtual void observe(const Observation& /*obs*/, const Recommendation& /*rec*/, const Response& /*response*/,
                       const Observation* /*next*/) {}
};

/// u_j = exp(beta_u * interests[topic_j] + lambda * score_j).
std::vector<double> user_utilities(std::span<const Video> slate, const UserProfile& profile,
                                   const UserEnvConfig& config);

double sigmoid(double x) noexcept;

/// Advances the user by one slate. Updates budget and interests in place.
/// Throws SessionOver when called with a spent budget.
Response step(UserProfile& profile, std::span<const Video> slate, const UserEnvConfig& config, Rng& rng);

struct SessionStep {
  Corpus corpus;
  Slate slate;
  Response response;
  bool expert_guided = false;
  std::optional<double> quality;  // q(s_t), only for clicked steps
  double budget_after = 0.0;
};

enum class TerminalReason { BudgetExhausted, StepCap };

struct SessionLog {
  std::vector<SessionStep> steps;
  TerminalReason reason = TerminalReason::BudgetExhausted;
};

/// Runs until the user's time budget is spent.
SessionLog run_user_session(UserProfile profile, Agent& agent, const Catalog& catalog, const RetrievalIndex& index,
                            const irl::Discretizer& disc, const UserEnvConfig& config, Rng& rng);

/// Users: dominant topic uniform over topics, interests from the shared prior.
UserProfile sample_user(int n_topics, const InterestPrior& prior, const UserProfile& defaults, Rng& rng);

/// Appends one session's rows; writes the header when `header` is set.
void write_session_log(std::ostream& out, int session_id, const SessionLog& log, bool header);

}  // namespace febr::user
