#include "febr/user_env.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "febr/choice.hpp"
#include "febr/csv.hpp"
#include "febr/errors.hpp"

namespace febr::user {

std::vector<double> user_utilities(std::span<const Video> slate, const UserProfile& profile,
                                   const UserEnvConfig& config) {
  if (slate.empty()) throw std::invalid_argument("empty slate");
  std::vector<double> u;
  u.reserve(slate.size());
  for (const auto& v : slate)
    u.push_back(std::exp(config.beta_interest * profile.interests.at(static_cast<std::size_t>(v.topic)) +
                         profile.quality_sensitivity * video_score(v)));
  return u;
}

double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

Response step(UserProfile& profile, std::span<const Video> slate, const UserEnvConfig& config, Rng& rng) {
  if (!(profile.time_budget > 0.0)) throw SessionOver("user session budget is spent");
  const auto probs = choice::choice_probabilities(user_utilities(slate, profile, config), config.no_click_mass);
  const auto pick = choice::sample_choice(probs, rng);

  Response r;
  if (!pick) {
    profile.time_budget -= config.browse_cost;
    return r;
  }
  const Video& v = slate[*pick];
  const auto topic = static_cast<std::size_t>(v.topic);
  const double score = video_score(v);
  r.clicked = *pick;
  r.clicked_video = v.id;
  r.clicked_topic = v.topic;
  r.watch_time = v.length * sigmoid(2.0 * (profile.interests[topic] + profile.quality_sensitivity * score));
  r.engagement_rate = r.watch_time / v.length;
  r.observed_quality = score;

  const double direction = score > 0.0 ? 1.0 : (score < 0.0 ? -1.0 : 0.0);
  profile.interests[topic] = clamp_quality(profile.interests[topic] + profile.interest_step * direction);
  profile.time_budget +=
      -r.watch_time - config.browse_cost + config.budget_bonus * std::max(score, 0.0) * r.watch_time;
  return r;
}

SessionLog run_user_session(UserProfile profile, Agent& agent, const Catalog& catalog, const RetrievalIndex& index,
                            const irl::Discretizer& disc, const UserEnvConfig& config, Rng& rng) {
  SessionLog log;
  if (!(profile.time_budget > 0.0)) throw std::invalid_argument("session must start with a positive budget");

  auto make_corpus = [&]() { return gather(catalog, index.sample(profile.interests, config.corpus_size,
                                                                 config.retrieval_noise, rng)); };
  Corpus corpus = make_corpus();
  std::optional<Response> last;
  int t = 0;
  auto observe = [&](const Corpus& c) {
    Observation obs;
    obs.corpus = c;
    obs.interests = profile.interests;
    obs.last_response = last;
    obs.abstract_state = disc.encode_state(last);
    obs.dominant_topic = dominant_topic(c);
    obs.step = t;
    obs.true_user = agent.needs_true_user() ? &profile : nullptr;
    return obs;
  };

  while (true) {
    Observation obs = observe(corpus);
    Recommendation rec = agent.recommend(obs, rng);
    check_slate(rec.slate);
    std::vector<Video> shown;
    for (auto id : rec.slate.items) shown.push_back(resolve_video(id, corpus, catalog));

    Response r = step(profile, shown, config, rng);
    SessionStep entry;
    entry.slate = rec.slate;
    entry.response = r;
    entry.expert_guided = rec.expert_guided;
    if (r.has_click()) entry.quality = r.observed_quality;
    entry.budget_after = profile.time_budget;
    last = r;
    ++t;

    const bool over = !(profile.time_budget > 0.0);
    const bool capped = t >= config.max_session_steps;
    if (over || capped) {
      agent.observe(obs, rec, r, nullptr);
      entry.corpus = std::move(corpus);
      log.steps.push_back(std::move(entry));
      log.reason = over ? TerminalReason::BudgetExhausted : TerminalReason::StepCap;
      return log;
    }
    Corpus next_corpus = make_corpus();
    Observation next = observe(next_corpus);
    agent.observe(obs, rec, r, &next);
    entry.corpus = std::move(corpus);
    log.steps.push_back(std::move(entry));
    corpus = std::move(next_corpus);
  }
}

UserProfile sample_user(int n_topics, const InterestPrior& prior, const UserProfile& defaults, Rng& rng) {
  UserProfile p = defaults;
  const auto dominant = std::uniform_int_distribution<TopicId>(0, n_topics - 1)(rng);
  p.interests = sample_interests(dominant, n_topics, prior, rng);
  return p;
}

void write_session_log(std::ostream& out, int session_id, const SessionLog& log, bool header) {
  if (header) out << "session_id,step,expert_guided,clicked,topic,score,watch_time,budget_after\n";
  for (std::size_t i = 0; i < log.steps.size(); ++i) {
    const auto& s = log.steps[i];
    out << session_id << ',' << i << ',' << (s.expert_guided ? 1 : 0) << ','
        << (s.response.clicked_video ? *s.response.clicked_video : -1) << ','
        << (s.response.clicked_topic ? *s.response.clicked_topic : -1) << ','
        << (s.quality ? csv::fmt(*s.quality, 9) : "") << ',' << csv::fmt(s.response.watch_time, 9) << ','
        << csv::fmt(s.budget_after, 9) << '\n';
  }
}

}  // namespace febr::user
