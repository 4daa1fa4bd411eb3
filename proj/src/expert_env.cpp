#include "febr/expert_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "febr/choice.hpp"
#include "febr/csv.hpp"
#include "febr/errors.hpp"
#include "febr/maxent.hpp"

namespace febr::expert {

void validate(const ExpertProfile& p, int n_topics) {
  if (p.interests.size() != static_cast<std::size_t>(n_topics))
    throw std::invalid_argument("expert interests have wrong length");
  for (double x : p.interests)
    if (x < -1.0 || x > 1.0) throw std::invalid_argument("expert interest outside [-1, 1]");
  if (p.expertise_topics.empty()) throw std::invalid_argument("expert needs at least one expertise topic");
  for (auto t : p.expertise_topics)
    if (t < 0 || t >= n_topics) throw std::invalid_argument("expertise topic out of range");
  if (!(p.quality_factor >= 0.0 && p.quality_factor <= 1.0))
    throw std::invalid_argument("quality factor outside [0, 1]");
}

irl::AbstractTrajectory Trajectory::abstract() const {
  irl::AbstractTrajectory out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back({s.abstract_state, s.abstract_action, s.next_state});
  return out;
}

std::vector<irl::AbstractTrajectory> abstract_all(std::span<const Trajectory> trajectories) {
  std::vector<irl::AbstractTrajectory> out;
  out.reserve(trajectories.size());
  for (const auto& t : trajectories) out.push_back(t.abstract());
  return out;
}

Video apply_evaluation(const Video& v, const EvaluationFeatures& features, double quality_factor) {
  Video out = v;
  out.evaluated = true;
  out.evaluated_quality = clamp_quality(v.latent_quality + features.mean() * quality_factor);
  return out;
}

std::pair<EvaluationFeatures, Video> evaluate_video(const Video& v, const ExpertProfile& profile, double sigma_eval,
                                                    Rng& rng) {
  const double sd = sigma_eval * (1.0 - profile.quality_factor);
  auto feature = [&]() {
    double eps = sd > 0.0 ? std::normal_distribution<double>(0.0, sd)(rng) : 0.0;
    return clamp_quality(v.latent_quality + eps);
  };
  EvaluationFeatures f;
  f.pedagogy = feature();
  f.accuracy = feature();
  f.importance = feature();
  f.entertainment = feature();
  return {f, apply_evaluation(v, f, profile.quality_factor)};
}

std::vector<double> expert_utilities(std::span<const Video> slate, const ExpertProfile& profile,
                                     const ExpertEnvConfig& config) {
  if (slate.empty()) throw std::invalid_argument("empty slate");
  std::vector<double> u;
  u.reserve(slate.size());
  for (const auto& v : slate) {
    const bool expert_topic = std::find(profile.expertise_topics.begin(), profile.expertise_topics.end(), v.topic) !=
                              profile.expertise_topics.end();
    const double x = config.beta_quality * v.latent_quality +
                     config.beta_topic * profile.interests.at(static_cast<std::size_t>(v.topic)) +
                     config.beta_expertise * (expert_topic ? 1.0 : 0.0);
    u.push_back(std::exp(x));
  }
  return u;
}

irl::Policy make_behavior_policy(const irl::Discretizer& disc, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must be in [0, 1]");
  const int A = disc.num_actions();
  irl::ActionId greedy = 0;
  double best = 0.0;
  for (int a = 0; a < A; ++a) {
    double score = 0.0;
    for (const auto& d : disc.decode_action(a))
      score += disc.quality_bin_center(d.quality_bin) + (d.on_dominant_topic ? 0.5 : 0.0);
    if (a == 0 || score > best) {
      best = score;
      greedy = a;
    }
  }
  irl::Policy policy(disc.num_states(), A);
  for (int s = 0; s < disc.num_states(); ++s) {
    for (int a = 0; a < A; ++a) policy.at(s, a) = epsilon / A;
    policy.at(s, greedy) += 1.0 - epsilon;
  }
  return policy;
}

std::vector<ExpertProfile> make_expert_profiles(int n_experts, int n_topics, std::uint64_t seed,
                                                const InterestPrior& prior, double f_low, double f_high,
                                                double session_budget) {
  if (n_experts < 1) throw std::invalid_argument("need at least one expert");
  if (!(0.0 <= f_low && f_low <= f_high && f_high <= 1.0)) throw std::invalid_argument("bad quality factor range");
  Rng rng(seed);
  std::vector<ExpertProfile> out;
  for (int i = 0; i < n_experts; ++i) {
    ExpertProfile p;
    p.id = i;
    const TopicId dominant = i % n_topics;
    p.interests = sample_interests(dominant, n_topics, prior, rng);
    p.expertise_topics = {dominant};
    p.quality_factor = std::uniform_real_distribution<double>(f_low, f_high)(rng);
    p.session_budget = session_budget;
    out.push_back(std::move(p));
  }
  return out;
}

Trajectory run_expert_session(const ExpertProfile& profile, Catalog& catalog, const RetrievalIndex& index,
                              const irl::Policy& behavior, const irl::Discretizer& disc,
                              const ExpertEnvConfig& config, Rng& rng) {
  if (catalog.empty()) throw std::invalid_argument("empty catalog");
  if (behavior.num_states() != disc.num_states() || behavior.num_actions() != disc.num_actions())
    throw std::invalid_argument("behavior policy does not match the discretizer");
  if (config.max_steps < 1) throw std::invalid_argument("max_steps must be positive");

  Trajectory traj;
  traj.expert_id = profile.id;
  double budget = profile.session_budget;
  std::optional<Response> last;

  do {
    const auto picked = index.sample(profile.interests, config.corpus_size, config.retrieval_noise, rng);
    Corpus corpus = gather(catalog, picked);
    const auto state = disc.encode_state(last);
    const auto action = static_cast<irl::ActionId>(irl::sample_index(behavior.row(state), rng));
    Slate slate = irl::realize_action(action, corpus, dominant_topic(corpus), disc);

    std::vector<Video> shown;
    for (auto id : slate.items) shown.push_back(resolve_video(id, corpus, catalog));
    const auto probs = choice::choice_probabilities(expert_utilities(shown, profile, config), config.no_click_mass);
    const auto pick = choice::sample_choice(probs, rng);

    Response r;
    if (pick) {
      const Video& v = shown[*pick];
      r.clicked = *pick;
      r.clicked_video = v.id;
      r.clicked_topic = v.topic;
      r.watch_time = v.length;  // experts finish what they click
      r.engagement_rate = 1.0;
      auto [features, updated] = evaluate_video(catalog.at(static_cast<std::size_t>(v.id)), profile,
                                                config.sigma_eval, rng);
      catalog[static_cast<std::size_t>(v.id)] = updated;
      r.evaluation = features;
      r.observed_quality = *updated.evaluated_quality;
      budget -= r.watch_time + config.browse_cost;
    } else {
      budget -= config.browse_cost;
    }

    TrajectoryStep step;
    step.state = {profile.interests, r, std::move(corpus)};
    step.slate = std::move(slate);
    step.abstract_state = state;
    step.abstract_action = action;
    step.next_state = disc.encode_state(r);
    traj.steps.push_back(std::move(step));
    last = r;
  } while (budget > 0.0 && static_cast<int>(traj.steps.size()) < config.max_steps);
  return traj;
}

std::vector<Trajectory> generate_demonstrations(std::span<const ExpertProfile> profiles, int per_expert,
                                                Catalog& catalog, const irl::Policy& behavior,
                                                const irl::Discretizer& disc, const ExpertEnvConfig& config,
                                                std::uint64_t seed) {
  if (per_expert < 1) throw std::invalid_argument("per_expert must be at least 1");
  const RetrievalIndex index(catalog, disc.n_topics());
  std::vector<Trajectory> out;
  out.reserve(profiles.size() * static_cast<std::size_t>(per_expert));
  for (std::size_t e = 0; e < profiles.size(); ++e) {
    validate(profiles[e], disc.n_topics());
    for (int i = 0; i < per_expert; ++i) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(e), static_cast<std::uint32_t>(i)};
      Rng rng(seq);
      auto traj = run_expert_session(profiles[e], catalog, index, behavior, disc, config, rng);
      traj.traj_id = i;
      out.push_back(std::move(traj));
    }
  }
  return out;
}

// ---- serialization ----

namespace {

const char* kTrajectoryHeader =
    "expert_id,traj_id,step,abstract_state,abstract_action,clicked_video,watch_time,s_v,evaluated_quality,"
    "corpus_video_ids,next_state,clicked_index,engagement_rate,evaluation,slate,interests,corpus";

std::string join_doubles(std::span<const double> xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out.push_back(';');
    out += csv::fmt(xs[i]);
  }
  return out;
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  for (const auto& f : csv::split(s, ';')) out.push_back(csv::to_double(f));
  return out;
}

std::string encode_video(const Video& v) {
  std::string out = std::to_string(v.id) + ':' + std::to_string(v.topic) + ':' + csv::fmt(v.length) + ':' +
                    csv::fmt(v.latent_quality) + ':' + (v.evaluated ? "1" : "0") + ':';
  if (v.evaluated_quality) out += csv::fmt(*v.evaluated_quality);
  return out;
}

Video decode_video(const std::string& s) {
  auto f = csv::split(s, ':');
  if (f.size() != 6) throw std::invalid_argument("bad video record '" + s + "'");
  Video v;
  v.id = csv::to_int(f[0]);
  v.topic = static_cast<TopicId>(csv::to_int(f[1]));
  v.length = csv::to_double(f[2]);
  v.latent_quality = csv::to_double(f[3]);
  v.evaluated = f[4] == "1";
  if (!f[5].empty()) v.evaluated_quality = csv::to_double(f[5]);
  return v;
}

}  // namespace

void save_trajectories(std::span<const Trajectory> trajectories, const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  out << kTrajectoryHeader << '\n';
  for (const auto& t : trajectories) {
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      const auto& s = t.steps[i];
      const auto& r = s.state.response;
      std::vector<std::string> ids, slate, corpus;
      for (const auto& v : s.state.video_state) {
        ids.push_back(std::to_string(v.id));
        corpus.push_back(encode_video(v));
      }
      for (auto id : s.slate.items) slate.push_back(std::to_string(id));
      std::string evaluation;
      if (r.evaluation) {
        const double e[4] = {r.evaluation->pedagogy, r.evaluation->accuracy, r.evaluation->importance,
                             r.evaluation->entertainment};
        evaluation = join_doubles(e);
      }
      out << t.expert_id << ',' << t.traj_id << ',' << i << ',' << s.abstract_state << ',' << s.abstract_action
          << ',' << (r.clicked_video ? *r.clicked_video : -1) << ',' << csv::fmt(r.watch_time) << ','
          << (r.evaluation ? csv::fmt(r.evaluation->mean()) : "") << ','
          << (r.has_click() ? csv::fmt(r.observed_quality) : "") << ',' << csv::join(ids, ';') << ','
          << s.next_state << ',' << (r.clicked ? static_cast<long long>(*r.clicked) : -1) << ','
          << csv::fmt(r.engagement_rate) << ',' << evaluation << ',' << csv::join(slate, ';') << ','
          << join_doubles(s.state.expert_state) << ',' << csv::join(corpus, ';') << '\n';
    }
  }
}

std::vector<Trajectory> load_trajectories(const std::filesystem::path& path) {
  csv::Reader reader(path);
  std::string line;
  if (!reader.next(line) || line != kTrajectoryHeader) reader.fail("missing or unexpected trajectory header");
  std::vector<Trajectory> out;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto f = csv::split(line);
    if (f.size() != 17) reader.fail("expected 17 fields, got " + std::to_string(f.size()));
    try {
      const int expert_id = static_cast<int>(csv::to_int(f[0]));
      const int traj_id = static_cast<int>(csv::to_int(f[1]));
      const auto step_no = csv::to_int(f[2]);
      if (step_no == 0) out.push_back(Trajectory{expert_id, traj_id, {}});
      if (out.empty() || out.back().expert_id != expert_id || out.back().traj_id != traj_id ||
          static_cast<long long>(out.back().steps.size()) != step_no)
        reader.fail("steps out of order");

      TrajectoryStep s;
      s.abstract_state = static_cast<irl::StateId>(csv::to_int(f[3]));
      s.abstract_action = static_cast<irl::ActionId>(csv::to_int(f[4]));
      s.next_state = static_cast<irl::StateId>(csv::to_int(f[10]));
      if (!f[14].empty())
        for (const auto& id : csv::split(f[14], ';')) s.slate.items.push_back(csv::to_int(id));
      s.state.expert_state = split_doubles(f[15]);
      if (!f[16].empty())
        for (const auto& v : csv::split(f[16], ';')) s.state.video_state.push_back(decode_video(v));

      Response& r = s.state.response;
      const auto clicked_video = csv::to_int(f[5]);
      const auto clicked_index = csv::to_int(f[11]);
      r.watch_time = csv::to_double(f[6]);
      r.engagement_rate = csv::to_double(f[12]);
      if (clicked_video >= 0) {
        if (clicked_index < 0) reader.fail("click without slate index");
        r.clicked = static_cast<std::size_t>(clicked_index);
        r.clicked_video = clicked_video;
        r.clicked_topic = resolve_video(clicked_video, s.state.video_state, {}).topic;
        r.observed_quality = csv::to_double(f[8]);
      }
      if (!f[13].empty()) {
        auto e = split_doubles(f[13]);
        if (e.size() != 4) reader.fail("evaluation needs four features");
        r.evaluation = EvaluationFeatures{e[0], e[1], e[2], e[3]};
      }
      out.back().steps.push_back(std::move(s));
    } catch (const std::invalid_argument& e) {
      reader.fail(e.what());
    }
  }
  return out;
}

void save_profiles(std::span<const ExpertProfile> profiles, const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  out << "id,quality_factor,session_budget,expertise_topics,interests\n";
  for (const auto& p : profiles) {
    std::vector<std::string> topics;
    for (auto t : p.expertise_topics) topics.push_back(std::to_string(t));
    out << p.id << ',' << csv::fmt(p.quality_factor) << ',' << csv::fmt(p.session_budget) << ','
        << csv::join(topics, ';') << ',' << join_doubles(p.interests) << '\n';
  }
}

std::vector<ExpertProfile> load_profiles(const std::filesystem::path& path) {
  csv::Reader reader(path);
  std::string line;
  if (!reader.next(line) || line != "id,quality_factor,session_budget,expertise_topics,interests")
    reader.fail("missing expert profile header");
  std::vector<ExpertProfile> out;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto f = csv::split(line);
    if (f.size() != 5) reader.fail("expected 5 fields");
    try {
      ExpertProfile p;
      p.id = static_cast<int>(csv::to_int(f[0]));
      p.quality_factor = csv::to_double(f[1]);
      p.session_budget = csv::to_double(f[2]);
      for (const auto& t : csv::split(f[3], ';')) p.expertise_topics.push_back(static_cast<TopicId>(csv::to_int(t)));
      p.interests = split_doubles(f[4]);
      validate(p, static_cast<int>(p.interests.size()));
      out.push_back(std::move(p));
    } catch (const std::invalid_argument& e) {
      reader.fail(e.what());
    }
  }
  return out;
}

}  // namespace febr::expert
