#include "febr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "febr/csv.hpp"
#include "febr/errors.hpp"
#include "febr/retrieval.hpp"

namespace febr::experiment {

namespace files {
std::string sessions(const std::string& arm) { return "sessions_" + arm + ".csv"; }
std::string metrics(const std::string& arm) { return "metrics_" + arm + ".csv"; }
}  // namespace files

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng stream(std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  return Rng(seq);
}

void require_file(const std::filesystem::path& path, const std::string& command) {
  if (!std::filesystem::exists(path))
    throw MissingArtifact("missing " + path.string() + "; run `febr " + command + "` first");
}

}  // namespace

std::uint64_t stage_seed(std::uint64_t seed, const std::string& stage) {
  return splitmix64(seed ^ fnv1a(stage.data(), stage.size()));
}

Catalog make_catalog(const ExperimentConfig& config) {
  return sample_catalog(stage_seed(config.seed, "catalog"), config.catalog_size, config.n_topics,
                        config.video_length);
}

Demonstrations make_demonstrations(const ExperimentConfig& config, Catalog catalog) {
  const auto disc = config.discretizer();
  Demonstrations d;
  d.profiles = expert::make_expert_profiles(config.n_experts, config.n_topics, stage_seed(config.seed, "experts"),
                                            config.interest_prior, config.quality_factor_low,
                                            config.quality_factor_high, config.expert_budget);
  const auto behavior = expert::make_behavior_policy(disc, config.behavior_epsilon);
  d.trajectories = expert::generate_demonstrations(d.profiles, config.trajectories_per_expert, catalog, behavior,
                                                   disc, config.expert_env,
                                                   stage_seed(config.seed, "demonstrations"));
  d.catalog = std::move(catalog);
  return d;
}

Training train(const ExperimentConfig& config, const std::vector<expert::Trajectory>& trajectories) {
  const auto disc = config.discretizer();
  const auto demos = expert::abstract_all(trajectories);
  Training t;
  t.transitions = irl::estimate_transitions(demos, disc.num_states(), disc.num_actions(), config.transition_smoothing);
  t.result = irl::maxent_irl(demos, t.transitions, irl::RewardModel::make(config.features, disc), config.irl);
  t.model.n_states = disc.num_states();
  t.model.n_actions = disc.num_actions();
  t.model.gamma = config.irl.gamma;
  t.model.kind = config.features;
  t.model.theta = t.result.theta;
  t.model.policy = t.result.policy;
  return t;
}

std::vector<dataset::ExpertStateRecord> make_dataset(const ExperimentConfig& config,
                                                     const std::vector<expert::Trajectory>& trajectories,
                                                     const irl::Policy& policy) {
  return dataset::build_dataset(trajectories, policy, config.n_topics);
}

dataset::DatasetShape dataset_shape(const ExperimentConfig& config) {
  const auto disc = config.discretizer();
  return {config.n_topics, config.user_env.corpus_size, disc.num_states(), disc.num_actions()};
}

user::UserProfile session_user(const ExperimentConfig& config, int session) {
  auto rng = stream(stage_seed(config.seed, "users"), session);
  return user::sample_user(config.n_topics, config.interest_prior, config.user_defaults, rng);
}

std::uint64_t profile_hash(const user::UserProfile& p) {
  auto h = fnv1a(p.interests.data(), p.interests.size() * sizeof(double));
  h = fnv1a(&p.time_budget, sizeof p.time_budget, h);
  h = fnv1a(&p.interest_step, sizeof p.interest_step, h);
  return fnv1a(&p.quality_sensitivity, sizeof p.quality_sensitivity, h);
}

std::unique_ptr<user::Agent> make_agent(const std::string& arm, const ExperimentConfig& config,
                                        const Artifacts& artifacts) {
  if (arm == "febr") {
    if (!artifacts.records) throw MissingArtifact("the febr arm needs a state dataset; run `febr build-dataset` first");
    return std::make_unique<recommender::FebrAgent>(artifacts.records, config.discretizer(), config.classifier);
  }
  if (arm == "recfsq") {
    auto params = config.fsq;
    params.gamma = config.irl.gamma;
    return std::make_unique<baselines::RecFsqAgent>(config.discretizer(), params, config.fsq_quality_weight);
  }
  if (arm == "recpctr") return std::make_unique<baselines::RecPctrAgent>(config.slate_size, config.user_env);
  if (arm == "recbandit")
    return std::make_unique<baselines::RecBanditAgent>(config.n_topics, config.slate_size, config.bandit_c);
  if (arm == "recnaive") return std::make_unique<baselines::RecNaiveAgent>(config.slate_size, config.naive);
  if (arm == "random") return std::make_unique<baselines::RandomAgent>(config.slate_size);
  throw ConfigError("unknown agent '" + arm + "'");
}

ArmResult run_arm(const std::string& arm, const ExperimentConfig& config, const Artifacts& artifacts,
                  bool keep_logs) {
  ArmResult result;
  result.arm = arm;
  auto agent = make_agent(arm, config, artifacts);
  const RetrievalIndex index(artifacts.catalog, config.n_topics);
  const auto disc = config.discretizer();
  const auto sim_seed = stage_seed(config.seed, "sessions");
  std::ostringstream log_out;
  for (int i = 0; i < config.sessions; ++i) {
    auto profile = session_user(config, i);
    result.profile_hashes.push_back(profile_hash(profile));
    auto rng = stream(sim_seed, i);
    const auto log = user::run_user_session(std::move(profile), *agent, artifacts.catalog, index, disc,
                                            config.user_env, rng);
    result.rows.push_back(metrics::compute_metrics(log, i, config.metrics));
    if (keep_logs) user::write_session_log(log_out, i, log, i == 0);
  }
  if (keep_logs) {
    result.session_csv = log_out.str();
    if (result.session_csv.empty())
      result.session_csv = "session_id,step,expert_guided,clicked,topic,score,watch_time,budget_after\n";
  }
  return result;
}

std::vector<ArmResult> run_experiment(const ExperimentConfig& config, const Artifacts& artifacts, bool keep_logs) {
  const auto& arms = config.agents;
  std::vector<ArmResult> results(arms.size());
  std::vector<std::exception_ptr> errors(arms.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < arms.size(); i = next++) {
      try {
        results[i] = run_arm(arms[i], config, artifacts, keep_logs);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t n_threads = config.threads > 0 ? static_cast<std::size_t>(config.threads)
                                             : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, arms.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].profile_hashes != results[0].profile_hashes)
      throw std::logic_error("user sequences differ between arms " + arms[0] + " and " + arms[i]);
  return results;
}

void write_config_echo(const ExperimentConfig& config, const std::filesystem::path& dir) {
  auto out = csv::open_out(dir / files::kConfigEcho);
  out << echo(config);
}

void stage_catalog(const ExperimentConfig& config, const std::filesystem::path& dir) {
  save_catalog(make_catalog(config), dir / files::kCatalog);
  write_config_echo(config, dir);
}

void stage_trajectories(const ExperimentConfig& config, const std::filesystem::path& dir) {
  require_file(dir / files::kCatalog, "gen-catalog");
  auto catalog = load_catalog(dir / files::kCatalog);
  if (catalog.size() != config.catalog_size)
    throw ConfigMismatch("catalog has " + std::to_string(catalog.size()) + " videos but the configuration expects " +
                         std::to_string(config.catalog_size));
  const auto d = make_demonstrations(config, std::move(catalog));
  expert::save_profiles(d.profiles, dir / files::kExperts);
  expert::save_trajectories(d.trajectories, dir / files::kTrajectories);
  save_catalog(d.catalog, dir / files::kEvaluatedCatalog);
}

Training stage_train(const ExperimentConfig& config, const std::filesystem::path& dir) {
  require_file(dir / files::kTrajectories, "gen-trajectories");
  const auto trajectories = expert::load_trajectories(dir / files::kTrajectories);
  auto t = train(config, trajectories);
  irl::save_model(t.model, dir / files::kModel);
  irl::save_trace(t.result.trace, dir / files::kTrace);
  auto out = csv::open_out(dir / files::kTraining);
  out << "iterations=" << config.irl.iterations << '\n'
      << "trajectories=" << trajectories.size() << '\n'
      << "mean_length=" << csv::fmt(t.result.mean_length) << '\n'
      << "final_residual=" << csv::fmt(t.result.final_residual) << '\n';
  return t;
}

void stage_dataset(const ExperimentConfig& config, const std::filesystem::path& dir) {
  require_file(dir / files::kTrajectories, "gen-trajectories");
  require_file(dir / files::kModel, "train-irl");
  const auto trajectories = expert::load_trajectories(dir / files::kTrajectories);
  const auto model = irl::load_model(dir / files::kModel);
  const auto shape = dataset_shape(config);
  if (model.n_states != shape.n_states || model.n_actions != shape.n_actions)
    throw ConfigMismatch("the saved model was trained for a different state/action space");
  dataset::save_dataset(make_dataset(config, trajectories, model.policy), shape, dir / files::kDataset);
}

Artifacts load_artifacts(const ExperimentConfig& config, const std::filesystem::path& dir, bool need_dataset) {
  require_file(dir / files::kEvaluatedCatalog, "gen-trajectories");
  Artifacts a;
  a.catalog = load_catalog(dir / files::kEvaluatedCatalog);
  if (a.catalog.size() != config.catalog_size)
    throw ConfigMismatch("catalog has " + std::to_string(a.catalog.size()) +
                         " videos but the configuration expects " + std::to_string(config.catalog_size));
  if (need_dataset) {
    require_file(dir / files::kDataset, "build-dataset");
    a.records = std::make_shared<const std::vector<dataset::ExpertStateRecord>>(
        dataset::load_dataset(dir / files::kDataset, dataset_shape(config)));
  }
  return a;
}

void write_arm(const ArmResult& result, const std::filesystem::path& dir) {
  if (!result.session_csv.empty()) {
    auto out = csv::open_out(dir / files::sessions(result.arm));
    out << result.session_csv;
  }
  auto out = csv::open_out(dir / files::metrics(result.arm));
  out << "session_id,profile_hash,Q_e,Q_e_defined,Q_T,W_T,expert_guided,length,clicked,guided_clicked,Q_prime\n";
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& r = result.rows[i];
    out << r.session_id << ',' << (i < result.profile_hashes.size() ? result.profile_hashes[i] : 0) << ','
        << csv::fmt(r.q_e) << ',' << (r.q_e_defined ? 1 : 0) << ',' << csv::fmt(r.q_t) << ',' << csv::fmt(r.w_t)
        << ',' << r.expert_guided_count << ',' << r.length << ',' << r.clicked_count << ','
        << r.guided_clicked_count << ',' << csv::fmt(r.q_prime) << '\n';
  }
}

std::vector<metrics::MetricsRow> read_metrics(const std::filesystem::path& path) {
  require_file(path, "simulate");
  csv::Reader reader(path);
  std::string line;
  if (!reader.next(line) ||
      line != "session_id,profile_hash,Q_e,Q_e_defined,Q_T,W_T,expert_guided,length,clicked,guided_clicked,Q_prime")
    reader.fail("missing metrics header");
  std::vector<metrics::MetricsRow> rows;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 11) reader.fail("expected 11 fields, got " + std::to_string(f.size()));
    try {
      metrics::MetricsRow r;
      r.session_id = static_cast<int>(csv::to_int(f[0]));
      r.q_e = csv::to_double(f[2]);
      r.q_e_defined = csv::to_int(f[3]) != 0;
      r.q_t = csv::to_double(f[4]);
      r.w_t = csv::to_double(f[5]);
      r.expert_guided_count = static_cast<int>(csv::to_int(f[6]));
      r.length = static_cast<int>(csv::to_int(f[7]));
      r.clicked_count = static_cast<int>(csv::to_int(f[8]));
      r.guided_clicked_count = static_cast<int>(csv::to_int(f[9]));
      r.q_prime = csv::to_double(f[10]);
      rows.push_back(r);
    } catch (const std::invalid_argument& e) {
      reader.fail(e.what());
    }
  }
  return rows;
}

report::Report build_report(const ExperimentConfig& config,
                            const std::vector<std::pair<std::string, std::vector<metrics::MetricsRow>>>& arms) {
  report::Report r;
  r.config_echo = echo(config);
  const std::vector<metrics::MetricsRow>* reference = nullptr;
  for (const auto& [name, rows] : arms) {
    r.arms.push_back(metrics::summarize(name, rows));
    if (name == "febr") reference = &rows;
  }
  if (reference) {
    r.reference = "febr";
    for (const auto& [name, rows] : arms)
      if (name != "febr") r.paired.push_back(report::paired_difference(*reference, rows, name));
  }
  return r;
}

report::Report stage_report(const ExperimentConfig& config, const std::filesystem::path& dir) {
  std::vector<std::pair<std::string, std::vector<metrics::MetricsRow>>> arms;
  for (const auto& a : config.agents) arms.emplace_back(a, read_metrics(dir / files::metrics(a)));
  auto r = build_report(config, arms);
  report::write_report(r, dir);
  return r;
}

PipelineResult run_pipeline(const ExperimentConfig& config, const std::filesystem::path& dir) {
  validate(config);
  PipelineResult p;
  stage_catalog(config, dir);
  stage_trajectories(config, dir);
  p.training = stage_train(config, dir);
  stage_dataset(config, dir);
  const bool need_dataset = std::find(config.agents.begin(), config.agents.end(), "febr") != config.agents.end();
  const auto artifacts = load_artifacts(config, dir, need_dataset);
  p.arms = run_experiment(config, artifacts, true);
  std::vector<std::pair<std::string, std::vector<metrics::MetricsRow>>> arms;
  for (const auto& a : p.arms) {
    write_arm(a, dir);
    arms.emplace_back(a.arm, a.rows);
  }
  p.report = build_report(config, arms);
  report::write_report(p.report, dir);
  return p;
}

}  // namespace febr::experiment
