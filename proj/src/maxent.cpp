#include "febr/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "febr/csv.hpp"
#include "febr/errors.hpp"

namespace febr::irl {

std::vector<double> survival_weights(std::span<const AbstractTrajectory> demos) {
  if (demos.empty()) throw std::invalid_argument("no demonstrations");
  std::size_t longest = 0;
  for (const auto& d : demos) longest = std::max(longest, d.size());
  std::vector<double> w(longest, 0.0);
  for (const auto& d : demos)
    for (std::size_t t = 0; t < d.size(); ++t) w[t] += 1.0;
  for (double& x : w) x /= static_cast<double>(demos.size());
  return w;
}

namespace {

struct Normalizer {
  std::vector<double> weights;
  double length;
};

Normalizer make_normalizer(std::span<const AbstractTrajectory> demos, int horizon) {
  if (horizon > 0) return {std::vector<double>(static_cast<std::size_t>(horizon), 1.0), static_cast<double>(horizon)};
  auto w = survival_weights(demos);
  const double len = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(len > 0.0)) throw std::invalid_argument("demonstrations are all empty");
  return {std::move(w), len};
}

std::vector<double> gap(const std::vector<double>& phi_tilde, double demo_len, const Normalizer& norm,
                        const TransitionModel& T, const RewardModel& model, const Policy& policy) {
  const auto visits = weighted_visitation_frequencies(policy, T, norm.weights);
  std::vector<double> g(phi_tilde.size());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = phi_tilde[k] / demo_len;
  for (int s = 0; s < model.n_states; ++s) {
    const double d = visits[static_cast<std::size_t>(s)] / norm.length;
    if (d == 0.0) continue;
    auto f = model.phi(s);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] -= d * f[k];
  }
  return g;
}

double mean_length(std::span<const AbstractTrajectory> demos) {
  double total = 0.0;
  for (const auto& d : demos) total += static_cast<double>(d.size());
  return total / static_cast<double>(demos.size());
}

}  // namespace

std::vector<double> feature_matching_gap(std::span<const AbstractTrajectory> demos, const TransitionModel& T,
                                         const RewardModel& model, const Policy& policy, int horizon) {
  const auto phi_tilde = empirical_feature_expectation(demos, model);
  return gap(phi_tilde, mean_length(demos), make_normalizer(demos, horizon), T, model, policy);
}

MaxEntResult maxent_irl(std::span<const AbstractTrajectory> demos, const TransitionModel& T, RewardModel model,
                        const MaxEntOptions& options) {
  if (demos.empty()) throw std::invalid_argument("no demonstrations");
  if (options.iterations < 0) throw std::invalid_argument("iterations must be nonnegative");
  if (!(options.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (model.n_states != T.num_states()) throw std::invalid_argument("feature map and transitions disagree on |S|");

  const auto phi_tilde = empirical_feature_expectation(demos, model);
  const double demo_len = mean_length(demos);
  const auto norm = make_normalizer(demos, options.horizon);
  const ValueIterationOptions vi{options.gamma, options.vi_tol, options.vi_max_iters, 0.0};

  MaxEntResult result{{}, Policy(T.num_states(), T.num_actions()), {}, {}, 0.0, demo_len};
  result.trace.reserve(static_cast<std::size_t>(options.iterations));
  double lr = options.learning_rate;
  std::vector<double> warm;

  for (int it = 0; it < options.iterations; ++it) {
    auto solved = value_iteration(model.rewards(), T, vi, warm);
    warm = solved.values;
    const auto g = gap(phi_tilde, demo_len, norm, T, model, solved.policy);

    double sq = 0.0, inf = 0.0;
    for (double x : g) {
      sq += x * x;
      inf = std::max(inf, std::abs(x));
    }
    const double norm2 = std::sqrt(sq);
    result.trace.push_back({it, norm2, inf});
    if (!std::isfinite(norm2) || norm2 > options.divergence_threshold)
      throw TrainingError("gradient diverged at iteration " + std::to_string(it) + " (norm " +
                          std::to_string(norm2) + ")");

    for (std::size_t k = 0; k < g.size(); ++k) model.theta[k] += lr * g[k];
    lr *= options.lr_decay;
  }

  auto final_solve = value_iteration(model.rewards(), T, vi, warm);
  const auto g = gap(phi_tilde, demo_len, norm, T, model, final_solve.policy);
  for (double x : g) result.final_residual = std::max(result.final_residual, std::abs(x));
  result.theta = model.theta;
  result.policy = std::move(final_solve.policy);
  result.values = std::move(final_solve.values);
  return result;
}

std::size_t sample_index(std::span<const double> probabilities, Rng& rng) {
  const double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] > 0.0) last_positive = i;
    acc += probabilities[i];
    if (r < acc) return i;
  }
  return last_positive;
}

AbstractTrajectory rollout(const Policy& policy, const TransitionModel& T, int horizon, Rng& rng) {
  AbstractTrajectory traj;
  auto s = static_cast<StateId>(sample_index(T.initial(), rng));
  for (int t = 0; t < horizon; ++t) {
    const auto a = static_cast<ActionId>(sample_index(policy.row(s), rng));
    const auto next = static_cast<StateId>(sample_index(T.row(s, a), rng));
    traj.push_back({s, a, next});
    s = next;
  }
  return traj;
}

namespace {
constexpr const char* kModelMagic = "febr-irl-model";
constexpr int kModelVersion = 1;
}  // namespace

void save_model(const LearnedModel& model, const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "states " << model.n_states << '\n';
  out << "actions " << model.n_actions << '\n';
  out << "features " << model.theta.size() << '\n';
  out << "gamma " << csv::fmt(model.gamma) << '\n';
  out << "feature_map " << to_string(model.kind) << '\n';
  for (double t : model.theta) out << csv::fmt(t) << '\n';
  for (int s = 0; s < model.n_states; ++s) {
    auto row = model.policy.row(s);
    for (std::size_t a = 0; a < row.size(); ++a) out << (a ? "," : "") << csv::fmt(row[a]);
    out << '\n';
  }
}

LearnedModel load_model(const std::filesystem::path& path) {
  csv::Reader reader(path);
  std::string line;
  auto header = [&](const std::string& key) -> std::string {
    if (!reader.next(line)) reader.fail("truncated header, expected '" + key + "'");
    auto sp = line.find(' ');
    if (sp == std::string::npos || line.substr(0, sp) != key) reader.fail("expected '" + key + "'");
    return line.substr(sp + 1);
  };
  try {
    if (header(kModelMagic) != std::to_string(kModelVersion)) reader.fail("unsupported model version");
    LearnedModel m;
    m.n_states = static_cast<int>(csv::to_int(header("states")));
    m.n_actions = static_cast<int>(csv::to_int(header("actions")));
    const auto k = csv::to_int(header("features"));
    m.gamma = csv::to_double(header("gamma"));
    m.kind = feature_kind_from_string(header("feature_map"));
    if (m.n_states < 1 || m.n_actions < 1 || k < 1) reader.fail("bad dimensions");
    for (long long i = 0; i < k; ++i) {
      if (!reader.next(line)) reader.fail("truncated theta");
      m.theta.push_back(csv::to_double(line));
    }
    m.policy = Policy(m.n_states, m.n_actions);
    for (int s = 0; s < m.n_states; ++s) {
      if (!reader.next(line)) reader.fail("truncated policy");
      auto f = csv::split(line);
      if (static_cast<int>(f.size()) != m.n_actions) reader.fail("policy row has wrong width");
      for (int a = 0; a < m.n_actions; ++a) m.policy.at(s, a) = csv::to_double(f[static_cast<std::size_t>(a)]);
    }
    m.policy.validate(1e-6);
    return m;
  } catch (const std::invalid_argument& e) {
    reader.fail(e.what());
  }
}

void save_trace(std::span<const TraceRow> trace, const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  out << "iteration,grad_norm,residual_inf\n";
  for (const auto& r : trace)
    out << r.iteration << ',' << csv::fmt(r.grad_norm, 9) << ',' << csv::fmt(r.residual_inf, 9) << '\n';
}

}  // namespace febr::irl
