#include <doctest.h>

#include <cmath>

#include "febr/errors.hpp"
#include "febr/maxent.hpp"
#include "febr/mdp.hpp"
#include "gridworld.hpp"
#include "support.hpp"

using namespace febr;
using namespace febr::irl;

namespace {

TransitionModel random_mdp(int S, int A, Rng& rng) {
  TransitionModel T(S, A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      double total = 0.0;
      for (int n = 0; n < S; ++n) total += (T.at(s, a, n) = test::uniform(rng, 0, 1));
      for (int n = 0; n < S; ++n) T.at(s, a, n) /= total;
    }
  double total = 0.0;
  for (auto& x : T.initial()) total += (x = test::uniform(rng, 0, 1));
  for (auto& x : T.initial()) x /= total;
  return T;
}

TransitionModel self_loops(int S, int A) {
  TransitionModel T(S, A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) T.at(s, a, s) = 1.0;
  T.initial()[0] = 1.0;
  return T;
}

}  // namespace

TEST_CASE("estimate_transitions: a repeated transition is a point mass") {
  std::vector<AbstractTrajectory> demos(3, AbstractTrajectory{{0, 0, 1}});
  const auto T = estimate_transitions(demos, 3, 2, 0.0);
  CHECK(T.at(0, 0, 1) == 1.0);
  CHECK(T.at(0, 0, 0) == 0.0);
  CHECK(T.initial()[0] == 1.0);
}

TEST_CASE("estimate_transitions: unseen pairs are uniform under smoothing") {
  std::vector<AbstractTrajectory> demos{{{0, 0, 1}}};
  const auto T = estimate_transitions(demos, 4, 2, 0.05);
  for (int n = 0; n < 4; ++n) CHECK(T.at(2, 1, n) == doctest::Approx(0.25));
  T.validate();
}

TEST_CASE("estimate_transitions: maximum-likelihood ratios") {
  std::vector<AbstractTrajectory> demos;
  for (int i = 0; i < 3; ++i) demos.push_back({{0, 0, 1}});
  demos.push_back({{0, 0, 2}});
  const auto T = estimate_transitions(demos, 3, 1, 0.0);
  CHECK(T.at(0, 0, 1) == doctest::Approx(0.75));
  CHECK(T.at(0, 0, 2) == doctest::Approx(0.25));
}

TEST_CASE("estimate_transitions rejects an empty demonstration set") {
  CHECK_THROWS_AS(estimate_transitions({}, 3, 1, 0.05), std::invalid_argument);
}

TEST_CASE("one-hot feature counts tally state visits") {
  const auto m = RewardModel::one_hot(8);
  AbstractTrajectory t{{5, 0, 5}, {5, 1, 2}, {2, 0, 5}, {5, 0, 0}};
  const auto c = trajectory_feature_counts(t, m);
  CHECK(c[5] == 3.0);
  CHECK(c[2] == 1.0);
  CHECK(c[0] == 0.0);
  const auto empty = trajectory_feature_counts(AbstractTrajectory{}, m);
  for (double x : empty) CHECK(x == 0.0);
}

TEST_CASE("empirical feature expectation is the mean of per-trajectory counts") {
  const auto m = RewardModel::one_hot(4);
  AbstractTrajectory a{{1, 0, 2}, {2, 0, 3}};
  AbstractTrajectory b{{3, 0, 3}};
  std::vector<AbstractTrajectory> same{a, a};
  std::vector<AbstractTrajectory> one{a};
  CHECK(empirical_feature_expectation(same, m) == empirical_feature_expectation(one, m));

  std::vector<AbstractTrajectory> both{a, b};
  const auto e = empirical_feature_expectation(both, m);
  const auto va = trajectory_feature_counts(a, m), vb = trajectory_feature_counts(b, m);
  for (std::size_t k = 0; k < e.size(); ++k) CHECK(e[k] == doctest::Approx((va[k] + vb[k]) / 2));
}

TEST_CASE("property: theta . phi_zeta equals the summed state rewards") {
  Rng rng(13);
  Discretizer disc;
  for (auto kind : {FeatureKind::OneHot, FeatureKind::Factored}) {
    auto m = RewardModel::make(kind, disc);
    for (int trial = 0; trial < 200; ++trial) {
      for (auto& x : m.theta) x = test::uniform(rng, -2, 2);
      AbstractTrajectory t;
      const int len = test::uniform_int(rng, 0, 20);
      for (int i = 0; i < len; ++i) t.push_back({test::uniform_int(rng, 0, 64), 0, 0});
      const auto counts = trajectory_feature_counts(t, m);
      double lhs = 0.0, rhs = 0.0;
      for (std::size_t k = 0; k < counts.size(); ++k) lhs += m.theta[k] * counts[k];
      for (const auto& step : t) rhs += m.reward(step.state);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("factored features have one topic, one quality and one engagement entry") {
  Discretizer disc;
  const auto m = RewardModel::make(FeatureKind::Factored, disc);
  CHECK(m.n_features == 8 + 4 + 2);
  for (int s = 1; s < disc.num_states(); ++s) {
    double total = 0.0;
    for (double x : m.phi(s)) total += x;
    CHECK(total == 3.0);
  }
}

TEST_CASE("value iteration reproduces the two-state closed form") {
  const auto T = self_loops(2, 1);
  const std::vector<double> r{0.0, 1.0};
  ValueIterationOptions opt;
  opt.gamma = 0.5;
  const auto res = value_iteration(r, T, opt);
  // V = R / (1 - gamma) on a self loop; |V - V*| <= residual / (1 - gamma)
  const double bound = res.residual / (1.0 - opt.gamma);
  CHECK(std::abs(res.values[0] - 0.0) <= bound);
  CHECK(std::abs(res.values[1] - 1.0 / (1.0 - 0.5)) <= bound);
  CHECK(bound < 2e-6);
  CHECK(res.residual < opt.tol);
}

TEST_CASE("gamma zero gives immediate rewards and the myopic argmax") {
  // action 1 leads to state 1 which pays; with gamma 0 only R(s) counts, so action 0 wins the tie
  TransitionModel T(2, 2);
  T.at(0, 0, 0) = T.at(0, 1, 1) = T.at(1, 0, 0) = T.at(1, 1, 1) = 1.0;
  T.initial()[0] = 1.0;
  ValueIterationOptions opt;
  opt.gamma = 0.0;
  const auto res = value_iteration(std::vector<double>{0.3, 1.0}, T, opt);
  CHECK(res.values[0] == 0.3);
  CHECK(res.values[1] == 1.0);
  CHECK(res.policy.argmax(0) == 0);
}

TEST_CASE("property: value iteration output is a fixed point within tolerance") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int S = test::uniform_int(rng, 2, 12), A = test::uniform_int(rng, 1, 5);
    const auto T = random_mdp(S, A, rng);
    std::vector<double> r(static_cast<std::size_t>(S));
    for (auto& x : r) x = test::uniform(rng, -3, 3);
    ValueIterationOptions opt;
    opt.gamma = test::uniform(rng, 0.0, 0.95);
    const auto res = value_iteration(r, T, opt);
    CHECK(bellman_residual(r, T, opt.gamma, res.values) < opt.tol);
    res.policy.validate();
    // the greedy policy attains the backup in every state
    for (int s = 0; s < S; ++s) {
      const auto a = res.policy.argmax(s);
      double q = r[static_cast<std::size_t>(s)];
      for (int n = 0; n < S; ++n) q += opt.gamma * T.at(s, a, n) * res.values[static_cast<std::size_t>(n)];
      CHECK(q == doctest::Approx(bellman_backup(r, T, opt.gamma, res.values)[static_cast<std::size_t>(s)]));
    }
  }
}

TEST_CASE("value iteration reports non-convergence") {
  const auto T = self_loops(2, 1);
  ValueIterationOptions opt;
  opt.gamma = 0.9;
  opt.max_iters = 3;
  CHECK_THROWS_AS(value_iteration(std::vector<double>{0.0, 1.0}, T, opt), ConvergenceError);
}

TEST_CASE("softened value iteration policy mixes in uniform mass") {
  const auto T = self_loops(2, 4);
  ValueIterationOptions opt;
  opt.softness = 0.2;
  const auto res = value_iteration(std::vector<double>{0.0, 1.0}, T, opt);
  CHECK(res.policy.at(0, 0) == doctest::Approx(0.8 + 0.05));
  CHECK(res.policy.at(0, 1) == doctest::Approx(0.05));
}

TEST_CASE("visitation frequencies: deterministic chain and absorbing state") {
  TransitionModel chain(3, 1);
  chain.at(0, 0, 1) = chain.at(1, 0, 2) = chain.at(2, 0, 2) = 1.0;
  chain.initial()[0] = 1.0;
  const auto pi = Policy::uniform(3, 1);
  const auto D = state_visitation_frequencies(pi, chain, 3);
  CHECK(D == std::vector<double>{1.0, 1.0, 1.0});

  const auto absorbing = self_loops(1, 1);
  CHECK(state_visitation_frequencies(Policy::uniform(1, 1), absorbing, 7)[0] == 7.0);
}

TEST_CASE("visitation frequencies match Monte-Carlo rollouts") {
  Rng rng(31);
  const auto T = random_mdp(5, 3, rng);
  Policy pi(5, 3);
  for (int s = 0; s < 5; ++s) {
    double total = 0.0;
    for (int a = 0; a < 3; ++a) total += (pi.at(s, a) = test::uniform(rng, 0, 1));
    for (int a = 0; a < 3; ++a) pi.at(s, a) /= total;
  }
  const int H = 4, n = 100000;
  const auto D = state_visitation_frequencies(pi, T, H);
  std::vector<double> mc(5, 0.0);
  for (int i = 0; i < n; ++i) {
    // independent simulation: draw each step with std::discrete_distribution
    int s = std::discrete_distribution<int>(T.initial().begin(), T.initial().end())(rng);
    for (int t = 0; t < H; ++t) {
      mc[static_cast<std::size_t>(s)] += 1.0 / n;
      const auto pr = pi.row(s);
      const int a = std::discrete_distribution<int>(pr.begin(), pr.end())(rng);
      const auto tr = T.row(s, a);
      s = std::discrete_distribution<int>(tr.begin(), tr.end())(rng);
    }
  }
  double total = 0.0;
  for (int s = 0; s < 5; ++s) {
    CHECK(std::abs(D[static_cast<std::size_t>(s)] - mc[static_cast<std::size_t>(s)]) < 0.01);
    total += D[static_cast<std::size_t>(s)];
  }
  CHECK(std::abs(total - H) < 1e-6);
}

TEST_CASE("property: every per-step visitation distribution sums to one") {
  Rng rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const int S = test::uniform_int(rng, 2, 10), A = test::uniform_int(rng, 1, 4);
    const auto T = random_mdp(S, A, rng);
    const auto pi = Policy::uniform(S, A);
    // d_t = D(t+1) - D(t)
    std::vector<double> prev(static_cast<std::size_t>(S), 0.0);
    for (int h = 1; h <= 6; ++h) {
      const auto D = state_visitation_frequencies(pi, T, h);
      double total = 0.0;
      for (int s = 0; s < S; ++s) {
        const double d = D[static_cast<std::size_t>(s)] - prev[static_cast<std::size_t>(s)];
        CHECK(d >= -1e-12);
        total += d;
      }
      CHECK(std::abs(total - 1.0) < 1e-9);
      prev = D;
    }
  }
}

TEST_CASE("empirical expectation over generated demonstrations matches a direct tally") {
  test::Gridworld g;
  Rng rng(41);
  const auto demos = g.demonstrations(1000, 8, 0.5, rng);
  const auto m = RewardModel::one_hot(test::Gridworld::kStates);
  const auto e = empirical_feature_expectation(demos, m);
  std::vector<long> tally(test::Gridworld::kStates, 0);
  for (const auto& d : demos)
    for (const auto& step : d) ++tally[static_cast<std::size_t>(step.state)];
  for (int s = 0; s < test::Gridworld::kStates; ++s)
    CHECK(e[static_cast<std::size_t>(s)] == doctest::Approx(tally[static_cast<std::size_t>(s)] / 1000.0));
}
