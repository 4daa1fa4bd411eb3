#include <doctest.h>

#include <cmath>

#include "febr/metrics.hpp"
#include "support.hpp"

using namespace febr;
using namespace febr::metrics;

namespace {

user::SessionStep clicked(double q, bool guided, double watch = 2.0) {
  user::SessionStep s;
  s.response.clicked = 0;
  s.response.watch_time = watch;
  s.quality = q;
  s.expert_guided = guided;
  return s;
}

user::SessionStep skipped(bool guided) {
  user::SessionStep s;
  s.expert_guided = guided;
  return s;
}

}  // namespace

TEST_CASE("constant guided quality gives equal Q_e and Q_T") {
  user::SessionLog log;
  for (int i = 0; i < 4; ++i) log.steps.push_back(clicked(0.6, true));
  const auto m = compute_metrics(log);
  CHECK(m.q_e_defined);
  CHECK(m.q_e == doctest::Approx(0.6));
  CHECK(m.q_t == doctest::Approx(0.6));
  CHECK(m.w_t == 8.0);
  CHECK(m.length == 4);
}

TEST_CASE("no guided steps leaves Q_e undefined") {
  user::SessionLog log;
  log.steps = {clicked(0.4, false), skipped(false), clicked(-0.2, false)};
  const auto m = compute_metrics(log);
  CHECK_FALSE(m.q_e_defined);
  CHECK(m.q_e == 0.0);
  CHECK(m.q_t == doctest::Approx(0.1));
  CHECK(m.expert_guided_count == 0);
}

TEST_CASE("mixed session") {
  user::SessionLog log;
  log.steps = {clicked(0.8, true), clicked(-0.2, false), clicked(0.6, true), clicked(0.0, false)};
  const auto m = compute_metrics(log);
  CHECK(m.q_e == doctest::Approx(0.7));
  CHECK(m.q_t == doctest::Approx(0.3));
  // l * Q_T = |S_e| * Q_e + sum over the other clicks
  CHECK(m.length * m.q_t == doctest::Approx(m.guided_clicked_count * m.q_e + m.q_prime));
}

TEST_CASE("counting skipped steps as zero quality") {
  user::SessionLog log;
  log.steps = {clicked(0.8, true), skipped(false), skipped(true), clicked(0.4, false)};
  CHECK(compute_metrics(log).q_t == doctest::Approx(0.6));
  CHECK(compute_metrics(log, 0, {true}).q_t == doctest::Approx(0.3));
  CHECK(compute_metrics(log).expert_guided_count == 2);
  CHECK_THROWS_AS(compute_metrics(user::SessionLog{}), std::invalid_argument);
}

TEST_CASE("property: quality decomposes over guided and other clicks") {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    user::SessionLog log;
    const int n = test::uniform_int(rng, 1, 30);
    double total = 0.0, watch = 0.0;
    int clicks = 0;
    for (int i = 0; i < n; ++i) {
      const bool guided = test::uniform_int(rng, 0, 1) == 1;
      if (test::uniform_int(rng, 0, 3) == 0) {
        log.steps.push_back(skipped(guided));
      } else {
        const double q = test::uniform(rng, -1, 1), w = test::uniform(rng, 0, 4);
        log.steps.push_back(clicked(q, guided, w));
        total += q;
        watch += w;
        ++clicks;
      }
    }
    const auto m = compute_metrics(log);
    CHECK(m.clicked_count == clicks);
    CHECK(m.w_t == doctest::Approx(watch));
    const double guided_part = m.q_e_defined ? m.guided_clicked_count * m.q_e : 0.0;
    CHECK(guided_part + m.q_prime == doctest::Approx(total));
    if (clicks > 0) CHECK(m.q_t * clicks == doctest::Approx(total));
    CHECK(std::abs(m.q_t) <= 1.0 + 1e-12);
  }
}

TEST_CASE("quantiles") {
  CHECK(quantile({3, 1, 2}, 0.5) == 2.0);
  CHECK(quantile({1, 2}, 0.5) == 1.5);
  CHECK(quantile({5}, 0.3) == 5.0);
  CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
  CHECK(quantile_grid(std::vector<double>{}).empty());
  const std::vector<double> xs{4, 0, 2};
  const auto g = quantile_grid(xs, 5);
  CHECK(g == std::vector<double>{0, 1, 2, 3, 4});
}

TEST_CASE("property: quantile grids are monotone and span the sample") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs(static_cast<std::size_t>(test::uniform_int(rng, 1, 50)));
    for (auto& x : xs) x = test::uniform_int(rng, 0, 3) == 0 ? 0.1 : test::uniform(rng, -1, 1);
    const auto g = quantile_grid(xs);
    REQUIRE(g.size() == 101);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] >= g[i - 1]);
    CHECK(g.front() == *std::min_element(xs.begin(), xs.end()));
    CHECK(g.back() == *std::max_element(xs.begin(), xs.end()));
  }
}

TEST_CASE("arm summary") {
  std::vector<MetricsRow> rows(3);
  rows[0].q_t = 0.1, rows[0].w_t = 10, rows[0].length = 5, rows[0].expert_guided_count = 1;
  rows[1].q_t = 0.4, rows[1].w_t = 30, rows[1].length = 5, rows[1].expert_guided_count = 4;
  rows[1].q_e = 0.9, rows[1].q_e_defined = true;
  rows[2].q_t = 0.7, rows[2].w_t = 20, rows[2].length = 10, rows[2].expert_guided_count = 0;
  const auto s = summarize("x", rows);
  CHECK(s.sessions == 3);
  CHECK(s.mean_q_t == doctest::Approx(0.4));
  CHECK(s.median_w_t == 20.0);
  CHECK(s.q_e_sessions == 1);
  CHECK(s.mean_q_e == 0.9);
  CHECK(s.guided_fraction == doctest::Approx(0.25));
  CHECK(s.mean_length == doctest::Approx(20.0 / 3));
  CHECK(s.q_e_cdf.size() == 101);
  const auto empty = summarize("y", {});
  CHECK(empty.sessions == 0);
  CHECK(empty.q_t_cdf.empty());
}
