#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "febr/choice.hpp"
#include "febr/errors.hpp"
#include "febr/expert_env.hpp"
#include "support.hpp"

using namespace febr;
using namespace febr::expert;

namespace {

ExpertProfile profile(double f = 1.0, double budget = 60.0) {
  ExpertProfile p;
  p.interests = std::vector<double>(8, 0.0);
  p.interests[0] = 0.8;
  p.expertise_topics = {0};
  p.quality_factor = f;
  p.session_budget = budget;
  return p;
}

struct Setup {
  Catalog catalog = sample_catalog(5, 2000, 8);
  irl::Discretizer disc;
  irl::Policy behavior = make_behavior_policy(disc, 0.1);
  ExpertEnvConfig config;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("evaluation with all features at 1 and f = 1 saturates") {
  const auto v = apply_evaluation(test::video(0, 0, 0.2), EvaluationFeatures{1, 1, 1, 1}, 1.0);
  CHECK(EvaluationFeatures{1, 1, 1, 1}.mean() == 1.0);
  CHECK(v.evaluated);
  CHECK(*v.evaluated_quality == 1.0);
}

TEST_CASE("zero features leave the latent quality") {
  for (double f : {0.0, 0.4, 1.0}) {
    const auto v = apply_evaluation(test::video(0, 0, -0.35), EvaluationFeatures{}, f);
    CHECK(*v.evaluated_quality == -0.35);
  }
}

TEST_CASE("f = 0 keeps the latent quality even with full feature noise") {
  Rng rng(2);
  const auto p = profile(0.0);
  for (int i = 0; i < 100; ++i) {
    const auto [features, v] = evaluate_video(test::video(1, 2, 0.45), p, 0.3, rng);
    CHECK(*v.evaluated_quality == 0.45);
    for (double x : {features.pedagogy, features.accuracy, features.importance, features.entertainment})
      CHECK(std::abs(x) <= 1.0);
  }
}

TEST_CASE("property: evaluated quality stays in [-1, 1]") {
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const auto p = profile(test::uniform(rng, 0, 1));
    const auto [features, v] = evaluate_video(test::video(1, 0, test::uniform(rng, -1, 1)), p, 0.3, rng);
    CHECK(std::abs(*v.evaluated_quality) <= 1.0);
    CHECK(std::abs(features.mean()) <= 1.0);
  }
}

TEST_CASE("expert utilities") {
  const auto p = profile();
  ExpertEnvConfig cfg;
  cfg.beta_quality = 2.0;
  SUBCASE("identical videos are equally attractive") {
    const std::vector<Video> s{test::video(1, 3, 0.1), test::video(2, 3, 0.1)};
    const auto u = expert_utilities(s, p, cfg);
    CHECK(u[0] == u[1]);
  }
  SUBCASE("a quality gap of 0.5 at beta 2 is a factor e") {
    const std::vector<Video> s{test::video(1, 3, 0.6), test::video(2, 3, 0.1)};
    const auto u = expert_utilities(s, p, cfg);
    CHECK(u[0] / u[1] == doctest::Approx(std::exp(1.0)));
  }
  SUBCASE("zero coefficients give unit utilities") {
    cfg.beta_quality = cfg.beta_topic = cfg.beta_expertise = 0.0;
    const std::vector<Video> s{test::video(1, 0, 0.9), test::video(2, 5, -0.7)};
    for (double x : expert_utilities(s, p, cfg)) CHECK(x == 1.0);
  }
}

TEST_CASE("session length follows the time budget") {
  Setup st;
  const RetrievalIndex index(st.catalog, 8);
  st.config.no_click_mass = 0.0;  // always clicks, each click costs 4 + 1 minutes
  Rng rng(1);

  SUBCASE("60 minutes is 12 clicks") {
    st.config.max_steps = 1000;
    const auto t = run_expert_session(profile(1.0, 60.0), st.catalog, index, st.behavior, st.disc, st.config, rng);
    CHECK(t.steps.size() == 12);
    for (const auto& s : t.steps) CHECK(s.state.response.has_click());
  }
  SUBCASE("a huge budget stops at max_steps") {
    const auto t = run_expert_session(profile(1.0, 1e6), st.catalog, index, st.behavior, st.disc, st.config, rng);
    CHECK(t.steps.size() == 20);
  }
  SUBCASE("a zero budget still takes one step") {
    const auto t = run_expert_session(profile(1.0, 0.0), st.catalog, index, st.behavior, st.disc, st.config, rng);
    CHECK(t.steps.size() == 1);
  }
}

TEST_CASE("property: session invariants") {
  Setup st;
  const auto profiles = make_expert_profiles(4, 8, 11);
  const auto trajs = generate_demonstrations(profiles, 10, st.catalog, st.behavior, st.disc, st.config, 99);
  REQUIRE(trajs.size() == 40);
  for (const auto& t : trajs) {
    double spent = 0.0;
    irl::StateId prev_next = 0;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      const auto& s = t.steps[i];
      const auto& r = s.state.response;
      check_slate(s.slate);
      CHECK(s.slate.items.size() == st.disc.slate_size());
      CHECK(s.state.video_state.size() == st.config.corpus_size);
      for (auto id : s.slate.items) {
        bool found = false;
        for (const auto& v : s.state.video_state) found = found || v.id == id;
        CHECK(found);
      }
      CHECK((r.watch_time == 0.0) == !r.has_click());
      if (r.has_click()) {
        CHECK(r.watch_time <= st.catalog[static_cast<std::size_t>(*r.clicked_video)].length);
        CHECK(st.catalog[static_cast<std::size_t>(*r.clicked_video)].evaluated);
      }
      CHECK(s.abstract_state == (i == 0 ? 0 : prev_next));
      CHECK(s.next_state == st.disc.encode_state(r));
      prev_next = s.next_state;
      spent += r.watch_time + st.config.browse_cost;
    }
    // the loop stops as soon as the budget is gone
    const double before_last = spent - t.steps.back().state.response.watch_time - st.config.browse_cost;
    CHECK(before_last < 60.0);
    CHECK((spent >= 60.0 || static_cast<int>(t.steps.size()) == st.config.max_steps));
  }
}

TEST_CASE("demonstration counts") {
  Setup st;
  const auto ten = make_expert_profiles(10, 8, 3);
  CHECK(generate_demonstrations(ten, 100, st.catalog, st.behavior, st.disc, st.config, 1).size() == 1000);
  const auto one = make_expert_profiles(1, 8, 3);
  CHECK(generate_demonstrations(one, 1, st.catalog, st.behavior, st.disc, st.config, 1).size() == 1);
}

TEST_CASE("same seed gives byte-identical trajectory files") {
  test::TempDir dir;
  for (const char* name : {"a.csv", "b.csv"}) {
    Setup st;
    const auto profiles = make_expert_profiles(3, 8, 21);
    const auto trajs = generate_demonstrations(profiles, 5, st.catalog, st.behavior, st.disc, st.config, 77);
    save_trajectories(trajs, dir / name);
  }
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
}

TEST_CASE("trajectories and profiles round-trip through files") {
  test::TempDir dir;
  Setup st;
  const auto profiles = make_expert_profiles(2, 8, 5);
  const auto trajs = generate_demonstrations(profiles, 3, st.catalog, st.behavior, st.disc, st.config, 8);
  save_trajectories(trajs, dir / "t.csv");
  const auto back = load_trajectories(dir / "t.csv");
  REQUIRE(back.size() == trajs.size());
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    CHECK(back[i].abstract() == trajs[i].abstract());
    REQUIRE(back[i].steps.size() == trajs[i].steps.size());
    for (std::size_t j = 0; j < trajs[i].steps.size(); ++j) {
      const auto& a = trajs[i].steps[j];
      const auto& b = back[i].steps[j];
      CHECK(a.slate == b.slate);
      CHECK(a.state.video_state == b.state.video_state);
      CHECK(a.state.expert_state == b.state.expert_state);
      CHECK(a.state.response.clicked == b.state.response.clicked);
      CHECK(a.state.response.observed_quality == b.state.response.observed_quality);
      CHECK(a.state.response.evaluation == b.state.response.evaluation);
    }
  }
  save_profiles(profiles, dir / "p.csv");
  const auto pb = load_profiles(dir / "p.csv");
  REQUIRE(pb.size() == 2);
  CHECK(pb[1].interests == profiles[1].interests);
  CHECK(pb[1].quality_factor == profiles[1].quality_factor);
}

TEST_CASE("profiles are validated") {
  auto p = profile();
  CHECK_NOTHROW(validate(p, 8));
  p.quality_factor = 1.5;
  CHECK_THROWS_AS(validate(p, 8), std::invalid_argument);
  p = profile();
  p.expertise_topics.clear();
  CHECK_THROWS_AS(validate(p, 8), std::invalid_argument);
  CHECK_THROWS_AS(validate(profile(), 4), std::invalid_argument);
}

TEST_CASE("behavior policy is epsilon-soft around one greedy action") {
  irl::Discretizer disc;
  const auto pi = make_behavior_policy(disc, 0.1);
  pi.validate();
  const auto greedy = pi.argmax(0);
  for (int s = 0; s < disc.num_states(); ++s) {
    CHECK(pi.argmax(s) == greedy);
    CHECK(pi.at(s, greedy) == doctest::Approx(0.9 + 0.1 / disc.num_actions()));
  }
  // both picks high quality on the dominant topic
  for (const auto& d : disc.decode_action(greedy)) {
    CHECK(d.on_dominant_topic);
    CHECK(d.quality_bin == disc.quality_bins() - 1);
  }
}

TEST_CASE("experts click better videos than they pass over") {
  Rng rng(31);
  const auto p = profile();
  ExpertEnvConfig cfg;
  double clicked = 0.0, passed = 0.0;
  long n_clicked = 0, n_passed = 0;
  for (int i = 0; i < 20000; ++i) {
    const std::vector<Video> slate{test::video(1, test::uniform_int(rng, 0, 7), test::uniform(rng, -1, 1)),
                                   test::video(2, test::uniform_int(rng, 0, 7), test::uniform(rng, -1, 1))};
    const auto probs = choice::choice_probabilities(expert_utilities(slate, p, cfg), cfg.no_click_mass);
    const auto pick = choice::sample_choice(probs, rng);
    for (std::size_t j = 0; j < slate.size(); ++j) {
      if (pick && *pick == j) {
        clicked += slate[j].latent_quality;
        ++n_clicked;
      } else {
        passed += slate[j].latent_quality;
        ++n_passed;
      }
    }
  }
  CHECK(clicked / n_clicked > passed / n_passed);
}

TEST_CASE("noise-free full expertise doubles the latent quality") {
  Rng rng(32);
  const auto p = profile(1.0);
  double prev = -2.0;
  for (double latent = -1.0; latent <= 1.0; latent += 0.05) {
    const auto [features, v] = evaluate_video(test::video(1, 0, latent), p, 0.0, rng);
    CHECK(*v.evaluated_quality == doctest::Approx(std::clamp(2.0 * latent, -1.0, 1.0)));
    CHECK(*v.evaluated_quality >= prev);
    prev = *v.evaluated_quality;
  }
}
