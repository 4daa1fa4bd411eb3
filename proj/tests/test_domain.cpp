#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>

#include "febr/domain.hpp"
#include "febr/errors.hpp"
#include "support.hpp"

using namespace febr;

TEST_CASE("video_score passes latent quality through until evaluated") {
  auto v = test::video(0, 0, 0.3);
  CHECK(video_score(v) == 0.3);

  v = test::evaluated(0, 0, -0.2, 0.9);
  CHECK(video_score(v) == 0.9);

  v = test::evaluated(0, 0, 0.5, -1.0);
  CHECK(video_score(v) == -1.0);
}

TEST_CASE("clamp_quality bounds values into [-1, 1]") {
  CHECK(clamp_quality(1.7) == 1.0);
  CHECK(clamp_quality(-3.0) == -1.0);
  CHECK(clamp_quality(0.25) == 0.25);
}

TEST_CASE("evaluation features average into s_v") {
  EvaluationFeatures f{1.0, 0.5, 0.0, -0.5};
  CHECK(f.mean() == doctest::Approx(0.25));
}

TEST_CASE("sample_catalog is a pure function of its arguments") {
  const auto a = sample_catalog(7, 3, 8);
  const auto b = sample_catalog(7, 3, 8);
  CHECK(a == b);
  CHECK(sample_catalog(8, 3, 8) != a);
}

TEST_CASE("sample_catalog topic counts and quality mean follow the sampler") {
  const std::size_t n = 10000;
  const auto c = sample_catalog(7, n, 8);
  REQUIRE(c.size() == n);
  std::vector<int> counts(8, 0);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(c[i].id == static_cast<VideoId>(i));
    REQUIRE(c[i].topic >= 0);
    REQUIRE(c[i].topic < 8);
    ++counts[static_cast<std::size_t>(c[i].topic)];
    CHECK(c[i].latent_quality >= -1.0);
    CHECK(c[i].latent_quality <= 1.0);
    CHECK_FALSE(c[i].evaluated);
    CHECK(c[i].length == kDefaultVideoLength);
    sum += c[i].latent_quality;
  }
  // binomial(n, 1/8) standard deviation
  const double sigma = std::sqrt(n * (1.0 / 8) * (7.0 / 8));
  for (int k : counts) CHECK(std::abs(k - n / 8.0) <= 5 * sigma);
  CHECK(std::abs(sum / n) <= 0.05);
}

TEST_CASE("sample_catalog rejects an empty catalog") { CHECK_THROWS_AS(sample_catalog(7, 0, 8), std::invalid_argument); }

TEST_CASE("catalog files round-trip exactly") {
  test::TempDir dir;
  auto c = sample_catalog(3, 50, 4);
  c[3].evaluated = true;
  c[3].evaluated_quality = 0.123456789012345;
  c[10].evaluated = true;
  c[10].evaluated_quality = -1.0;
  save_catalog(c, dir / "c.csv");
  CHECK(load_catalog(dir / "c.csv") == c);
}

TEST_CASE("a corrupt catalog line is reported with its line number") {
  test::TempDir dir;
  save_catalog(sample_catalog(3, 5, 4), dir / "c.csv");
  {
    std::ofstream out(dir / "c.csv", std::ios::app);
    out << "5,1,4,abc,0,\n";
  }
  try {
    load_catalog(dir / "c.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 7);
  }
}

TEST_CASE("dominant_topic takes the most frequent topic, lowest id on ties") {
  std::vector<Video> corpus = {test::video(0, 3, 0), test::video(1, 1, 0), test::video(2, 3, 0),
                               test::video(3, 1, 0), test::video(4, 5, 0)};
  CHECK(dominant_topic(corpus) == 1);
  corpus[4].topic = 3;
  CHECK(dominant_topic(corpus) == 3);
}

TEST_CASE("random_slate draws distinct corpus members") {
  std::vector<Video> corpus;
  for (int i = 0; i < 5; ++i) corpus.push_back(test::video(100 + i, i, 0));
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_slate(corpus, 2, rng);
    REQUIRE(s.items.size() == 2);
    CHECK(s.items[0] != s.items[1]);
    for (auto id : s.items) CHECK((id >= 100 && id < 105));
  }
  CHECK_THROWS_AS(random_slate(corpus, 6, rng), std::invalid_argument);
}

TEST_CASE("check_slate rejects empty and duplicate slates") {
  CHECK_THROWS_AS(check_slate(Slate{}), std::invalid_argument);
  CHECK_THROWS_AS(check_slate(Slate{{4, 4}}), std::invalid_argument);
  CHECK_NOTHROW(check_slate(Slate{{4, 5}}));
}

TEST_CASE("sample_interests keeps every entry in [-1, 1] with the dominant topic strongest") {
  Rng rng(5);
  InterestPrior prior;
  for (int trial = 0; trial < 500; ++trial) {
    const int dominant = trial % 8;
    const auto x = sample_interests(dominant, 8, prior, rng);
    for (double v : x) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    }
    CHECK(x[static_cast<std::size_t>(dominant)] >= prior.dominant_low);
  }
}
