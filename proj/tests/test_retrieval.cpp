#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "febr/retrieval.hpp"
#include "support.hpp"

using namespace febr;

namespace {

// Direct definition: one noisy key per catalog video, keep the m largest.
std::vector<std::size_t> brute_force(const Catalog& catalog, const std::vector<double>& interests, std::size_t m,
                                     double sd, Rng& rng) {
  std::normal_distribution<double> noise(0.0, sd);
  std::vector<std::pair<double, std::size_t>> keyed;
  for (std::size_t i = 0; i < catalog.size(); ++i)
    keyed.push_back({interests[static_cast<std::size_t>(catalog[i].topic)] + noise(rng), i});
  std::sort(keyed.begin(), keyed.end(), [](auto& a, auto& b) { return a.first > b.first; });
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(keyed[i].second);
  return out;
}

}  // namespace

TEST_CASE("retrieval returns m distinct catalog indices") {
  const auto catalog = sample_catalog(1, 500, 8);
  const RetrievalIndex index(catalog, 8);
  Rng rng(2);
  const std::vector<double> interests{0.9, 0.1, -0.2, 0, 0, 0.3, 0, 0};
  for (int t = 0; t < 100; ++t) {
    const auto got = index.sample(interests, 5, 0.1, rng);
    REQUIRE(got.size() == 5);
    CHECK(std::set<std::size_t>(got.begin(), got.end()).size() == 5);
    for (auto i : got) CHECK(i < catalog.size());
  }
}

TEST_CASE("retrieval without noise takes the most interesting topic first") {
  const auto catalog = sample_catalog(1, 200, 4);
  const RetrievalIndex index(catalog, 4);
  Rng rng(2);
  const auto got = index.sample(std::vector<double>{0.1, 0.8, 0.2, -0.3}, 5, 0.0, rng);
  for (auto i : got) CHECK(catalog[i].topic == 1);
}

TEST_CASE("retrieval corpus distribution matches the brute-force ranking") {
  // small catalog with close topic interests so that mixing across topics is common
  Catalog catalog;
  for (int i = 0; i < 24; ++i) catalog.push_back(test::video(i, i % 3, 0.0));
  const std::vector<double> interests{0.5, 0.45, 0.3};
  const RetrievalIndex index(catalog, 3);
  const int draws = 40000;
  std::vector<double> fast(catalog.size(), 0.0), slow(catalog.size(), 0.0);
  std::vector<double> fast_topic(3, 0.0), slow_topic(3, 0.0);
  Rng r1(10), r2(20);
  for (int d = 0; d < draws; ++d) {
    for (auto i : index.sample(interests, 5, 0.1, r1)) {
      fast[i] += 1.0 / draws;
      fast_topic[static_cast<std::size_t>(catalog[i].topic)] += 1.0 / draws;
    }
    for (auto i : brute_force(catalog, interests, 5, 0.1, r2)) {
      slow[i] += 1.0 / draws;
      slow_topic[static_cast<std::size_t>(catalog[i].topic)] += 1.0 / draws;
    }
  }
  for (std::size_t i = 0; i < catalog.size(); ++i) CHECK(std::abs(fast[i] - slow[i]) < 0.015);
  // expected number of corpus slots per topic; standard error about 0.006
  for (int t = 0; t < 3; ++t) CHECK(std::abs(fast_topic[t] - slow_topic[t]) < 0.04);
}

TEST_CASE("retrieval validates its inputs") {
  const auto catalog = sample_catalog(1, 20, 4);
  const RetrievalIndex index(catalog, 4);
  Rng rng(1);
  CHECK_THROWS_AS(index.sample(std::vector<double>{0, 0, 0}, 5, 0.1, rng), std::invalid_argument);
  CHECK_THROWS_AS(index.sample(std::vector<double>{0, 0, 0, 0}, 0, 0.1, rng), std::invalid_argument);
}
