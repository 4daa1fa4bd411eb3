#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "febr/domain.hpp"

namespace test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("febr_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline febr::Video video(febr::VideoId id, febr::TopicId topic, double latent, double length = 4.0) {
  febr::Video v;
  v.id = id;
  v.topic = topic;
  v.latent_quality = latent;
  v.length = length;
  return v;
}

inline febr::Video evaluated(febr::VideoId id, febr::TopicId topic, double latent, double eq) {
  auto v = video(id, topic, latent);
  v.evaluated = true;
  v.evaluated_quality = eq;
  return v;
}

inline double uniform(febr::Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(febr::Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace test
