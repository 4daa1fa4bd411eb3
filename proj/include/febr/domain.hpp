#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace febr {

using Rng = std::mt19937_64;
using VideoId = std::int64_t;
using TopicId = int;

inline constexpr int kDefaultTopics = 8;
inline constexpr double kDefaultVideoLength = 4.0;

/// Clamp a quality value into [-1, 1]. Every quality mutation goes through this.
double clamp_quality(double q) noexcept;

struct EvaluationFeatures {
  double pedagogy = 0.0;
  double accuracy = 0.0;
  double importance = 0.0;
  double entertainment = 0.0;

  /// s_v, the average of the four criteria.
  double mean() const noexcept { return 0.25 * (pedagogy + accuracy + importance + entertainment); }
  bool operator==(const EvaluationFeatures&) const = default;
};

struct Video {
  VideoId id = 0;
  TopicId topic = 0;
  double length = kDefaultVideoLength;  // minutes
  double latent_quality = 0.0;
  bool evaluated = false;
  std::optional<double> evaluated_quality;

  bool operator==(const Video&) const = default;
};

/// The quality the rest of the system sees: the expert evaluation when one
/// exists, the latent quality otherwise.
double video_score(const Video& v) noexcept;

struct Slate {
  std::vector<VideoId> items;
  bool operator==(const Slate&) const = default;
};

using Corpus = std::vector<Video>;

/// Catalog entries are stored so that catalog[i].id == i.
using Catalog = std::vector<Video>;

/// Outcome of presenting a slate. `clicked` indexes into the slate; an empty
/// value is the null item.
struct Response {
  std::optional<std::size_t> clicked;
  std::optional<VideoId> clicked_video;
  std::optional<TopicId> clicked_topic;
  double watch_time = 0.0;
  double engagement_rate = 0.0;
  std::optional<EvaluationFeatures> evaluation;
  double observed_quality = 0.0;

  bool has_click() const noexcept { return clicked.has_value(); }
};

/// Catalog with i.i.d. U(-1,1) latent quality and uniform topics. Pure in
/// (seed, size, n_topics).
Catalog sample_catalog(std::uint64_t seed, std::size_t size, int n_topics,
                       double length = kDefaultVideoLength);

void save_catalog(const Catalog& catalog, const std::filesystem::path& path);
Catalog load_catalog(const std::filesystem::path& path);

/// Interest population shared by experts and users: one dominant topic with a
/// strong positive interest, weak background interest elsewhere.
struct InterestPrior {
  double dominant_low = 0.6;
  double dominant_high = 1.0;
  double background_sd = 0.1;
};

/// Interest vector in [-1,1]^n_topics centred on `dominant`.
std::vector<double> sample_interests(TopicId dominant, int n_topics, const InterestPrior& prior, Rng& rng);

/// Looks a slate member up in the corpus first, then by id in the catalog.
const Video& resolve_video(VideoId id, std::span<const Video> corpus, const Catalog& catalog);

/// Most frequent topic in the corpus, lowest id on ties.
TopicId dominant_topic(std::span<const Video> corpus);

/// Uniformly random k-subset of the corpus, in random order.
Slate random_slate(std::span<const Video> corpus, std::size_t k, Rng& rng);

/// Validates slate invariants: nonempty, no duplicates.
void check_slate(const Slate& slate);

}  // namespace febr
