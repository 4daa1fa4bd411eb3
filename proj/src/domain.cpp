#include "febr/domain.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "febr/csv.hpp"
#include "febr/errors.hpp"

namespace febr {

double clamp_quality(double q) noexcept { return std::clamp(q, -1.0, 1.0); }

double video_score(const Video& v) noexcept {
  if (v.evaluated && v.evaluated_quality) return *v.evaluated_quality;
  return v.latent_quality;
}

Catalog sample_catalog(std::uint64_t seed, std::size_t size, int n_topics, double length) {
  if (size == 0) throw std::invalid_argument("catalog size must be positive");
  if (n_topics < 1) throw std::invalid_argument("n_topics must be positive");
  if (!(length > 0.0)) throw std::invalid_argument("video length must be positive");

  Rng rng(seed);
  std::uniform_int_distribution<TopicId> topic(0, n_topics - 1);
  std::uniform_real_distribution<double> quality(-1.0, 1.0);
  Catalog catalog;
  catalog.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    Video v;
    v.id = static_cast<VideoId>(i);
    v.topic = topic(rng);
    v.length = length;
    v.latent_quality = quality(rng);
    catalog.push_back(v);
  }
  return catalog;
}

void save_catalog(const Catalog& catalog, const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  out << "id,topic,length,latent_quality,evaluated,evaluated_quality\n";
  for (const auto& v : catalog) {
    out << v.id << ',' << v.topic << ',' << csv::fmt(v.length) << ',' << csv::fmt(v.latent_quality) << ','
        << (v.evaluated ? 1 : 0) << ',';
    if (v.evaluated_quality) out << csv::fmt(*v.evaluated_quality);
    out << '\n';
  }
}

Catalog load_catalog(const std::filesystem::path& path) {
  csv::Reader reader(path);
  std::string line;
  if (!reader.next(line) || line != "id,topic,length,latent_quality,evaluated,evaluated_quality")
    reader.fail("missing catalog header");
  Catalog catalog;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto f = csv::split(line);
    if (f.size() != 6) reader.fail("expected 6 fields, got " + std::to_string(f.size()));
    try {
      Video v;
      v.id = csv::to_int(f[0]);
      v.topic = static_cast<TopicId>(csv::to_int(f[1]));
      v.length = csv::to_double(f[2]);
      v.latent_quality = csv::to_double(f[3]);
      v.evaluated = csv::to_int(f[4]) != 0;
      if (!f[5].empty()) v.evaluated_quality = csv::to_double(f[5]);
      if (v.id != static_cast<VideoId>(catalog.size())) reader.fail("ids must be dense and ordered");
      if (v.evaluated && !v.evaluated_quality) reader.fail("evaluated video without evaluated_quality");
      catalog.push_back(v);
    } catch (const std::invalid_argument& e) {
      reader.fail(e.what());
    }
  }
  return catalog;
}

std::vector<double> sample_interests(TopicId dominant, int n_topics, const InterestPrior& prior, Rng& rng) {
  if (dominant < 0 || dominant >= n_topics) throw std::invalid_argument("dominant topic out of range");
  if (!(prior.dominant_low <= prior.dominant_high) || prior.background_sd < 0.0)
    throw std::invalid_argument("bad interest prior");
  std::normal_distribution<double> background(0.0, prior.background_sd);
  std::vector<double> interests(static_cast<std::size_t>(n_topics));
  for (auto& x : interests) x = prior.background_sd > 0.0 ? clamp_quality(background(rng)) : 0.0;
  interests[static_cast<std::size_t>(dominant)] =
      clamp_quality(std::uniform_real_distribution<double>(prior.dominant_low, prior.dominant_high)(rng));
  return interests;
}

const Video& resolve_video(VideoId id, std::span<const Video> corpus, const Catalog& catalog) {
  for (const auto& v : corpus)
    if (v.id == id) return v;
  if (id < 0 || static_cast<std::size_t>(id) >= catalog.size())
    throw std::invalid_argument("unknown video id " + std::to_string(id));
  return catalog[static_cast<std::size_t>(id)];
}

TopicId dominant_topic(std::span<const Video> corpus) {
  if (corpus.empty()) throw std::invalid_argument("empty corpus has no dominant topic");
  TopicId max_topic = 0;
  for (const auto& v : corpus) max_topic = std::max(max_topic, v.topic);
  std::vector<int> counts(static_cast<std::size_t>(max_topic) + 1, 0);
  for (const auto& v : corpus) ++counts[static_cast<std::size_t>(v.topic)];
  return static_cast<TopicId>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

Slate random_slate(std::span<const Video> corpus, std::size_t k, Rng& rng) {
  if (k == 0 || corpus.size() < k) throw std::invalid_argument("corpus smaller than the slate");
  std::vector<std::size_t> idx(corpus.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    auto j = std::uniform_int_distribution<std::size_t>(i, idx.size() - 1)(rng);
    std::swap(idx[i], idx[j]);
  }
  Slate s;
  for (std::size_t i = 0; i < k; ++i) s.items.push_back(corpus[idx[i]].id);
  return s;
}

void check_slate(const Slate& slate) {
  if (slate.items.empty()) throw std::invalid_argument("empty slate");
  std::unordered_set<VideoId> seen;
  for (auto id : slate.items)
    if (!seen.insert(id).second) throw std::invalid_argument("duplicate video in slate");
}

}  // namespace febr
