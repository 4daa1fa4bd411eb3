#include "febr/abstraction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace febr::irl {

namespace {

void check_edges(const std::vector<double>& edges, double lo, double hi, const char* what) {
  if (edges.size() < 2) throw std::invalid_argument(std::string(what) + " needs at least one bin");
  if (edges.front() != lo || edges.back() != hi)
    throw std::invalid_argument(std::string(what) + " edges must cover the full range");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1])) throw std::invalid_argument(std::string(what) + " edges must increase");
}

int bin_of(const std::vector<double>& edges, double x) {
  x = std::clamp(x, edges.front(), edges.back());
  auto it = std::upper_bound(edges.begin(), edges.end(), x);
  int bin = static_cast<int>(it - edges.begin()) - 1;
  return std::clamp(bin, 0, static_cast<int>(edges.size()) - 2);
}

void enumerate(int n_desc, std::size_t k, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  const int start = cur.empty() ? 0 : cur.back();
  for (int d = start; d < n_desc; ++d) {
    cur.push_back(d);
    enumerate(n_desc, k, cur, out);
    cur.pop_back();
  }
}

}  // namespace

Discretizer::Discretizer(int n_topics, std::size_t slate_size, std::vector<double> quality_edges,
                         std::vector<double> engagement_edges)
    : n_topics_(n_topics),
      slate_size_(slate_size),
      quality_edges_(std::move(quality_edges)),
      engagement_edges_(std::move(engagement_edges)) {
  if (n_topics_ < 1) throw std::invalid_argument("n_topics must be positive");
  if (slate_size_ < 1) throw std::invalid_argument("slate size must be positive");
  check_edges(quality_edges_, -1.0, 1.0, "quality");
  check_edges(engagement_edges_, 0.0, 1.0, "engagement");
  std::vector<int> cur;
  enumerate(num_descriptors(), slate_size_, cur, actions_);
  for (std::size_t i = 0; i < actions_.size(); ++i) action_ids_.emplace(actions_[i], static_cast<ActionId>(i));
}

int Discretizer::quality_bin(double q) const noexcept { return bin_of(quality_edges_, q); }
int Discretizer::engagement_bin(double e) const noexcept { return bin_of(engagement_edges_, e); }

double Discretizer::quality_bin_center(int bin) const {
  if (bin < 0 || bin >= quality_bins()) throw std::out_of_range("quality bin");
  return 0.5 * (quality_edges_[static_cast<std::size_t>(bin)] + quality_edges_[static_cast<std::size_t>(bin) + 1]);
}

StateId Discretizer::encode_state(const std::optional<Response>& last) const {
  if (!last || !last->has_click() || !last->clicked_topic) return 0;
  DecodedState s;
  s.last_topic = *last->clicked_topic;
  s.quality_bin = quality_bin(last->observed_quality);
  s.engagement_bin = engagement_bin(last->engagement_rate);
  return encode_state(s);
}

StateId Discretizer::encode_state(const DecodedState& s) const {
  if (!s.last_topic) return 0;
  const int t = *s.last_topic;
  if (t < 0 || t >= n_topics_) throw std::invalid_argument("topic out of range");
  if (s.quality_bin < 0 || s.quality_bin >= quality_bins() || s.engagement_bin < 0 ||
      s.engagement_bin >= engagement_bins())
    throw std::invalid_argument("bin out of range");
  return 1 + t * quality_bins() * engagement_bins() + s.quality_bin * engagement_bins() + s.engagement_bin;
}

DecodedState Discretizer::decode_state(StateId id) const {
  if (id < 0 || id >= num_states()) throw std::out_of_range("state id " + std::to_string(id));
  DecodedState s;
  if (id == 0) return s;
  int r = id - 1;
  const int per_topic = quality_bins() * engagement_bins();
  s.last_topic = r / per_topic;
  r %= per_topic;
  s.quality_bin = r / engagement_bins();
  s.engagement_bin = r % engagement_bins();
  return s;
}

int Discretizer::descriptor_index(const Descriptor& d) const noexcept {
  return d.quality_bin + (d.on_dominant_topic ? quality_bins() : 0);
}

Descriptor Discretizer::descriptor_at(int index) const {
  if (index < 0 || index >= num_descriptors()) throw std::out_of_range("descriptor index");
  return {index >= quality_bins(), index % quality_bins()};
}

ActionId Discretizer::encode_action(std::span<const Descriptor> descriptors) const {
  if (descriptors.size() != slate_size_) throw std::invalid_argument("descriptor count must equal slate size");
  std::vector<int> key;
  for (const auto& d : descriptors) {
    if (d.quality_bin < 0 || d.quality_bin >= quality_bins()) throw std::invalid_argument("quality bin");
    key.push_back(descriptor_index(d));
  }
  std::sort(key.begin(), key.end());
  return action_ids_.at(key);
}

std::vector<Descriptor> Discretizer::decode_action(ActionId id) const {
  if (id < 0 || id >= num_actions()) throw std::out_of_range("action id " + std::to_string(id));
  std::vector<Descriptor> out;
  for (int d : actions_[static_cast<std::size_t>(id)]) out.push_back(descriptor_at(d));
  return out;
}

Descriptor Discretizer::describe(const Video& v, TopicId dominant) const {
  return {v.topic == dominant, quality_bin(video_score(v))};
}

ActionId Discretizer::abstract_slate(std::span<const Video> slate_videos, TopicId dominant) const {
  std::vector<Descriptor> d;
  for (const auto& v : slate_videos) d.push_back(describe(v, dominant));
  return encode_action(d);
}

Slate realize_action(ActionId action, std::span<const Video> corpus, TopicId dominant, const Discretizer& disc) {
  if (corpus.empty()) throw std::invalid_argument("cannot realize an action on an empty corpus");
  const auto descriptors = disc.decode_action(action);
  std::vector<bool> used(corpus.size(), false);
  std::vector<std::optional<std::size_t>> pick(descriptors.size());

  for (std::size_t i = 0; i < descriptors.size(); ++i) {
    const double center = disc.quality_bin_center(descriptors[i].quality_bin);
    std::optional<std::size_t> best;
    double best_gap = 0.0;
    for (std::size_t j = 0; j < corpus.size(); ++j) {
      if (used[j] || !(disc.describe(corpus[j], dominant) == descriptors[i])) continue;
      const double gap = std::abs(video_score(corpus[j]) - center);
      if (!best || gap < best_gap) {
        best = j;
        best_gap = gap;
      }
    }
    if (best) {
      used[*best] = true;
      pick[i] = best;
    }
  }
  for (auto& p : pick) {
    if (p) continue;
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < corpus.size(); ++j) {
      if (used[j]) continue;
      if (!best || video_score(corpus[j]) > video_score(corpus[*best])) best = j;
    }
    if (!best) break;  // corpus smaller than the slate
    used[*best] = true;
    p = best;
  }

  Slate slate;
  for (const auto& p : pick)
    if (p) slate.items.push_back(corpus[*p].id);
  return slate;
}

}  // namespace febr::irl
