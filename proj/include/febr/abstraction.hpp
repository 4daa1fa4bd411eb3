#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "febr/domain.hpp"

namespace febr::irl {

using StateId = int;
using ActionId = int;

/// One slate position in abstract form.
struct Descriptor {
  bool on_dominant_topic = false;
  int quality_bin = 0;
  bool operator==(const Descriptor&) const = default;
};

struct DecodedState {
  std::optional<TopicId> last_topic;  // empty for the initial / no-click state
  int quality_bin = 0;
  int engagement_bin = 0;
  bool operator==(const DecodedState&) const = default;
};

/// Finite encoding of states and slates.
///
/// State 0 means "no clicked video"; every other id is the mixed-radix
/// encoding 1 + topic * (Q * E) + quality_bin * E + engagement_bin.
/// Actions are multisets of `slate_size` descriptors, enumerated as
/// nondecreasing descriptor-index tuples in lexicographic order.
class Discretizer {
 public:
  Discretizer(int n_topics = kDefaultTopics, std::size_t slate_size = 2,
              std::vector<double> quality_edges = {-1.0, -0.5, 0.0, 0.5, 1.0},
              std::vector<double> engagement_edges = {0.0, 0.5, 1.0});

  int n_topics() const noexcept { return n_topics_; }
  std::size_t slate_size() const noexcept { return slate_size_; }
  int quality_bins() const noexcept { return static_cast<int>(quality_edges_.size()) - 1; }
  int engagement_bins() const noexcept { return static_cast<int>(engagement_edges_.size()) - 1; }
  int num_states() const noexcept { return 1 + n_topics_ * quality_bins() * engagement_bins(); }
  int num_actions() const noexcept { return static_cast<int>(actions_.size()); }
  int num_descriptors() const noexcept { return 2 * quality_bins(); }

  int quality_bin(double q) const noexcept;
  int engagement_bin(double e) const noexcept;
  double quality_bin_center(int bin) const;

  StateId encode_state(const std::optional<Response>& last_response) const;
  StateId encode_state(const DecodedState& s) const;
  DecodedState decode_state(StateId id) const;

  int descriptor_index(const Descriptor& d) const noexcept;
  Descriptor descriptor_at(int index) const;
  /// Order of the descriptors does not matter.
  ActionId encode_action(std::span<const Descriptor> descriptors) const;
  std::vector<Descriptor> decode_action(ActionId id) const;

  Descriptor describe(const Video& v, TopicId dominant) const;
  /// Abstract form of a concrete slate of videos.
  ActionId abstract_slate(std::span<const Video> slate_videos, TopicId dominant) const;

  bool operator==(const Discretizer& o) const {
    return n_topics_ == o.n_topics_ && slate_size_ == o.slate_size_ && quality_edges_ == o.quality_edges_ &&
           engagement_edges_ == o.engagement_edges_;
  }

 private:
  int n_topics_;
  std::size_t slate_size_;
  std::vector<double> quality_edges_;
  std::vector<double> engagement_edges_;
  std::vector<std::vector<int>> actions_;
  std::map<std::vector<int>, ActionId> action_ids_;
};

/// Maps an abstract action back onto concrete corpus videos. Exact descriptor
/// matches are assigned first (closest score to the bin center); descriptors
/// left unmatched then take the highest-score remaining videos.
Slate realize_action(ActionId action, std::span<const Video> corpus, TopicId dominant, const Discretizer& disc);

}  // namespace febr::irl
