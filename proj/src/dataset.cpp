#include "febr/dataset.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "febr/csv.hpp"
#include "febr/errors.hpp"

namespace febr::dataset {

double canonical(double v) { return csv::to_double(csv::fmt(v, kStoredDigits)); }

std::vector<double> corpus_descriptor(std::span<const Video> corpus, int n_topics) {
  if (n_topics < 1) throw std::invalid_argument("n_topics must be positive");
  std::vector<const Video*> sorted;
  for (const auto& v : corpus) sorted.push_back(&v);
  std::sort(sorted.begin(), sorted.end(), [](const Video* a, const Video* b) {
    if (a->topic != b->topic) return a->topic < b->topic;
    const double sa = video_score(*a), sb = video_score(*b);
    if (sa != sb) return sa < sb;
    return a->id < b->id;
  });
  std::vector<double> out;
  out.reserve(3 * corpus.size());
  for (const auto* v : sorted) {
    out.push_back(static_cast<double>(v->topic) / n_topics);
    out.push_back(v->length);
    out.push_back(video_score(*v));
  }
  return out;
}

std::vector<ExpertStateRecord> build_dataset(std::span<const expert::Trajectory> trajectories,
                                             const irl::Policy& policy, int n_topics) {
  std::vector<ExpertStateRecord> records;
  for (const auto& traj : trajectories) {
    for (const auto& step : traj.steps) {
      if (step.abstract_state < 0 || step.abstract_state >= policy.num_states())
        throw std::invalid_argument("trajectory state outside the policy's state space");
      ExpertStateRecord r;
      r.expert_id = traj.expert_id;
      for (double x : step.state.expert_state) r.e_s.push_back(canonical(x));
      for (double x : corpus_descriptor(step.state.video_state, n_topics)) r.e_c.push_back(canonical(x));
      const auto& resp = step.state.response;
      if (resp.has_click()) {
        r.response.clicked_topic = resp.clicked_topic.value_or(-1);
        r.response.evaluated_quality = canonical(resp.observed_quality);
      }
      r.response.watch_time = canonical(resp.watch_time);
      r.response.s_v = resp.evaluation ? canonical(resp.evaluation->mean()) : 0.0;
      r.response.engagement_rate = canonical(resp.engagement_rate);
      r.abstract_state = step.abstract_state;
      r.policy_action = policy.argmax(step.abstract_state);
      records.push_back(std::move(r));
    }
  }
  return records;
}

namespace {

std::string shape_line(const DatasetShape& s) {
  return "#config,n_topics=" + std::to_string(s.n_topics) + ",corpus_size=" + std::to_string(s.corpus_size) +
         ",states=" + std::to_string(s.n_states) + ",actions=" + std::to_string(s.n_actions);
}

std::string column_header(const DatasetShape& s) {
  std::string h = "expert_id,abstract_state,policy_action,clicked_topic,watch_time,s_v,engagement_rate,evaluated_quality";
  for (int i = 0; i < s.n_topics; ++i) h += ",e_s_" + std::to_string(i);
  for (std::size_t i = 0; i < 3 * s.corpus_size; ++i) h += ",e_c_" + std::to_string(i);
  return h;
}

}  // namespace

void save_dataset(std::span<const ExpertStateRecord> records, const DatasetShape& shape,
                  const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  out << shape_line(shape) << '\n' << column_header(shape) << '\n';
  auto num = [](double v) { return csv::fmt(v, kStoredDigits); };
  for (const auto& r : records) {
    if (r.e_s.size() != static_cast<std::size_t>(shape.n_topics) || r.e_c.size() != 3 * shape.corpus_size)
      throw std::invalid_argument("record does not match the dataset shape");
    out << r.expert_id << ',' << r.abstract_state << ',' << r.policy_action << ',' << r.response.clicked_topic << ','
        << num(r.response.watch_time) << ',' << num(r.response.s_v) << ',' << num(r.response.engagement_rate) << ','
        << num(r.response.evaluated_quality);
    for (double x : r.e_s) out << ',' << num(x);
    for (double x : r.e_c) out << ',' << num(x);
    out << '\n';
  }
}

std::vector<ExpertStateRecord> load_dataset(const std::filesystem::path& path, const DatasetShape& expected) {
  csv::Reader reader(path);
  std::string line;
  if (!reader.next(line) || line.rfind("#config,", 0) != 0) reader.fail("missing dataset config line");

  DatasetShape shape;
  try {
    auto f = csv::split(line);
    if (f.size() != 5) reader.fail("malformed config line");
    auto value = [&](const std::string& field, const std::string& key) {
      if (field.rfind(key + "=", 0) != 0) reader.fail("expected " + key);
      return csv::to_int(std::string_view(field).substr(key.size() + 1));
    };
    shape.n_topics = static_cast<int>(value(f[1], "n_topics"));
    shape.corpus_size = static_cast<std::size_t>(value(f[2], "corpus_size"));
    shape.n_states = static_cast<int>(value(f[3], "states"));
    shape.n_actions = static_cast<int>(value(f[4], "actions"));
  } catch (const std::invalid_argument& e) {
    reader.fail(e.what());
  }
  if (!(shape == expected))
    throw ConfigMismatch("dataset " + path.string() + " was built with " + shape_line(shape).substr(8) +
                         " but the current configuration is " + shape_line(expected).substr(8));
  if (!reader.next(line) || line != column_header(shape)) reader.fail("unexpected column header");

  const std::size_t width = 8 + static_cast<std::size_t>(shape.n_topics) + 3 * shape.corpus_size;
  std::vector<ExpertStateRecord> records;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto f = csv::split(line);
    if (f.size() != width)
      reader.fail("expected " + std::to_string(width) + " fields, got " + std::to_string(f.size()));
    try {
      ExpertStateRecord r;
      r.expert_id = static_cast<int>(csv::to_int(f[0]));
      r.abstract_state = static_cast<irl::StateId>(csv::to_int(f[1]));
      r.policy_action = static_cast<irl::ActionId>(csv::to_int(f[2]));
      r.response.clicked_topic = static_cast<int>(csv::to_int(f[3]));
      r.response.watch_time = csv::to_double(f[4]);
      r.response.s_v = csv::to_double(f[5]);
      r.response.engagement_rate = csv::to_double(f[6]);
      r.response.evaluated_quality = csv::to_double(f[7]);
      std::size_t i = 8;
      for (int k = 0; k < shape.n_topics; ++k) r.e_s.push_back(csv::to_double(f[i++]));
      for (std::size_t k = 0; k < 3 * shape.corpus_size; ++k) r.e_c.push_back(csv::to_double(f[i++]));
      if (r.abstract_state < 0 || r.abstract_state >= shape.n_states || r.policy_action < 0 ||
          r.policy_action >= shape.n_actions)
        reader.fail("abstract id out of range");
      records.push_back(std::move(r));
    } catch (const std::invalid_argument& e) {
      reader.fail(e.what());
    }
  }
  return records;
}

}  // namespace febr::dataset
