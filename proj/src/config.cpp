#include "febr/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <type_traits>
#include <sstream>

#include "febr/csv.hpp"
#include "febr/errors.hpp"

namespace febr {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

struct Field {
  std::string name;  // section.key
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
T parse_value(const std::string& s) {
  if constexpr (std::is_same_v<T, std::string>) {
    return s;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw std::invalid_argument("expected a boolean");
  } else if constexpr (std::is_floating_point_v<T>) {
    return csv::to_double(s);
  } else {
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
      throw std::invalid_argument(std::is_unsigned_v<T> ? "expected a nonnegative integer" : "expected an integer");
    return v;
  }
}

template <class T>
std::string show(const T& v) {
  if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_floating_point_v<T>) {
    return csv::fmt(v);
  } else {
    return std::to_string(v);
  }
}

template <class T, class Access>
Field field(std::string name, Access access) {
  return {std::move(name), [access](ExperimentConfig& c, const std::string& v) { access(c) = parse_value<T>(v); },
          [access](const ExperimentConfig& c) {
            auto copy = c;
            return show(static_cast<const T&>(access(copy)));
          }};
}

#define FEBR_FIELD(T, name, member) field<T>(name, [](ExperimentConfig& c) -> T& { return c.member; })

const std::vector<Field>& fields() {
  static const std::vector<Field> all = [] {
    std::vector<Field> f = {
        FEBR_FIELD(std::string, "general.profile", profile),
        FEBR_FIELD(std::uint64_t, "general.seed", seed),
        FEBR_FIELD(int, "general.n_topics", n_topics),
        FEBR_FIELD(std::size_t, "general.slate_size", slate_size),
        FEBR_FIELD(double, "general.video_length", video_length),
        FEBR_FIELD(double, "general.gamma", irl.gamma),
        FEBR_FIELD(std::size_t, "catalog.size", catalog_size),
        FEBR_FIELD(double, "population.dominant_low", interest_prior.dominant_low),
        FEBR_FIELD(double, "population.dominant_high", interest_prior.dominant_high),
        FEBR_FIELD(double, "population.background_sd", interest_prior.background_sd),
        FEBR_FIELD(int, "experts.count", n_experts),
        FEBR_FIELD(int, "experts.trajectories_per_expert", trajectories_per_expert),
        FEBR_FIELD(int, "experts.max_steps", expert_env.max_steps),
        FEBR_FIELD(double, "experts.session_budget", expert_budget),
        FEBR_FIELD(double, "experts.quality_factor_low", quality_factor_low),
        FEBR_FIELD(double, "experts.quality_factor_high", quality_factor_high),
        FEBR_FIELD(double, "experts.behavior_epsilon", behavior_epsilon),
        FEBR_FIELD(std::size_t, "experts.corpus_size", expert_env.corpus_size),
        FEBR_FIELD(double, "experts.browse_cost", expert_env.browse_cost),
        FEBR_FIELD(double, "experts.sigma_eval", expert_env.sigma_eval),
        FEBR_FIELD(double, "experts.beta_quality", expert_env.beta_quality),
        FEBR_FIELD(double, "experts.beta_topic", expert_env.beta_topic),
        FEBR_FIELD(double, "experts.beta_expertise", expert_env.beta_expertise),
        FEBR_FIELD(double, "experts.no_click_mass", expert_env.no_click_mass),
        FEBR_FIELD(double, "experts.retrieval_noise", expert_env.retrieval_noise),
        FEBR_FIELD(int, "irl.iterations", irl.iterations),
        FEBR_FIELD(double, "irl.learning_rate", irl.learning_rate),
        FEBR_FIELD(double, "irl.lr_decay", irl.lr_decay),
        FEBR_FIELD(double, "irl.vi_tol", irl.vi_tol),
        FEBR_FIELD(int, "irl.vi_max_iters", irl.vi_max_iters),
        FEBR_FIELD(int, "irl.horizon", irl.horizon),
        FEBR_FIELD(double, "irl.transition_smoothing", transition_smoothing),
        FEBR_FIELD(double, "classifier.th1", classifier.th1),
        FEBR_FIELD(double, "classifier.th2", classifier.th2),
        FEBR_FIELD(bool, "classifier.nearest_neighbor", classifier.nearest_neighbor),
        FEBR_FIELD(int, "users.sessions", sessions),
        FEBR_FIELD(double, "users.time_budget", user_defaults.time_budget),
        FEBR_FIELD(double, "users.interest_step", user_defaults.interest_step),
        FEBR_FIELD(double, "users.quality_sensitivity", user_defaults.quality_sensitivity),
        FEBR_FIELD(double, "users.beta_interest", user_env.beta_interest),
        FEBR_FIELD(double, "users.no_click_mass", user_env.no_click_mass),
        FEBR_FIELD(double, "users.browse_cost", user_env.browse_cost),
        FEBR_FIELD(double, "users.budget_bonus", user_env.budget_bonus),
        FEBR_FIELD(std::size_t, "users.corpus_size", user_env.corpus_size),
        FEBR_FIELD(double, "users.retrieval_noise", user_env.retrieval_noise),
        FEBR_FIELD(int, "users.max_session_steps", user_env.max_session_steps),
        FEBR_FIELD(double, "baselines.fsq_learning_rate", fsq.lr),
        FEBR_FIELD(double, "baselines.fsq_epsilon", fsq.epsilon),
        FEBR_FIELD(double, "baselines.fsq_epsilon_decay", fsq.epsilon_decay),
        FEBR_FIELD(double, "baselines.fsq_epsilon_floor", fsq.epsilon_floor),
        FEBR_FIELD(double, "baselines.fsq_quality_weight", fsq_quality_weight),
        FEBR_FIELD(double, "baselines.bandit_c", bandit_c),
        FEBR_FIELD(double, "baselines.naive_rating_threshold", naive.rating_threshold),
        FEBR_FIELD(bool, "baselines.naive_positive_interest", naive.require_positive_interest),
        FEBR_FIELD(bool, "metrics.count_no_click_as_zero", metrics.count_no_click_as_zero),
        FEBR_FIELD(int, "experiment.threads", threads),
    };
    f.push_back({"irl.features",
                 [](ExperimentConfig& c, const std::string& v) { c.features = irl::feature_kind_from_string(v); },
                 [](const ExperimentConfig& c) { return irl::to_string(c.features); }});
    f.push_back({"experiment.agents",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.agents.clear();
                   for (auto& a : csv::split(v)) c.agents.push_back(trim(a));
                 },
                 [](const ExperimentConfig& c) { return csv::join(c.agents); }});
    return f;
  }();
  return all;
}

#undef FEBR_FIELD

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid configuration: " + what);
}

}  // namespace

ExperimentConfig profile_config(const std::string& name) {
  ExperimentConfig c;
  c.profile = name;
  if (name == "desk") {
    c.catalog_size = 10000;
    c.irl.iterations = 2000;
    c.sessions = 500;
  } else if (name == "paper") {
    c.catalog_size = 100000;
    c.irl.iterations = 10000;
    c.sessions = 3000;
  } else {
    throw ConfigError("unknown profile '" + name + "' (expected desk or paper)");
  }
  return c;
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base, const std::string& source) {
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto where = source + ":" + std::to_string(lineno) + ": ";
    if (auto hash = line.find_first_of("#;"); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto name = section.empty() ? key : section + "." + key;
    const auto& all = fields();
    auto it = std::find_if(all.begin(), all.end(), [&](const Field& f) { return f.name == name; });
    if (it == all.end()) throw ConfigError(where + "unknown key '" + name + "'");
    try {
      it->set(base, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + name + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base), path.string());
}

void validate(const ExperimentConfig& c) {
  require(c.n_topics >= 1, "general.n_topics must be positive");
  require(c.slate_size >= 1, "general.slate_size must be positive");
  require(c.video_length > 0.0, "general.video_length must be positive");
  require(c.irl.gamma >= 0.0 && c.irl.gamma < 1.0, "general.gamma must be in [0, 1)");
  require(c.user_env.corpus_size >= c.slate_size, "users.corpus_size must be at least the slate size");
  require(c.expert_env.corpus_size >= c.slate_size, "experts.corpus_size must be at least the slate size");
  require(c.catalog_size >= std::max(c.user_env.corpus_size, c.expert_env.corpus_size),
          "catalog.size must be at least the corpus size");
  require(c.interest_prior.dominant_low <= c.interest_prior.dominant_high, "population.dominant_low > dominant_high");
  require(c.interest_prior.background_sd >= 0.0, "population.background_sd must be nonnegative");
  require(c.n_experts >= 1, "experts.count must be positive");
  require(c.trajectories_per_expert >= 1, "experts.trajectories_per_expert must be positive");
  require(c.expert_env.max_steps >= 1, "experts.max_steps must be positive");
  require(c.expert_budget > 0.0, "experts.session_budget must be positive");
  require(0.0 <= c.quality_factor_low && c.quality_factor_low <= c.quality_factor_high && c.quality_factor_high <= 1.0,
          "experts quality factor bounds must satisfy 0 <= low <= high <= 1");
  require(c.behavior_epsilon >= 0.0 && c.behavior_epsilon <= 1.0, "experts.behavior_epsilon must be in [0, 1]");
  require(c.expert_env.browse_cost > 0.0, "experts.browse_cost must be positive");
  require(c.expert_env.sigma_eval >= 0.0, "experts.sigma_eval must be nonnegative");
  require(c.expert_env.no_click_mass >= 0.0, "experts.no_click_mass must be nonnegative");
  require(c.irl.iterations >= 0, "irl.iterations must be nonnegative");
  require(c.irl.learning_rate > 0.0, "irl.learning_rate must be positive");
  require(c.irl.lr_decay > 0.0 && c.irl.lr_decay <= 1.0, "irl.lr_decay must be in (0, 1]");
  require(c.irl.vi_tol > 0.0, "irl.vi_tol must be positive");
  require(c.irl.horizon >= 0, "irl.horizon must be nonnegative");
  require(c.transition_smoothing >= 0.0, "irl.transition_smoothing must be nonnegative");
  require(c.classifier.th1 >= 0.0 && c.classifier.th2 >= 0.0, "classifier margins must be nonnegative");
  require(c.sessions >= 0, "users.sessions must be nonnegative");
  require(c.user_defaults.time_budget > 0.0, "users.time_budget must be positive");
  require(c.user_env.browse_cost > 0.0, "users.browse_cost must be positive");
  require(c.user_env.no_click_mass >= 0.0, "users.no_click_mass must be nonnegative");
  require(c.user_env.budget_bonus >= 0.0 && c.user_env.budget_bonus < 1.0, "users.budget_bonus must be in [0, 1)");
  require(c.user_env.max_session_steps >= 1, "users.max_session_steps must be positive");
  require(c.fsq.lr > 0.0 && c.fsq.lr <= 1.0, "baselines.fsq_learning_rate must be in (0, 1]");
  require(c.fsq.epsilon >= 0.0 && c.fsq.epsilon <= 1.0, "baselines.fsq_epsilon must be in [0, 1]");
  require(c.fsq.epsilon_decay > 0.0 && c.fsq.epsilon_decay <= 1.0, "baselines.fsq_epsilon_decay must be in (0, 1]");
  require(c.bandit_c >= 0.0, "baselines.bandit_c must be nonnegative");
  require(!c.agents.empty(), "experiment.agents must not be empty");
  for (const auto& a : c.agents)
    require(std::find(kAllAgents.begin(), kAllAgents.end(), a) != kAllAgents.end(), "unknown agent '" + a + "'");
  require(c.threads >= 0, "experiment.threads must be nonnegative");
}

std::string echo(const ExperimentConfig& config) {
  std::vector<std::string> sections;
  for (const auto& f : fields()) {
    const auto s = f.name.substr(0, f.name.find('.'));
    if (std::find(sections.begin(), sections.end(), s) == sections.end()) sections.push_back(s);
  }
  std::string out;
  for (const auto& s : sections) {
    out += (out.empty() ? "[" : "\n[") + s + "]\n";
    for (const auto& f : fields())
      if (f.name.compare(0, s.size() + 1, s + ".") == 0) out += f.name.substr(s.size() + 1) + " = " + f.get(config) + "\n";
  }
  return out;
}

}  // namespace febr
