#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "febr/config.hpp"
#include "febr/dataset.hpp"
#include "febr/expert_env.hpp"
#include "febr/maxent.hpp"
#include "febr/metrics.hpp"
#include "febr/report.hpp"

namespace febr::experiment {

/// File names inside an output directory.
namespace files {
inline constexpr const char* kCatalog = "catalog.csv";
inline constexpr const char* kEvaluatedCatalog = "catalog_evaluated.csv";
inline constexpr const char* kExperts = "experts.csv";
inline constexpr const char* kTrajectories = "trajectories.csv";
inline constexpr const char* kModel = "irl_model.txt";
inline constexpr const char* kTrace = "irl_trace.csv";
inline constexpr const char* kTraining = "irl_summary.txt";
inline constexpr const char* kDataset = "dataset.csv";
inline constexpr const char* kConfigEcho = "config_used.ini";
std::string sessions(const std::string& arm);
std::string metrics(const std::string& arm);
}  // namespace files

/// Independent stream seed for a named pipeline stage.
std::uint64_t stage_seed(std::uint64_t seed, const std::string& stage);

Catalog make_catalog(const ExperimentConfig& config);

struct Demonstrations {
  std::vector<expert::ExpertProfile> profiles;
  std::vector<expert::Trajectory> trajectories;
  Catalog catalog;  // with the experts' evaluations applied
};

Demonstrations make_demonstrations(const ExperimentConfig& config, Catalog catalog);

struct Training {
  irl::TransitionModel transitions{1, 1};
  irl::MaxEntResult result;
  irl::LearnedModel model;
};

Training train(const ExperimentConfig& config, const std::vector<expert::Trajectory>& trajectories);

std::vector<dataset::ExpertStateRecord> make_dataset(const ExperimentConfig& config,
                                                     const std::vector<expert::Trajectory>& trajectories,
                                                     const irl::Policy& policy);

dataset::DatasetShape dataset_shape(const ExperimentConfig& config);

/// Everything the simulation arms consume.
struct Artifacts {
  Catalog catalog;
  std::shared_ptr<const std::vector<dataset::ExpertStateRecord>> records;  // may be null without a FEBR arm
};

/// The i-th simulated user; identical for every arm.
user::UserProfile session_user(const ExperimentConfig& config, int session);
std::uint64_t profile_hash(const user::UserProfile& profile);

struct ArmResult {
  std::string arm;
  std::vector<metrics::MetricsRow> rows;
  std::vector<std::uint64_t> profile_hashes;
  std::string session_csv;  // per-step rows, filled when logs are kept
};

std::unique_ptr<user::Agent> make_agent(const std::string& arm, const ExperimentConfig& config,
                                        const Artifacts& artifacts);

/// Runs `config.sessions` sessions for one arm, in session order. The agent
/// is created once, so learning agents carry state across sessions.
ArmResult run_arm(const std::string& arm, const ExperimentConfig& config, const Artifacts& artifacts,
                  bool keep_logs = false);

/// Runs every configured arm, one thread per arm. Results come back in
/// config.agents order and do not depend on scheduling. Throws if the user
/// sequences of two arms differ.
std::vector<ArmResult> run_experiment(const ExperimentConfig& config, const Artifacts& artifacts,
                                      bool keep_logs = false);

// File-backed pipeline stages. Each reads the previous stage's outputs from
// `dir` and throws MissingArtifact naming the command that produces them.

void stage_catalog(const ExperimentConfig& config, const std::filesystem::path& dir);
void stage_trajectories(const ExperimentConfig& config, const std::filesystem::path& dir);
Training stage_train(const ExperimentConfig& config, const std::filesystem::path& dir);
void stage_dataset(const ExperimentConfig& config, const std::filesystem::path& dir);
Artifacts load_artifacts(const ExperimentConfig& config, const std::filesystem::path& dir, bool need_dataset);
void write_arm(const ArmResult& result, const std::filesystem::path& dir);
std::vector<metrics::MetricsRow> read_metrics(const std::filesystem::path& path);
void write_config_echo(const ExperimentConfig& config, const std::filesystem::path& dir);

/// Summaries for each arm plus paired differences against the febr arm when
/// it is present.
report::Report build_report(const ExperimentConfig& config,
                            const std::vector<std::pair<std::string, std::vector<metrics::MetricsRow>>>& arms);

/// Reads metrics_<arm>.csv for every configured arm and writes the report files.
report::Report stage_report(const ExperimentConfig& config, const std::filesystem::path& dir);

struct PipelineResult {
  Training training;
  std::vector<ArmResult> arms;
  report::Report report;
};

/// Every stage end to end: catalog, demonstrations, IRL, dataset, all arms,
/// report. Each stage's output is written to `dir` and the arms run on the
/// artifacts as read back from disk.
PipelineResult run_pipeline(const ExperimentConfig& config, const std::filesystem::path& dir);

}  // namespace febr::experiment
