#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "febr/config.hpp"
#include "febr/errors.hpp"
#include "febr/experiment.hpp"

namespace fs = std::filesystem;
using namespace febr;

namespace {

enum Exit { kOk = 0, kConfig = 2, kMissing = 3, kRuntime = 4 };

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out_dir = "febr_out";
  std::string profile = "desk";
  std::string config_path;
  std::optional<int> sessions;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "master seed (default 42, or the config file's)");
  cmd->add_option("--out-dir", c.out_dir, "directory for artifacts and results")->capture_default_str();
  cmd->add_option("--profile", c.profile, "desk or paper")->capture_default_str();
  cmd->add_option("--config", c.config_path, "key = value config file applied on top of the profile");
  cmd->add_option("--sessions", c.sessions, "override users.sessions");
  cmd->add_option("--threads", c.threads, "override experiment.threads");
}

ExperimentConfig resolve(const Common& c) {
  auto cfg = profile_config(c.profile);
  if (!c.config_path.empty()) cfg = load_config(c.config_path, cfg);
  if (c.seed) cfg.seed = *c.seed;
  if (c.sessions) cfg.sessions = *c.sessions;
  if (c.threads) cfg.threads = *c.threads;
  validate(cfg);
  return cfg;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_summary(const report::Report& r) {
  for (const auto& a : r.arms)
    std::printf("%-10s sessions=%zu mean_Q_T=%.4f mean_Q_e=%.4f mean_W_T=%.2f guided=%.3f\n", a.arm.c_str(),
                a.sessions, a.mean_q_t, a.mean_q_e, a.mean_w_t, a.guided_fraction);
  for (const auto& d : r.paired)
    std::printf("%s - %-10s dQ_T=%+.4f dW_T=%+.2f\n", r.reference.c_str(), d.arm.c_str(), d.q_t, d.w_t);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expert-guided recommendation simulator"};
  app.require_subcommand(1);

  Common common;
  std::string agent;
  auto* gen_catalog = app.add_subcommand("gen-catalog", "sample the video catalog");
  auto* gen_traj = app.add_subcommand("gen-trajectories", "simulate expert sessions on the catalog");
  auto* train_irl = app.add_subcommand("train-irl", "learn the expert reward and policy");
  auto* build_dataset = app.add_subcommand("build-dataset", "build the expert state dataset");
  auto* simulate = app.add_subcommand("simulate", "run user sessions for one agent");
  simulate->add_option("--agent", agent, "febr, recfsq, recpctr, recbandit, recnaive or random")->required();
  auto* compare = app.add_subcommand("compare", "run the whole pipeline and every agent");
  auto* report_cmd = app.add_subcommand("report", "summarize saved per-session metrics");
  for (auto* cmd : {gen_catalog, gen_traj, train_irl, build_dataset, simulate, compare, report_cmd})
    add_common(cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    const auto cfg = resolve(common);
    const fs::path dir = common.out_dir;
    const auto t0 = std::chrono::steady_clock::now();

    if (*gen_catalog) {
      experiment::stage_catalog(cfg, dir);
    } else if (*gen_traj) {
      experiment::stage_trajectories(cfg, dir);
    } else if (*train_irl) {
      const auto t = experiment::stage_train(cfg, dir);
      std::printf("final matching residual %.6g over %zu iterations\n", t.result.final_residual,
                  t.result.trace.size());
    } else if (*build_dataset) {
      experiment::stage_dataset(cfg, dir);
    } else if (*simulate) {
      auto run_cfg = cfg;
      run_cfg.agents = {agent};
      const auto artifacts = experiment::load_artifacts(run_cfg, dir, agent == "febr");
      const auto result = experiment::run_arm(agent, run_cfg, artifacts, true);
      experiment::write_arm(result, dir);
      print_summary(experiment::build_report(run_cfg, {{agent, result.rows}}));
    } else if (*compare) {
      print_summary(experiment::run_pipeline(cfg, dir).report);
    } else if (*report_cmd) {
      print_summary(experiment::stage_report(cfg, dir));
    }
    std::fprintf(stderr, "done in %.1f s\n", seconds_since(t0));
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ConfigMismatch& e) {
    std::cerr << "config mismatch: " << e.what() << '\n';
    return kConfig;
  } catch (const MissingArtifact& e) {
    std::cerr << "missing artifact: " << e.what() << '\n';
    return kMissing;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
