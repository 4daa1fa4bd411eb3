#pragma once

#include <span>
#include <vector>

#include "febr/user_env.hpp"

namespace febr::metrics {

struct MetricsRow {
  int session_id = 0;
  double q_e = 0.0;
  bool q_e_defined = false;  // false when no expert-guided step was clicked
  double q_t = 0.0;
  double w_t = 0.0;
  int expert_guided_count = 0;  // |S_e|, guided steps whether clicked or not
  int length = 0;               // l
  int clicked_count = 0;
  int guided_clicked_count = 0;
  double q_prime = 0.0;  // quality sum over clicked steps that were not expert-guided
};

struct MetricsOptions {
  /// Off: Q_T averages over clicked steps. On: every step counts, no-click as 0.
  bool count_no_click_as_zero = false;
};

/// Throws std::invalid_argument for an empty log.
MetricsRow compute_metrics(const user::SessionLog& log, int session_id = 0, const MetricsOptions& options = {});

double mean(std::span<const double> xs);
/// Linear-interpolated order statistic, q in [0,1].
double quantile(std::vector<double> xs, double q);
/// Values at quantiles 0, 0.01, ..., 1.
std::vector<double> quantile_grid(std::span<const double> xs, int points = 101);

struct ArmSummary {
  std::string arm;
  std::size_t sessions = 0;
  double mean_q_t = 0.0, median_q_t = 0.0;
  double mean_w_t = 0.0, median_w_t = 0.0;
  double mean_q_e = 0.0, median_q_e = 0.0;  // over sessions with a defined Q_e
  std::size_t q_e_sessions = 0;
  double mean_length = 0.0;
  double guided_fraction = 0.0;  // sum |S_e| / sum l
  std::vector<double> q_t_cdf, w_t_cdf, q_e_cdf;
};

ArmSummary summarize(const std::string& arm, std::span<const MetricsRow> rows);

}  // namespace febr::metrics
