#include "febr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace febr::metrics {

MetricsRow compute_metrics(const user::SessionLog& log, int session_id, const MetricsOptions& options) {
  if (log.steps.empty()) throw std::invalid_argument("empty session log");
  MetricsRow row;
  row.session_id = session_id;
  row.length = static_cast<int>(log.steps.size());
  double guided_sum = 0.0, total_sum = 0.0;
  for (const auto& s : log.steps) {
    row.w_t += s.response.watch_time;
    if (s.expert_guided) ++row.expert_guided_count;
    if (!s.quality) continue;
    ++row.clicked_count;
    total_sum += *s.quality;
    if (s.expert_guided) {
      ++row.guided_clicked_count;
      guided_sum += *s.quality;
    } else {
      row.q_prime += *s.quality;
    }
  }
  row.q_e_defined = row.guided_clicked_count > 0;
  row.q_e = row.q_e_defined ? guided_sum / row.guided_clicked_count : 0.0;
  const int denom = options.count_no_click_as_zero ? row.length : row.clicked_count;
  row.q_t = denom > 0 ? total_sum / denom : 0.0;
  return row;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

namespace {

double sorted_quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return frac == 0.0 ? sorted[lo] : sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level outside [0,1]");
  std::sort(xs.begin(), xs.end());
  return sorted_quantile(xs, q);
}

std::vector<double> quantile_grid(std::span<const double> xs, int points) {
  if (xs.empty()) return {};
  if (points < 2) throw std::invalid_argument("need at least two quantile points");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) out.push_back(sorted_quantile(sorted, static_cast<double>(i) / (points - 1)));
  // interpolation can be off by an ulp between equal neighbours
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = std::max(out[i], out[i - 1]);
  return out;
}

ArmSummary summarize(const std::string& arm, std::span<const MetricsRow> rows) {
  ArmSummary s;
  s.arm = arm;
  s.sessions = rows.size();
  if (rows.empty()) return s;
  std::vector<double> qt, wt, qe;
  long long guided = 0, length = 0;
  for (const auto& r : rows) {
    qt.push_back(r.q_t);
    wt.push_back(r.w_t);
    if (r.q_e_defined) qe.push_back(r.q_e);
    guided += r.expert_guided_count;
    length += r.length;
  }
  s.mean_q_t = mean(qt);
  s.median_q_t = quantile(qt, 0.5);
  s.mean_w_t = mean(wt);
  s.median_w_t = quantile(wt, 0.5);
  s.q_e_sessions = qe.size();
  if (!qe.empty()) {
    s.mean_q_e = mean(qe);
    s.median_q_e = quantile(qe, 0.5);
  }
  s.mean_length = static_cast<double>(length) / static_cast<double>(rows.size());
  s.guided_fraction = length > 0 ? static_cast<double>(guided) / static_cast<double>(length) : 0.0;
  s.q_t_cdf = quantile_grid(qt);
  s.w_t_cdf = quantile_grid(wt);
  s.q_e_cdf = quantile_grid(qe);
  return s;
}

}  // namespace febr::metrics
