#include "febr/report.hpp"

#include <cstdio>
#include <map>
#include <stdexcept>

#include "febr/csv.hpp"

namespace febr::report {

PairedDifference paired_difference(std::span<const metrics::MetricsRow> reference,
                                   std::span<const metrics::MetricsRow> arm, const std::string& arm_name) {
  if (reference.size() != arm.size()) throw std::invalid_argument("arms cover different numbers of sessions");
  std::map<int, const metrics::MetricsRow*> by_id;
  for (const auto& r : arm) by_id[r.session_id] = &r;
  PairedDifference d;
  d.arm = arm_name;
  for (const auto& r : reference) {
    auto it = by_id.find(r.session_id);
    if (it == by_id.end()) throw std::invalid_argument("session " + std::to_string(r.session_id) + " missing");
    d.q_t += r.q_t - it->second->q_t;
    d.w_t += r.w_t - it->second->w_t;
    ++d.pairs;
  }
  if (d.pairs > 0) {
    d.q_t /= static_cast<double>(d.pairs);
    d.w_t /= static_cast<double>(d.pairs);
  }
  return d;
}

namespace {

void write_cdf(const std::filesystem::path& path, const std::string& column, const Report& report,
               std::vector<double> metrics::ArmSummary::*grid) {
  auto out = csv::open_out(path);
  out << "arm,quantile," << column << '\n';
  for (const auto& a : report.arms) {
    const auto& g = a.*grid;
    for (std::size_t i = 0; i < g.size(); ++i)
      out << a.arm << ',' << csv::fmt(static_cast<double>(i) / static_cast<double>(g.size() - 1)) << ','
          << csv::fmt(g[i]) << '\n';
  }
}

}  // namespace

void write_report(const Report& report, const std::filesystem::path& dir) {
  write_cdf(dir / "qt_cdf.csv", "Q_T", report, &metrics::ArmSummary::q_t_cdf);
  write_cdf(dir / "qe_cdf.csv", "Q_e", report, &metrics::ArmSummary::q_e_cdf);
  write_cdf(dir / "wt_cdf.csv", "W_T", report, &metrics::ArmSummary::w_t_cdf);

  {
    auto out = csv::open_out(dir / "wt_by_arm.csv");
    out << "arm,sessions,mean_W_T,median_W_T\n";
    for (const auto& a : report.arms)
      out << a.arm << ',' << a.sessions << ',' << csv::fmt(a.mean_w_t) << ',' << csv::fmt(a.median_w_t) << '\n';
  }
  {
    auto out = csv::open_out(dir / "qt_by_arm.csv");
    out << "arm,sessions,mean_Q_T,median_Q_T,mean_Q_e,median_Q_e,q_e_sessions,guided_fraction\n";
    for (const auto& a : report.arms)
      out << a.arm << ',' << a.sessions << ',' << csv::fmt(a.mean_q_t) << ',' << csv::fmt(a.median_q_t) << ','
          << csv::fmt(a.mean_q_e) << ',' << csv::fmt(a.median_q_e) << ',' << a.q_e_sessions << ','
          << csv::fmt(a.guided_fraction) << '\n';
  }

  auto out = csv::open_out(dir / "summary.txt");
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %9s %10s %10s %10s %10s %10s %8s %7s\n", "arm", "sessions", "mean Q_T",
                "median Q_T", "mean Q_e", "mean W_T", "median W_T", "length", "guided");
  out << line;
  for (const auto& a : report.arms) {
    std::snprintf(line, sizeof line, "%-10s %9zu %10.4f %10.4f %10.4f %10.4f %10.4f %8.1f %7.3f\n", a.arm.c_str(),
                  a.sessions, a.mean_q_t, a.median_q_t, a.mean_q_e, a.mean_w_t, a.median_w_t, a.mean_length,
                  a.guided_fraction);
    out << line;
  }
  if (!report.paired.empty()) {
    out << "\npaired differences (" << report.reference << " minus arm, per-session mean)\n";
    std::snprintf(line, sizeof line, "%-10s %9s %10s %10s\n", "arm", "pairs", "dQ_T", "dW_T");
    out << line;
    for (const auto& d : report.paired) {
      std::snprintf(line, sizeof line, "%-10s %9zu %10.4f %10.4f\n", d.arm.c_str(), d.pairs, d.q_t, d.w_t);
      out << line;
    }
  }
  if (!report.config_echo.empty()) out << "\n# configuration\n" << report.config_echo;
}

}  // namespace febr::report
