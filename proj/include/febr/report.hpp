#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "febr/metrics.hpp"

namespace febr::report {

/// Mean over sessions of (reference - arm), pairing rows by session id.
struct PairedDifference {
  std::string arm;
  std::size_t pairs = 0;
  double q_t = 0.0;
  double w_t = 0.0;
};

/// Throws std::invalid_argument when the two arms cover different sessions.
PairedDifference paired_difference(std::span<const metrics::MetricsRow> reference,
                                   std::span<const metrics::MetricsRow> arm, const std::string& arm_name);

struct Report {
  std::vector<metrics::ArmSummary> arms;
  std::string reference;  // arm the paired differences are taken against
  std::vector<PairedDifference> paired;
  std::string config_echo;
};

/// Writes qt_cdf.csv, qe_cdf.csv, wt_cdf.csv, wt_by_arm.csv, qt_by_arm.csv
/// and summary.txt into `dir`.
void write_report(const Report& report, const std::filesystem::path& dir);

}  // namespace febr::report
