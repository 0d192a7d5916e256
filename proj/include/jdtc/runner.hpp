#pragma once

#include "jdtc/config.hpp"
#include "jdtc/particles.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace jdtc {

/// Metrics for one scan's estimate set.
struct ScanMetrics {
  int scan = 0;
  std::vector<double> ospa;        // per class, m
  double ospa_all = 0.0;           // class-blind, m
  std::vector<int> true_counts;    // per class
  std::vector<int> counts;         // rounded estimated cardinality per class
  std::vector<double> masses;      // PHD mass per class
};

struct StageTiming {
  double predict_s = 0.0;
  double update_s = 0.0;
  double resample_s = 0.0;
  double smooth_s = 0.0;
  double estimate_s = 0.0;
};

/// Row k: filter metrics for scan k and smoother metrics for scan k - L
/// (absent for k < L or with the smoother disabled).
struct ScanRow {
  int scan = 0;
  double time_s = 0.0;
  ScanMetrics filter;
  std::optional<ScanMetrics> smoother;
  StageTiming timing;
};

struct RunReport {
  std::uint64_t seed = 0;
  int lag = 0;
  int num_classes = 0;
  double dt_s = 0.0;
  std::vector<ScanRow> rows;

  /// Smoother metrics of scan t, wherever in the report they were emitted.
  [[nodiscard]] const ScanMetrics* smoothed(int scan) const;
};

/// Called with a stage name ("predicted", "updated", "filtered", "smoothed")
/// and the intensity at that point.
using SnapshotHook = std::function<void(const std::string& stage, const ParticleIntensity&)>;

RunReport run_once(const ExperimentConfig& cfg, std::uint64_t seed, const SnapshotHook& hook = {});
RunReport run_once(const std::filesystem::path& scenario_path, const Overrides& overrides, std::uint64_t seed);

/// Runs with seeds base_seed + i; `threads` <= 0 uses the hardware concurrency.
std::vector<RunReport> run_monte_carlo(const ExperimentConfig& cfg, int runs, std::uint64_t base_seed,
                                       int threads = 0);

/// Names of the numeric per-row columns, in CSV order after scan_index and time_s.
std::vector<std::string> metric_columns(int num_classes);
/// Values of those columns for one row; NaN where the smoother is absent.
std::vector<double> metric_values(const ScanRow& row, int num_classes);

struct AggregateReport {
  int runs = 0;
  int num_classes = 0;
  int lag = 0;
  std::vector<int> scans;
  std::vector<double> times;
  std::vector<std::string> columns;
  /// [row][column]; NaN where no run has a value.
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> stddev;

  int window_first = 0;
  int window_last = 0;
  /// Scan-aligned combined OSPA averaged over runs and the window.
  double filter_ospa_window = 0.0;
  double smoother_ospa_window = 0.0;
  /// 1 - smoother / filter over the window.
  double ospa_reduction = 0.0;
  /// Largest per-scan reduction inside the window.
  double max_scan_reduction = 0.0;
};

AggregateReport aggregate(const std::vector<RunReport>& reports, int window_first, int window_last);

void write_run_csv(const RunReport& report, std::ostream& out);
void write_timing_csv(const RunReport& report, std::ostream& out);
void write_aggregate_csv(const AggregateReport& agg, std::ostream& out);
std::string summary_text(const AggregateReport& agg);

}  // namespace jdtc
