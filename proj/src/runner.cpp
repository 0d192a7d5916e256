#include "jdtc/runner.hpp"

#include "jdtc/estimation.hpp"
#include "jdtc/metrics.hpp"
#include "jdtc/phd_filter.hpp"
#include "jdtc/scenario.hpp"
#include "jdtc/smoother.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace jdtc {

namespace {

constexpr std::uint64_t kFilterStream = 0x66696c74;
constexpr std::uint64_t kExtractStream = 0x65787472;
constexpr std::uint64_t kSmootherStream = 0x736d6f6f;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ScanMetrics evaluate(const ParticleIntensity& intensity, const GroundTruth& truth, int num_classes,
                     const ExperimentConfig& cfg, std::uint64_t seed) {
  ScanMetrics m;
  m.scan = intensity.scan;
  Rng rng = make_stream(seed, kExtractStream, static_cast<std::uint64_t>(intensity.scan));
  const auto extraction = extract_states(intensity, rng, cfg.extraction);
  const auto ospa = per_class_ospa(extraction.estimates, truth.positions(intensity.scan), num_classes, cfg.ospa);
  m.ospa = ospa.per_class;
  m.ospa_all = ospa.combined;
  m.true_counts = truth.class_counts(intensity.scan, num_classes);
  const auto card = estimate_cardinality(intensity);
  m.counts = card.counts;
  m.masses = card.masses;
  return m;
}

std::string format_value(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string format_count(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.0f", v);
  return buf;
}

}  // namespace

const ScanMetrics* RunReport::smoothed(int scan) const {
  const auto row = static_cast<std::size_t>(scan + lag);
  if (scan < 0 || row >= rows.size() || !rows[row].smoother) return nullptr;
  return &*rows[row].smoother;
}

RunReport run_once(const ExperimentConfig& cfg, std::uint64_t seed, const SnapshotHook& hook) {
  cfg.validate();
  const auto& sc = cfg.scenario;
  const TargetModels models = build_models(sc);
  const auto sensors = build_sensor_models(sc);
  const auto order = resolve_sensor_order(sensors, cfg.filter.sensor_order);
  const int nc = sc.num_classes();

  const GroundTruth truth = generate_truth(sc);
  const auto measurements = generate_measurements(truth, sc, seed);

  RunReport report;
  report.seed = seed;
  report.lag = cfg.smoother.lag;
  report.num_classes = nc;
  report.dt_s = sc.dt_s;

  Rng rng = make_stream(seed, kFilterStream, 0);
  SmootherWindow window(cfg.smoother.lag);
  ParticleIntensity prior(nc, -1);

  for (int k = 0; k < sc.num_scans(); ++k) {
    ScanRow row;
    row.scan = k;
    row.time_s = sc.time_of(k);

    auto t0 = Clock::now();
    ParticleIntensity predicted = predict(prior, models, cfg.filter, rng);
    row.timing.predict_s = seconds_since(t0);
    if (hook) hook("predicted", predicted);

    t0 = Clock::now();
    ParticleIntensity updated = update(predicted, measurements[static_cast<std::size_t>(k)], sensors, order);
    row.timing.update_s = seconds_since(t0);
    if (hook) hook("updated", updated);

    t0 = Clock::now();
    ParticleIntensity filtered = resample(updated, cfg.filter.resampling, rng);
    row.timing.resample_s = seconds_since(t0);
    if (hook) hook("filtered", filtered);

    t0 = Clock::now();
    row.filter = evaluate(filtered, truth, nc, cfg, seed);
    row.timing.estimate_s = seconds_since(t0);

    if (cfg.smoother_enabled) {
      window.push(filtered);
      if (window.full()) {
        t0 = Clock::now();
        ParticleIntensity smoothed = smooth_window(window, models, cfg.smoother.gating);
        if (cfg.smoother.lag > 0) {
          Rng srng = make_stream(seed, kSmootherStream, static_cast<std::uint64_t>(smoothed.scan));
          smoothed = resample_smoothed(smoothed, cfg.filter.resampling, srng);
        }
        row.timing.smooth_s = seconds_since(t0);
        if (hook) hook("smoothed", smoothed);

        t0 = Clock::now();
        row.smoother = evaluate(smoothed, truth, nc, cfg, seed);
        row.timing.estimate_s += seconds_since(t0);
      }
    }

    report.rows.push_back(std::move(row));
    prior = std::move(filtered);
  }
  return report;
}

RunReport run_once(const std::filesystem::path& scenario_path, const Overrides& overrides, std::uint64_t seed) {
  ExperimentConfig cfg = load_config(scenario_path);
  apply_overrides(cfg, overrides);
  return run_once(cfg, seed);
}

std::vector<RunReport> run_monte_carlo(const ExperimentConfig& cfg, int runs, std::uint64_t base_seed,
                                       int threads) {
  if (runs < 0) throw std::invalid_argument("run_monte_carlo: runs must be >= 0");
  cfg.validate();
  std::vector<RunReport> reports(static_cast<std::size_t>(runs));
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(runs, 1));

  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < runs; i = next++) {
      try {
        reports[static_cast<std::size_t>(i)] = run_once(cfg, base_seed + static_cast<std::uint64_t>(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return reports;
}

std::vector<std::string> metric_columns(int nc) {
  std::vector<std::string> cols;
  auto per_class = [&](const std::string& prefix) {
    for (int c = 1; c <= nc; ++c) cols.push_back(prefix + "_c" + std::to_string(c));
  };
  per_class("filter_ospa");
  cols.emplace_back("filter_ospa_all");
  cols.emplace_back("smoother_scan_index");
  per_class("smoother_ospa");
  cols.emplace_back("smoother_ospa_all");
  per_class("true_n");
  per_class("filter_n");
  per_class("smoother_true_n");
  per_class("smoother_n");
  per_class("filter_mass");
  per_class("smoother_mass");
  return cols;
}

std::vector<double> metric_values(const ScanRow& row, int nc) {
  std::vector<double> v;
  const auto& f = row.filter;
  const ScanMetrics* s = row.smoother ? &*row.smoother : nullptr;
  auto per_class = [&](auto getter, const ScanMetrics* m) {
    for (int c = 0; c < nc; ++c) v.push_back(m ? static_cast<double>(getter(*m)[static_cast<std::size_t>(c)]) : kNaN);
  };
  auto ospa = [](const ScanMetrics& m) -> const auto& { return m.ospa; };
  auto truth = [](const ScanMetrics& m) -> const auto& { return m.true_counts; };
  auto counts = [](const ScanMetrics& m) -> const auto& { return m.counts; };
  auto masses = [](const ScanMetrics& m) -> const auto& { return m.masses; };

  per_class(ospa, &f);
  v.push_back(f.ospa_all);
  v.push_back(s ? static_cast<double>(s->scan) : kNaN);
  per_class(ospa, s);
  v.push_back(s ? s->ospa_all : kNaN);
  per_class(truth, &f);
  per_class(counts, &f);
  per_class(truth, s);
  per_class(counts, s);
  per_class(masses, &f);
  per_class(masses, s);
  return v;
}

namespace {

bool is_count_column(const std::string& name) {
  return name.find("_n_c") != std::string::npos || name == "smoother_scan_index";
}

}  // namespace

void write_run_csv(const RunReport& report, std::ostream& out) {
  const auto cols = metric_columns(report.num_classes);
  out << "# filter-vs-smoother run, seed " << report.seed << ", lag " << report.lag << " scans\n";
  out << "# row k: filter metrics for scan k; smoother metrics for scan k - lag (smoother_scan_index)\n";
  out << "# units: time_s s; *_ospa_* m; *_n_* targets; *_mass_* expected targets; class labels one-based\n";
  out << "scan_index,time_s";
  for (const auto& c : cols) out << ',' << c;
  out << '\n';
  for (const auto& row : report.rows) {
    out << row.scan << ',' << format_value(row.time_s);
    const auto values = metric_values(row, report.num_classes);
    for (std::size_t i = 0; i < values.size(); ++i) {
      out << ',' << (is_count_column(cols[i]) ? format_count(values[i]) : format_value(values[i]));
    }
    out << '\n';
  }
}

void write_timing_csv(const RunReport& report, std::ostream& out) {
  out << "# wall-clock seconds per processing stage, seed " << report.seed << "\n";
  out << "scan_index,predict_s,update_s,resample_s,smooth_s,estimate_s\n";
  for (const auto& row : report.rows) {
    const auto& t = row.timing;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f,%.6f,%.6f\n", row.scan, t.predict_s, t.update_s,
                  t.resample_s, t.smooth_s, t.estimate_s);
    out << buf;
  }
}

AggregateReport aggregate(const std::vector<RunReport>& input, int window_first, int window_last) {
  AggregateReport agg;
  agg.runs = static_cast<int>(input.size());
  agg.window_first = window_first;
  agg.window_last = window_last;
  if (input.empty()) return agg;

  // Sum in seed order so results do not depend on completion order.
  std::vector<const RunReport*> reports;
  for (const auto& r : input) reports.push_back(&r);
  std::sort(reports.begin(), reports.end(), [](auto* a, auto* b) { return a->seed < b->seed; });

  const auto& first = *reports.front();
  agg.num_classes = first.num_classes;
  agg.lag = first.lag;
  agg.columns = metric_columns(first.num_classes);
  const std::size_t ncols = agg.columns.size();
  for (const auto* r : reports) {
    if (r->rows.size() != first.rows.size() || r->num_classes != first.num_classes || r->lag != first.lag) {
      throw std::invalid_argument("aggregate: reports come from different configurations");
    }
  }

  for (std::size_t i = 0; i < first.rows.size(); ++i) {
    agg.scans.push_back(first.rows[i].scan);
    agg.times.push_back(first.rows[i].time_s);
    std::vector<double> sum(ncols, 0.0), sum_sq(ncols, 0.0);
    std::vector<int> n(ncols, 0);
    for (const auto* r : reports) {
      const auto v = metric_values(r->rows[i], r->num_classes);
      for (std::size_t j = 0; j < ncols; ++j) {
        if (!std::isfinite(v[j])) continue;
        sum[j] += v[j];
        ++n[j];
      }
    }
    std::vector<double> mean(ncols, kNaN), sd(ncols, kNaN);
    for (std::size_t j = 0; j < ncols; ++j) {
      if (n[j] > 0) mean[j] = sum[j] / n[j];
    }
    for (const auto* r : reports) {
      const auto v = metric_values(r->rows[i], r->num_classes);
      for (std::size_t j = 0; j < ncols; ++j) {
        if (std::isfinite(v[j])) sum_sq[j] += (v[j] - mean[j]) * (v[j] - mean[j]);
      }
    }
    for (std::size_t j = 0; j < ncols; ++j) {
      if (n[j] == 1) sd[j] = 0.0;
      if (n[j] > 1) sd[j] = std::sqrt(sum_sq[j] / (n[j] - 1));
    }
    agg.mean.push_back(std::move(mean));
    agg.stddev.push_back(std::move(sd));
  }

  double filter_total = 0.0, smoother_total = 0.0;
  agg.max_scan_reduction = -std::numeric_limits<double>::infinity();
  for (int t = window_first; t <= window_last; ++t) {
    double f = 0.0, s = 0.0;
    bool complete = t < static_cast<int>(first.rows.size());
    for (const auto* r : reports) {
      if (!complete) break;
      const ScanMetrics* sm = r->smoothed(t);
      if (!sm) {
        complete = false;
        break;
      }
      f += r->rows[static_cast<std::size_t>(t)].filter.ospa_all;
      s += sm->ospa_all;
    }
    if (!complete) continue;
    filter_total += f;
    smoother_total += s;
    if (f > 0.0) agg.max_scan_reduction = std::max(agg.max_scan_reduction, 1.0 - s / f);
  }
  const double denom = static_cast<double>(reports.size()) * (window_last - window_first + 1);
  agg.filter_ospa_window = filter_total / denom;
  agg.smoother_ospa_window = smoother_total / denom;
  agg.ospa_reduction = filter_total > 0.0 ? 1.0 - smoother_total / filter_total : kNaN;
  if (!std::isfinite(agg.max_scan_reduction)) agg.max_scan_reduction = kNaN;
  return agg;
}

void write_aggregate_csv(const AggregateReport& agg, std::ostream& out) {
  out << "# per-scan mean and sample standard deviation over " << agg.runs << " runs, lag " << agg.lag
      << " scans\n";
  out << "# units: time_s s; *_ospa_* m; *_n_* targets; *_mass_* expected targets; class labels one-based\n";
  out << "scan_index,time_s";
  for (const auto& c : agg.columns) out << ',' << c << "_mean," << c << "_std";
  out << '\n';
  for (std::size_t i = 0; i < agg.scans.size(); ++i) {
    out << agg.scans[i] << ',' << format_value(agg.times[i]);
    for (std::size_t j = 0; j < agg.columns.size(); ++j) {
      out << ',' << format_value(agg.mean[i][j]) << ',' << format_value(agg.stddev[i][j]);
    }
    out << '\n';
  }
}

std::string summary_text(const AggregateReport& agg) {
  std::ostringstream s;
  char buf[256];
  s << "runs: " << agg.runs << "\n";
  s << "lag: " << agg.lag << " scans\n";
  s << "window: scans " << agg.window_first << ".." << agg.window_last << "\n";
  std::snprintf(buf, sizeof buf, "mean combined OSPA, filter:   %.3f m\n", agg.filter_ospa_window);
  s << buf;
  std::snprintf(buf, sizeof buf, "mean combined OSPA, smoother: %.3f m\n", agg.smoother_ospa_window);
  s << buf;
  std::snprintf(buf, sizeof buf, "relative OSPA reduction: %.2f %%\n", 100.0 * agg.ospa_reduction);
  s << buf;
  std::snprintf(buf, sizeof buf, "largest per-scan reduction: %.2f %%\n", 100.0 * agg.max_scan_reduction);
  s << buf;
  return s.str();
}

}  // namespace jdtc
