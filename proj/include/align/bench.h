/**
 * @file bench.h
 * @brief Configuration-driven benchmark harness: runs mooring scenarios
 *        through the estimators, computes windowed heading RMSE across Monte
 *        Carlo runs, and writes machine-readable results and plot data.
 */

#ifndef ALIGN_BENCH_H
#define ALIGN_BENCH_H

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "align/imu_sim.h"

namespace align {

enum class Method { oba, oba_kf, fgo };

const char* method_name(Method m);

struct RunConfig {
    ScenarioConfig scenario;
    std::vector<Method> methods{Method::oba, Method::oba_kf, Method::fgo};
    int monte_carlo_runs = 20;
    std::vector<std::pair<double, double>> rmse_windows{{200, 250}, {300, 350}, {850, 900}};
    std::string output_dir = "bench_out";
    bool emit_plot_data = true;
    double coarse_window_s = 120.0;
    double pair_interval_s = 1.0;
    double keyframe_dt_s = 2.0;
    int resolve_stride = 1;
};

/// Raised by parse_config; carries every diagnostic, one per line/violation.
struct ConfigError : std::runtime_error {
    explicit ConfigError(std::vector<std::string> errs);
    std::vector<std::string> errors;
};

/// Parses `key = value` text ('#' starts a comment). Unknown keys are
/// rejected; all range violations are collected and reported together.
/// An empty file yields the defaults above (the paper-bias scenario).
RunConfig parse_config(const std::string& text);

/// Emits a config document that parse_config maps back to an equal config.
std::string serialize_config(const RunConfig& cfg);

/// Windowed heading RMSE. Both series are (t, heading_deg); estimates are
/// compared against the truth sample at the same timestamp; differences are
/// wrapped to (-180, 180] before squaring. Throws when no estimate falls in
/// the window.
double heading_rmse(const std::vector<std::pair<double, double>>& est,
                    const std::vector<std::pair<double, double>>& truth,
                    std::pair<double, double> window);

struct MetricsRow {
    std::string method;
    double window_start_s = 0.0;
    double window_end_s = 0.0;
    double rmse_deg = 0.0;
    int runs_used = 0;
};

struct ErrorPoint {
    double t = 0.0;
    int run = 0;
    std::string method;
    double heading_err_deg = 0.0;
};

struct RunRecord {
    int run = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream_checksum = 0;              // FNV-1a over the raw sample bytes
    // fairness: every method logs the checksum of the stream it consumed
    std::map<std::string, std::uint64_t> stream_checksum_by_method;
    std::map<std::string, bool> diverged;           // per method
    std::map<std::string, std::string> failure;     // method -> error, when one threw
    std::map<std::string, double> window_rmse;      // "method:start:end" -> deg
    Vec3 fgo_gyro_bias = Vec3::Zero();              // final estimates, rad/s
    Vec3 fgo_accel_bias = Vec3::Zero();             // m/s^2
};

struct BenchResult {
    std::vector<MetricsRow> rows;
    std::vector<ErrorPoint> series;
    std::vector<RunRecord> runs;
};

/// Simulates each run once (seed = base seed + run index), feeds the same
/// stream to every requested method, and aggregates windowed RMSE across
/// runs. A run whose final-50-s mean heading error exceeds 30 deg for a
/// method is flagged diverged and excluded from that method's averages.
/// Deterministic for a fixed config. Writes outputs into cfg.output_dir.
BenchResult run_benchmark(const RunConfig& cfg);

/// Writes metrics.csv, heading_error.csv (when plot data is enabled) and
/// summary.json into dir.
void emit_outputs(const RunConfig& cfg, const BenchResult& result, const std::string& dir);

}  // namespace align

#endif  // ALIGN_BENCH_H
