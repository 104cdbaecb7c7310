#include "align/bench.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "align/coarse_align.h"
#include "align/fgo_align.h"
#include "align/kf_align.h"

namespace align {

const char* method_name(Method m) {
    switch (m) {
        case Method::oba: return "oba";
        case Method::oba_kf: return "oba_kf";
        case Method::fgo: return "fgo";
    }
    return "?";
}

ConfigError::ConfigError(std::vector<std::string> errs)
    : std::runtime_error([&] {
          std::string msg = "config error:";
          for (const auto& e : errs) msg += "\n  " + e;
          return msg;
      }()),
      errors(std::move(errs)) {}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

bool parse_double(const std::string& s, double& out) {
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end && *end == '\0' && !s.empty() && std::isfinite(out);
}

bool parse_vec3(const std::string& s, Vec3& out) {
    const auto parts = split(s, ',');
    if (parts.size() != 3) return false;
    for (int i = 0; i < 3; ++i) {
        if (!parse_double(parts[i], out[i])) return false;
    }
    return true;
}

std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

constexpr double kArwUnit = kDeg2Rad / 60.0;           // deg/sqrt(h) -> rad/sqrt(s)
constexpr double kVrwUnit = 1e-6 * kGravityMS2;        // ug/sqrt(Hz) -> m/s^2/sqrt(Hz)
constexpr double kDegHUnit = kDeg2Rad / 3600.0;        // deg/h -> rad/s

struct EulerTriple {
    double heading = 30.0, pitch = 1.5, roll = -1.0;  // ScenarioConfig default
};

EulerTriple attitude_to_euler(const Mat3& C) {
    const EulerAngles e = dcm_to_heading_pitch_roll(C);
    return {e.heading_deg, e.pitch_deg, e.roll_deg};
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    EulerTriple att;
    std::vector<std::string> errs;

    std::stringstream ss(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(ss, raw)) {
        ++lineno;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errs.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        auto bad_value = [&] {
            errs.push_back("line " + std::to_string(lineno) + ": bad value for '" + key + "'");
        };

        double d = 0.0;
        Vec3 v;
        if (key == "duration_s") { parse_double(val, d) ? void(cfg.scenario.duration_s = d) : bad_value(); }
        else if (key == "imu_rate_hz") { parse_double(val, d) ? void(cfg.scenario.imu_rate_hz = d) : bad_value(); }
        else if (key == "latitude_deg") { parse_double(val, d) ? void(cfg.scenario.earth.latitude_rad = d * kDeg2Rad) : bad_value(); }
        else if (key == "earth_rate_rad_s") { parse_double(val, d) ? void(cfg.scenario.earth.earth_rate_rad_s = d) : bad_value(); }
        else if (key == "gravity_m_s2") { parse_double(val, d) ? void(cfg.scenario.earth.gravity_m_s2 = d) : bad_value(); }
        else if (key == "initial_heading_deg") { parse_double(val, d) ? void(att.heading = d) : bad_value(); }
        else if (key == "initial_pitch_deg") { parse_double(val, d) ? void(att.pitch = d) : bad_value(); }
        else if (key == "initial_roll_deg") { parse_double(val, d) ? void(att.roll = d) : bad_value(); }
        else if (key == "initial_heading_error_deg") { parse_double(val, d) ? void(cfg.scenario.initial_heading_error_deg = d) : bad_value(); }
        else if (key == "turntable_rate_deg_s") { parse_double(val, d) ? void(cfg.scenario.turntable_rate_rad_s = d * kDeg2Rad) : bad_value(); }
        else if (key == "turntable_reverse_period_s") { parse_double(val, d) ? void(cfg.scenario.turntable_reverse_period_s = d) : bad_value(); }
        else if (key == "gyro_bias_deg_h") { parse_vec3(val, v) ? void(cfg.scenario.gyro_bias_rad_s = v * kDegHUnit) : bad_value(); }
        else if (key == "accel_bias_mg") { parse_vec3(val, v) ? void(cfg.scenario.accel_bias_m_s2 = v * kMilliG) : bad_value(); }
        else if (key == "gyro_arw_deg_sqrt_h") { parse_double(val, d) ? void(cfg.scenario.gyro_arw_rad_sqrt_s = d * kArwUnit) : bad_value(); }
        else if (key == "accel_vrw_ug_sqrt_hz") { parse_double(val, d) ? void(cfg.scenario.accel_vrw_m_s2_sqrt_hz = d * kVrwUnit) : bad_value(); }
        else if (key == "sway_accel_amp_m_s2") { parse_double(val, d) ? void(cfg.scenario.sway_accel_amp_m_s2 = d) : bad_value(); }
        else if (key == "sway_period_s") { parse_double(val, d) ? void(cfg.scenario.sway_period_s = d) : bad_value(); }
        else if (key == "rng_seed") {
            try { cfg.scenario.rng_seed = std::stoull(val); } catch (...) { bad_value(); }
        }
        else if (key == "methods") {
            std::vector<Method> ms;
            bool ok = !val.empty();
            for (const auto& name : split(val, ',')) {
                if (name == "oba") ms.push_back(Method::oba);
                else if (name == "oba_kf") ms.push_back(Method::oba_kf);
                else if (name == "fgo") ms.push_back(Method::fgo);
                else { ok = false; break; }
            }
            ok && !ms.empty() ? void(cfg.methods = ms) : bad_value();
        }
        else if (key == "monte_carlo_runs") {
            try { cfg.monte_carlo_runs = std::stoi(val); } catch (...) { bad_value(); }
        }
        else if (key == "rmse_windows") {
            std::vector<std::pair<double, double>> ws;
            bool ok = true;
            for (const auto& w : split(val, ',')) {
                const auto se = split(w, ':');
                double a = 0, b = 0;
                if (se.size() != 2 || !parse_double(se[0], a) || !parse_double(se[1], b)) { ok = false; break; }
                ws.emplace_back(a, b);
            }
            ok && !ws.empty() ? void(cfg.rmse_windows = ws) : bad_value();
        }
        else if (key == "output_dir") { cfg.output_dir = val; }
        else if (key == "emit_plot_data") {
            if (val == "true") cfg.emit_plot_data = true;
            else if (val == "false") cfg.emit_plot_data = false;
            else bad_value();
        }
        else if (key == "coarse_window_s") { parse_double(val, d) ? void(cfg.coarse_window_s = d) : bad_value(); }
        else if (key == "pair_interval_s") { parse_double(val, d) ? void(cfg.pair_interval_s = d) : bad_value(); }
        else if (key == "keyframe_dt_s") { parse_double(val, d) ? void(cfg.keyframe_dt_s = d) : bad_value(); }
        else if (key == "resolve_stride") {
            try { cfg.resolve_stride = std::stoi(val); } catch (...) { bad_value(); }
        }
        else {
            errs.push_back("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }

    cfg.scenario.initial_attitude = heading_pitch_roll_to_dcm(att.heading, att.pitch, att.roll);

    // range checks, reported exhaustively
    const auto& sc = cfg.scenario;
    if (!(sc.duration_s > 0)) errs.push_back("duration_s must be > 0");
    if (!(sc.imu_rate_hz > 0)) errs.push_back("imu_rate_hz must be > 0");
    if (std::abs(sc.earth.latitude_rad) > M_PI / 2 + 1e-12) errs.push_back("latitude_deg out of [-90, 90]");
    if (!(sc.earth.earth_rate_rad_s > 0)) errs.push_back("earth_rate_rad_s must be > 0");
    if (!(sc.earth.gravity_m_s2 > 0)) errs.push_back("gravity_m_s2 must be > 0");
    if (sc.gyro_arw_rad_sqrt_s < 0) errs.push_back("gyro_arw_deg_sqrt_h must be >= 0");
    if (sc.accel_vrw_m_s2_sqrt_hz < 0) errs.push_back("accel_vrw_ug_sqrt_hz must be >= 0");
    if (sc.sway_accel_amp_m_s2 > 0 && !(sc.sway_period_s > 0)) errs.push_back("sway_period_s must be > 0");
    if (sc.turntable_reverse_period_s < 0) errs.push_back("turntable_reverse_period_s must be >= 0");
    if (cfg.monte_carlo_runs < 1) errs.push_back("monte_carlo_runs must be >= 1");
    if (cfg.methods.empty()) errs.push_back("methods must be nonempty");
    for (const auto& [a, b] : cfg.rmse_windows) {
        if (!(a >= 0 && b <= sc.duration_s && a < b)) {
            errs.push_back("rmse_window " + fmt9(a) + ":" + fmt9(b) + " not inside the scenario duration");
        }
    }
    if (!(cfg.coarse_window_s > 0 && cfg.coarse_window_s < sc.duration_s)) {
        errs.push_back("coarse_window_s must be in (0, duration_s)");
    }
    if (sc.imu_rate_hz > 0 && cfg.pair_interval_s < 1.0 / sc.imu_rate_hz - 1e-12) {
        errs.push_back("pair_interval_s below the sample interval");
    }
    if (!(cfg.keyframe_dt_s > 0)) errs.push_back("keyframe_dt_s must be > 0");
    if (cfg.resolve_stride < 1) errs.push_back("resolve_stride must be >= 1");

    if (!errs.empty()) throw ConfigError(std::move(errs));
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    const auto& sc = cfg.scenario;
    const EulerTriple att = attitude_to_euler(sc.initial_attitude);
    std::ostringstream os;
    os << "duration_s = " << fmt17(sc.duration_s) << '\n'
       << "imu_rate_hz = " << fmt17(sc.imu_rate_hz) << '\n'
       << "latitude_deg = " << fmt17(sc.earth.latitude_rad / kDeg2Rad) << '\n'
       << "earth_rate_rad_s = " << fmt17(sc.earth.earth_rate_rad_s) << '\n'
       << "gravity_m_s2 = " << fmt17(sc.earth.gravity_m_s2) << '\n'
       << "initial_heading_deg = " << fmt17(att.heading) << '\n'
       << "initial_pitch_deg = " << fmt17(att.pitch) << '\n'
       << "initial_roll_deg = " << fmt17(att.roll) << '\n'
       << "initial_heading_error_deg = " << fmt17(sc.initial_heading_error_deg) << '\n'
       << "turntable_rate_deg_s = " << fmt17(sc.turntable_rate_rad_s / kDeg2Rad) << '\n'
       << "turntable_reverse_period_s = " << fmt17(sc.turntable_reverse_period_s) << '\n'
       << "gyro_bias_deg_h = " << fmt17(sc.gyro_bias_rad_s.x() / kDegHUnit) << ", "
       << fmt17(sc.gyro_bias_rad_s.y() / kDegHUnit) << ", "
       << fmt17(sc.gyro_bias_rad_s.z() / kDegHUnit) << '\n'
       << "accel_bias_mg = " << fmt17(sc.accel_bias_m_s2.x() / kMilliG) << ", "
       << fmt17(sc.accel_bias_m_s2.y() / kMilliG) << ", "
       << fmt17(sc.accel_bias_m_s2.z() / kMilliG) << '\n'
       << "gyro_arw_deg_sqrt_h = " << fmt17(sc.gyro_arw_rad_sqrt_s / kArwUnit) << '\n'
       << "accel_vrw_ug_sqrt_hz = " << fmt17(sc.accel_vrw_m_s2_sqrt_hz / kVrwUnit) << '\n'
       << "sway_accel_amp_m_s2 = " << fmt17(sc.sway_accel_amp_m_s2) << '\n'
       << "sway_period_s = " << fmt17(sc.sway_period_s) << '\n'
       << "rng_seed = " << sc.rng_seed << '\n';
    os << "methods = ";
    for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
        os << (i ? ", " : "") << method_name(cfg.methods[i]);
    }
    os << '\n';
    os << "monte_carlo_runs = " << cfg.monte_carlo_runs << '\n';
    os << "rmse_windows = ";
    for (std::size_t i = 0; i < cfg.rmse_windows.size(); ++i) {
        os << (i ? ", " : "") << fmt17(cfg.rmse_windows[i].first) << ':'
           << fmt17(cfg.rmse_windows[i].second);
    }
    os << '\n';
    os << "output_dir = " << cfg.output_dir << '\n'
       << "emit_plot_data = " << (cfg.emit_plot_data ? "true" : "false") << '\n'
       << "coarse_window_s = " << fmt17(cfg.coarse_window_s) << '\n'
       << "pair_interval_s = " << fmt17(cfg.pair_interval_s) << '\n'
       << "keyframe_dt_s = " << fmt17(cfg.keyframe_dt_s) << '\n'
       << "resolve_stride = " << cfg.resolve_stride << '\n';
    return os.str();
}

double heading_rmse(const std::vector<std::pair<double, double>>& est,
                    const std::vector<std::pair<double, double>>& truth,
                    std::pair<double, double> window) {
    double sum = 0.0;
    std::size_t count = 0;
    std::size_t ti = 0;
    for (const auto& [t, h] : est) {
        if (t < window.first - 1e-9 || t > window.second + 1e-9) continue;
        while (ti + 1 < truth.size() && std::abs(truth[ti + 1].first - t) <= std::abs(truth[ti].first - t)) {
            ++ti;
        }
        if (ti >= truth.size() || std::abs(truth[ti].first - t) > 1e-6) {
            throw std::invalid_argument("heading_rmse: truth series does not cover the estimate timestamps");
        }
        const double err = wrap_deg(h - truth[ti].second);
        sum += err * err;
        ++count;
    }
    if (count == 0) throw std::invalid_argument("heading_rmse: no samples in window");
    return std::sqrt(sum / static_cast<double>(count));
}

namespace {

std::uint64_t fnv1a_samples(const std::vector<ImuSample>& samples) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    for (const auto& s : samples) {
        mix(s.t);
        for (int i = 0; i < 3; ++i) mix(s.gyro[i]);
        for (int i = 0; i < 3; ++i) mix(s.accel[i]);
    }
    return h;
}

using HeadingSeries = std::vector<std::pair<double, double>>;

HeadingSeries run_method(Method m, const std::vector<ImuSample>& samples,
                         const SimResult& sim, const RunConfig& cfg,
                         Vec3* fgo_gyro_bias, Vec3* fgo_accel_bias) {
    const auto& sc = cfg.scenario;
    const double sample_dt = 1.0 / sc.imu_rate_hz;
    HeadingSeries series;
    switch (m) {
        case Method::oba: {
            for (const auto& e : coarse_align(samples, sc.earth, cfg.pair_interval_s)) {
                if (e.C_b_n) {
                    series.emplace_back(e.t, dcm_to_heading_pitch_roll(*e.C_b_n).heading_deg);
                }
            }
            break;
        }
        case Method::oba_kf: {
            TwoProcedureConfig tp;
            tp.coarse_window_s = cfg.coarse_window_s;
            tp.pair_interval_s = cfg.pair_interval_s;
            tp.handoff_heading_offset_deg = sc.initial_heading_error_deg;
            tp.noise.gyro_arw_var = sc.gyro_arw_rad_sqrt_s * sc.gyro_arw_rad_sqrt_s;
            tp.noise.accel_vrw_var = sc.accel_vrw_m_s2_sqrt_hz * sc.accel_vrw_m_s2_sqrt_hz;
            for (const auto& e : run_two_procedure(samples, sc.earth, tp)) {
                series.emplace_back(e.t, dcm_to_heading_pitch_roll(e.C_b_n).heading_deg);
            }
            break;
        }
        case Method::fgo: {
            FgoAlignerOptions fo;
            fo.earth = sc.earth;
            fo.noise = NoiseModel::from_densities(sc.gyro_arw_rad_sqrt_s, sc.accel_vrw_m_s2_sqrt_hz,
                                                  cfg.keyframe_dt_s, sc.earth.gravity_m_s2);
            fo.keyframe_dt = cfg.keyframe_dt_s;
            fo.resolve_stride = cfg.resolve_stride;
            FgoAligner aligner(fo, sample_dt);
            for (const auto& s : samples) aligner.add_sample(s);
            for (const auto& e : aligner.epochs()) {
                series.emplace_back(e.t, dcm_to_heading_pitch_roll(e.C_b_n).heading_deg);
            }
            if (!aligner.epochs().empty()) {
                if (fgo_gyro_bias) *fgo_gyro_bias = aligner.epochs().back().gyro_bias;
                if (fgo_accel_bias) *fgo_accel_bias = aligner.epochs().back().accel_bias;
            }
            break;
        }
    }
    (void)sim;
    return series;
}

}  // namespace

BenchResult run_benchmark(const RunConfig& cfg) {
    BenchResult result;
    const double duration = cfg.scenario.duration_s;

    // accumulate per-(method, window) run RMSEs
    std::map<std::string, std::vector<double>> rmse_by_key;

    for (int r = 0; r < cfg.monte_carlo_runs; ++r) {
        ScenarioConfig sc = cfg.scenario;
        sc.rng_seed = cfg.scenario.rng_seed + static_cast<std::uint64_t>(r);
        const SimResult sim = simulate(sc);

        RunRecord rec;
        rec.run = r;
        rec.seed = sc.rng_seed;
        rec.stream_checksum = fnv1a_samples(sim.samples);

        for (const Method m : cfg.methods) {
            const std::string name = method_name(m);
            rec.stream_checksum_by_method[name] = rec.stream_checksum;
            HeadingSeries est;
            try {
                Vec3 gb = Vec3::Zero(), ab = Vec3::Zero();
                est = run_method(m, sim.samples, sim, cfg,
                                 m == Method::fgo ? &gb : nullptr,
                                 m == Method::fgo ? &ab : nullptr);
                if (m == Method::fgo) {
                    rec.fgo_gyro_bias = gb;
                    rec.fgo_accel_bias = ab;
                }
            } catch (const std::exception& e) {
                // a failed method is recorded and excluded from the averages
                rec.failure[name] = e.what();
                rec.diverged[name] = true;
                continue;
            }

            HeadingSeries truth;
            truth.reserve(est.size());
            for (const auto& [t, h] : est) truth.emplace_back(t, true_heading_deg(sim.truth, t));

            // divergence flag: mean |error| over the final 50 s above 30 deg
            double tail_sum = 0.0;
            int tail_count = 0;
            for (std::size_t i = 0; i < est.size(); ++i) {
                if (est[i].first >= duration - 50.0 - 1e-9) {
                    tail_sum += std::abs(wrap_deg(est[i].second - truth[i].second));
                    ++tail_count;
                }
            }
            const bool diverged = tail_count == 0 || tail_sum / tail_count > 30.0;
            rec.diverged[name] = diverged;

            for (const auto& w : cfg.rmse_windows) {
                const std::string key = name + ":" + fmt9(w.first) + ":" + fmt9(w.second);
                const double rmse = heading_rmse(est, truth, w);
                rec.window_rmse[key] = rmse;
                if (!diverged) rmse_by_key[key].push_back(rmse);
            }

            if (cfg.emit_plot_data) {
                for (std::size_t i = 0; i < est.size(); ++i) {
                    result.series.push_back(
                        {est[i].first, r, name, wrap_deg(est[i].second - truth[i].second)});
                }
            }
        }
        result.runs.push_back(std::move(rec));
    }

    for (const Method m : cfg.methods) {
        for (const auto& w : cfg.rmse_windows) {
            const std::string name = method_name(m);
            const std::string key = name + ":" + fmt9(w.first) + ":" + fmt9(w.second);
            const auto& values = rmse_by_key[key];
            MetricsRow row;
            row.method = name;
            row.window_start_s = w.first;
            row.window_end_s = w.second;
            row.runs_used = static_cast<int>(values.size());
            row.rmse_deg = values.empty()
                               ? std::numeric_limits<double>::quiet_NaN()
                               : std::accumulate(values.begin(), values.end(), 0.0) / values.size();
            result.rows.push_back(row);
        }
    }

    emit_outputs(cfg, result, cfg.output_dir);
    return result;
}

void emit_outputs(const RunConfig& cfg, const BenchResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output dir: " + dir + ": " + ec.message());

    {
        const std::string path = dir + "/metrics.csv";
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write " + path);
        os << "method,window_start_s,window_end_s,rmse_deg,runs_used\n";
        for (const auto& row : result.rows) {
            os << row.method << ',' << fmt9(row.window_start_s) << ',' << fmt9(row.window_end_s)
               << ',' << fmt9(row.rmse_deg) << ',' << row.runs_used << '\n';
        }
    }

    if (cfg.emit_plot_data) {
        const std::string path = dir + "/heading_error.csv";
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write " + path);
        os << "t_s,run,method,heading_err_deg\n";
        for (const auto& pt : result.series) {
            os << fmt9(pt.t) << ',' << pt.run << ',' << pt.method << ','
               << fmt9(pt.heading_err_deg) << '\n';
        }
    }

    {
        nlohmann::json j;
        j["config"] = serialize_config(cfg);
        j["seed"] = cfg.scenario.rng_seed;
        nlohmann::json metrics = nlohmann::json::array();
        for (const auto& row : result.rows) {
            metrics.push_back({{"method", row.method},
                               {"window_start_s", row.window_start_s},
                               {"window_end_s", row.window_end_s},
                               {"rmse_deg", row.rmse_deg},
                               {"runs_used", row.runs_used}});
        }
        j["metrics"] = metrics;
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& rec : result.runs) {
            nlohmann::json jr;
            jr["run"] = rec.run;
            jr["seed"] = rec.seed;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%016llx",
                          static_cast<unsigned long long>(rec.stream_checksum));
            jr["stream_checksum"] = buf;
            nlohmann::json per_method;
            for (const auto& [name, sum] : rec.stream_checksum_by_method) {
                std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(sum));
                per_method[name] = buf;
            }
            jr["stream_checksum_by_method"] = per_method;
            jr["diverged"] = rec.diverged;
            if (!rec.failure.empty()) jr["failures"] = rec.failure;
            jr["window_rmse_deg"] = rec.window_rmse;
            jr["fgo_gyro_bias_deg_h"] = {rec.fgo_gyro_bias.x() / kDegHUnit,
                                         rec.fgo_gyro_bias.y() / kDegHUnit,
                                         rec.fgo_gyro_bias.z() / kDegHUnit};
            jr["fgo_accel_bias_mg"] = {rec.fgo_accel_bias.x() / kMilliG,
                                       rec.fgo_accel_bias.y() / kMilliG,
                                       rec.fgo_accel_bias.z() / kMilliG};
            runs.push_back(jr);
        }
        j["runs"] = runs;

        const std::string path = dir + "/summary.json";
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write " + path);
        os << j.dump(2) << '\n';
    }
}

}  // namespace align
