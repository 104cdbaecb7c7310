#include "align/imu_sim.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace align {

void ScenarioConfig::validate() const {
    std::vector<std::string> errs;
    if (!(duration_s > 0.0)) errs.push_back("duration_s must be > 0");
    if (!(imu_rate_hz > 0.0)) errs.push_back("imu_rate_hz must be > 0");
    if (std::abs(earth.latitude_rad) > M_PI / 2.0 + 1e-12) errs.push_back("latitude out of [-90, 90] deg");
    if (!(earth.earth_rate_rad_s > 0.0)) errs.push_back("earth_rate_rad_s must be > 0");
    if (!(earth.gravity_m_s2 > 0.0)) errs.push_back("gravity_m_s2 must be > 0");
    if (sway_accel_amp_m_s2 > 0.0 && !(sway_period_s > 0.0)) {
        errs.push_back("sway_period_s must be > 0 when sway is enabled");
    }
    if (turntable_reverse_period_s < 0.0) errs.push_back("turntable_reverse_period_s must be >= 0");
    if (gyro_arw_rad_sqrt_s < 0.0) errs.push_back("gyro_arw must be >= 0");
    if (accel_vrw_m_s2_sqrt_hz < 0.0) errs.push_back("accel_vrw must be >= 0");
    if (!is_rotation(initial_attitude, 1e-6)) errs.push_back("initial_attitude is not a rotation matrix");
    if (!errs.empty()) {
        std::string msg = "invalid scenario:";
        for (const auto& e : errs) msg += "\n  " + e;
        throw std::invalid_argument(msg);
    }
}

double GaussianRng::uniform() {
    // top 53 bits -> [0, 1); independent of std distribution implementations
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double GaussianRng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

namespace {

// Turntable angle about body z; triangular in time when reversals are on.
double turntable_angle(const ScenarioConfig& cfg, double t) {
    const double p = cfg.turntable_reverse_period_s;
    if (p <= 0.0) return cfg.turntable_rate_rad_s * t;
    const double phase = std::fmod(t, 2.0 * p);
    return cfg.turntable_rate_rad_s * (phase < p ? phase : 2.0 * p - phase);
}

// True attitude: C_b^n(t) = C_b^n(0) * exp((0,0,theta(t))^)
Mat3 true_attitude(const ScenarioConfig& cfg, double t) {
    return cfg.initial_attitude * so3_exp(Vec3(0.0, 0.0, turntable_angle(cfg, t)));
}

Vec3 sway_accel_n(const ScenarioConfig& cfg, double t) {
    if (cfg.sway_accel_amp_m_s2 <= 0.0) return Vec3::Zero();
    return Vec3(cfg.sway_accel_amp_m_s2 * std::sin(2.0 * M_PI * t / cfg.sway_period_s), 0.0, 0.0);
}

}  // namespace

SimResult simulate(const ScenarioConfig& cfg) {
    cfg.validate();

    const double dt = 1.0 / cfg.imu_rate_hz;
    const auto n = static_cast<std::size_t>(std::llround(cfg.duration_s * cfg.imu_rate_hz));

    SimResult out;
    out.samples.resize(n);
    out.truth.t.resize(n + 1);
    out.truth.C_b_n.resize(n + 1);
    out.truth.gyro_bias = cfg.gyro_bias_rad_s;
    out.truth.accel_bias = cfg.accel_bias_m_s2;

    GaussianRng rng(cfg.rng_seed);
    const double sigma_g = cfg.gyro_arw_rad_sqrt_s * std::sqrt(cfg.imu_rate_hz);
    const double sigma_a = cfg.accel_vrw_m_s2_sqrt_hz * std::sqrt(cfg.imu_rate_hz);
    const Vec3 g_n = gravity_n(cfg.earth);

    Mat3 C = true_attitude(cfg, 0.0);
    Mat3 C_b_in0 = earth_rotation_dcm(cfg.earth, 0.0) * C;  // body to inertial
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        out.truth.t[i] = t;
        out.truth.C_b_n[i] = C;

        const Mat3 C_next = true_attitude(cfg, t + dt);
        const Mat3 C_b_in0_next = earth_rotation_dcm(cfg.earth, t + dt) * C_next;

        // exact body rotation increment relative to inertial over [t, t+dt]
        const Vec3 ideal_gyro = so3_log(C_b_in0.transpose() * C_b_in0_next) / dt;
        const Vec3 ideal_accel = C.transpose() * (-g_n + sway_accel_n(cfg, t));

        ImuSample& s = out.samples[i];
        s.t = t;
        const Vec3 wg(rng.gaussian(), rng.gaussian(), rng.gaussian());
        const Vec3 wa(rng.gaussian(), rng.gaussian(), rng.gaussian());
        s.gyro = ideal_gyro + cfg.gyro_bias_rad_s + sigma_g * wg;
        s.accel = ideal_accel + cfg.accel_bias_m_s2 + sigma_a * wa;

        C = C_next;
        C_b_in0 = C_b_in0_next;
    }
    out.truth.t[n] = static_cast<double>(n) * dt;
    out.truth.C_b_n[n] = C;
    return out;
}

double true_heading_deg(const GroundTruth& gt, double t) {
    if (gt.t.empty() || t < gt.t.front() - 1e-9 || t > gt.t.back() + 1e-9) {
        throw std::out_of_range("true_heading_deg: t outside simulated span");
    }
    const double dt = gt.t.size() > 1 ? gt.t[1] - gt.t[0] : 1.0;
    auto idx = static_cast<std::size_t>(std::llround((t - gt.t.front()) / dt));
    if (idx >= gt.t.size()) idx = gt.t.size() - 1;
    return dcm_to_heading_pitch_roll(gt.C_b_n[idx]).heading_deg;
}

namespace {

void write_row(std::ostream& os, const double* vals, int count) {
    char buf[64];
    for (int i = 0; i < count; ++i) {
        std::snprintf(buf, sizeof(buf), "%.9g", vals[i]);
        os << (i ? "," : "") << buf;
    }
    os << '\n';
}

}  // namespace

void write_samples_csv(const std::string& path, const std::vector<ImuSample>& samples) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << "t_s,gx_rad_s,gy_rad_s,gz_rad_s,ax_m_s2,ay_m_s2,az_m_s2\n";
    for (const auto& s : samples) {
        const double row[7] = {s.t, s.gyro.x(), s.gyro.y(), s.gyro.z(),
                               s.accel.x(), s.accel.y(), s.accel.z()};
        write_row(os, row, 7);
    }
}

void write_truth_csv(const std::string& path, const GroundTruth& truth) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << "t_s,heading_deg,pitch_deg,roll_deg\n";
    for (std::size_t i = 0; i < truth.t.size(); ++i) {
        const EulerAngles e = dcm_to_heading_pitch_roll(truth.C_b_n[i]);
        const double row[4] = {truth.t[i], e.heading_deg, e.pitch_deg, e.roll_deg};
        write_row(os, row, 4);
    }
}

}  // namespace align
