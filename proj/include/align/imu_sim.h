/**
 * @file imu_sim.h
 * @brief Deterministic IMU simulator for mooring self-alignment scenarios
 *        with turntable rotation modulation.
 *
 * A sample stamped t covers the interval [t, t + 1/rate). The gyro channel
 * carries the exact average body rate over that interval (the increment a
 * real strapdown gyro integrates, divided by dt), so a single-sample
 * Rodrigues attitude update reproduces the true attitude to rounding error
 * when noise and bias are off. The accelerometer channel carries the
 * instantaneous specific force at the interval start, which pairs with the
 * left-Riemann integrators used downstream.
 */

#ifndef ALIGN_IMU_SIM_H
#define ALIGN_IMU_SIM_H

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "align/earth.h"
#include "align/rotation.h"

namespace align {

struct ImuSample {
    double t = 0.0;  // seconds; non-decreasing across a stream
    Vec3 gyro = Vec3::Zero();   // rad/s, body frame
    Vec3 accel = Vec3::Zero();  // m/s^2, body frame
};

struct ScenarioConfig {
    double duration_s = 900.0;
    double imu_rate_hz = 100.0;
    EarthParams earth;                        // latitude 45 deg by default
    // moored-vessel attitude with a small trim/list. The tilt keeps the
    // turntable axis off the gravity axis, which is what makes the z gyro
    // bias observable at all
    Mat3 initial_attitude = heading_pitch_roll_to_dcm(30.0, 1.5, -1.0);  // C_b^n(0)
    double initial_heading_error_deg = 0.0;   // offset handed to recursive estimators
    double turntable_rate_rad_s = 6.0 * kDeg2Rad;  // rotation rate about body z
    // the turntable reverses direction every this many seconds (0 keeps it
    // unidirectional). Reversals separate the horizontal gyro and
    // accelerometer biases, which stay pairwise entangled under single-rate
    // unidirectional rotation
    double turntable_reverse_period_s = 150.0;

    // default sensor errors: eps = (-8, 6, -7) deg/h, nabla = (1, -1, 1) mg
    Vec3 gyro_bias_rad_s = Vec3(-8.0, 6.0, -7.0) * kDeg2Rad / 3600.0;
    Vec3 accel_bias_m_s2 = Vec3(1.0, -1.0, 1.0) * kMilliG;

    double gyro_arw_rad_sqrt_s = 0.1 * kDeg2Rad / 60.0;         // 0.1 deg/sqrt(h)
    double accel_vrw_m_s2_sqrt_hz = 50e-6 * kGravityMS2;        // 50 ug/sqrt(Hz)

    double sway_accel_amp_m_s2 = 0.0;  // horizontal sinusoidal disturbance, off by default
    double sway_period_s = 8.0;

    std::uint64_t rng_seed = 1;

    /// Throws std::invalid_argument listing every violated range.
    void validate() const;
};

struct GroundTruth {
    std::vector<double> t;       // sample times plus the final instant
    std::vector<Mat3> C_b_n;     // true attitude at each entry of t
    Vec3 gyro_bias = Vec3::Zero();
    Vec3 accel_bias = Vec3::Zero();
};

struct SimResult {
    std::vector<ImuSample> samples;
    GroundTruth truth;
};

/// Generates the measurement stream and ground truth for a scenario.
/// Bitwise reproducible for a fixed config (including the seed).
SimResult simulate(const ScenarioConfig& cfg);

/// Heading of the true attitude at the ground-truth entry nearest to t.
/// Throws std::out_of_range when t is outside the simulated span.
double true_heading_deg(const GroundTruth& gt, double t);

/// CSV dumps. Headers:
///   samples: t_s,gx_rad_s,gy_rad_s,gz_rad_s,ax_m_s2,ay_m_s2,az_m_s2
///   truth:   t_s,heading_deg,pitch_deg,roll_deg
void write_samples_csv(const std::string& path, const std::vector<ImuSample>& samples);
void write_truth_csv(const std::string& path, const GroundTruth& truth);

/// Deterministic, implementation-pinned normal sampler (Box-Muller over
/// mt19937_64). std::normal_distribution is avoided so streams are identical
/// across standard libraries.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}
    double uniform();  // [0, 1)
    double gaussian();

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace align

#endif  // ALIGN_IMU_SIM_H
