/**
 * @file kf_align.h
 * @brief Conventional two-procedure comparator: coarse alignment for a fixed
 *        warm-up window, then a 12-state error-model Kalman filter with
 *        zero-velocity measurements.
 *
 * State: (phi^n misalignment, dv^n velocity error, eps gyro bias,
 * nabla accel bias). The stationary-base phi-angle model is used:
 *   phi_dot = -skew(w_ie^n) phi - C_b^n eps
 *   dv_dot  =  skew(f^n) phi + C_b^n nabla
 * with the mechanization running on raw measurements (biases stay in the
 * state) and the phi estimate folded into the attitude after every update.
 */

#ifndef ALIGN_KF_ALIGN_H
#define ALIGN_KF_ALIGN_H

#include <vector>

#include "align/coarse_align.h"
#include "align/earth.h"
#include "align/fgo_align.h"
#include "align/imu_sim.h"

namespace align {

struct KfState {
    Vec12 x = Vec12::Zero();
    Mat12 P = Mat12::Identity();
};

struct KfNoise {
    double gyro_arw_var = 0.0;    // (rad/s)^2 per Hz, i.e. arw^2
    double accel_vrw_var = 0.0;   // (m/s^2)^2 per Hz
    double bias_floor = 1e-20;    // keeps P positive definite
    double r_velocity = 1e-4;     // (0.01 m/s)^2 zero-velocity measurement
};

/// Discrete propagation with Phi = I + A dt + A^2 dt^2 / 2.
KfState kf_predict(const KfState& s, const Mat3& C_b_n, const Vec3& f_b,
                   const EarthParams& p, const KfNoise& q, double dt);

/// Zero-velocity update: H selects the dv block; covariance in Joseph form.
/// Throws std::runtime_error when the innovation covariance is singular.
KfState kf_update(const KfState& s, const Vec3& observed_velocity_error, double r_velocity);

struct TwoProcedureConfig {
    double coarse_window_s = 120.0;
    double pair_interval_s = 1.0;
    double update_interval_s = 1.0;
    double handoff_heading_offset_deg = 0.0;  // extra error injected at handoff
    KfNoise noise;
    // initial covariance after handoff; the heading entry reflects what the
    // bias-blind coarse stage actually delivers at 120 s
    double p0_level_rad = 1.0 * kDeg2Rad;
    double p0_heading_rad = 20.0 * kDeg2Rad;
    double p0_velocity = 0.1;
    double p0_gyro_bias = 10.0 * kDeg2Rad / 3600.0;
    double p0_accel_bias = kMilliG;
};

struct AttitudeEpoch {
    double t = 0.0;
    Mat3 C_b_n = Mat3::Identity();
};

/// Runs coarse alignment for coarse_window_s, hands the attitude to the
/// filter, and filters to the end of the stream. The emitted series covers
/// the coarse phase too (one epoch per pair interval, then one per update).
/// Throws when coarse_window_s >= stream duration or the coarse stage is
/// degenerate.
std::vector<AttitudeEpoch> run_two_procedure(const std::vector<ImuSample>& samples,
                                             const EarthParams& p,
                                             const TwoProcedureConfig& cfg);

}  // namespace align

#endif  // ALIGN_KF_ALIGN_H
