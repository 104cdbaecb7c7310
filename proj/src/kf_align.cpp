#include "align/kf_align.h"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace align {

KfState kf_predict(const KfState& s, const Mat3& C_b_n, const Vec3& f_b,
                   const EarthParams& p, const KfNoise& q, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("kf_predict: dt must be > 0");

    const Mat3 A_pp = -skew(earth_rate_n(p));
    const Mat3 A_pe = -C_b_n;
    const Mat3 A_vp = skew(C_b_n * f_b);
    const Mat3 A_vn = C_b_n;

    // Phi = I + A dt + A^2 dt^2/2 assembled blockwise; A has the sparsity
    //   [A_pp 0 A_pe 0; A_vp 0 0 A_vn; 0 0 0 0; 0 0 0 0]
    Mat12 Phi = Mat12::Identity();
    const double h = 0.5 * dt * dt;
    Phi.block<3, 3>(0, 0) += A_pp * dt + A_pp * A_pp * h;
    Phi.block<3, 3>(0, 6) = A_pe * dt + A_pp * A_pe * h;
    Phi.block<3, 3>(3, 0) = A_vp * dt + A_vp * A_pp * h;
    Phi.block<3, 3>(3, 6) = A_vp * A_pe * h;
    Phi.block<3, 3>(3, 9) = A_vn * dt;

    KfState out;
    out.x = Phi * s.x;
    Vec12 qdiag;
    qdiag.segment<3>(0).setConstant(q.gyro_arw_var);
    qdiag.segment<3>(3).setConstant(q.accel_vrw_var);
    qdiag.segment<3>(6).setConstant(q.bias_floor);
    qdiag.segment<3>(9).setConstant(q.bias_floor);
    out.P = Phi * s.P * Phi.transpose() + Mat12(qdiag.asDiagonal()) * dt;
    out.P = 0.5 * (out.P + out.P.transpose()).eval();
    return out;
}

KfState kf_update(const KfState& s, const Vec3& observed_velocity_error, double r_velocity) {
    Eigen::Matrix<double, 3, 12> H = Eigen::Matrix<double, 3, 12>::Zero();
    H.block<3, 3>(0, 3).setIdentity();

    const Mat3 innov_cov = H * s.P * H.transpose() + r_velocity * Mat3::Identity();
    Eigen::FullPivLU<Mat3> lu(innov_cov);
    if (!lu.isInvertible()) {
        throw std::runtime_error("kf_update: innovation covariance singular");
    }
    const Eigen::Matrix<double, 12, 3> K = s.P * H.transpose() * lu.inverse();

    KfState out;
    out.x = s.x + K * (observed_velocity_error - H * s.x);
    const Mat12 IKH = Mat12::Identity() - K * H;
    out.P = IKH * s.P * IKH.transpose() + K * (r_velocity * Mat3::Identity()) * K.transpose();
    out.P = 0.5 * (out.P + out.P.transpose()).eval();
    return out;
}

std::vector<AttitudeEpoch> run_two_procedure(const std::vector<ImuSample>& samples,
                                             const EarthParams& p,
                                             const TwoProcedureConfig& cfg) {
    if (samples.size() < 2) throw std::invalid_argument("run_two_procedure: empty stream");
    const double dt = samples[1].t - samples[0].t;
    const double duration = samples.back().t + dt;
    if (cfg.coarse_window_s >= duration - 1e-9) {
        throw std::invalid_argument("run_two_procedure: coarse window exceeds stream duration");
    }

    const auto coarse_steps = static_cast<std::size_t>(std::llround(cfg.coarse_window_s / dt));
    const long pair_stride = std::lround(cfg.pair_interval_s / dt);
    const long update_stride = std::lround(cfg.update_interval_s / dt);

    std::vector<AttitudeEpoch> series;

    // coarse phase: run the OBA tracker over the warm-up window
    TrackState track;
    std::vector<std::pair<Vec3, Vec3>> pairs;
    std::optional<Mat3> handoff;
    for (std::size_t i = 0; i < coarse_steps && i < samples.size(); ++i) {
        accumulate_vectors(track, samples[i], p, dt);
        propagate_attitude(track, samples[i], dt);
        if ((static_cast<long>(i) + 1) % pair_stride != 0) continue;
        pairs.emplace_back(track.F, track.G);
        if (pairs.size() < 2) continue;
        const WahbaSolution sol = solve_wahba(pairs);  // degeneracy aborts the run
        const Mat3 C = earth_rotation_dcm(p, track.t).transpose() * sol.R * track.C_b_ib0;
        series.push_back({track.t, C});
        handoff = C;
    }
    if (!handoff) {
        throw std::runtime_error("run_two_procedure: coarse stage produced no attitude");
    }

    // optional heading offset to probe the filter's initial-value sensitivity
    Mat3 C = so3_exp(Vec3(0, 0, -cfg.handoff_heading_offset_deg * kDeg2Rad)) * (*handoff);

    KfState kf;
    kf.P.setZero();
    kf.P.block<2, 2>(0, 0) = cfg.p0_level_rad * cfg.p0_level_rad * Eigen::Matrix2d::Identity();
    kf.P(2, 2) = cfg.p0_heading_rad * cfg.p0_heading_rad;
    kf.P.block<3, 3>(3, 3) = cfg.p0_velocity * cfg.p0_velocity * Mat3::Identity();
    kf.P.block<3, 3>(6, 6) = cfg.p0_gyro_bias * cfg.p0_gyro_bias * Mat3::Identity();
    kf.P.block<3, 3>(9, 9) = cfg.p0_accel_bias * cfg.p0_accel_bias * Mat3::Identity();

    Vec3 v = Vec3::Zero();
    const Vec3 g_n = gravity_n(p);
    const Vec3 w_ie_n = earth_rate_n(p);
    long steps = 0;
    for (std::size_t i = coarse_steps; i < samples.size(); ++i) {
        const ImuSample& s = samples[i];
        // mechanization on raw measurements with interval-start attitude;
        // sensor errors live in the state
        kf = kf_predict(kf, C, s.accel, p, cfg.noise, dt);
        v += dt * (C * s.accel + g_n);
        const Vec3 w_nb_b = s.gyro - C.transpose() * w_ie_n;
        C = C * so3_exp(dt * w_nb_b);
        if (++steps % 100 == 0) C = orthonormalize(C);

        if (steps % update_stride == 0) {
            kf = kf_update(kf, v, cfg.noise.r_velocity);
            // closed-loop attitude feedback; phi then zeroed
            C = so3_exp(kf.x.segment<3>(0)) * C;
            kf.x.segment<3>(0).setZero();
            series.push_back({s.t + dt, C});
        }
    }
    return series;
}

}  // namespace align
