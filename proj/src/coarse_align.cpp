#include "align/coarse_align.h"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace align {

namespace {
constexpr int kOrthonormalizeCadence = 100;
}

void propagate_attitude(TrackState& s, const ImuSample& sample, double dt) {
    if (!sample.gyro.allFinite() || !sample.accel.allFinite()) {
        throw std::invalid_argument("propagate_attitude: non-finite sample");
    }
    if (!(dt > 0.0) || dt * sample.gyro.norm() >= M_PI) {
        throw std::invalid_argument("propagate_attitude: invalid step");
    }
    s.C_b_ib0 = s.C_b_ib0 * so3_exp(dt * sample.gyro);
    if (++s.steps % kOrthonormalizeCadence == 0) {
        s.C_b_ib0 = orthonormalize(s.C_b_ib0);
    }
}

void accumulate_vectors(TrackState& s, const ImuSample& sample, const EarthParams& p, double dt) {
    s.F += s.C_b_ib0 * sample.accel * dt;
    s.G -= earth_rotation_dcm(p, sample.t) * gravity_n(p) * dt;
    s.t = sample.t + dt;
}

WahbaSolution solve_wahba(const std::vector<std::pair<Vec3, Vec3>>& pairs) {
    if (pairs.size() < 2) {
        throw std::invalid_argument("solve_wahba: need at least two vector pairs");
    }
    Mat3 B = Mat3::Zero();
    double sq = 0.0;
    for (const auto& [f, g] : pairs) {
        B += g * f.transpose();
        sq += f.squaredNorm() + g.squaredNorm();
    }
    Eigen::JacobiSVD<Mat3> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec3 sv = svd.singularValues();
    if (sv(1) <= 1e-12 * sv(0)) {
        throw DegenerateGeometry("solve_wahba: vector set collinear, rotation about common axis unobservable");
    }
    Mat3 d = Mat3::Identity();
    const double det_uv = (svd.matrixU() * svd.matrixV().transpose()).determinant();
    d(2, 2) = det_uv < 0.0 ? -1.0 : 1.0;

    WahbaSolution sol;
    sol.R = svd.matrixU() * d * svd.matrixV().transpose();
    // |R F - G|^2 summed = sum(|F|^2 + |G|^2) - 2 tr(R' B)
    sol.residual_cost = std::max(0.0, sq - 2.0 * (sol.R.transpose() * B).trace());
    sol.pair_count = static_cast<int>(pairs.size());
    return sol;
}

std::vector<CoarseEpoch> coarse_align(const std::vector<ImuSample>& samples,
                                      const EarthParams& p, double pair_interval) {
    std::vector<CoarseEpoch> series;
    if (samples.empty()) return series;
    const double dt = samples.size() > 1 ? samples[1].t - samples[0].t
                                         : pair_interval;
    if (pair_interval < dt - 1e-12) {
        throw std::invalid_argument("coarse_align: pair_interval below sample interval");
    }
    const long stride = std::lround(pair_interval / dt);

    TrackState s;
    std::vector<std::pair<Vec3, Vec3>> pairs;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        accumulate_vectors(s, samples[i], p, dt);
        propagate_attitude(s, samples[i], dt);
        if ((static_cast<long>(i) + 1) % stride != 0) continue;

        pairs.emplace_back(s.F, s.G);
        if (pairs.size() < 2) continue;

        CoarseEpoch e;
        e.t = s.t;
        try {
            const WahbaSolution sol = solve_wahba(pairs);
            e.C_b_n = earth_rotation_dcm(p, s.t).transpose() * sol.R * s.C_b_ib0;
        } catch (const DegenerateGeometry&) {
            // not yet observable at this epoch; keep accumulating
        }
        series.push_back(e);
    }
    return series;
}

}  // namespace align
