/**
 * @file coarse_align.h
 * @brief Coarse self-alignment: attitude tracking in the inertial frame
 *        frozen at start time, accumulation of matched vector pairs, and the
 *        SVD solution of the Wahba problem.
 *
 * Per-sample processing order is accumulate_vectors() then
 * propagate_attitude(): the integrators use the attitude and time at the
 * interval start, the attitude update then advances the state to the
 * interval end.
 */

#ifndef ALIGN_COARSE_ALIGN_H
#define ALIGN_COARSE_ALIGN_H

#include <optional>
#include <utility>
#include <vector>

#include "align/earth.h"
#include "align/imu_sim.h"
#include "align/rotation.h"

namespace align {

struct TrackState {
    double t = 0.0;
    Mat3 C_b_ib0 = Mat3::Identity();  // tracked C_b^{i~b0}
    Vec3 F = Vec3::Zero();            // integral of C_b^{i~b0} f^b, m/s
    Vec3 G = Vec3::Zero();            // integral of -C_n^{in0} g_n, m/s
    long steps = 0;                   // attitude updates applied so far
};

/// C <- C * exp(dt * gyro); re-orthonormalized every 100 steps.
/// Throws on non-finite samples, dt <= 0, or dt*|w| >= pi.
void propagate_attitude(TrackState& s, const ImuSample& sample, double dt);

/// F <- F + C * accel * dt; G <- G - C_n^{in0}(t) * g_n * dt; t advances to
/// sample.t + dt (left-Riemann quadrature at the sample timestamp).
void accumulate_vectors(TrackState& s, const ImuSample& sample, const EarthParams& p, double dt);

struct WahbaSolution {
    Mat3 R = Mat3::Identity();   // estimated C_{ib0}^{in0}
    double residual_cost = 0.0;  // sum |R F_k - G_k|^2 at the optimum
    int pair_count = 0;
};

/// Thrown when the accumulated vector set leaves rotation about a common
/// axis unobservable (second singular value below 1e-12 of the first).
struct DegenerateGeometry : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Least-squares rotation mapping each F_k onto G_k, by SVD of sum G_k F_k'.
/// Requires at least two pairs; throws DegenerateGeometry for collinear sets.
WahbaSolution solve_wahba(const std::vector<std::pair<Vec3, Vec3>>& pairs);

struct CoarseEpoch {
    double t = 0.0;
    std::optional<Mat3> C_b_n;  // empty: geometry not yet observable
};

/// Full coarse alignment over a sample stream: snapshots an (F, G) pair every
/// pair_interval, and from two pairs on emits
///   C_b^n = C_n^{in0}(t)' * R_hat * C_b^{i~b0}(t)
/// using all pairs accumulated so far. A stream shorter than two intervals
/// yields an empty series.
std::vector<CoarseEpoch> coarse_align(const std::vector<ImuSample>& samples,
                                      const EarthParams& p, double pair_interval);

}  // namespace align

#endif  // ALIGN_COARSE_ALIGN_H
