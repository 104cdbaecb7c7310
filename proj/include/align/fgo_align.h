/**
 * @file fgo_align.h
 * @brief Unified self-alignment by factor-graph optimization.
 *
 * The graph holds one 12-dof error-state node per keyframe
 *   x_k = (phi_k, dF_k, eps_k, nabla_k)
 * (misalignment of the tracked inertial-frame attitude, specific-force
 * integration error, gyro bias, accelerometer bias), plus one constant
 * rotation C_{ib0}^{in0} shared by every measurement factor. Consecutive
 * nodes are linked by an INS prediction factor, every node is linked to the
 * constant rotation by a vector-matching measurement factor, and the first
 * node carries a zero-mean prior. The resulting normal equations are block
 * tridiagonal plus one dense 3-column hub, which the solver eliminates
 * directly.
 */

#ifndef ALIGN_FGO_ALIGN_H
#define ALIGN_FGO_ALIGN_H

#include <optional>
#include <ostream>
#include <vector>

#include "align/coarse_align.h"
#include "align/earth.h"
#include "align/imu_sim.h"
#include "align/rotation.h"

namespace align {

using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

// block offsets inside a node state
inline constexpr int kPhi = 0;    // misalignment angle, rad
inline constexpr int kDF = 3;     // specific-force integration error, m/s
inline constexpr int kEps = 6;    // gyro bias, rad/s
inline constexpr int kNabla = 9;  // accelerometer bias, m/s^2

struct KeyframeSnapshot {
    int index = 0;
    double t = 0.0;
    Mat3 C = Mat3::Identity();      // tracked C_b^{i~b0} at t
    Vec3 F = Vec3::Zero();          // accumulated specific-force integral at t, m/s
    Vec3 G = Vec3::Zero();          // accumulated gravity integral at t, m/s
    // interval averages over [t, t + dt], the Euler-step coefficients of the
    // prediction to the next node; filled once that interval has been
    // consumed, unused on the newest snapshot
    Mat3 C_avg = Mat3::Identity();
    Vec3 f_avg = Vec3::Zero();      // average of C_b^{i~b0} * f^b, m/s^2
};

struct NoiseModel {
    Vec12 ins_var = Vec12::Ones();    // per-step state-prediction variance
    double iosf_vrw_var = 0.0;        // measurement variance growth, (m/s)^2 per s
    double iosf_floor_var = 1e-8;     // sigma_F0^2, (m/s)^2
    Vec12 prior_var = Vec12::Ones();

    /// Measurement variance at keyframe time t.
    double iosf_var(double t) const { return iosf_vrw_var * t + iosf_floor_var; }

    /// Builds the model from the sensor noise densities and keyframe
    /// interval. Tiny positive floors keep every weight finite when a
    /// density is zero.
    static NoiseModel from_densities(double gyro_arw_rad_sqrt_s,
                                     double accel_vrw_m_s2_sqrt_hz,
                                     double keyframe_dt,
                                     double gravity_m_s2 = kGravityMS2);
};

struct FactorGraph {
    double keyframe_dt = 2.0;
    std::vector<KeyframeSnapshot> keyframes;
    std::vector<Vec12> nodes;  // current values, zero on insertion
    Mat3 constant_attitude = Mat3::Identity();
    NoiseModel noise;

    /// Appends a snapshot and a zero node. Throws when the index is out of
    /// order or the keyframe spacing does not match keyframe_dt (1e-9).
    void add_keyframe(const KeyframeSnapshot& snap);

    std::size_t size() const { return nodes.size(); }
};

/// State transition x_{k+1} = A x_k of the discrete INS error model. The
/// phi row integrates the gyro bias with a minus sign; the dF row couples
/// the accelerometer bias and the misalignment through the rotated
/// specific force. All coefficients come from the snapshot's interval
/// averages, which are the correct Euler coefficients under rotation
/// modulation.
Mat12 ins_transition(const KeyframeSnapshot& snap, double dt);

struct InsFactorEval {
    Vec12 residual;  // x_{k+1} - A x_k
    Mat12 J_k;       // -A
    Mat12 J_k1;      // identity
};
InsFactorEval ins_factor(const Vec12& x_k, const Vec12& x_k1,
                         const KeyframeSnapshot& snap, double dt);

struct MeasurementFactorEval {
    Vec3 residual;                    // R (F - dF) - G
    Eigen::Matrix<double, 3, 12> J_x;  // -R in the dF block, zero elsewhere
    Mat3 J_R;                          // -skew(R (F - dF)), left perturbation
};
MeasurementFactorEval measurement_factor(const Vec12& x_k, const Mat3& R,
                                         const KeyframeSnapshot& snap);

struct PriorFactorEval {
    Vec12 residual;  // -x_1
    Mat12 J;         // -identity
};
PriorFactorEval prior_factor(const Vec12& x_1);

/// Sum of Mahalanobis-weighted squared residuals of every factor.
double graph_cost(const FactorGraph& g, const std::vector<Vec12>& nodes, const Mat3& R);

struct SolveOptions {
    int max_iterations = 50;
    double cost_rel_tol = 1e-8;
    double step_tol = 1e-10;
    double initial_damping = 1e-8;
    std::ostream* trace = nullptr;  // optional CSV: iter,cost,damping,step_norm
};

struct SolveReport {
    int iterations = 0;
    double initial_cost = 0.0;
    double final_cost = 0.0;
    bool converged = false;
    double damping_final = 0.0;
};

struct SolveResult {
    std::vector<Vec12> nodes;
    Mat3 R = Mat3::Identity();
    SolveReport report;
};

/// Damped Gauss-Newton over the 12n + 3 unknowns. Euclidean blocks update
/// additively, the constant rotation multiplicatively on the left. When
/// init_R is absent the rotation starts from the Wahba solution over the
/// keyframe (F, G) pairs and all nodes start at zero; otherwise the graph's
/// stored node values serve as the warm start. Requires >= 2 keyframes.
SolveResult solve(const FactorGraph& g, std::optional<Mat3> init_R = std::nullopt,
                  const SolveOptions& opts = {});

/// Final attitude: C_b^n = C_n^{in0}(t_n)' * R * exp(phi_n^) * C_n.
Mat3 attitude_output(const Vec12& last_node, const Mat3& R,
                     const KeyframeSnapshot& last_snap, const EarthParams& p);

struct FgoAlignerOptions {
    EarthParams earth;
    NoiseModel noise;
    double keyframe_dt = 2.0;
    int resolve_stride = 1;  // re-solve every this many keyframes
    SolveOptions solve;
};

/// Streaming driver: tracks attitude and the vector integrals, cuts a
/// keyframe every keyframe_dt, and re-solves the full graph (warm started)
/// to produce an attitude/bias time series.
class FgoAligner {
public:
    FgoAligner(const FgoAlignerOptions& opts, double sample_dt);

    void add_sample(const ImuSample& s);

    struct Epoch {
        double t = 0.0;
        Mat3 C_b_n = Mat3::Identity();
        Vec3 gyro_bias = Vec3::Zero();
        Vec3 accel_bias = Vec3::Zero();
        SolveReport report;
    };

    const std::vector<Epoch>& epochs() const { return epochs_; }
    const FactorGraph& graph() const { return graph_; }

private:
    void cut_keyframe();
    void resolve();

    FgoAlignerOptions opts_;
    double sample_dt_;
    long samples_per_keyframe_;
    long interval_count_ = 0;
    Mat3 C_sum_ = Mat3::Zero();
    Vec3 cf_sum_ = Vec3::Zero();
    TrackState track_;
    FactorGraph graph_;
    std::vector<Vec12> warm_nodes_;
    std::optional<Mat3> warm_R_;
    std::vector<Epoch> epochs_;
};

}  // namespace align

#endif  // ALIGN_FGO_ALIGN_H
