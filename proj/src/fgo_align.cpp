#include "align/fgo_align.h"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace align {

NoiseModel NoiseModel::from_densities(double gyro_arw, double accel_vrw,
                                      double keyframe_dt, double gravity) {
    NoiseModel m;
    const double arw2 = gyro_arw * gyro_arw;
    const double vrw2 = accel_vrw * accel_vrw;
    const double dt = keyframe_dt;
    // phi: integrated gyro white noise; dF: integrated accel white noise plus
    // the gyro noise leaked through the skew(f) coupling; bias rows get a
    // small random-walk floor that keeps the system well posed
    const double phi_var = arw2 * dt + 1e-18;
    const double df_var = vrw2 * dt + gravity * gravity * arw2 * dt * dt * dt / 3.0 + 1e-18;
    m.ins_var.segment<3>(kPhi).setConstant(phi_var);
    m.ins_var.segment<3>(kDF).setConstant(df_var);
    m.ins_var.segment<3>(kEps).setConstant(1e-16);
    m.ins_var.segment<3>(kNabla).setConstant(1e-16);

    m.iosf_vrw_var = vrw2;
    m.iosf_floor_var = 1e-8;  // sigma_F0 = 1e-4 m/s

    const double ten_deg_h = 10.0 * kDeg2Rad / 3600.0;
    m.prior_var.segment<3>(kPhi).setConstant(1.0);
    m.prior_var.segment<3>(kDF).setConstant(1.0);
    m.prior_var.segment<3>(kEps).setConstant(ten_deg_h * ten_deg_h);
    m.prior_var.segment<3>(kNabla).setConstant(kMilliG * kMilliG);
    return m;
}

void FactorGraph::add_keyframe(const KeyframeSnapshot& snap) {
    if (snap.index != static_cast<int>(nodes.size())) {
        throw std::invalid_argument("add_keyframe: snapshot index out of order");
    }
    if (!keyframes.empty() && std::abs(snap.t - keyframes.back().t - keyframe_dt) > 1e-9) {
        throw std::invalid_argument("add_keyframe: keyframe interval mismatch");
    }
    keyframes.push_back(snap);
    nodes.push_back(Vec12::Zero());
}

Mat12 ins_transition(const KeyframeSnapshot& snap, double dt) {
    Mat12 A = Mat12::Identity();
    A.block<3, 3>(kPhi, kEps) = -snap.C_avg * dt;
    A.block<3, 3>(kDF, kPhi) = skew(snap.f_avg) * dt;
    A.block<3, 3>(kDF, kNabla) = snap.C_avg * dt;
    return A;
}

InsFactorEval ins_factor(const Vec12& x_k, const Vec12& x_k1,
                         const KeyframeSnapshot& snap, double dt) {
    InsFactorEval e;
    const Mat12 A = ins_transition(snap, dt);
    e.residual = x_k1 - A * x_k;
    e.J_k = -A;
    e.J_k1 = Mat12::Identity();
    return e;
}

MeasurementFactorEval measurement_factor(const Vec12& x_k, const Mat3& R,
                                         const KeyframeSnapshot& snap) {
    MeasurementFactorEval e;
    const Vec3 rotated = R * (snap.F - x_k.segment<3>(kDF));
    e.residual = rotated - snap.G;
    e.J_x.setZero();
    e.J_x.block<3, 3>(0, kDF) = -R;
    e.J_R = -skew(rotated);
    return e;
}

PriorFactorEval prior_factor(const Vec12& x_1) {
    PriorFactorEval e;
    e.residual = -x_1;
    e.J = -Mat12::Identity();
    return e;
}

namespace {

using Mat12x3 = Eigen::Matrix<double, 12, 3>;
using Mat12x4 = Eigen::Matrix<double, 12, 4>;

struct Linearized {
    std::vector<Mat12> Hd;    // diagonal blocks
    std::vector<Mat12> Hu;    // super-diagonal blocks (k, k+1)
    std::vector<Mat12x3> Hb;  // node-to-rotation coupling
    Mat3 HR;
    std::vector<Vec12> gx;
    Vec3 gR;
    double cost = 0.0;
};

double weighted_sq(const Vec12& r, const Vec12& inv_var) {
    return (r.array().square() * inv_var.array()).sum();
}

Linearized linearize(const FactorGraph& g, const std::vector<Vec12>& nodes, const Mat3& R) {
    const std::size_t n = nodes.size();
    Linearized lin;
    lin.Hd.assign(n, Mat12::Zero());
    lin.Hu.assign(n > 0 ? n - 1 : 0, Mat12::Zero());
    lin.Hb.assign(n, Mat12x3::Zero());
    lin.HR.setZero();
    lin.gx.assign(n, Vec12::Zero());
    lin.gR.setZero();

    const Vec12 w_prior = g.noise.prior_var.cwiseInverse();
    const Vec12 w_ins = g.noise.ins_var.cwiseInverse();

    {  // prior on the first node
        const PriorFactorEval e = prior_factor(nodes[0]);
        lin.Hd[0] += w_prior.asDiagonal();  // J' W J with J = -I
        lin.gx[0] += e.J.transpose() * (w_prior.asDiagonal() * e.residual);
        lin.cost += weighted_sq(e.residual, w_prior);
    }

    for (std::size_t k = 0; k + 1 < n; ++k) {  // INS chain
        const InsFactorEval e = ins_factor(nodes[k], nodes[k + 1], g.keyframes[k], g.keyframe_dt);
        const Mat12 A = -e.J_k;
        const Mat12 WA = w_ins.asDiagonal() * A;
        lin.Hd[k] += A.transpose() * WA;
        lin.Hd[k + 1] += Mat12(w_ins.asDiagonal());
        lin.Hu[k] -= WA.transpose();  // J_k' W J_{k+1} = -A' W
        const Vec12 wr = w_ins.asDiagonal() * e.residual;
        lin.gx[k] -= A.transpose() * wr;
        lin.gx[k + 1] += wr;
        lin.cost += weighted_sq(e.residual, w_ins);
    }

    for (std::size_t k = 0; k < n; ++k) {  // measurement factors
        const MeasurementFactorEval e = measurement_factor(nodes[k], R, g.keyframes[k]);
        const double w = 1.0 / g.noise.iosf_var(g.keyframes[k].t);
        lin.Hd[k].block<3, 3>(kDF, kDF) += w * Mat3::Identity();  // (-R)' W (-R)
        lin.Hb[k].block<3, 3>(kDF, 0) -= w * R.transpose() * e.J_R;
        lin.HR += w * e.J_R.transpose() * e.J_R;
        lin.gx[k].segment<3>(kDF) -= w * R.transpose() * e.residual;
        lin.gR += w * e.J_R.transpose() * e.residual;
        lin.cost += w * e.residual.squaredNorm();
    }
    return lin;
}

/// Eliminates the block tridiagonal node part, then the 3x3 Schur complement
/// of the constant rotation. The node subproblem is exactly linear, so it is
/// always solved undamped; the Levenberg-Marquardt damping applies to the
/// rotation block only. The system is Jacobi-scaled to a unit diagonal
/// first: the raw weights span ~16 orders of magnitude between the bias rows
/// and the prior, which otherwise wrecks the elimination in double
/// precision. With couple_rotation false the rotation column is ignored and
/// the call reduces to the exact tridiagonal solve of the state subproblem.
/// Returns false when a factorization degenerates.
bool solve_normal_equations(const Linearized& lin, double lambda, bool couple_rotation,
                            std::vector<Vec12>& dx, Vec3& dc) {
    const std::size_t n = lin.Hd.size();

    std::vector<Vec12> s(n);
    for (std::size_t k = 0; k < n; ++k) {
        s[k] = lin.Hd[k].diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    }
    const Vec3 sR = lin.HR.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();

    std::vector<Eigen::LDLT<Mat12>> fact(n);
    std::vector<Mat12x4> rhs(n);

    auto scaled_diag = [&](std::size_t k) {
        return Mat12(s[k].asDiagonal() * lin.Hd[k] * s[k].asDiagonal());
    };

    // forward elimination, carrying [Hb | gx] as the right-hand side
    fact[0].compute(scaled_diag(0));
    if (fact[0].info() != Eigen::Success) return false;
    rhs[0].leftCols<3>() = s[0].asDiagonal() * lin.Hb[0] * sR.asDiagonal();
    rhs[0].col(3) = s[0].asDiagonal() * lin.gx[0];
    for (std::size_t k = 1; k < n; ++k) {
        const Mat12 U = s[k - 1].asDiagonal() * lin.Hu[k - 1] * s[k].asDiagonal();
        fact[k].compute(scaled_diag(k) - U.transpose() * fact[k - 1].solve(U));
        if (fact[k].info() != Eigen::Success) return false;
        rhs[k].leftCols<3>() = s[k].asDiagonal() * lin.Hb[k] * sR.asDiagonal();
        rhs[k].col(3) = s[k].asDiagonal() * lin.gx[k];
        rhs[k] -= U.transpose() * fact[k - 1].solve(rhs[k - 1]);
    }

    // back substitution: Y = T^{-1} [Hb | gx] in the scaled basis
    std::vector<Mat12x4> Y(n);
    Y[n - 1] = fact[n - 1].solve(rhs[n - 1]);
    for (std::size_t k = n - 1; k-- > 0;) {
        const Mat12 U = s[k].asDiagonal() * lin.Hu[k] * s[k + 1].asDiagonal();
        Y[k] = fact[k].solve(rhs[k] - U * Y[k + 1]);
    }

    Vec3 dc_scaled = Vec3::Zero();
    if (couple_rotation) {
        // Schur complement on the rotation block; lambda damps only here
        Mat3 S = sR.asDiagonal() * lin.HR * sR.asDiagonal();
        Vec3 rc = -(sR.asDiagonal() * lin.gR);
        for (std::size_t k = 0; k < n; ++k) {
            const Mat12x3 B = s[k].asDiagonal() * lin.Hb[k] * sR.asDiagonal();
            S -= B.transpose() * Y[k].leftCols<3>();
            rc += B.transpose() * Y[k].col(3);
        }
        S.diagonal() += lambda * S.diagonal().cwiseAbs().cwiseMax(1e-12);
        Eigen::LDLT<Mat3> sfact(S);
        if (sfact.info() != Eigen::Success) return false;
        dc_scaled = sfact.solve(rc);
    }
    dc = sR.asDiagonal() * dc_scaled;
    if (!dc.allFinite()) return false;

    dx.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        dx[k] = s[k].asDiagonal() * Vec12(-Y[k].col(3) - Y[k].leftCols<3>() * dc_scaled);
        if (!dx[k].allFinite()) return false;
    }
    return true;
}

/// Exact minimizer over the node states for a fixed rotation. The residuals
/// are affine in the states, so one undamped tridiagonal Newton step from any
/// linearization point reaches the optimum.
bool project_states(const FactorGraph& g, const Mat3& R, std::vector<Vec12>& nodes) {
    const Linearized lin = linearize(g, nodes, R);
    std::vector<Vec12> dx;
    Vec3 dc;
    if (!solve_normal_equations(lin, 0.0, false, dx, dc)) return false;
    for (std::size_t k = 0; k < nodes.size(); ++k) nodes[k] += dx[k];
    return true;
}

}  // namespace

double graph_cost(const FactorGraph& g, const std::vector<Vec12>& nodes, const Mat3& R) {
    const std::size_t n = nodes.size();
    const Vec12 w_prior = g.noise.prior_var.cwiseInverse();
    const Vec12 w_ins = g.noise.ins_var.cwiseInverse();
    double cost = weighted_sq(prior_factor(nodes[0]).residual, w_prior);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        cost += weighted_sq(ins_factor(nodes[k], nodes[k + 1], g.keyframes[k], g.keyframe_dt).residual,
                            w_ins);
    }
    for (std::size_t k = 0; k < n; ++k) {
        cost += measurement_factor(nodes[k], R, g.keyframes[k]).residual.squaredNorm() /
                g.noise.iosf_var(g.keyframes[k].t);
    }
    return cost;
}

SolveResult solve(const FactorGraph& g, std::optional<Mat3> init_R, const SolveOptions& opts) {
    if (g.size() < 2) {
        throw std::invalid_argument("solve: need at least two keyframes");
    }

    SolveResult result;
    if (init_R) {
        result.R = *init_R;
        result.nodes = g.nodes;
    } else {
        std::vector<std::pair<Vec3, Vec3>> pairs;
        pairs.reserve(g.size());
        for (const auto& kf : g.keyframes) pairs.emplace_back(kf.F, kf.G);
        result.R = solve_wahba(pairs).R;  // DegenerateGeometry propagates
        result.nodes.assign(g.size(), Vec12::Zero());
    }

    SolveReport& rep = result.report;
    rep.initial_cost = graph_cost(g, result.nodes, result.R);

    // project onto the state-optimal manifold: the iteration then moves the
    // rotation and re-solves the exactly linear state subproblem, which keeps
    // the quadratic model honest along the rotation/dF trade-off direction
    if (!project_states(g, result.R, result.nodes)) {
        rep.final_cost = rep.initial_cost;
        return result;
    }
    double cost = graph_cost(g, result.nodes, result.R);
    rep.final_cost = cost;

    double lambda = opts.initial_damping;
    std::vector<Vec12> dx;
    Vec3 dc;
    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        rep.iterations = iter;
        const Linearized lin = linearize(g, result.nodes, result.R);
        bool accepted = false;
        double step_norm = 0.0;
        if (solve_normal_equations(lin, lambda, true, dx, dc)) {
            const Mat3 cand_R = so3_exp(dc) * result.R;
            std::vector<Vec12> cand_nodes = result.nodes;
            if (project_states(g, cand_R, cand_nodes)) {
                double sq = dc.squaredNorm();
                for (std::size_t k = 0; k < cand_nodes.size(); ++k) {
                    sq += (cand_nodes[k] - result.nodes[k]).squaredNorm();
                }
                step_norm = std::sqrt(sq);
                const double cand_cost = graph_cost(g, cand_nodes, cand_R);
                if (std::isfinite(cand_cost) && cand_cost <= cost) {
                    accepted = true;
                    const double drop = cost - cand_cost;
                    result.nodes = std::move(cand_nodes);
                    result.R = cand_R;
                    cost = cand_cost;
                    rep.final_cost = cost;
                    lambda = std::max(lambda / 3.0, 1e-12);
                    if (drop <= opts.cost_rel_tol * std::max(cost, 1e-300)) {
                        rep.converged = true;
                    }
                }
                // a sub-tolerance proposal means the optimum is reached even
                // when the cost cannot decrease further in double precision
                if (step_norm < opts.step_tol) rep.converged = true;
            }
        }
        if (opts.trace) {
            (*opts.trace) << iter << ',' << cost << ',' << lambda << ',' << step_norm << '\n';
        }
        if (rep.converged) break;
        if (!accepted) {
            lambda *= 10.0;
            if (lambda > 1e10) break;  // stuck; report non-convergence
        }
    }
    rep.damping_final = lambda;
    return result;
}

Mat3 attitude_output(const Vec12& last_node, const Mat3& R,
                     const KeyframeSnapshot& last_snap, const EarthParams& p) {
    return earth_rotation_dcm(p, last_snap.t).transpose() * R *
           so3_exp(last_node.segment<3>(kPhi)) * last_snap.C;
}

FgoAligner::FgoAligner(const FgoAlignerOptions& opts, double sample_dt)
    : opts_(opts), sample_dt_(sample_dt) {
    samples_per_keyframe_ = std::lround(opts.keyframe_dt / sample_dt);
    if (samples_per_keyframe_ < 1 ||
        std::abs(samples_per_keyframe_ * sample_dt - opts.keyframe_dt) > 1e-9) {
        throw std::invalid_argument("FgoAligner: keyframe_dt must be a multiple of the sample interval");
    }
    graph_.keyframe_dt = opts.keyframe_dt;
    graph_.noise = opts.noise;
}

void FgoAligner::add_sample(const ImuSample& s) {
    C_sum_ += track_.C_b_ib0;
    cf_sum_ += track_.C_b_ib0 * s.accel;
    accumulate_vectors(track_, s, opts_.earth, sample_dt_);
    propagate_attitude(track_, s, sample_dt_);
    if (++interval_count_ == samples_per_keyframe_) {
        cut_keyframe();
        interval_count_ = 0;
        C_sum_.setZero();
        cf_sum_.setZero();
    }
}

void FgoAligner::cut_keyframe() {
    const double inv = 1.0 / static_cast<double>(interval_count_);
    if (!graph_.keyframes.empty()) {
        // the just-finished interval belongs to the previous snapshot
        KeyframeSnapshot& prev = graph_.keyframes.back();
        prev.C_avg = C_sum_ * inv;
        prev.f_avg = cf_sum_ * inv;
    }
    KeyframeSnapshot snap;
    snap.index = static_cast<int>(graph_.size());
    snap.t = track_.t;
    snap.C = track_.C_b_ib0;
    snap.F = track_.F;
    snap.G = track_.G;
    graph_.add_keyframe(snap);
    if (graph_.size() >= 2 &&
        (graph_.size() % static_cast<std::size_t>(opts_.resolve_stride)) == 0) {
        resolve();
    }
}

void FgoAligner::resolve() {
    warm_nodes_.resize(graph_.size(), Vec12::Zero());
    graph_.nodes = warm_nodes_;
    SolveResult res;
    try {
        res = solve(graph_, warm_R_, opts_.solve);
    } catch (const DegenerateGeometry&) {
        return;  // geometry not yet observable; try again next keyframe
    }
    warm_nodes_ = res.nodes;
    warm_R_ = res.R;

    Epoch e;
    e.t = graph_.keyframes.back().t;
    e.C_b_n = attitude_output(res.nodes.back(), res.R, graph_.keyframes.back(), opts_.earth);
    e.gyro_bias = res.nodes.back().segment<3>(kEps);
    e.accel_bias = res.nodes.back().segment<3>(kNabla);
    e.report = res.report;
    epochs_.push_back(e);
}

}  // namespace align
