// Dense reference minimizer for small factor graphs. Residuals are written
// out from the model definition and minimized with generic dense linear
// algebra plus finite-difference Newton polish on the rotation, so the result
// is independent of the solver's sparse elimination and damping logic.

#ifndef ALIGN_TESTS_DENSE_ORACLE_H
#define ALIGN_TESTS_DENSE_ORACLE_H

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "align/fgo_align.h"
#include "oracles.h"

namespace align::testing {

inline double dense_cost(const FactorGraph& g, const Eigen::VectorXd& x, const Mat3& R) {
    const std::size_t n = g.size();
    const double dt = g.keyframe_dt;
    double cost = 0.0;
    for (int i = 0; i < 12; ++i) {
        cost += x[i] * x[i] / g.noise.prior_var[i];
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const auto& kf = g.keyframes[k];
        const Eigen::Matrix<double, 12, 1> xk = x.segment<12>(12 * k);
        const Eigen::Matrix<double, 12, 1> xk1 = x.segment<12>(12 * (k + 1));
        Eigen::Matrix<double, 12, 1> pred;
        pred.segment<3>(0) = xk.segment<3>(0) - kf.C_avg * xk.segment<3>(6) * dt;
        pred.segment<3>(3) = xk.segment<3>(3) +
                             (kf.C_avg * xk.segment<3>(9) + kf.f_avg.cross(Vec3(xk.segment<3>(0)))) * dt;
        pred.segment<3>(6) = xk.segment<3>(6);
        pred.segment<3>(9) = xk.segment<3>(9);
        const Eigen::Matrix<double, 12, 1> r = xk1 - pred;
        for (int i = 0; i < 12; ++i) cost += r[i] * r[i] / g.noise.ins_var[i];
    }
    for (std::size_t k = 0; k < n; ++k) {
        const auto& kf = g.keyframes[k];
        const Vec3 r = R * (kf.F - Vec3(x.segment<3>(12 * k + 3))) - kf.G;
        cost += r.squaredNorm() / g.noise.iosf_var(kf.t);
    }
    return cost;
}

/// Exact minimizer over the node states for a fixed rotation (the problem is
/// linear in them), via dense QR on the stacked weighted rows.
inline Eigen::VectorXd dense_solve_states(const FactorGraph& g, const Mat3& R) {
    const std::size_t n = g.size();
    const double dt = g.keyframe_dt;
    const auto cols = static_cast<Eigen::Index>(12 * n);
    const auto rows = static_cast<Eigen::Index>(12 + 12 * (n - 1) + 3 * n);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);

    Eigen::Index row = 0;
    for (int i = 0; i < 12; ++i) {
        M(row + i, i) = 1.0 / std::sqrt(g.noise.prior_var[i]);
    }
    row += 12;

    for (std::size_t k = 0; k + 1 < n; ++k) {
        const auto& kf = g.keyframes[k];
        Eigen::Matrix<double, 12, 12> A = Eigen::Matrix<double, 12, 12>::Identity();
        A.block<3, 3>(0, 6) = -kf.C_avg * dt;
        A.block<3, 3>(3, 0) = skew(kf.f_avg) * dt;
        A.block<3, 3>(3, 9) = kf.C_avg * dt;
        for (int i = 0; i < 12; ++i) {
            const double w = 1.0 / std::sqrt(g.noise.ins_var[i]);
            M.block<1, 12>(row + i, static_cast<Eigen::Index>(12 * k)) = -w * A.row(i);
            M(row + i, static_cast<Eigen::Index>(12 * (k + 1)) + i) = w;
        }
        row += 12;
    }

    for (std::size_t k = 0; k < n; ++k) {
        const auto& kf = g.keyframes[k];
        const double w = 1.0 / std::sqrt(g.noise.iosf_var(kf.t));
        M.block<3, 3>(row, static_cast<Eigen::Index>(12 * k) + 3) = w * R;
        b.segment<3>(row) = w * (R * kf.F - kf.G);
        row += 3;
    }
    return M.colPivHouseholderQr().solve(b);
}

/// Newton polish on the profile cost g(R) = min_x cost(x, R): the states are
/// re-solved exactly at every probe, so the finite differences see the true
/// 3-dof landscape of the eliminated problem.
inline double dense_polish(const FactorGraph& g, Mat3 R, double* best_cost_out = nullptr) {
    auto profile = [&](const Mat3& Rr) { return dense_cost(g, dense_solve_states(g, Rr), Rr); };
    double cost = profile(R);
    for (int iter = 0; iter < 100; ++iter) {
        const double h = 1e-5;
        Vec3 grad;
        Mat3 hess;
        auto eval = [&](const Vec3& d) { return profile(so3_exp(d) * R); };
        const double c0 = cost;
        for (int i = 0; i < 3; ++i) {
            Vec3 e = Vec3::Zero();
            e[i] = h;
            const double cp = eval(e), cm = eval(-e);
            grad[i] = (cp - cm) / (2 * h);
            hess(i, i) = (cp - 2 * c0 + cm) / (h * h);
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = i + 1; j < 3; ++j) {
                Vec3 ei = Vec3::Zero(), ej = Vec3::Zero();
                ei[i] = h;
                ej[j] = h;
                hess(i, j) = hess(j, i) =
                    (eval(ei + ej) - eval(ei - ej) - eval(ej - ei) + eval(-ei - ej)) / (4 * h * h);
            }
        }
        hess.diagonal().array() += 1e-9 * hess.diagonal().cwiseAbs().maxCoeff() + 1e-30;
        Vec3 step = -hess.ldlt().solve(grad);
        if (!step.allFinite() || step.norm() > 1.0) {
            step = -grad.normalized() * std::min(0.5, grad.norm());
        }
        double scale = 1.0;
        bool improved = false;
        for (int bt = 0; bt < 40; ++bt) {
            const Mat3 Rc = so3_exp(scale * step) * R;
            const double cc = profile(Rc);
            if (cc < cost * (1.0 - 1e-14)) {
                R = Rc;
                cost = cc;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) break;
    }
    if (best_cost_out) *best_cost_out = cost;
    return cost;
}

/// Global dense minimum estimate: polish from random rotation starts.
inline double dense_global_minimum(const FactorGraph& g, int starts, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < starts; ++i) {
        const Mat3 R0 = i == 0 ? Mat3::Identity() : random_rotation(rng);
        best = std::min(best, dense_polish(g, R0));
    }
    return best;
}

}  // namespace align::testing

#endif  // ALIGN_TESTS_DENSE_ORACLE_H
