#include "align/rotation.h"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace align {

Mat3 skew(const Vec3& v) {
    Mat3 m;
    m <<    0.0, -v.z(),  v.y(),
          v.z(),    0.0, -v.x(),
         -v.y(),  v.x(),    0.0;
    return m;
}

Mat3 so3_exp(const Vec3& rotvec) {
    const double angle = rotvec.norm();
    const Mat3 k = skew(rotvec);
    if (angle < 1e-8) {
        // exp(k) = I + k + k^2/2; the dropped cubic term is below 1e-24
        return Mat3::Identity() + k + 0.5 * k * k;
    }
    const double s = std::sin(angle) / angle;
    const double c = (1.0 - std::cos(angle)) / (angle * angle);
    return Mat3::Identity() + s * k + c * k * k;
}

Vec3 so3_log(const Mat3& R) {
    // w = vee(R - R') / 2 has norm sin(angle)
    const Vec3 w(0.5 * (R(2, 1) - R(1, 2)),
                 0.5 * (R(0, 2) - R(2, 0)),
                 0.5 * (R(1, 0) - R(0, 1)));
    const double cos_angle = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
    const double sin_angle = std::clamp(w.norm(), 0.0, 1.0);
    const double angle = std::atan2(sin_angle, cos_angle);

    if (angle < 1e-8) {
        return w;  // first order: v = w * (1 + angle^2/6 + ...), correction < 1e-16
    }
    if (cos_angle > -0.9) {
        return (angle / sin_angle) * w;
    }

    // Near pi the antisymmetric part degrades; the symmetric part gives
    //   (R + R')/2 = cos(angle) I + (1 - cos(angle)) a a'
    // which stays well conditioned there. Anchor the axis at its largest
    // component and read the rest off the symmetrized off-diagonals.
    const double one_minus = 1.0 - cos_angle;  // close to 2
    int j = 0;
    R.diagonal().maxCoeff(&j);
    Vec3 axis;
    axis[j] = std::sqrt(std::max(0.0, (R(j, j) - cos_angle) / one_minus));
    for (int i = 0; i < 3; ++i) {
        if (i != j) axis[i] = (R(i, j) + R(j, i)) / (2.0 * one_minus * axis[j]);
    }
    axis.normalize();
    // Fix the sign: agree with the antisymmetric part when it is resolvable,
    // otherwise make the first nonzero component positive.
    if (sin_angle > 1e-9) {
        if (axis.dot(w) < 0.0) axis = -axis;
    } else {
        for (int i = 0; i < 3; ++i) {
            if (std::abs(axis[i]) > 1e-12) {
                if (axis[i] < 0.0) axis = -axis;
                break;
            }
        }
    }
    return angle * axis;
}

double rotation_defect(const Mat3& R) {
    return (R.transpose() * R - Mat3::Identity()).norm();
}

bool is_rotation(const Mat3& R, double tol) {
    return rotation_defect(R) < tol && std::abs(R.determinant() - 1.0) < tol;
}

Mat3 orthonormalize(const Mat3& R) {
    if (!(rotation_defect(R) < 0.1)) {
        throw std::domain_error("orthonormalize: matrix is too far from SO(3), integration diverged");
    }
    Eigen::JacobiSVD<Mat3> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 d = Mat3::Identity();
    d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    return svd.matrixU() * d * svd.matrixV().transpose();
}

EulerAngles dcm_to_heading_pitch_roll(const Mat3& C_b_n) {
    EulerAngles e;
    // forward axis in nav coordinates: (sin h cos p, cos h cos p, sin p)
    const double sp = std::clamp(C_b_n(2, 1), -1.0, 1.0);
    e.pitch_deg = std::asin(sp) * kRad2Deg;
    if (std::abs(e.pitch_deg) > 89.999) {
        e.gimbal_lock = true;
        // split the full z-rotation between heading and roll: report the sum
        // as heading, roll zero
        e.heading_deg = wrap_deg(std::atan2(C_b_n(0, 0), C_b_n(1, 0)) * kRad2Deg - 90.0);
        e.roll_deg = 0.0;
        return e;
    }
    e.heading_deg = wrap_deg(std::atan2(C_b_n(0, 1), C_b_n(1, 1)) * kRad2Deg);
    e.roll_deg = wrap_deg(std::atan2(-C_b_n(2, 0), C_b_n(2, 2)) * kRad2Deg);
    return e;
}

Mat3 heading_pitch_roll_to_dcm(double heading_deg, double pitch_deg, double roll_deg) {
    const Mat3 rz = so3_exp(Vec3(0, 0, -heading_deg * kDeg2Rad));
    const Mat3 rx = so3_exp(Vec3(pitch_deg * kDeg2Rad, 0, 0));
    const Mat3 ry = so3_exp(Vec3(0, roll_deg * kDeg2Rad, 0));
    return rz * rx * ry;
}

double wrap_deg(double deg) {
    double y = std::fmod(deg + 180.0, 360.0);
    if (y <= 0.0) y += 360.0;
    return y - 180.0;
}

}  // namespace align
