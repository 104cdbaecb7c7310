/**
 * @file rotation.h
 * @brief SO(3) utilities: skew operator, Rodrigues exp/log, orthonormalization,
 *        heading/pitch/roll extraction.
 *
 * Conventions used throughout the library:
 *   - DCM C_a^b maps coordinates of a vector from frame a to frame b.
 *   - Navigation frame is east-north-up; body axes are x-right, y-forward,
 *     z-up; heading is the bow direction measured east of north.
 */

#ifndef ALIGN_ROTATION_H
#define ALIGN_ROTATION_H

#include <Eigen/Core>

namespace align {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

constexpr double kDeg2Rad = M_PI / 180.0;
constexpr double kRad2Deg = 180.0 / M_PI;

/// skew(v) * w == v x w
Mat3 skew(const Vec3& v);

/// Rodrigues formula, exact for any rotation vector; second-order series
/// below an angle of 1e-8 rad to avoid division by a near-zero angle.
Mat3 so3_exp(const Vec3& rotvec);

/// Inverse of so3_exp. Returned vector has norm in [0, pi]. The angle-pi
/// branch recovers the axis from the symmetric part R + I; the axis sign is
/// tie-broken so the first nonzero component is positive.
Vec3 so3_log(const Mat3& R);

/// Frobenius distance of R'R from identity, used by the rotation invariants.
double rotation_defect(const Mat3& R);

/// True when R'R = I and det(R) = +1 within tol (Frobenius / absolute).
bool is_rotation(const Mat3& R, double tol = 1e-9);

/// Nearest rotation in the Frobenius sense (polar projection through SVD).
/// Throws std::domain_error when ||R'R - I||_F >= 0.1, which signals that an
/// integration has diverged rather than merely drifted.
Mat3 orthonormalize(const Mat3& R);

struct EulerAngles {
    double heading_deg = 0.0;  // (-180, 180]
    double pitch_deg   = 0.0;  // [-90, 90]
    double roll_deg    = 0.0;  // (-180, 180]
    bool gimbal_lock   = false;
};

/// Decomposes C_b^n into heading/pitch/roll (degrees). Sets gimbal_lock when
/// |pitch| > 89.999 deg, in which case only heading+roll is meaningful.
EulerAngles dcm_to_heading_pitch_roll(const Mat3& C_b_n);

/// Inverse composition: C_b^n = Rz(-heading) * Rx(pitch) * Ry(roll).
Mat3 heading_pitch_roll_to_dcm(double heading_deg, double pitch_deg, double roll_deg);

/// Wraps an angle in degrees to (-180, 180].
double wrap_deg(double deg);

}  // namespace align

#endif  // ALIGN_ROTATION_H
