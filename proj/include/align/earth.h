/**
 * @file earth.h
 * @brief Earth rotation and gravity in the east-north-up navigation frame.
 */

#ifndef ALIGN_EARTH_H
#define ALIGN_EARTH_H

#include "align/rotation.h"

namespace align {

constexpr double kEarthRateRadS = 7.292115e-5;
constexpr double kGravityMS2    = 9.80665;
constexpr double kMilliG        = 1e-3 * kGravityMS2;   // 1 mg in m/s^2

struct EarthParams {
    double latitude_rad   = 45.0 * kDeg2Rad;
    double earth_rate_rad_s = kEarthRateRadS;
    double gravity_m_s2   = kGravityMS2;
};

/// Earth rotation rate in ENU: omega_ie * (0, cos L, sin L).
Vec3 earth_rate_n(const EarthParams& p);

/// C_n^{in0}(t) = exp(skew(t * omega_ie^n)): attitude of the navigation frame
/// relative to the inertial frame frozen at t = 0. Throws on t < 0.
Mat3 earth_rotation_dcm(const EarthParams& p, double t);

/// Gravity vector in ENU: (0, 0, -g).
Vec3 gravity_n(const EarthParams& p);

}  // namespace align

#endif  // ALIGN_EARTH_H
