#include "align/earth.h"

#include <cmath>
#include <stdexcept>

namespace align {

Vec3 earth_rate_n(const EarthParams& p) {
    return p.earth_rate_rad_s * Vec3(0.0, std::cos(p.latitude_rad), std::sin(p.latitude_rad));
}

Mat3 earth_rotation_dcm(const EarthParams& p, double t) {
    if (t < 0.0) {
        throw std::invalid_argument("earth_rotation_dcm: t must be non-negative");
    }
    return so3_exp(t * earth_rate_n(p));
}

Vec3 gravity_n(const EarthParams& p) {
    return Vec3(0.0, 0.0, -p.gravity_m_s2);
}

}  // namespace align
