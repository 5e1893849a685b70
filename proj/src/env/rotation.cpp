#include "grove/env/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace grove::env {

Eigen::Quaterniond euler_xyz_to_quat(const Eigen::Vector3d& angles) {
    const Eigen::Quaterniond qx(Eigen::AngleAxisd(angles.x(), Eigen::Vector3d::UnitX()));
    const Eigen::Quaterniond qy(Eigen::AngleAxisd(angles.y(), Eigen::Vector3d::UnitY()));
    const Eigen::Quaterniond qz(Eigen::AngleAxisd(angles.z(), Eigen::Vector3d::UnitZ()));
    return (qz * qy * qx).normalized();
}

Eigen::Vector3d quat_to_euler_xyz(const Eigen::Quaterniond& q) {
    const Eigen::Matrix3d r = q.normalized().toRotationMatrix();
    const double sy = std::clamp(-r(2, 0), -1.0, 1.0);
    const double y = std::asin(sy);
    double x = 0.0;
    double z = 0.0;
    if (std::abs(std::cos(y)) > 1e-9) {
        x = std::atan2(r(2, 1), r(2, 2));
        z = std::atan2(r(1, 0), r(0, 0));
    } else {
        z = std::atan2(-r(0, 1), r(1, 1));
    }
    return {wrap_angle(x), y, wrap_angle(z)};
}

double wrap_angle(double a) {
    constexpr double pi = std::numbers::pi;
    if (a >= -pi && a <= pi) {
        return a;
    }
    a = std::fmod(a + pi, 2.0 * pi);
    if (a < 0.0) {
        a += 2.0 * pi;
    }
    return a - pi;
}

Eigen::Vector3d angular_velocity(const Eigen::Quaterniond& from, const Eigen::Quaterniond& to, double dt) {
    Eigen::Quaterniond delta = to * from.conjugate();
    if (delta.w() < 0.0) {
        delta.coeffs() = -delta.coeffs();
    }
    const Eigen::AngleAxisd aa(delta.normalized());
    return aa.axis() * (aa.angle() / dt);
}

}  // namespace grove::env
