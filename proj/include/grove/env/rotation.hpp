#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace grove::env {

/// Euler angles use the extrinsic XYZ convention: rotate about the fixed X
/// axis, then fixed Y, then fixed Z, i.e. R = Rz(z) * Ry(y) * Rx(x).
Eigen::Quaterniond euler_xyz_to_quat(const Eigen::Vector3d& angles);

/// Inverse of euler_xyz_to_quat. y lies in [-pi/2, pi/2]; x and z in
/// [-pi, pi]. At gimbal lock (|cos y| < 1e-9) x is set to 0 and the whole
/// residual rotation is attributed to z.
Eigen::Vector3d quat_to_euler_xyz(const Eigen::Quaterniond& q);

double wrap_angle(double a);

/// World-frame angular velocity that takes `from` to `to` over dt seconds.
Eigen::Vector3d angular_velocity(const Eigen::Quaterniond& from, const Eigen::Quaterniond& to, double dt);

}  // namespace grove::env
