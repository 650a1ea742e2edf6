#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace retarget {

/// Rigid transform, position in meters, orientation as a unit quaternion.
struct Pose {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

    /// Composition: this * other (other expressed in this frame).
    Pose operator*(const Pose& other) const;

    /// Apply to a point expressed in this frame.
    Eigen::Vector3d apply(const Eigen::Vector3d& p) const;

    static Pose identity() { return {}; }
};

/// Quaternion from fixed-axis XYZ roll/pitch/yaw (URDF rpy convention).
Eigen::Quaterniond quat_from_rpy(double roll, double pitch, double yaw);

/// Geodesic rotation angle between two orientations, in [0, pi].
double quat_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b);

/// Rotation vector (axis * angle) of q, angle in [0, pi].
Eigen::Vector3d rotation_vector(const Eigen::Quaterniond& q);

/// True if |q| is within tol of 1.
bool is_unit_quaternion(const Eigen::Quaterniond& q, double tol = 1e-9);

}  // namespace retarget
