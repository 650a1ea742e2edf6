#include "retargetkit/geometry.hpp"

#include <cmath>

namespace retarget {

Pose Pose::operator*(const Pose& other) const {
    Pose out;
    out.position = position + orientation * other.position;
    out.orientation = (orientation * other.orientation).normalized();
    return out;
}

Eigen::Vector3d Pose::apply(const Eigen::Vector3d& p) const {
    return position + orientation * p;
}

Eigen::Quaterniond quat_from_rpy(double roll, double pitch, double yaw) {
    // URDF rpy: fixed-axis rotations applied as Rz(yaw) * Ry(pitch) * Rx(roll).
    Eigen::Quaterniond q = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
                           Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
                           Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX());
    return q.normalized();
}

double quat_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
    // atan2 form: well conditioned near zero, unlike acos of the dot product.
    const Eigen::Quaterniond d = a.conjugate() * b;
    return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
}

Eigen::Vector3d rotation_vector(const Eigen::Quaterniond& q_in) {
    Eigen::Quaterniond q = q_in.normalized();
    if (q.w() < 0.0) q.coeffs() *= -1.0;
    const Eigen::Vector3d v = q.vec();
    const double vn = v.norm();
    if (vn < 1e-12) return 2.0 * v;  // small-angle limit, w ~= 1
    const double angle = 2.0 * std::atan2(vn, q.w());
    return (angle / vn) * v;
}

bool is_unit_quaternion(const Eigen::Quaterniond& q, double tol) {
    return std::abs(q.norm() - 1.0) <= tol;
}

}  // namespace retarget
