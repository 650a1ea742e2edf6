#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "retargetkit/chain.hpp"

namespace retarget {

/// World pose of every link plus per-joint world axes/origins, one FK pass.
struct FkResult {
    std::vector<Pose> link_pose;                     // indexed by link
    std::vector<Eigen::Vector3d> joint_axis_world;   // indexed by actuated joint
    std::vector<Eigen::Vector3d> joint_origin_world;

    const Pose& pose_of_link(int link) const { return link_pose[link]; }
};

/// Full FK pass. Pure; q is not clamped (FK is defined for any q).
FkResult fk_full(const KinematicChain& chain, const Eigen::VectorXd& q);

/// Poses of all named frame roles in the world frame.
std::map<std::string, Pose> forward_kinematics(const KinematicChain& chain, const JointState& q);

/// 3 x m position Jacobian of a link frame, from a completed FK pass.
Eigen::MatrixXd position_jacobian(const KinematicChain& chain, const FkResult& fk, int link);

/// 3 x m angular-velocity Jacobian of a link frame.
Eigen::MatrixXd angular_jacobian(const KinematicChain& chain, const FkResult& fk, int link);

/// 6 x m geometric Jacobian of a frame role (linear rows on top).
/// Columns of joints not on the path root -> frame are exactly zero.
Eigen::MatrixXd frame_jacobian(const KinematicChain& chain, const JointState& q, const std::string& role);

}  // namespace retarget
