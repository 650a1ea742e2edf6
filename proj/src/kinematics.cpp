#include "retargetkit/kinematics.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace retarget {

FkResult fk_full(const KinematicChain& chain, const Eigen::VectorXd& q) {
    if (q.size() != chain.actuated_count())
        throw std::invalid_argument(
            fmt::format("fk: q has size {}, expected {}", q.size(), chain.actuated_count()));

    FkResult out;
    out.link_pose.assign(chain.link_count(), Pose::identity());
    out.joint_axis_world.assign(chain.actuated_count(), Eigen::Vector3d::Zero());
    out.joint_origin_world.assign(chain.actuated_count(), Eigen::Vector3d::Zero());

    for (int ji : chain.topo_order()) {
        const JointSpec& j = chain.joints()[ji];
        const int parent = chain.link_index(j.parent_link);
        const int child = chain.link_index(j.child_link);
        const Pose joint_frame = out.link_pose[parent] * j.origin;

        if (j.type == JointType::Revolute) {
            const int a = chain.actuated_index(ji);
            out.joint_origin_world[a] = joint_frame.position;
            out.joint_axis_world[a] = joint_frame.orientation * j.axis;
            Pose p = joint_frame;
            p.orientation = (joint_frame.orientation * Eigen::Quaterniond(Eigen::AngleAxisd(q[a], j.axis))).normalized();
            out.link_pose[child] = p;
        } else {
            out.link_pose[child] = joint_frame;
        }
    }
    return out;
}

std::map<std::string, Pose> forward_kinematics(const KinematicChain& chain, const JointState& q) {
    const FkResult fk = fk_full(chain, q.q);
    std::map<std::string, Pose> out;
    for (const auto& role : chain.roles()) out[role] = fk.link_pose[chain.role_link(role)];
    return out;
}

Eigen::MatrixXd position_jacobian(const KinematicChain& chain, const FkResult& fk, int link) {
    const int m = chain.actuated_count();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, m);
    const Eigen::Vector3d p = fk.link_pose[link].position;
    const std::uint64_t mask = chain.ancestor_mask(link);
    for (int a = 0; a < m; ++a) {
        if (mask & (std::uint64_t{1} << a))
            J.col(a) = fk.joint_axis_world[a].cross(p - fk.joint_origin_world[a]);
    }
    return J;
}

Eigen::MatrixXd angular_jacobian(const KinematicChain& chain, const FkResult& fk, int link) {
    const int m = chain.actuated_count();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, m);
    const std::uint64_t mask = chain.ancestor_mask(link);
    for (int a = 0; a < m; ++a) {
        if (mask & (std::uint64_t{1} << a)) J.col(a) = fk.joint_axis_world[a];
    }
    return J;
}

Eigen::MatrixXd frame_jacobian(const KinematicChain& chain, const JointState& q, const std::string& role) {
    const int link = chain.role_link(role);
    const FkResult fk = fk_full(chain, q.q);
    Eigen::MatrixXd J(6, chain.actuated_count());
    J.topRows(3) = position_jacobian(chain, fk, link);
    J.bottomRows(3) = angular_jacobian(chain, fk, link);
    return J;
}

}  // namespace retarget
