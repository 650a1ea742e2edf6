#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "retargetkit/geometry.hpp"

namespace retarget {

enum class JointType { Revolute, Fixed };

struct JointSpec {
    std::string name;
    JointType type = JointType::Fixed;
    std::string parent_link;
    std::string child_link;
    Pose origin;                                   // child frame in parent frame at q = 0
    Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();  // revolute only, unit, in joint frame
    double lower = 0.0;                            // revolute only, radians
    double upper = 0.0;
};

/// Full actuated joint vector with a timestamp.
struct JointState {
    Eigen::VectorXd q;
    double timestamp = 0.0;
};

/// Kinematic tree of revolute/fixed joints plus named task frames.
///
/// Frame roles used by the retargeting objective:
///   wrist, thumb_tip, fingertip_1 .. fingertip_{N-1}, dip_0 .. dip_{N-1}
/// where finger 0 is the thumb. Construction validates the tree and all
/// invariants; operations on a built chain never re-check them.
class KinematicChain {
public:
    /// Validates and indexes the chain. Throws std::invalid_argument on:
    /// non-tree structure, non-unit revolute axis, inverted limits,
    /// unresolvable frame role, or inconsistent finger roles.
    static KinematicChain build(std::string name, std::vector<JointSpec> joints,
                                std::map<std::string, std::string> frame_roles);

    const std::string& name() const { return name_; }
    const std::vector<JointSpec>& joints() const { return joints_; }
    const std::map<std::string, std::string>& frame_roles() const { return frame_roles_; }

    int actuated_count() const { return actuated_count_; }
    int finger_count() const { return finger_count_; }
    int link_count() const { return static_cast<int>(link_names_.size()); }

    const std::string& root_link() const { return link_names_[0]; }
    const std::vector<std::string>& link_names() const { return link_names_; }
    int link_index(const std::string& link) const;

    /// Link index a role resolves to.
    int role_link(const std::string& role) const;
    /// All roles, sorted.
    std::vector<std::string> roles() const;

    Eigen::VectorXd lower_limits() const { return lower_; }
    Eigen::VectorXd upper_limits() const { return upper_; }

    /// Clamp q elementwise into the joint limits.
    Eigen::VectorXd clamp(const Eigen::VectorXd& q) const;

    // Topology accessors used by the kinematics kernel.
    int parent_link_of(int link) const { return parent_link_[link]; }
    int parent_joint_of(int link) const { return parent_joint_[link]; }
    int actuated_index(int joint) const { return actuated_index_[joint]; }
    /// Bitmask over actuated joints on the path root -> link.
    std::uint64_t ancestor_mask(int link) const { return ancestor_mask_[link]; }
    /// Joint indices in topological order (parents first).
    const std::vector<int>& topo_order() const { return topo_order_; }

private:
    std::string name_;
    std::vector<JointSpec> joints_;
    std::map<std::string, std::string> frame_roles_;

    int actuated_count_ = 0;
    int finger_count_ = 0;

    std::vector<std::string> link_names_;          // [0] is the root
    std::map<std::string, int> link_index_;
    std::vector<int> parent_link_;                 // -1 for root
    std::vector<int> parent_joint_;                // -1 for root
    std::vector<int> actuated_index_;              // per joint, -1 if fixed
    std::vector<std::uint64_t> ancestor_mask_;     // per link
    std::vector<int> topo_order_;
    std::map<std::string, int> role_link_;
    Eigen::VectorXd lower_, upper_;
};

}  // namespace retarget
