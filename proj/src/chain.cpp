#include "retargetkit/chain.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace retarget {

namespace {

bool parse_indexed_role(const std::string& role, const std::string& prefix, int& index) {
    if (role.rfind(prefix, 0) != 0) return false;
    const std::string tail = role.substr(prefix.size());
    if (tail.empty() || !std::all_of(tail.begin(), tail.end(), [](char c) { return c >= '0' && c <= '9'; }))
        return false;
    index = std::stoi(tail);
    return true;
}

}  // namespace

KinematicChain KinematicChain::build(std::string name, std::vector<JointSpec> joints,
                                     std::map<std::string, std::string> frame_roles) {
    KinematicChain c;
    c.name_ = std::move(name);
    c.joints_ = std::move(joints);
    c.frame_roles_ = std::move(frame_roles);

    if (c.joints_.empty()) throw std::invalid_argument("chain: no joints");

    // Collect links; the root is the link that is never a child.
    std::set<std::string> children;
    std::set<std::string> all_links;
    for (const auto& j : c.joints_) {
        if (j.parent_link.empty() || j.child_link.empty())
            throw std::invalid_argument(fmt::format("chain: joint '{}' missing parent or child link", j.name));
        if (!children.insert(j.child_link).second)
            throw std::invalid_argument(fmt::format("chain: link '{}' has more than one parent joint", j.child_link));
        all_links.insert(j.parent_link);
        all_links.insert(j.child_link);
    }
    std::vector<std::string> roots;
    for (const auto& l : all_links)
        if (!children.count(l)) roots.push_back(l);
    if (roots.size() != 1)
        throw std::invalid_argument(fmt::format("chain: expected exactly one root link, found {}", roots.size()));

    c.link_names_.push_back(roots[0]);
    c.link_index_[roots[0]] = 0;
    for (const auto& j : c.joints_) {
        if (!c.link_index_.count(j.child_link)) {
            c.link_index_[j.child_link] = static_cast<int>(c.link_names_.size());
            c.link_names_.push_back(j.child_link);
        }
    }

    // Per-joint checks and actuation indexing (actuated order == joint declaration order).
    c.actuated_index_.assign(c.joints_.size(), -1);
    std::vector<double> lower, upper;
    for (std::size_t ji = 0; ji < c.joints_.size(); ++ji) {
        const auto& j = c.joints_[ji];
        if (!is_unit_quaternion(j.origin.orientation))
            throw std::invalid_argument(fmt::format("chain: joint '{}' origin quaternion is not unit", j.name));
        if (j.type == JointType::Revolute) {
            if (std::abs(j.axis.norm() - 1.0) > 1e-9)
                throw std::invalid_argument(fmt::format("chain: joint '{}' axis is not unit", j.name));
            if (!(j.lower <= j.upper))
                throw std::invalid_argument(fmt::format("chain: joint '{}' has lower > upper", j.name));
            c.actuated_index_[ji] = c.actuated_count_++;
            lower.push_back(j.lower);
            upper.push_back(j.upper);
        }
    }
    if (c.actuated_count_ > 64)
        throw std::invalid_argument("chain: more than 64 actuated joints unsupported");
    c.lower_ = Eigen::Map<Eigen::VectorXd>(lower.data(), static_cast<long>(lower.size()));
    c.upper_ = Eigen::Map<Eigen::VectorXd>(upper.data(), static_cast<long>(upper.size()));

    // Topology: parent pointers, cycle check via topological sort.
    const int n_links = c.link_count();
    c.parent_link_.assign(n_links, -1);
    c.parent_joint_.assign(n_links, -1);
    for (std::size_t ji = 0; ji < c.joints_.size(); ++ji) {
        const auto& j = c.joints_[ji];
        if (!c.link_index_.count(j.parent_link))
            throw std::invalid_argument(fmt::format("chain: joint '{}' parent link '{}' unknown", j.name, j.parent_link));
        const int child = c.link_index_.at(j.child_link);
        c.parent_link_[child] = c.link_index_.at(j.parent_link);
        c.parent_joint_[child] = static_cast<int>(ji);
    }

    std::vector<int> depth(n_links, -1);
    depth[0] = 0;
    bool progress = true;
    int resolved = 1;
    while (progress) {
        progress = false;
        for (int l = 1; l < n_links; ++l) {
            if (depth[l] >= 0) continue;
            const int p = c.parent_link_[l];
            if (p >= 0 && depth[p] >= 0) {
                depth[l] = depth[p] + 1;
                ++resolved;
                progress = true;
            }
        }
    }
    if (resolved != n_links)
        throw std::invalid_argument("chain: cycle detected or disconnected link");

    // Joint evaluation order: by child link depth.
    c.topo_order_.resize(c.joints_.size());
    std::vector<std::pair<int, int>> by_depth;  // (depth, joint)
    for (std::size_t ji = 0; ji < c.joints_.size(); ++ji)
        by_depth.emplace_back(depth[c.link_index_.at(c.joints_[ji].child_link)], static_cast<int>(ji));
    std::sort(by_depth.begin(), by_depth.end());
    for (std::size_t k = 0; k < by_depth.size(); ++k) c.topo_order_[k] = by_depth[k].second;

    // Ancestor masks over actuated joints.
    c.ancestor_mask_.assign(n_links, 0);
    for (int ji : c.topo_order_) {
        const auto& j = c.joints_[ji];
        const int child = c.link_index_.at(j.child_link);
        const int parent = c.link_index_.at(j.parent_link);
        std::uint64_t mask = c.ancestor_mask_[parent];
        if (c.actuated_index_[ji] >= 0) mask |= (std::uint64_t{1} << c.actuated_index_[ji]);
        c.ancestor_mask_[child] = mask;
    }

    // Roles: resolve link names and derive the finger count.
    int max_fingertip = 0;
    std::set<int> dip_indices;
    for (const auto& [role, link] : c.frame_roles_) {
        auto it = c.link_index_.find(link);
        if (it == c.link_index_.end())
            throw std::invalid_argument(fmt::format("chain: role '{}' names unknown link '{}'", role, link));
        c.role_link_[role] = it->second;
        int idx = 0;
        if (parse_indexed_role(role, "fingertip_", idx)) {
            if (idx < 1) throw std::invalid_argument(fmt::format("chain: role '{}' index must be >= 1", role));
            max_fingertip = std::max(max_fingertip, idx);
        } else if (parse_indexed_role(role, "dip_", idx)) {
            dip_indices.insert(idx);
        } else if (role != "wrist" && role != "thumb_tip") {
            throw std::invalid_argument(fmt::format("chain: unknown frame role '{}'", role));
        }
    }
    if (!c.role_link_.count("wrist")) throw std::invalid_argument("chain: missing role 'wrist'");
    if (!c.role_link_.count("thumb_tip")) throw std::invalid_argument("chain: missing role 'thumb_tip'");
    c.finger_count_ = max_fingertip + 1;
    if (c.finger_count_ < 2)
        throw std::invalid_argument("chain: need at least one primary finger role (fingertip_1)");
    for (int i = 1; i < c.finger_count_; ++i)
        if (!c.role_link_.count(fmt::format("fingertip_{}", i)))
            throw std::invalid_argument(fmt::format("chain: fingertip roles not contiguous, missing fingertip_{}", i));
    for (int i = 0; i < c.finger_count_; ++i)
        if (!dip_indices.count(i))
            throw std::invalid_argument(fmt::format("chain: missing role dip_{}", i));

    return c;
}

int KinematicChain::link_index(const std::string& link) const {
    auto it = link_index_.find(link);
    if (it == link_index_.end())
        throw std::invalid_argument(fmt::format("chain: unknown link '{}'", link));
    return it->second;
}

int KinematicChain::role_link(const std::string& role) const {
    auto it = role_link_.find(role);
    if (it == role_link_.end())
        throw std::invalid_argument(fmt::format("chain: unknown frame role '{}'", role));
    return it->second;
}

std::vector<std::string> KinematicChain::roles() const {
    std::vector<std::string> out;
    out.reserve(role_link_.size());
    for (const auto& [role, _] : role_link_) out.push_back(role);
    return out;
}

Eigen::VectorXd KinematicChain::clamp(const Eigen::VectorXd& q) const {
    if (q.size() != actuated_count_)
        throw std::invalid_argument(fmt::format("chain: q has size {}, expected {}", q.size(), actuated_count_));
    return q.cwiseMax(lower_).cwiseMin(upper_);
}

}  // namespace retarget
