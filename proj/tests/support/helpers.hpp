#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "retargetkit/chain.hpp"
#include "retargetkit/chain_io.hpp"
#include "retargetkit/hand_frame.hpp"
#include "retargetkit/kinematics.hpp"

#ifndef RETARGETKIT_TEST_DATA_DIR
#define RETARGETKIT_TEST_DATA_DIR "data"
#endif

namespace testutil {

inline std::string data_path(const std::string& rel) { return std::string(RETARGETKIT_TEST_DATA_DIR) + "/" + rel; }

inline retarget::KinematicChain load_test_chain() {
    return retarget::load_chain(data_path("chains/arm_hand_23dof.urdf"),
                                data_path("chains/arm_hand_23dof.roles.json"));
}

/// The fixed test configuration used by the frozen FK oracle values.
inline Eigen::VectorXd oracle_q() {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(23);
    q[0] = 0.3; q[1] = 0.9; q[2] = -0.2; q[3] = -1.3; q[4] = 0.15; q[5] = 0.4; q[6] = -0.1;
    for (int base : {7, 11, 15}) {
        q[base + 1] = 0.5; q[base + 2] = 0.6; q[base + 3] = 0.4;
    }
    q[19] = 0.8; q[20] = 0.3; q[21] = 0.5; q[22] = 0.4;
    return q;
}

/// Open-fingers configuration: all pinch distances above eps1 (no rescaling
/// active) and the joint-regularized coordinates (7,11,15,18,20) at zero,
/// so an FK-derived human frame is an exact global minimum of the full
/// objective.
inline Eigen::VectorXd exact_match_q() {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(23);
    q[0] = 0.3; q[1] = 0.9; q[2] = -0.2; q[3] = -1.3; q[4] = 0.15; q[5] = 0.4; q[6] = -0.1;
    q[8] = 0.3; q[9] = 0.3; q[10] = 0.2;
    q[12] = 0.25; q[13] = 0.3; q[14] = 0.2;
    q[16] = 0.3; q[17] = 0.25;
    q[19] = -0.1; q[21] = 0.15; q[22] = 0.1;
    return q;
}

/// Uniform random q inside the joint limits.
inline Eigen::VectorXd random_q(const retarget::KinematicChain& chain, std::mt19937_64& rng) {
    const Eigen::VectorXd lo = chain.lower_limits();
    const Eigen::VectorXd hi = chain.upper_limits();
    Eigen::VectorXd q(chain.actuated_count());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int j = 0; j < q.size(); ++j) q[j] = lo[j] + u(rng) * (hi[j] - lo[j]);
    return q;
}

/// Human frame built from robot FK at q, inverse-scaled about the wrist so
/// that scaling it by `hand_scale` reproduces the robot keypoints exactly.
inline retarget::HumanHandFrame human_from_fk(const retarget::KinematicChain& chain, const Eigen::VectorXd& q,
                                              double hand_scale, double timestamp = 0.0) {
    const retarget::FkResult fk = retarget::fk_full(chain, q);
    auto pos = [&](const std::string& role) { return fk.link_pose[chain.role_link(role)].position; };
    retarget::HumanHandFrame h;
    h.timestamp = timestamp;
    h.wrist = fk.link_pose[chain.role_link("wrist")];
    const Eigen::Vector3d w = h.wrist.position;
    auto unscale = [&](const Eigen::Vector3d& p) { return (w + (p - w) / hand_scale).eval(); };
    h.thumb_tip = unscale(pos("thumb_tip"));
    for (int i = 1; i < chain.finger_count(); ++i)
        h.fingertips.push_back(unscale(pos("fingertip_" + std::to_string(i))));
    for (int i = 0; i < chain.finger_count(); ++i)
        h.dips.push_back(unscale(pos("dip_" + std::to_string(i))));
    return h;
}

/// Randomly perturbed human frame near a reachable robot configuration.
inline retarget::HumanHandFrame random_human_frame(const retarget::KinematicChain& chain, std::mt19937_64& rng,
                                                   double hand_scale) {
    const Eigen::VectorXd q = random_q(chain, rng);
    retarget::HumanHandFrame h = human_from_fk(chain, q, hand_scale);
    std::uniform_real_distribution<double> u(-0.015, 0.015);
    auto jitter = [&](Eigen::Vector3d& p) { p += Eigen::Vector3d(u(rng), u(rng), u(rng)); };
    jitter(h.thumb_tip);
    for (auto& p : h.fingertips) jitter(p);
    for (auto& p : h.dips) jitter(p);
    std::uniform_real_distribution<double> ang(-0.3, 0.3);
    h.wrist.orientation = (h.wrist.orientation *
                           Eigen::Quaterniond(Eigen::AngleAxisd(ang(rng), Eigen::Vector3d::Random().normalized())))
                              .normalized();
    return h;
}

/// Central finite-difference gradient of a scalar function of q.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& q,
                                   double h = 1e-6) {
    Eigen::VectorXd g(q.size());
    Eigen::VectorXd qp = q;
    for (int j = 0; j < q.size(); ++j) {
        const double orig = q[j];
        qp[j] = orig + h;
        const double fp = f(qp);
        qp[j] = orig - h;
        const double fm = f(qp);
        qp[j] = orig;
        g[j] = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// Relative gradient error, infinity norms, floored at 1.
inline double grad_rel_err(const Eigen::VectorXd& analytic, const Eigen::VectorXd& fd) {
    const double scale = std::max(1.0, fd.lpNorm<Eigen::Infinity>());
    return (analytic - fd).lpNorm<Eigen::Infinity>() / scale;
}

// ---------------------------------------------------------------------------
// Independent FK oracle: brute-force homogeneous 4x4 transform chain
// multiplication. Shares nothing with the production quaternion FK path.
// ---------------------------------------------------------------------------

inline Eigen::Matrix4d oracle_joint_transform(const retarget::JointSpec& j, double q) {
    Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
    T.block<3, 3>(0, 0) = j.origin.orientation.toRotationMatrix();
    T.block<3, 1>(0, 3) = j.origin.position;
    if (j.type == retarget::JointType::Revolute) {
        Eigen::Matrix4d R = Eigen::Matrix4d::Identity();
        R.block<3, 3>(0, 0) = Eigen::AngleAxisd(q, j.axis).toRotationMatrix();
        T = T * R;
    }
    return T;
}

inline Eigen::Matrix4d oracle_link_transform(const retarget::KinematicChain& chain, const Eigen::VectorXd& q,
                                             int link) {
    // Walk up to the root, then multiply top-down.
    std::vector<int> path;
    for (int l = link; l != 0; l = chain.parent_link_of(l)) path.push_back(l);
    Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        const int ji = chain.parent_joint_of(*it);
        const auto& j = chain.joints()[static_cast<std::size_t>(ji)];
        const int a = chain.actuated_index(ji);
        T = T * oracle_joint_transform(j, a >= 0 ? q[a] : 0.0);
    }
    return T;
}

}  // namespace testutil
