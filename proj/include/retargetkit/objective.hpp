#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "retargetkit/chain.hpp"
#include "retargetkit/hand_frame.hpp"
#include "retargetkit/kinematics.hpp"

namespace retarget {

enum class GlobalAnchor { ThumbTip, WristPosition };
enum class SwitchingWeightShape { Sigmoid, Step };

/// All weights, thresholds, scale factor and term-enable flags of the
/// retargeting objective. Ablations are values of this type.
struct ObjectiveConfig {
    // Term weights on hand pose, wrist rotation, fingertip position,
    // fingertip orientation, and pinch, in that order.
    double lambda1 = 10.0;
    double lambda2 = 0.1;
    double lambda3 = 1.0;
    double lambda4 = 10.0;
    double lambda5 = 10.0;

    double eps1 = 0.1;    // m, outer pinch threshold
    double eps2 = 0.01;   // m, inner pinch threshold; eps2 < eps1
    double sigmoid_slope = 10.0;
    double hand_scale = 1.5;  // human keypoint rescale about the wrist

    Eigen::VectorXd w_pos;  // per-joint, length m
    Eigen::VectorXd w_vel;  // per-joint, length m
    Eigen::VectorXd q_bar;  // regularization configuration, length m

    bool hand_pose_term = true;
    bool pinch_term = true;
    bool pinch_rescale = true;
    bool fingertip_pos_term = true;
    bool fingertip_rot_term = true;
    bool fingertip_rot_uses_wrist_to_dip = false;
    GlobalAnchor global_anchor = GlobalAnchor::ThumbTip;
    bool joint_reg = true;
    bool vel_reg = true;
    bool complementary_shape_weight = true;
    SwitchingWeightShape weight_shape = SwitchingWeightShape::Sigmoid;

    /// Throws std::invalid_argument on violated invariants (eps ordering,
    /// negative weights, non-finite values, mismatched vector lengths).
    void validate(int actuated_count) const;
};

/// Defaults for a chain: paper hyper-parameters, with w_pos 0.5 at joints
/// {7,11,15,18} and 0.1 at joint 20 (when present), w_vel 0.1 for the first
/// 7 joints and 0.01 for the rest, q_bar = 0.
ObjectiveConfig default_config(const KinematicChain& chain, double hand_scale = 1.5);

/// sigmoid(x, c, w) = 1 / (1 + e^{w (x - c)}); exponent clamped to [-50, 50].
double sigmoid(double x, double c, double w);

/// Pinch-range rescale: 0 below eps2, linear [eps2, eps1] -> [0, eps1],
/// identity above eps1. Continuous and nondecreasing.
double rescale_distance(double d, double eps1, double eps2);

/// Value and gradient of one objective term at a configuration.
struct TermEval {
    double value = 0.0;
    Eigen::VectorXd gradient;
};

/// Per-frame precomputed targets: human keypoints scaled about the wrist,
/// pinch distances and the resulting switching weights / rescaled targets.
/// All of these are constants with respect to q within a frame.
struct FrameTargets {
    HumanHandFrame scaled;                 // human frame after hand_scale
    std::vector<double> pinch_distance;    // d_i per primary finger, size N-1
    std::vector<double> pinch_weight;      // s(d_i)
    std::vector<double> shape_weight;      // s~(d_i) per finger, size N (thumb = 1)
    std::vector<Eigen::Vector3d> pinch_target;  // l(d_i) * gamma_hat_i (or gamma_i raw)
};

FrameTargets make_frame_targets(const HumanHandFrame& human, const ObjectiveConfig& cfg);

/// Robot-side poses and Jacobians of every frame the objective reads,
/// from one FK pass.
struct FkEval {
    Pose wrist;
    Eigen::MatrixXd wrist_jp;      // 3 x m
    Eigen::MatrixXd wrist_jr;      // 3 x m, angular
    std::vector<Pose> tip;         // per finger, size N (0 = thumb)
    std::vector<Eigen::MatrixXd> tip_jp;
    std::vector<Pose> dip;
    std::vector<Eigen::MatrixXd> dip_jp;
};

FkEval make_fk_eval(const KinematicChain& chain, const Eigen::VectorXd& q);

// Individual objective terms. Values are >= 0 and zero on an exactly
// matching residual; gradients are with respect to q. term_hand_pose
// includes lambda1/lambda2 (it combines the anchor-position and
// wrist-rotation residuals); the other task-space terms are unweighted.
TermEval term_hand_pose(const FrameTargets& t, const FkEval& fk, const ObjectiveConfig& cfg, int m);
TermEval term_fingertip_pos(const FrameTargets& t, const FkEval& fk, const ObjectiveConfig& cfg, int m);
TermEval term_pinch(const FrameTargets& t, const FkEval& fk, const ObjectiveConfig& cfg, int m);
TermEval term_fingertip_rot(const FrameTargets& t, const FkEval& fk, const ObjectiveConfig& cfg, int m);
TermEval term_joint_reg(const Eigen::VectorXd& q, const ObjectiveConfig& cfg);
TermEval term_vel_reg(const Eigen::VectorXd& q, const Eigen::VectorXd& q_prev, const ObjectiveConfig& cfg);

// Convenience overloads matching the per-frame call pattern (they rebuild
// the frame targets; fine outside the solver hot path).
TermEval term_hand_pose(const HumanHandFrame& human, const FkEval& fk, const ObjectiveConfig& cfg, int m);
TermEval term_fingertip_pos(const HumanHandFrame& human, const FkEval& fk, const ObjectiveConfig& cfg, int m);
TermEval term_pinch(const HumanHandFrame& human, const FkEval& fk, const ObjectiveConfig& cfg, int m);
TermEval term_fingertip_rot(const HumanHandFrame& human, const FkEval& fk, const ObjectiveConfig& cfg, int m);

/// Weighted sum of the enabled terms (Eq-form: hand pose + lambda3 *
/// fingertip_pos + lambda4 * fingertip_rot + lambda5 * pinch + joint + vel).
TermEval total_objective(const HumanHandFrame& human, const JointState& q, const JointState& q_prev,
                         const KinematicChain& chain, const ObjectiveConfig& cfg);

/// Hot-path variant reusing precomputed frame targets.
TermEval total_objective(const FrameTargets& targets, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& q_prev, const KinematicChain& chain,
                         const ObjectiveConfig& cfg);

/// Objective with the Gauss-Newton Hessian approximation (2 sum w J^T J for
/// the residual terms, exact diagonal for the regularizers). The gradient is
/// exact; the Hessian drops residual-curvature terms and is what the solver
/// uses for its search direction.
struct ObjectiveEval {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd gn_hessian;
};
ObjectiveEval total_objective_gn(const FrameTargets& targets, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& q_prev, const KinematicChain& chain,
                                 const ObjectiveConfig& cfg);

/// Per-field difference between two configs, by field name. Used by the
/// ablation preset tests.
std::vector<std::string> config_diff(const ObjectiveConfig& a, const ObjectiveConfig& b);

}  // namespace retarget
