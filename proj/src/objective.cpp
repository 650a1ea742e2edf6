#include "retargetkit/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace retarget {

void ObjectiveConfig::validate(int m) const {
    auto nonneg_finite = [](double v, const char* what) {
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument(fmt::format("config: {} must be finite and >= 0", what));
    };
    nonneg_finite(lambda1, "lambda1");
    nonneg_finite(lambda2, "lambda2");
    nonneg_finite(lambda3, "lambda3");
    nonneg_finite(lambda4, "lambda4");
    nonneg_finite(lambda5, "lambda5");
    if (!(eps2 > 0.0) || !(eps1 > eps2))
        throw std::invalid_argument("config: need 0 < eps2 < eps1");
    if (!std::isfinite(sigmoid_slope)) throw std::invalid_argument("config: non-finite sigmoid slope");
    if (!(hand_scale > 0.0)) throw std::invalid_argument("config: hand_scale must be > 0");
    if (w_pos.size() != m || w_vel.size() != m || q_bar.size() != m)
        throw std::invalid_argument(
            fmt::format("config: w_pos/w_vel/q_bar sized {}/{}/{}, expected {}", w_pos.size(), w_vel.size(), q_bar.size(), m));
    if ((w_pos.array() < 0.0).any() || (w_vel.array() < 0.0).any())
        throw std::invalid_argument("config: negative regularization weight");
    if (!w_pos.allFinite() || !w_vel.allFinite() || !q_bar.allFinite())
        throw std::invalid_argument("config: non-finite regularization vector");
}

ObjectiveConfig default_config(const KinematicChain& chain, double hand_scale) {
    const int m = chain.actuated_count();
    ObjectiveConfig cfg;
    cfg.hand_scale = hand_scale;
    cfg.w_pos = Eigen::VectorXd::Zero(m);
    for (int j : {7, 11, 15, 18})
        if (j < m) cfg.w_pos[j] = 0.5;
    if (20 < m) cfg.w_pos[20] = 0.1;
    cfg.w_vel = Eigen::VectorXd::Constant(m, 0.01);
    for (int j = 0; j < std::min(m, 7); ++j) cfg.w_vel[j] = 0.1;
    cfg.q_bar = Eigen::VectorXd::Zero(m);
    return cfg;
}

double sigmoid(double x, double c, double w) {
    const double e = std::clamp(w * (x - c), -50.0, 50.0);
    return 1.0 / (1.0 + std::exp(e));
}

double rescale_distance(double d, double eps1, double eps2) {
    if (d < eps2) return 0.0;
    if (d <= eps1) return eps1 / (eps1 - eps2) * (d - eps2);
    return d;
}

FrameTargets make_frame_targets(const HumanHandFrame& human, const ObjectiveConfig& cfg) {
    FrameTargets t;
    t.scaled = scale_about_wrist(human, cfg.hand_scale);
    const int n = t.scaled.finger_count();
    t.pinch_distance.resize(static_cast<std::size_t>(n - 1));
    t.pinch_weight.resize(static_cast<std::size_t>(n - 1));
    t.pinch_target.resize(static_cast<std::size_t>(n - 1));
    t.shape_weight.assign(static_cast<std::size_t>(n), 1.0);

    const bool sigmoid_shape = cfg.weight_shape == SwitchingWeightShape::Sigmoid;
    const bool complementary = cfg.pinch_term && cfg.complementary_shape_weight;
    for (int i = 1; i < n; ++i) {
        const Eigen::Vector3d gamma = t.scaled.tip(i) - t.scaled.thumb_tip;
        const double d = gamma.norm();
        const double s = sigmoid_shape ? sigmoid(d, cfg.eps1, cfg.sigmoid_slope) : (d < cfg.eps1 ? 1.0 : 0.0);
        t.pinch_distance[i - 1] = d;
        t.pinch_weight[i - 1] = s;
        if (complementary)
            t.shape_weight[i] = sigmoid_shape ? sigmoid(d, cfg.eps1, -cfg.sigmoid_slope) : 1.0 - s;
        if (!cfg.pinch_rescale) {
            t.pinch_target[i - 1] = gamma;  // actual pinch distance, no rescaling
        } else if (d < 1e-12) {
            t.pinch_target[i - 1].setZero();
        } else {
            t.pinch_target[i - 1] = (rescale_distance(d, cfg.eps1, cfg.eps2) / d) * gamma;
        }
    }
    return t;
}

FkEval make_fk_eval(const KinematicChain& chain, const Eigen::VectorXd& q) {
    const FkResult fk = fk_full(chain, q);
    const int n = chain.finger_count();
    FkEval e;
    const int wrist = chain.role_link("wrist");
    e.wrist = fk.link_pose[wrist];
    e.wrist_jp = position_jacobian(chain, fk, wrist);
    e.wrist_jr = angular_jacobian(chain, fk, wrist);
    e.tip.resize(static_cast<std::size_t>(n));
    e.tip_jp.resize(static_cast<std::size_t>(n));
    e.dip.resize(static_cast<std::size_t>(n));
    e.dip_jp.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int tip = i == 0 ? chain.role_link("thumb_tip") : chain.role_link(fmt::format("fingertip_{}", i));
        const int dip = chain.role_link(fmt::format("dip_{}", i));
        e.tip[i] = fk.link_pose[tip];
        e.tip_jp[i] = position_jacobian(chain, fk, tip);
        e.dip[i] = fk.link_pose[dip];
        e.dip_jp[i] = position_jacobian(chain, fk, dip);
    }
    return e;
}

namespace {

// Accumulates w * ||res||^2 with gradient 2 w J^T res and, when requested,
// the Gauss-Newton block 2 w J^T J.
struct Accum {
    double value = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd* hessian = nullptr;

    explicit Accum(int m, Eigen::MatrixXd* h = nullptr) : grad(Eigen::VectorXd::Zero(m)), hessian(h) {}

    void add_residual(const Eigen::Vector3d& res, const Eigen::MatrixXd& j, double w) {
        if (w == 0.0) return;
        value += w * res.squaredNorm();
        grad.noalias() += 2.0 * w * (j.transpose() * res);
        if (hessian) hessian->noalias() += 2.0 * w * (j.transpose() * j);
    }

    TermEval take() { return {value, std::move(grad)}; }
};

void hand_pose_impl(const FrameTargets& t, const FkEval& fk, const ObjectiveConfig& cfg, Accum& acc) {
    const bool thumb = cfg.global_anchor == GlobalAnchor::ThumbTip;
    const Eigen::Vector3d p_r = thumb ? fk.tip[0].position : fk.wrist.position;
    const Eigen::Vector3d p_h = thumb ? t.scaled.thumb_tip : t.scaled.wrist.position;
    acc.add_residual(p_r - p_h, thumb ? fk.tip_jp[0] : fk.wrist_jp, cfg.lambda1);

    // Squared geodesic angle; gradient via the rotation vector of the
    // world-frame orientation error, curvature approximated by 2 Jr^T Jr.
    const Eigen::Quaterniond q_err = fk.wrist.orientation * t.scaled.wrist.orientation.conjugate();
    acc.add_residual(rotation_vector(q_err), fk.wrist_jr, cfg.lambda2);
}

void fingertip_pos_impl(const FrameTargets& t, const FkEval& fk, const ObjectiveConfig& /*cfg*/, Accum& acc,
                        double weight) {
    const int n = t.scaled.finger_count();
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector3d v_r = fk.tip[i].position - fk.wrist.position;
        const Eigen::Vector3d v_h = t.scaled.tip(i) - t.scaled.wrist.position;
        acc.add_residual(v_r - v_h, fk.tip_jp[i] - fk.wrist_jp, weight * t.shape_weight[static_cast<std::size_t>(i)]);
    }
}

void pinch_impl(const FrameTargets& t, const FkEval& fk, Accum& acc, double weight) {
    const int n = t.scaled.finger_count();
    for (int i = 1; i < n; ++i) {
        const Eigen::Vector3d gamma_r = fk.tip[i].position - fk.tip[0].position;
        acc.add_residual(gamma_r - t.pinch_target[i - 1], fk.tip_jp[i] - fk.tip_jp[0],
                         weight * t.pinch_weight[i - 1]);
    }
}

void fingertip_rot_impl(const FrameTargets& t, const FkEval& fk, const ObjectiveConfig& cfg, Accum& acc,
                        double weight) {
    const int n = t.scaled.finger_count();
    for (int i = 0; i < n; ++i) {
        if (cfg.fingertip_rot_uses_wrist_to_dip) {
            const Eigen::Vector3d r_r = fk.dip[i].position - fk.wrist.position;
            const Eigen::Vector3d r_h = t.scaled.dips[static_cast<std::size_t>(i)] - t.scaled.wrist.position;
            acc.add_residual(r_r - r_h, fk.dip_jp[i] - fk.wrist_jp, weight);
        } else {
            const Eigen::Vector3d r_r = fk.tip[i].position - fk.dip[i].position;
            const Eigen::Vector3d r_h = t.scaled.tip(i) - t.scaled.dips[static_cast<std::size_t>(i)];
            acc.add_residual(r_r - r_h, fk.tip_jp[i] - fk.dip_jp[i], weight);
        }
    }
}

void diag_quadratic(const Eigen::VectorXd& w, const Eigen::VectorXd& delta, Accum& acc) {
    acc.value += (w.array() * delta.array().square()).sum();
    acc.grad += 2.0 * w.cwiseProduct(delta);
    if (acc.hessian) acc.hessian->diagonal() += 2.0 * w;
}

}  // namespace

TermEval term_hand_pose(const FrameTargets& t, const FkEval& fk, const ObjectiveConfig& cfg, int m) {
    Accum acc(m);
    hand_pose_impl(t, fk, cfg, acc);
    return acc.take();
}

TermEval term_fingertip_pos(const FrameTargets& t, const FkEval& fk, const ObjectiveConfig& cfg, int m) {
    Accum acc(m);
    fingertip_pos_impl(t, fk, cfg, acc, 1.0);
    return acc.take();
}

TermEval term_pinch(const FrameTargets& t, const FkEval& fk, const ObjectiveConfig& cfg, int m) {
    (void)cfg;
    Accum acc(m);
    pinch_impl(t, fk, acc, 1.0);
    return acc.take();
}

TermEval term_fingertip_rot(const FrameTargets& t, const FkEval& fk, const ObjectiveConfig& cfg, int m) {
    Accum acc(m);
    fingertip_rot_impl(t, fk, cfg, acc, 1.0);
    return acc.take();
}

TermEval term_joint_reg(const Eigen::VectorXd& q, const ObjectiveConfig& cfg) {
    if (q.size() != cfg.w_pos.size() || q.size() != cfg.q_bar.size())
        throw std::invalid_argument("joint reg: dimension mismatch");
    Accum acc(static_cast<int>(q.size()));
    diag_quadratic(cfg.w_pos, q - cfg.q_bar, acc);
    return acc.take();
}

TermEval term_vel_reg(const Eigen::VectorXd& q, const Eigen::VectorXd& q_prev, const ObjectiveConfig& cfg) {
    if (q.size() != q_prev.size() || q.size() != cfg.w_vel.size())
        throw std::invalid_argument("vel reg: dimension mismatch");
    Accum acc(static_cast<int>(q.size()));
    diag_quadratic(cfg.w_vel, q - q_prev, acc);
    return acc.take();
}

TermEval term_hand_pose(const HumanHandFrame& human, const FkEval& fk, const ObjectiveConfig& cfg, int m) {
    return term_hand_pose(make_frame_targets(human, cfg), fk, cfg, m);
}
TermEval term_fingertip_pos(const HumanHandFrame& human, const FkEval& fk, const ObjectiveConfig& cfg, int m) {
    return term_fingertip_pos(make_frame_targets(human, cfg), fk, cfg, m);
}
TermEval term_pinch(const HumanHandFrame& human, const FkEval& fk, const ObjectiveConfig& cfg, int m) {
    return term_pinch(make_frame_targets(human, cfg), fk, cfg, m);
}
TermEval term_fingertip_rot(const HumanHandFrame& human, const FkEval& fk, const ObjectiveConfig& cfg, int m) {
    return term_fingertip_rot(make_frame_targets(human, cfg), fk, cfg, m);
}

namespace {

void total_impl(const FrameTargets& targets, const Eigen::VectorXd& q, const Eigen::VectorXd& q_prev,
                const KinematicChain& chain, const ObjectiveConfig& cfg, Accum& acc) {
    if (targets.scaled.finger_count() != chain.finger_count())
        throw std::invalid_argument(fmt::format("objective: human frame has {} fingers, chain has {}",
                                                targets.scaled.finger_count(), chain.finger_count()));
    const bool needs_fk = cfg.hand_pose_term || cfg.fingertip_pos_term || cfg.pinch_term || cfg.fingertip_rot_term;
    if (needs_fk) {
        const FkEval fk = make_fk_eval(chain, q);
        if (cfg.hand_pose_term) hand_pose_impl(targets, fk, cfg, acc);
        if (cfg.fingertip_pos_term) fingertip_pos_impl(targets, fk, cfg, acc, cfg.lambda3);
        if (cfg.fingertip_rot_term) fingertip_rot_impl(targets, fk, cfg, acc, cfg.lambda4);
        if (cfg.pinch_term) pinch_impl(targets, fk, acc, cfg.lambda5);
    }
    if (cfg.joint_reg) diag_quadratic(cfg.w_pos, q - cfg.q_bar, acc);
    if (cfg.vel_reg) diag_quadratic(cfg.w_vel, q - q_prev, acc);
}

}  // namespace

TermEval total_objective(const FrameTargets& targets, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& q_prev, const KinematicChain& chain,
                         const ObjectiveConfig& cfg) {
    Accum acc(chain.actuated_count());
    total_impl(targets, q, q_prev, chain, cfg, acc);
    return acc.take();
}

TermEval total_objective(const HumanHandFrame& human, const JointState& q, const JointState& q_prev,
                         const KinematicChain& chain, const ObjectiveConfig& cfg) {
    if (q.q.size() != chain.actuated_count() || q_prev.q.size() != chain.actuated_count())
        throw std::invalid_argument("objective: joint state dimension mismatch");
    return total_objective(make_frame_targets(human, cfg), q.q, q_prev.q, chain, cfg);
}

ObjectiveEval total_objective_gn(const FrameTargets& targets, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& q_prev, const KinematicChain& chain,
                                 const ObjectiveConfig& cfg) {
    const int m = chain.actuated_count();
    ObjectiveEval out;
    out.gn_hessian = Eigen::MatrixXd::Zero(m, m);
    Accum acc(m, &out.gn_hessian);
    total_impl(targets, q, q_prev, chain, cfg, acc);
    out.value = acc.value;
    out.gradient = std::move(acc.grad);
    return out;
}

std::vector<std::string> config_diff(const ObjectiveConfig& a, const ObjectiveConfig& b) {
    std::vector<std::string> out;
    auto cmp = [&](bool equal, const char* field) {
        if (!equal) out.emplace_back(field);
    };
    cmp(a.lambda1 == b.lambda1, "lambda1");
    cmp(a.lambda2 == b.lambda2, "lambda2");
    cmp(a.lambda3 == b.lambda3, "lambda3");
    cmp(a.lambda4 == b.lambda4, "lambda4");
    cmp(a.lambda5 == b.lambda5, "lambda5");
    cmp(a.eps1 == b.eps1, "eps1");
    cmp(a.eps2 == b.eps2, "eps2");
    cmp(a.sigmoid_slope == b.sigmoid_slope, "sigmoid_slope");
    cmp(a.hand_scale == b.hand_scale, "hand_scale");
    cmp(a.w_pos == b.w_pos, "w_pos");
    cmp(a.w_vel == b.w_vel, "w_vel");
    cmp(a.q_bar == b.q_bar, "q_bar");
    cmp(a.hand_pose_term == b.hand_pose_term, "hand_pose_term");
    cmp(a.pinch_term == b.pinch_term, "pinch_term");
    cmp(a.pinch_rescale == b.pinch_rescale, "pinch_rescale");
    cmp(a.fingertip_pos_term == b.fingertip_pos_term, "fingertip_pos_term");
    cmp(a.fingertip_rot_term == b.fingertip_rot_term, "fingertip_rot_term");
    cmp(a.fingertip_rot_uses_wrist_to_dip == b.fingertip_rot_uses_wrist_to_dip, "fingertip_rot_uses_wrist_to_dip");
    cmp(a.global_anchor == b.global_anchor, "global_anchor");
    cmp(a.joint_reg == b.joint_reg, "joint_reg");
    cmp(a.vel_reg == b.vel_reg, "vel_reg");
    cmp(a.complementary_shape_weight == b.complementary_shape_weight, "complementary_shape_weight");
    cmp(a.weight_shape == b.weight_shape, "weight_shape");
    return out;
}

}  // namespace retarget
