#include "retargetkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "retargetkit/kinematics.hpp"

namespace retarget {

MetricsReport evaluate(const KinematicChain& chain, const std::vector<HumanHandFrame>& human_frames,
                       const std::vector<JointState>& robot_states, const ObjectiveConfig& cfg,
                       const std::set<int>& finger_selection) {
    if (human_frames.size() != robot_states.size())
        throw std::invalid_argument(fmt::format("metrics: {} human frames vs {} robot states",
                                                human_frames.size(), robot_states.size()));
    if (human_frames.empty()) throw std::invalid_argument("metrics: empty trajectory");

    const int n = chain.finger_count();
    std::set<int> selection = finger_selection;
    if (selection.empty())
        for (int i = 0; i < n; ++i) selection.insert(i);
    for (int i : selection)
        if (i < 0 || i >= n)
            throw std::invalid_argument(fmt::format("metrics: finger index {} out of range", i));

    MetricsReport rep;
    rep.finger_selection = selection;
    rep.n_frames = static_cast<int>(human_frames.size());

    double sum_global = 0.0, sum_wrist = 0.0, sum_thumb = 0.0, sum_orient = 0.0;
    long n_global = 0, n_wrist = 0, n_thumb = 0, n_orient = 0;

    for (std::size_t f = 0; f < human_frames.size(); ++f) {
        const HumanHandFrame h = scale_about_wrist(human_frames[f], cfg.hand_scale);
        if (h.finger_count() != n)
            throw std::invalid_argument(fmt::format("metrics: frame {} has {} fingers, chain has {}",
                                                    f, h.finger_count(), n));
        const FkEval fk = make_fk_eval(chain, robot_states[f].q);

        for (int i = 0; i < n; ++i) {
            const Eigen::Vector3d tip_r = fk.tip[i].position;
            const Eigen::Vector3d tip_h = h.tip(i);
            if (selection.count(i)) {
                sum_global += (tip_r - tip_h).norm();
                ++n_global;
                if (i != 0) {
                    const Eigen::Vector3d rel_r = tip_r - fk.tip[0].position;
                    const Eigen::Vector3d rel_h = tip_h - h.thumb_tip;
                    sum_thumb += (rel_r - rel_h).norm();
                    ++n_thumb;
                }
            }
            sum_wrist += ((tip_r - fk.wrist.position) - (tip_h - h.wrist.position)).norm();
            ++n_wrist;

            const Eigen::Vector3d dir_r = tip_r - fk.dip[i].position;
            const Eigen::Vector3d dir_h = tip_h - h.dips[static_cast<std::size_t>(i)];
            if (dir_r.norm() < 1e-8 || dir_h.norm() < 1e-8) {
                ++rep.degenerate_samples_skipped;
                continue;
            }
            const double c = std::clamp(dir_r.normalized().dot(dir_h.normalized()), -1.0, 1.0);
            sum_orient += std::acos(c);
            ++n_orient;
        }
    }

    rep.fingertip_global_pos_err = n_global ? sum_global / static_cast<double>(n_global) : 0.0;
    rep.fingertip_rel_wrist_err = n_wrist ? sum_wrist / static_cast<double>(n_wrist) : 0.0;
    rep.fingertip_rel_thumb_err = n_thumb ? sum_thumb / static_cast<double>(n_thumb) : 0.0;
    rep.fingertip_orientation_err = n_orient ? sum_orient / static_cast<double>(n_orient) : 0.0;

    if (robot_states.size() >= 3) {
        const double dt = (robot_states.back().timestamp - robot_states.front().timestamp) /
                          static_cast<double>(robot_states.size() - 1);
        if (dt > 0.0) rep.joint_profiles = joint_profile(robot_states, 1.0 / dt);
    }
    return rep;
}

JointProfile joint_profile(const std::vector<JointState>& states, double rate) {
    if (states.size() < 3) throw std::invalid_argument("joint profile: need at least 3 states");
    if (!(rate > 0.0)) throw std::invalid_argument("joint profile: rate must be > 0");
    const long m = states[0].q.size();
    for (const auto& s : states)
        if (s.q.size() != m) throw std::invalid_argument("joint profile: inconsistent state dimension");

    JointProfile p;
    p.max_abs_velocity = Eigen::VectorXd::Zero(m);
    p.max_abs_acceleration = Eigen::VectorXd::Zero(m);
    for (std::size_t t = 1; t + 1 < states.size(); ++t) {
        const Eigen::VectorXd vel = 0.5 * (states[t + 1].q - states[t - 1].q) * rate;
        const Eigen::VectorXd acc = (states[t + 1].q - 2.0 * states[t].q + states[t - 1].q) * rate * rate;
        p.max_abs_velocity = p.max_abs_velocity.cwiseMax(vel.cwiseAbs());
        p.max_abs_acceleration = p.max_abs_acceleration.cwiseMax(acc.cwiseAbs());
    }
    return p;
}

std::string metrics_csv_header() { return "preset,trajectory,metric,value,unit,n_frames\n"; }

void append_metrics_csv(std::string& out, const MetricsReport& rep, const std::string& preset_label,
                        const std::string& trajectory_label) {
    auto row = [&](const char* metric, double value, const char* unit) {
        out += fmt::format("{},{},{},{:.9g},{},{}\n", preset_label, trajectory_label, metric, value, unit,
                           rep.n_frames);
    };
    row("fingertip_global_pos_err", rep.fingertip_global_pos_err, "m");
    row("fingertip_rel_wrist_err", rep.fingertip_rel_wrist_err, "m");
    row("fingertip_rel_thumb_err", rep.fingertip_rel_thumb_err, "m");
    row("fingertip_orientation_err", rep.fingertip_orientation_err * 180.0 / M_PI, "deg");
    if (rep.joint_profiles.max_abs_velocity.size() > 0) {
        row("max_joint_velocity", rep.joint_profiles.max_abs_velocity.maxCoeff(), "rad/s");
        row("max_joint_acceleration", rep.joint_profiles.max_abs_acceleration.maxCoeff(), "rad/s2");
    }
}

}  // namespace retarget
