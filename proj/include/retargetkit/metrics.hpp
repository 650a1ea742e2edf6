#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "retargetkit/chain.hpp"
#include "retargetkit/hand_frame.hpp"
#include "retargetkit/objective.hpp"

namespace retarget {

/// Per-joint max |velocity| and |acceleration| from finite differences.
struct JointProfile {
    Eigen::VectorXd max_abs_velocity;      // rad/s, length m
    Eigen::VectorXd max_abs_acceleration;  // rad/s^2, length m
};

/// Aggregate kinematic errors of one retargeted trajectory. Position errors
/// in meters, orientation error in radians (degrees only in CSV output).
struct MetricsReport {
    double fingertip_global_pos_err = 0.0;
    double fingertip_rel_wrist_err = 0.0;
    double fingertip_rel_thumb_err = 0.0;
    double fingertip_orientation_err = 0.0;
    JointProfile joint_profiles;
    std::set<int> finger_selection;  // fingers included in global-pos / rel-thumb
    int n_frames = 0;
    int degenerate_samples_skipped = 0;
};

/// Evaluate the four kinematic error metrics plus joint profiles. Human
/// keypoints are compared after scaling by cfg.hand_scale (same convention
/// as the objective). finger_selection (empty = all fingers) restricts the
/// global-position and relative-to-thumb metrics only; the thumb never
/// contributes to the rel-thumb average.
MetricsReport evaluate(const KinematicChain& chain, const std::vector<HumanHandFrame>& human_frames,
                       const std::vector<JointState>& robot_states, const ObjectiveConfig& cfg,
                       const std::set<int>& finger_selection = {});

/// Velocity = central first difference * rate, acceleration = second
/// difference * rate^2; per-joint maxima of absolute values. Needs >= 3
/// states sampled at a uniform rate.
JointProfile joint_profile(const std::vector<JointState>& states, double rate);

/// One CSV row per metric: preset,trajectory,metric,value,unit,n_frames.
/// Orientation is emitted in degrees. Appends to `out`.
void append_metrics_csv(std::string& out, const MetricsReport& report, const std::string& preset_label,
                        const std::string& trajectory_label);

/// CSV header line for the metrics schema.
std::string metrics_csv_header();

}  // namespace retarget
