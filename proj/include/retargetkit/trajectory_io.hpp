#pragma once

#include <string>
#include <vector>

#include "retargetkit/chain.hpp"
#include "retargetkit/hand_frame.hpp"
#include "retargetkit/metrics.hpp"

namespace retarget {

struct TrajectoryHeader {
    int n_fingers = 0;
    double rate_hz = 0.0;  // nominal, 0 = unknown
    std::string source = "";
};

struct Trajectory {
    TrajectoryHeader header;
    std::vector<HumanHandFrame> frames;
};

/// Line-delimited JSON, one header line then one frame per line. A single
/// JSON array [header, frame, ...] is also accepted on load. Schema
/// violations name the offending record index; save-then-load is identity.
Trajectory load_trajectory(const std::string& path);
Trajectory parse_trajectory(const std::string& text);
void save_trajectory(const std::string& path, const Trajectory& traj);
std::string trajectory_to_jsonl(const Trajectory& traj);

/// Serialize / parse one frame (also the streaming payload schema).
std::string frame_to_json(const HumanHandFrame& frame);
HumanHandFrame frame_from_json(const std::string& text);

/// Joint-state trajectories, same JSONL layout.
struct StatesFile {
    int m = 0;
    double rate_hz = 0.0;
    std::vector<JointState> states;
};
StatesFile load_states(const std::string& path);
void save_states(const std::string& path, const std::vector<JointState>& states, double rate_hz = 0.0);

/// Metrics CSV report (schema: preset,trajectory,metric,value,unit,n_frames).
void save_report(const std::string& path, const MetricsReport& report, const std::string& preset_label,
                 const std::string& trajectory_label);

}  // namespace retarget
