#pragma once

#include <cstdint>
#include <vector>

#include "retargetkit/hand_frame.hpp"

namespace retarget {

/// Parametric human hand used by the synthetic trajectory generator.
/// Finger 0 is the thumb; local frame: wrist at the origin, fingers extend
/// +z, palm normal +y, thumb on the -x side. Proportions approximate an
/// adult hand; length_scale is the per-finger morphology-mismatch knob.
struct HandMorphParams {
    Eigen::Vector3d wrist_position{0.45, 0.0, 0.55};
    Eigen::Quaterniond wrist_orientation = Eigen::Quaterniond::Identity();

    std::vector<Eigen::Vector3d> finger_base;  // local, size N (0 = thumb)
    std::vector<double> base_to_dip;           // m
    std::vector<double> dip_to_tip;            // m
    std::vector<double> length_scale;          // mismatch knob, default 1.0

    static HandMorphParams defaults();
    int finger_count() const { return static_cast<int>(finger_base.size()); }
};

enum class SyntheticKind { Pinch, Crossing, Jitter, Constant };

struct SyntheticParams {
    SyntheticKind kind = SyntheticKind::Pinch;
    double duration = 5.0;    // s
    double rate = 20.0;       // Hz
    int pinch_finger = 1;     // 1 = index, used by Pinch
    double jitter_sigma = 0.003;  // m, used by Jitter
    std::uint64_t seed = 0;
    HandMorphParams morph = HandMorphParams::defaults();
};

/// Deterministic synthetic human hand trajectories:
///   pinch    — thumb and one fingertip approach from ~12 cm to contact and
///              retreat, minimum-jerk timing
///   crossing — index sweeps laterally across the middle finger
///   jitter   — Gaussian keypoint noise of std sigma on a slow curl motion
///   constant — static posture
std::vector<HumanHandFrame> gen_synthetic(const SyntheticParams& params);

}  // namespace retarget
