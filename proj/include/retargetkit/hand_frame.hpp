#pragma once

#include <vector>

#include <Eigen/Core>

#include "retargetkit/geometry.hpp"

namespace retarget {

/// One timestamped sample of human hand keypoints, world frame, meters.
/// Finger 0 is the thumb; fingertips[i-1] holds primary finger i (1..N-1);
/// dips[i] holds the DIP keypoint of finger i for all N fingers.
struct HumanHandFrame {
    double timestamp = 0.0;
    Pose wrist;
    Eigen::Vector3d thumb_tip = Eigen::Vector3d::Zero();
    std::vector<Eigen::Vector3d> fingertips;  // size N-1
    std::vector<Eigen::Vector3d> dips;        // size N

    int finger_count() const { return static_cast<int>(dips.size()); }

    /// Tip keypoint of finger i (0 = thumb).
    const Eigen::Vector3d& tip(int finger) const;

    /// Throws std::invalid_argument if keypoints are non-finite, sizes are
    /// inconsistent, or any DIP-to-tip distance is <= 1e-4 m.
    void validate() const;
};

/// Rescale all keypoints about the wrist by `scale`; wrist pose unchanged.
HumanHandFrame scale_about_wrist(const HumanHandFrame& frame, double scale);

}  // namespace retarget
