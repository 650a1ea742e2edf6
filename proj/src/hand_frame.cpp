#include "retargetkit/hand_frame.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace retarget {

const Eigen::Vector3d& HumanHandFrame::tip(int finger) const {
    if (finger == 0) return thumb_tip;
    return fingertips.at(static_cast<std::size_t>(finger - 1));
}

void HumanHandFrame::validate() const {
    const int n = finger_count();
    if (n < 2) throw std::invalid_argument("hand frame: need at least 2 fingers (thumb + 1)");
    if (static_cast<int>(fingertips.size()) != n - 1)
        throw std::invalid_argument(fmt::format("hand frame: {} fingertips for {} dips", fingertips.size(), n));
    if (!std::isfinite(timestamp)) throw std::invalid_argument("hand frame: non-finite timestamp");
    auto check_finite = [](const Eigen::Vector3d& v, const char* what) {
        if (!v.allFinite()) throw std::invalid_argument(fmt::format("hand frame: non-finite {}", what));
    };
    check_finite(wrist.position, "wrist position");
    if (!wrist.orientation.coeffs().allFinite() || !is_unit_quaternion(wrist.orientation, 1e-6))
        throw std::invalid_argument("hand frame: wrist orientation not a unit quaternion");
    check_finite(thumb_tip, "thumb tip");
    for (const auto& p : fingertips) check_finite(p, "fingertip");
    for (const auto& p : dips) check_finite(p, "dip");
    for (int i = 0; i < n; ++i) {
        if ((tip(i) - dips[static_cast<std::size_t>(i)]).norm() <= 1e-4)
            throw std::invalid_argument(fmt::format("hand frame: degenerate DIP-to-tip vector on finger {}", i));
    }
}

HumanHandFrame scale_about_wrist(const HumanHandFrame& frame, double scale) {
    HumanHandFrame out = frame;
    const Eigen::Vector3d& w = frame.wrist.position;
    auto rescale = [&](const Eigen::Vector3d& p) { return (w + scale * (p - w)).eval(); };
    out.thumb_tip = rescale(frame.thumb_tip);
    for (auto& p : out.fingertips) p = rescale(p);
    for (auto& p : out.dips) p = rescale(p);
    return out;
}

}  // namespace retarget
