#include "retargetkit/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace retarget {

namespace {

// Minimum-jerk ease, s(0)=0, s(1)=1, zero end velocities/accelerations.
double min_jerk(double tau) {
    tau = std::clamp(tau, 0.0, 1.0);
    return tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
}

// Approach, hold, retreat: 0 -> 1 over [0, 0.35], hold, 1 -> 0 over [0.65, 1].
double pinch_profile(double tau) {
    if (tau < 0.35) return min_jerk(tau / 0.35);
    if (tau < 0.65) return 1.0;
    return min_jerk((1.0 - tau) / 0.35);
}

// One slow up-down cycle.
double oscillation(double tau) {
    return tau < 0.5 ? min_jerk(2.0 * tau) : min_jerk(2.0 * (1.0 - tau));
}

Eigen::Vector3d slerp_dir(const Eigen::Vector3d& from, const Eigen::Vector3d& to, double s) {
    const Eigen::Vector3d a = from.normalized();
    Eigen::Vector3d b = to.normalized();
    double c = std::clamp(a.dot(b), -1.0, 1.0);
    const double angle = std::acos(c);
    if (angle < 1e-9) return a;
    Eigen::Vector3d ortho = (b - c * a).normalized();
    return std::cos(s * angle) * a + std::sin(s * angle) * ortho;
}

// Deterministic Box-Muller over mt19937_64 (independent of the standard
// library's distribution implementation).
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double next(double sigma) {
        if (has_spare_) {
            has_spare_ = false;
            return sigma * spare_;
        }
        const double u1 = std::max(uniform(), 1e-300);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        has_spare_ = true;
        return sigma * r * std::cos(2.0 * M_PI * u2);
    }

    Eigen::Vector3d next_vec(double sigma) { return {next(sigma), next(sigma), next(sigma)}; }

private:
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Two-segment finger model in the local hand frame. Fingers lie in a
// sagittal plane tilted by the abduction angle about the palm normal (+y);
// curl rotates the segments from +z toward +y.
struct SegmentDirs {
    Eigen::Vector3d proximal;
    Eigen::Vector3d distal;
};

SegmentDirs finger_dirs(double abduction, double curl) {
    const double t1 = 0.25 + 1.05 * curl;   // proximal angle from +z
    const double t2 = t1 + 0.15 + 0.85 * curl;  // distal adds its own bend
    const Eigen::AngleAxisd ab(abduction, Eigen::Vector3d::UnitY());
    SegmentDirs d;
    d.proximal = ab * Eigen::Vector3d(0.0, std::sin(t1), std::cos(t1));
    d.distal = ab * Eigen::Vector3d(0.0, std::sin(t2), std::cos(t2));
    return d;
}

// Thumb rest and opposed segment directions; opposition slerps between them.
SegmentDirs thumb_dirs(double oppose) {
    SegmentDirs d;
    d.proximal = slerp_dir({-0.62, 0.25, 0.74}, {0.25, 0.80, 0.55}, oppose);
    d.distal = slerp_dir({-0.62, 0.25, 0.74}, {0.70, 0.65, -0.30}, oppose);
    return d;
}

struct LocalHand {
    std::vector<Eigen::Vector3d> tip;  // size N
    std::vector<Eigen::Vector3d> dip;
};

LocalHand pose_hand(const HandMorphParams& morph, const std::vector<double>& curl,
                    const std::vector<double>& abduction) {
    const int n = morph.finger_count();
    LocalHand h;
    h.tip.resize(static_cast<std::size_t>(n));
    h.dip.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double scale = morph.length_scale[static_cast<std::size_t>(i)];
        const SegmentDirs dirs = i == 0 ? thumb_dirs(curl[0]) : finger_dirs(abduction[static_cast<std::size_t>(i)],
                                                                            curl[static_cast<std::size_t>(i)]);
        const Eigen::Vector3d dip =
            morph.finger_base[static_cast<std::size_t>(i)] + scale * morph.base_to_dip[static_cast<std::size_t>(i)] * dirs.proximal;
        h.dip[static_cast<std::size_t>(i)] = dip;
        h.tip[static_cast<std::size_t>(i)] = dip + scale * morph.dip_to_tip[static_cast<std::size_t>(i)] * dirs.distal;
    }
    return h;
}

HumanHandFrame to_world(const HandMorphParams& morph, const LocalHand& local, double timestamp) {
    HumanHandFrame f;
    f.timestamp = timestamp;
    f.wrist.position = morph.wrist_position;
    f.wrist.orientation = morph.wrist_orientation.normalized();
    const Pose w{f.wrist.position, f.wrist.orientation};
    const int n = static_cast<int>(local.tip.size());
    f.thumb_tip = w.apply(local.tip[0]);
    for (int i = 1; i < n; ++i) f.fingertips.push_back(w.apply(local.tip[static_cast<std::size_t>(i)]));
    for (int i = 0; i < n; ++i) f.dips.push_back(w.apply(local.dip[static_cast<std::size_t>(i)]));
    return f;
}

}  // namespace

HandMorphParams HandMorphParams::defaults() {
    HandMorphParams p;
    p.finger_base = {{-0.035, 0.005, 0.010}, {-0.020, 0.0, 0.030}, {0.0, 0.0, 0.032}, {0.020, 0.0, 0.030}};
    p.base_to_dip = {0.040, 0.058, 0.062, 0.055};
    p.dip_to_tip = {0.025, 0.020, 0.022, 0.020};
    p.length_scale = {1.0, 1.0, 1.0, 1.0};
    return p;
}

std::vector<HumanHandFrame> gen_synthetic(const SyntheticParams& params) {
    const HandMorphParams& morph = params.morph;
    const int n = morph.finger_count();
    if (n < 2) throw std::invalid_argument("synthetic: need at least 2 fingers");
    if (static_cast<int>(morph.base_to_dip.size()) != n || static_cast<int>(morph.dip_to_tip.size()) != n ||
        static_cast<int>(morph.length_scale.size()) != n)
        throw std::invalid_argument("synthetic: inconsistent morphology parameter sizes");
    if (!(params.duration > 0.0) || !(params.rate > 0.0))
        throw std::invalid_argument("synthetic: duration and rate must be > 0");
    const int frames = static_cast<int>(std::lround(params.duration * params.rate));
    if (frames < 1) throw std::invalid_argument("synthetic: duration too short for the rate");
    if (params.kind == SyntheticKind::Pinch && (params.pinch_finger < 1 || params.pinch_finger >= n))
        throw std::invalid_argument(fmt::format("synthetic: pinch finger {} out of range", params.pinch_finger));

    GaussianSampler noise(params.seed);
    std::vector<HumanHandFrame> out;
    out.reserve(static_cast<std::size_t>(frames));

    // The pinch pair approaches from 12 cm (opening wider than the rest
    // posture when needed) down to d_min and retreats.
    double d_open = 0.12;
    if (params.kind == SyntheticKind::Pinch) {
        std::vector<double> curl(static_cast<std::size_t>(n), 0.4);
        curl[0] = 0.0;
        curl[static_cast<std::size_t>(params.pinch_finger)] = 0.0;
        const LocalHand open = pose_hand(morph, curl, std::vector<double>(static_cast<std::size_t>(n), 0.0));
        d_open = std::max(d_open, (open.tip[static_cast<std::size_t>(params.pinch_finger)] - open.tip[0]).norm());
    }
    const double d_min = 0.0045;

    for (int k = 0; k < frames; ++k) {
        const double t = static_cast<double>(k) / params.rate;
        const double tau = frames > 1 ? static_cast<double>(k) / static_cast<double>(frames - 1) : 0.0;

        std::vector<double> curl(static_cast<std::size_t>(n), 0.4);
        std::vector<double> abduction(static_cast<std::size_t>(n), 0.0);
        curl[0] = 0.3;

        LocalHand hand;
        switch (params.kind) {
            case SyntheticKind::Pinch: {
                const int f = params.pinch_finger;
                const double c = pinch_profile(tau);
                curl[0] = c;
                curl[static_cast<std::size_t>(f)] = c;
                // Mild stagger on the bystander fingers.
                for (int i = 1; i < n; ++i)
                    if (i != f) curl[static_cast<std::size_t>(i)] = 0.35 + 0.05 * static_cast<double>(i);
                hand = pose_hand(morph, curl, abduction);
                // Radial correction: place the pinching pair exactly d(t) apart
                // along their connecting line, keeping DIP-to-tip directions.
                const double d = d_open + (d_min - d_open) * c;
                Eigen::Vector3d& tip_f = hand.tip[static_cast<std::size_t>(f)];
                Eigen::Vector3d& tip_t = hand.tip[0];
                const Eigen::Vector3d mid = 0.5 * (tip_f + tip_t);
                const Eigen::Vector3d u = (tip_f - tip_t).norm() > 1e-9
                                              ? (tip_f - tip_t).normalized()
                                              : Eigen::Vector3d::UnitX();
                const Eigen::Vector3d dir_f = (tip_f - hand.dip[static_cast<std::size_t>(f)]).normalized();
                const Eigen::Vector3d dir_t = (tip_t - hand.dip[0]).normalized();
                const double len_f = morph.dip_to_tip[static_cast<std::size_t>(f)] * morph.length_scale[static_cast<std::size_t>(f)];
                const double len_t = morph.dip_to_tip[0] * morph.length_scale[0];
                tip_f = mid + 0.5 * d * u;
                tip_t = mid - 0.5 * d * u;
                hand.dip[static_cast<std::size_t>(f)] = tip_f - len_f * dir_f;
                hand.dip[0] = tip_t - len_t * dir_t;
                break;
            }
            case SyntheticKind::Crossing: {
                curl[1] = 0.3;  // shallow curl keeps the abduction lever long
                curl[2] = 0.35;
                curl[0] = 0.1;
                abduction[1] = -0.2 + 0.9 * oscillation(tau);  // sweep across the middle finger
                hand = pose_hand(morph, curl, abduction);
                break;
            }
            case SyntheticKind::Jitter: {
                // Curled posture with a lateral sweep so every hand joint,
                // including the abduction and thumb-roll joints, tracks the
                // base motion and is exposed to the keypoint noise.
                const double osc = oscillation(tau);
                for (int i = 1; i < n; ++i) {
                    curl[static_cast<std::size_t>(i)] = 0.55 + 0.2 * osc;
                    abduction[static_cast<std::size_t>(i)] = 0.3 * (2 - i) * (2.0 * osc - 1.0);
                }
                curl[0] = 0.45 + 0.25 * osc;
                hand = pose_hand(morph, curl, abduction);
                for (int i = 0; i < n; ++i) {
                    hand.tip[static_cast<std::size_t>(i)] += noise.next_vec(params.jitter_sigma);
                    Eigen::Vector3d d = hand.dip[static_cast<std::size_t>(i)] + noise.next_vec(params.jitter_sigma);
                    // Keep DIP-to-tip non-degenerate (validated downstream).
                    while ((hand.tip[static_cast<std::size_t>(i)] - d).norm() <= 2e-4)
                        d = hand.dip[static_cast<std::size_t>(i)] + noise.next_vec(params.jitter_sigma);
                    hand.dip[static_cast<std::size_t>(i)] = d;
                }
                break;
            }
            case SyntheticKind::Constant: {
                curl.assign(static_cast<std::size_t>(n), 0.5);
                curl[0] = 0.4;
                hand = pose_hand(morph, curl, abduction);
                break;
            }
        }

        HumanHandFrame frame = to_world(morph, hand, t);
        frame.validate();
        out.push_back(std::move(frame));
    }
    return out;
}

}  // namespace retarget
