#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "retargetkit/chain.hpp"
#include "retargetkit/hand_frame.hpp"
#include "retargetkit/objective.hpp"

namespace retarget {

enum class TerminationReason { GradTol, StepTol, MaxIter };

struct SolveReport {
    double objective_value = 0.0;
    int iterations = 0;
    double solve_time = 0.0;  // seconds
    bool converged = false;
    TerminationReason reason = TerminationReason::MaxIter;
};

struct SolverOptions {
    double grad_tol = 1e-6;   // infinity norm of the projected gradient
    double step_tol = 1e-8;   // infinity norm of an accepted step
    int max_iterations = 100;
    double ema_alpha = 0.3;
};

/// Minimize the total objective over q subject to the chain's joint limits,
/// starting from q_warm (clamped into the limits if outside). q_prev in the
/// velocity term is q_warm. Deterministic; always returns a feasible q with
/// objective value <= the value at the (clamped) start.
std::pair<JointState, SolveReport> solve_frame(const KinematicChain& chain, const HumanHandFrame& human,
                                               const JointState& q_warm, const ObjectiveConfig& cfg,
                                               const SolverOptions& opts = {});

/// Elementwise q_raw * alpha + q_prev * (1 - alpha).
JointState ema_smooth(const JointState& q_raw, const JointState& q_prev, double alpha);

/// Sequential warm-started solve over a trajectory. Frame t is solved from
/// the smoothed output of frame t-1 (which is also q_prev for the velocity
/// term); EMA smoothing is applied after every solve. A non-converged frame
/// does not abort the trajectory.
std::pair<std::vector<JointState>, std::vector<SolveReport>> retarget_trajectory(
    const KinematicChain& chain, const std::vector<HumanHandFrame>& frames, const ObjectiveConfig& cfg,
    const JointState& q0, const SolverOptions& opts = {});

/// Stateful per-frame stepper shared by the batch and the streaming paths so
/// both produce identical outputs for identical frame sequences.
class TrajectorySession {
public:
    TrajectorySession(const KinematicChain& chain, ObjectiveConfig cfg, JointState q0, SolverOptions opts = {});

    /// Solve one frame, apply EMA, advance the internal state.
    std::pair<JointState, SolveReport> step(const HumanHandFrame& frame);

    const JointState& state() const { return state_; }

private:
    const KinematicChain& chain_;
    ObjectiveConfig cfg_;
    SolverOptions opts_;
    JointState state_;
};

/// Piecewise-linear upsampling of a joint trajectory to target_rate.
/// Endpoints are preserved exactly.
std::vector<JointState> interpolate_commands(const std::vector<JointState>& states, double target_rate);

}  // namespace retarget
