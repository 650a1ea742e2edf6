#include "retargetkit/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <fmt/format.h>

namespace retarget {

namespace {

using Clock = std::chrono::steady_clock;

}  // namespace

// Projected Gauss-Newton with Levenberg damping. Each iteration solves the
// damped normal equations on the bound-inactive coordinates, then runs a
// projected backtracking line search on the true objective. The exact
// analytic gradient drives both the stationarity test and the search.
std::pair<JointState, SolveReport> solve_frame(const KinematicChain& chain, const HumanHandFrame& human,
                                               const JointState& q_warm, const ObjectiveConfig& cfg,
                                               const SolverOptions& opts) {
    const auto t_start = Clock::now();
    const int m = chain.actuated_count();
    cfg.validate(m);
    if (q_warm.q.size() != m)
        throw std::invalid_argument(fmt::format("solve: warm start has size {}, expected {}", q_warm.q.size(), m));

    const Eigen::VectorXd lo = chain.lower_limits();
    const Eigen::VectorXd hi = chain.upper_limits();
    const FrameTargets targets = make_frame_targets(human, cfg);
    const Eigen::VectorXd q_prev = chain.clamp(q_warm.q);

    auto eval = [&](const Eigen::VectorXd& q) { return total_objective_gn(targets, q, q_prev, chain, cfg); };

    Eigen::VectorXd q = q_prev;
    ObjectiveEval cur = eval(q);
    if (!std::isfinite(cur.value))
        throw std::runtime_error("solve: non-finite objective at the start configuration");

    SolveReport report;
    report.reason = TerminationReason::MaxIter;
    const double active_eps = 1e-10;
    double mu = 1e-8;

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        // Projected gradient stationarity measure.
        const Eigen::VectorXd pg = q - (q - cur.gradient).cwiseMax(lo).cwiseMin(hi);
        if (pg.lpNorm<Eigen::Infinity>() < opts.grad_tol) {
            report.converged = true;
            report.reason = TerminationReason::GradTol;
            break;
        }

        // Free set: coordinates not pressed against a bound by the gradient.
        std::vector<int> free;
        free.reserve(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) {
            const bool at_lo = q[j] <= lo[j] + active_eps && cur.gradient[j] > 0.0;
            const bool at_hi = q[j] >= hi[j] - active_eps && cur.gradient[j] < 0.0;
            if (!at_lo && !at_hi) free.push_back(j);
        }

        Eigen::VectorXd d = Eigen::VectorXd::Zero(m);
        bool accepted = false;
        Eigen::VectorXd q_new;
        ObjectiveEval next;
        for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
            if (!free.empty()) {
                const int nf = static_cast<int>(free.size());
                Eigen::MatrixXd h(nf, nf);
                Eigen::VectorXd gf(nf);
                for (int a = 0; a < nf; ++a) {
                    gf[a] = cur.gradient[free[static_cast<std::size_t>(a)]];
                    for (int b = 0; b < nf; ++b)
                        h(a, b) = cur.gn_hessian(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
                }
                h.diagonal().array() += mu;
                const Eigen::VectorXd df = h.ldlt().solve(-gf);
                d.setZero();
                for (int a = 0; a < nf; ++a) d[free[static_cast<std::size_t>(a)]] = df[a];
            }
            if (free.empty() || d.dot(cur.gradient) >= 0.0 || !d.allFinite()) d = -pg;

            // Projected backtracking Armijo search.
            const double c1 = 1e-4;
            double step = 1.0;
            for (int ls = 0; ls < 30; ++ls) {
                q_new = (q + step * d).cwiseMax(lo).cwiseMin(hi);
                const Eigen::VectorXd delta = q_new - q;
                if (delta.lpNorm<Eigen::Infinity>() == 0.0) break;
                next = eval(q_new);
                if (std::isfinite(next.value) && next.value <= cur.value + c1 * cur.gradient.dot(delta)) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) mu = std::max(mu * 10.0, 1e-6);  // damp harder and retry
        }
        if (!accepted) {
            report.converged = true;
            report.reason = TerminationReason::StepTol;
            break;
        }
        mu = std::max(mu / 3.0, 1e-8);

        const Eigen::VectorXd s = q_new - q;
        q = q_new;
        cur = next;
        if (s.lpNorm<Eigen::Infinity>() < opts.step_tol) {
            report.converged = true;
            report.reason = TerminationReason::StepTol;
            ++it;
            break;
        }
    }

    report.iterations = it;
    report.objective_value = cur.value;
    report.solve_time = std::chrono::duration<double>(Clock::now() - t_start).count();

    JointState out;
    out.q = std::move(q);
    out.timestamp = human.timestamp;
    return {std::move(out), report};
}

JointState ema_smooth(const JointState& q_raw, const JointState& q_prev, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("ema: alpha must be in (0, 1]");
    if (q_raw.q.size() != q_prev.q.size()) throw std::invalid_argument("ema: dimension mismatch");
    JointState out;
    out.q = alpha * q_raw.q + (1.0 - alpha) * q_prev.q;
    out.timestamp = q_raw.timestamp;
    return out;
}

TrajectorySession::TrajectorySession(const KinematicChain& chain, ObjectiveConfig cfg, JointState q0,
                                     SolverOptions opts)
    : chain_(chain), cfg_(std::move(cfg)), opts_(opts), state_(std::move(q0)) {
    cfg_.validate(chain.actuated_count());
    state_.q = chain.clamp(state_.q);
}

std::pair<JointState, SolveReport> TrajectorySession::step(const HumanHandFrame& frame) {
    auto [raw, report] = solve_frame(chain_, frame, state_, cfg_, opts_);
    // Smoothed output becomes both the next warm start and the next q_prev.
    state_ = ema_smooth(raw, state_, opts_.ema_alpha);
    state_.timestamp = frame.timestamp;
    return {state_, report};
}

std::pair<std::vector<JointState>, std::vector<SolveReport>> retarget_trajectory(
    const KinematicChain& chain, const std::vector<HumanHandFrame>& frames, const ObjectiveConfig& cfg,
    const JointState& q0, const SolverOptions& opts) {
    if (frames.empty()) throw std::invalid_argument("retarget: empty trajectory");
    for (std::size_t i = 1; i < frames.size(); ++i)
        if (!(frames[i].timestamp > frames[i - 1].timestamp))
            throw std::invalid_argument(fmt::format("retarget: timestamps not strictly increasing at frame {}", i));

    TrajectorySession session(chain, cfg, q0, opts);
    std::vector<JointState> states;
    std::vector<SolveReport> reports;
    states.reserve(frames.size());
    reports.reserve(frames.size());
    for (const auto& f : frames) {
        auto [qs, rep] = session.step(f);
        states.push_back(std::move(qs));
        reports.push_back(rep);
    }
    return {std::move(states), std::move(reports)};
}

std::vector<JointState> interpolate_commands(const std::vector<JointState>& states, double target_rate) {
    if (states.empty()) throw std::invalid_argument("interpolate: empty input");
    if (!(target_rate > 0.0)) throw std::invalid_argument("interpolate: rate must be > 0");
    for (std::size_t i = 1; i < states.size(); ++i)
        if (!(states[i].timestamp > states[i - 1].timestamp))
            throw std::invalid_argument("interpolate: timestamps not strictly increasing");

    std::vector<JointState> out;
    if (states.size() == 1) {
        out.push_back(states[0]);
        return out;
    }
    const double t0 = states.front().timestamp;
    const double t_end = states.back().timestamp;
    const double dt = 1.0 / target_rate;

    std::size_t seg = 0;
    for (std::size_t k = 0;; ++k) {
        double t = t0 + static_cast<double>(k) * dt;
        const bool last = t >= t_end - 1e-12;
        if (last) t = t_end;
        while (seg + 2 < states.size() && states[seg + 1].timestamp <= t) ++seg;
        const auto& a = states[seg];
        const auto& b = states[seg + 1];
        const double u = (t - a.timestamp) / (b.timestamp - a.timestamp);
        JointState s;
        s.timestamp = t;
        s.q = last ? b.q : (a.q + u * (b.q - a.q)).eval();
        out.push_back(std::move(s));
        if (last) break;
    }
    return out;
}

}  // namespace retarget
