#pragma once

#include <iosfwd>
#include <string>

#include "retargetkit/chain.hpp"
#include "retargetkit/objective.hpp"
#include "retargetkit/solver.hpp"

namespace retarget {

struct StreamStats {
    long frames_processed = 0;
    long frames_dropped = 0;
    long frames_malformed = 0;
    long commands_emitted = 0;
    double mean_solve_time = 0.0;  // s
    double max_solve_time = 0.0;
    long budget_exceeded = 0;      // solves slower than the frame period
    double latency_estimate = 0.0;  // s, 0.5/loop_rate + mean solve + 1/command_rate

    std::string to_json() const;
};

struct StreamOptions {
    double loop_rate = 20.0;      // Hz
    double command_rate = 100.0;  // Hz
    /// Paced mode ticks on the wall clock and keeps only the latest frame
    /// (overwriting drops). Unpaced mode applies backpressure instead and
    /// processes every frame, for deterministic replay.
    bool paced = false;
    SolverOptions solver;
};

/// Consume length-prefixed JSON hand frames ("<decimal byte count>\n<json>")
/// from `in`, run the per-frame retargeting step, and emit interpolated
/// joint commands in the same framing on `out`. Two stages (ingest, solve)
/// decoupled by a single-slot latest-value mailbox.
StreamStats run_stream(std::istream& in, std::ostream& out, const KinematicChain& chain,
                       const ObjectiveConfig& cfg, const JointState& q0, const StreamOptions& opts = {});

/// Serve one connection on a TCP listen address ("host:port"), then return.
StreamStats run_stream_tcp(const std::string& listen_addr, const KinematicChain& chain,
                           const ObjectiveConfig& cfg, const JointState& q0, const StreamOptions& opts = {});

/// Length-prefix framing helpers (shared with the CLI and tests).
void write_framed(std::ostream& out, const std::string& payload);
/// Reads one frame; returns false on clean EOF, throws on a broken prefix.
bool read_framed(std::istream& in, std::string& payload);

}  // namespace retarget
