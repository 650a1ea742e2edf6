#include "retargetkit/stream.hpp"

#include <atomic>
#include <chrono>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "retargetkit/mailbox.hpp"
#include "retargetkit/trajectory_io.hpp"

namespace retarget {

namespace {

using json = nlohmann::ordered_json;

std::string command_json(const JointState& s) {
    json o;
    o["t"] = s.timestamp;
    json q = json::array();
    for (long j = 0; j < s.q.size(); ++j) q.push_back(s.q[j]);
    o["q"] = std::move(q);
    return o.dump();
}

class CommandEmitter {
public:
    CommandEmitter(std::ostream& out, double command_rate) : out_(out), dt_(1.0 / command_rate) {}

    long emitted() const { return emitted_; }

    void push_target(const JointState& target) {
        if (!have_prev_) {
            emit(target);
            prev_ = target;
            have_prev_ = true;
            return;
        }
        const double span = target.timestamp - prev_.timestamp;
        if (span <= 0.0) return;
        for (long j = 1;; ++j) {
            double t = prev_.timestamp + static_cast<double>(j) * dt_;
            if (t > target.timestamp + 1e-9) break;
            const bool last = t >= target.timestamp - 1e-9;
            if (last) t = target.timestamp;
            const double u = std::min((t - prev_.timestamp) / span, 1.0);
            JointState cmd;
            cmd.timestamp = t;
            cmd.q = last ? target.q : (prev_.q + u * (target.q - prev_.q)).eval();
            emit(cmd);
            if (last) break;
        }
        prev_ = target;
    }

private:
    void emit(const JointState& s) {
        write_framed(out_, command_json(s));
        ++emitted_;
    }

    std::ostream& out_;
    double dt_;
    JointState prev_;
    bool have_prev_ = false;
    long emitted_ = 0;
};

}  // namespace

std::string StreamStats::to_json() const {
    json o;
    o["frames_processed"] = frames_processed;
    o["frames_dropped"] = frames_dropped;
    o["frames_malformed"] = frames_malformed;
    o["commands_emitted"] = commands_emitted;
    o["mean_solve_time_s"] = mean_solve_time;
    o["max_solve_time_s"] = max_solve_time;
    o["budget_exceeded"] = budget_exceeded;
    o["latency_estimate_s"] = latency_estimate;
    return o.dump(2);
}

void write_framed(std::ostream& out, const std::string& payload) {
    out << payload.size() << '\n' << payload;
    out.flush();
}

bool read_framed(std::istream& in, std::string& payload) {
    std::string header;
    if (!std::getline(in, header)) return false;
    if (header.empty() || header.find_first_not_of("0123456789") != std::string::npos)
        throw std::runtime_error(fmt::format("stream: bad length prefix '{}'", header));
    const std::size_t len = std::stoul(header);
    if (len > 16 * 1024 * 1024) throw std::runtime_error("stream: frame too large");
    payload.resize(len);
    in.read(payload.data(), static_cast<std::streamsize>(len));
    if (static_cast<std::size_t>(in.gcount()) != len)
        throw std::runtime_error("stream: truncated frame payload");
    return true;
}

StreamStats run_stream(std::istream& in, std::ostream& out, const KinematicChain& chain,
                       const ObjectiveConfig& cfg, const JointState& q0, const StreamOptions& opts) {
    if (!(opts.loop_rate > 0.0) || !(opts.command_rate > 0.0))
        throw std::invalid_argument("stream: rates must be > 0");

    LatestValueMailbox<HumanHandFrame> mailbox;
    std::atomic<long> malformed{0};

    // Ingestion stage: parse framed JSON, publish the latest frame. In
    // unpaced mode publishing applies backpressure so no frame is lost.
    std::thread ingest([&] {
        std::string payload;
        double last_t = -std::numeric_limits<double>::infinity();
        while (true) {
            try {
                if (!read_framed(in, payload)) break;
            } catch (const std::exception&) {
                break;  // broken framing: treat the rest of the stream as lost
            }
            try {
                HumanHandFrame f = frame_from_json(payload);
                if (f.finger_count() != chain.finger_count())
                    throw std::invalid_argument("finger count mismatch");
                if (!(f.timestamp > last_t)) throw std::invalid_argument("non-monotone timestamp");
                last_t = f.timestamp;
                if (opts.paced)
                    mailbox.publish(std::move(f));
                else
                    mailbox.publish_blocking(std::move(f));
            } catch (const std::exception&) {
                ++malformed;
            }
        }
        mailbox.close();
    });

    TrajectorySession session(chain, cfg, q0, opts.solver);
    CommandEmitter emitter(out, opts.command_rate);
    StreamStats stats;
    double solve_time_sum = 0.0;
    const double frame_budget = 1.0 / opts.loop_rate;

    auto process = [&](const HumanHandFrame& f) {
        auto [state, report] = session.step(f);
        ++stats.frames_processed;
        solve_time_sum += report.solve_time;
        stats.max_solve_time = std::max(stats.max_solve_time, report.solve_time);
        if (report.solve_time > frame_budget) ++stats.budget_exceeded;
        emitter.push_target(state);
    };

    if (opts.paced) {
        auto next_tick = std::chrono::steady_clock::now();
        const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(frame_budget));
        while (true) {
            next_tick += period;
            std::this_thread::sleep_until(next_tick);
            // Latest-wins: use the newest fully received frame at tick time.
            if (auto f = mailbox.try_take()) process(*f);
            else if (mailbox.closed()) break;
        }
    } else {
        while (auto f = mailbox.take_blocking()) process(*f);
    }

    ingest.join();
    stats.frames_dropped = mailbox.dropped();
    stats.frames_malformed = malformed.load();
    stats.commands_emitted = emitter.emitted();
    if (stats.frames_processed > 0)
        stats.mean_solve_time = solve_time_sum / static_cast<double>(stats.frames_processed);
    stats.latency_estimate = 0.5 / opts.loop_rate + stats.mean_solve_time + 1.0 / opts.command_rate;
    return stats;
}

namespace {

// Minimal iostream plumbing over a connected socket.
class FdStreambuf : public std::streambuf {
public:
    explicit FdStreambuf(int fd) : fd_(fd) { setg(ibuf_, ibuf_, ibuf_); }

protected:
    int_type underflow() override {
        const ssize_t n = ::read(fd_, ibuf_, sizeof(ibuf_));
        if (n <= 0) return traits_type::eof();
        setg(ibuf_, ibuf_, ibuf_ + n);
        return traits_type::to_int_type(*gptr());
    }

    int_type overflow(int_type ch) override {
        if (ch != traits_type::eof()) {
            const char c = traits_type::to_char_type(ch);
            if (::write(fd_, &c, 1) != 1) return traits_type::eof();
        }
        return ch;
    }

    std::streamsize xsputn(const char* s, std::streamsize count) override {
        std::streamsize written = 0;
        while (written < count) {
            const ssize_t n = ::write(fd_, s + written, static_cast<std::size_t>(count - written));
            if (n <= 0) break;
            written += n;
        }
        return written;
    }

private:
    int fd_;
    char ibuf_[4096];
};

}  // namespace

StreamStats run_stream_tcp(const std::string& listen_addr, const KinematicChain& chain,
                           const ObjectiveConfig& cfg, const JointState& q0, const StreamOptions& opts) {
    const auto colon = listen_addr.rfind(':');
    if (colon == std::string::npos)
        throw std::invalid_argument(fmt::format("stream: bad listen address '{}'", listen_addr));
    const std::string host = listen_addr.substr(0, colon);
    const int port = std::stoi(listen_addr.substr(colon + 1));

    const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listener < 0) throw std::runtime_error("stream: socket() failed");
    const int one = 1;
    ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<uint16_t>(port));
    if (::inet_pton(AF_INET, host.empty() ? "0.0.0.0" : host.c_str(), &addr.sin_addr) != 1) {
        ::close(listener);
        throw std::invalid_argument(fmt::format("stream: bad listen host '{}'", host));
    }
    if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 || ::listen(listener, 1) != 0) {
        ::close(listener);
        throw std::runtime_error(fmt::format("stream: cannot listen on '{}'", listen_addr));
    }
    const int conn = ::accept(listener, nullptr, nullptr);
    ::close(listener);
    if (conn < 0) throw std::runtime_error("stream: accept() failed");

    FdStreambuf inbuf(conn), outbuf(conn);
    std::istream in(&inbuf);
    std::ostream out(&outbuf);
    StreamStats stats = run_stream(in, out, chain, cfg, q0, opts);
    ::close(conn);
    return stats;
}

}  // namespace retarget
