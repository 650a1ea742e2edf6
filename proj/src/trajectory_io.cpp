#include "retargetkit/trajectory_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace retarget {

namespace {

using json = nlohmann::ordered_json;

constexpr int kFormatVersion = 1;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
    out << text;
    if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", path));
}

json vec3_to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vec3_from_json(const json& a, const std::string& what) {
    if (!a.is_array() || a.size() != 3)
        throw std::invalid_argument(fmt::format("{} must be a 3-array", what));
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

json frame_to_json_obj(const HumanHandFrame& f) {
    json o;
    o["t"] = f.timestamp;
    o["wrist"]["p"] = vec3_to_json(f.wrist.position);
    const auto& q = f.wrist.orientation;
    o["wrist"]["q"] = json::array({q.w(), q.x(), q.y(), q.z()});
    o["thumb_tip"] = vec3_to_json(f.thumb_tip);
    json tips = json::array();
    for (const auto& p : f.fingertips) tips.push_back(vec3_to_json(p));
    o["fingertips"] = std::move(tips);
    json dips = json::array();
    for (const auto& p : f.dips) dips.push_back(vec3_to_json(p));
    o["dips"] = std::move(dips);
    return o;
}

HumanHandFrame frame_from_json_obj(const json& o, std::size_t record_index) {
    auto fail = [&](const std::string& msg) -> void {
        throw std::invalid_argument(fmt::format("trajectory record {}: {}", record_index, msg));
    };
    HumanHandFrame f;
    try {
        f.timestamp = o.at("t").get<double>();
        f.wrist.position = vec3_from_json(o.at("wrist").at("p"), "wrist.p");
        const auto& q = o.at("wrist").at("q");
        if (!q.is_array() || q.size() != 4) fail("wrist.q must be a 4-array [w,x,y,z]");
        f.wrist.orientation =
            Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
        f.thumb_tip = vec3_from_json(o.at("thumb_tip"), "thumb_tip");
        for (const auto& p : o.at("fingertips")) f.fingertips.push_back(vec3_from_json(p, "fingertip"));
        for (const auto& p : o.at("dips")) f.dips.push_back(vec3_from_json(p, "dip"));
    } catch (const json::exception& e) {
        fail(e.what());
    }
    try {
        f.validate();
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    return f;
}

json header_to_json(const TrajectoryHeader& h) {
    json o;
    o["format_version"] = kFormatVersion;
    o["type"] = "trajectory";
    o["n_fingers"] = h.n_fingers;
    o["units"] = "m";
    o["frame"] = "world";
    o["rate_hz"] = h.rate_hz;
    if (!h.source.empty()) o["source"] = h.source;
    return o;
}

TrajectoryHeader header_from_json(const json& o) {
    if (!o.contains("format_version") || !o["format_version"].is_number_integer())
        throw std::invalid_argument("trajectory header: missing format_version");
    if (o["format_version"].get<int>() != kFormatVersion)
        throw std::invalid_argument(
            fmt::format("trajectory header: unsupported format_version {}", o["format_version"].get<int>()));
    if (o.value("type", "") != "trajectory")
        throw std::invalid_argument("trajectory header: type must be 'trajectory'");
    TrajectoryHeader h;
    h.n_fingers = o.at("n_fingers").get<int>();
    h.rate_hz = o.value("rate_hz", 0.0);
    h.source = o.value("source", "");
    return h;
}

Trajectory trajectory_from_records(const std::vector<json>& records) {
    if (records.empty()) throw std::invalid_argument("trajectory: empty file");
    Trajectory traj;
    traj.header = header_from_json(records[0]);
    if (records.size() == 1) throw std::invalid_argument("trajectory: no frames");
    for (std::size_t i = 1; i < records.size(); ++i) {
        HumanHandFrame f = frame_from_json_obj(records[i], i);
        if (f.finger_count() != traj.header.n_fingers)
            throw std::invalid_argument(fmt::format("trajectory record {}: has {} fingers, header says {}", i,
                                                    f.finger_count(), traj.header.n_fingers));
        if (!traj.frames.empty() && !(f.timestamp > traj.frames.back().timestamp))
            throw std::invalid_argument(
                fmt::format("trajectory record {}: timestamp not strictly increasing", i));
        traj.frames.push_back(std::move(f));
    }
    return traj;
}

}  // namespace

std::string frame_to_json(const HumanHandFrame& frame) { return frame_to_json_obj(frame).dump(); }

HumanHandFrame frame_from_json(const std::string& text) {
    json o;
    try {
        o = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(fmt::format("frame: malformed JSON: {}", e.what()));
    }
    return frame_from_json_obj(o, 0);
}

Trajectory parse_trajectory(const std::string& text) {
    std::vector<json> records;
    // Leading whitespace then '[' means a single-document array.
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw std::invalid_argument(fmt::format("trajectory: malformed JSON: {}", e.what()));
        }
        for (const auto& r : doc) records.push_back(r);
    } else {
        std::istringstream in(text);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                records.push_back(json::parse(line));
            } catch (const json::parse_error& e) {
                throw std::invalid_argument(fmt::format("trajectory line {}: malformed JSON: {}", line_no, e.what()));
            }
        }
    }
    return trajectory_from_records(records);
}

Trajectory load_trajectory(const std::string& path) { return parse_trajectory(read_file(path)); }

std::string trajectory_to_jsonl(const Trajectory& traj) {
    std::string out = header_to_json(traj.header).dump() + "\n";
    for (const auto& f : traj.frames) out += frame_to_json_obj(f).dump() + "\n";
    return out;
}

void save_trajectory(const std::string& path, const Trajectory& traj) {
    write_file(path, trajectory_to_jsonl(traj));
}

StatesFile load_states(const std::string& path) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    StatesFile out;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json o;
        try {
            o = json::parse(line);
        } catch (const json::parse_error& e) {
            throw std::invalid_argument(fmt::format("states line {}: malformed JSON: {}", line_no, e.what()));
        }
        if (!have_header) {
            if (o.value("type", "") != "joint_states" || o.value("format_version", -1) != kFormatVersion)
                throw std::invalid_argument("states: missing or unsupported header");
            out.m = o.at("m").get<int>();
            out.rate_hz = o.value("rate_hz", 0.0);
            have_header = true;
            continue;
        }
        JointState s;
        s.timestamp = o.at("t").get<double>();
        const auto& qa = o.at("q");
        if (!qa.is_array() || static_cast<int>(qa.size()) != out.m)
            throw std::invalid_argument(fmt::format("states line {}: q must be a {}-array", line_no, out.m));
        s.q.resize(out.m);
        for (int j = 0; j < out.m; ++j) s.q[j] = qa[static_cast<std::size_t>(j)].get<double>();
        out.states.push_back(std::move(s));
    }
    if (!have_header) throw std::invalid_argument("states: empty file");
    if (out.states.empty()) throw std::invalid_argument("states: no states");
    return out;
}

void save_states(const std::string& path, const std::vector<JointState>& states, double rate_hz) {
    if (states.empty()) throw std::invalid_argument("save_states: no states");
    json header;
    header["format_version"] = kFormatVersion;
    header["type"] = "joint_states";
    header["m"] = static_cast<int>(states[0].q.size());
    header["rate_hz"] = rate_hz;
    std::string out = header.dump() + "\n";
    for (const auto& s : states) {
        json o;
        o["t"] = s.timestamp;
        json q = json::array();
        for (long j = 0; j < s.q.size(); ++j) q.push_back(s.q[j]);
        o["q"] = std::move(q);
        out += o.dump() + "\n";
    }
    write_file(path, out);
}

void save_report(const std::string& path, const MetricsReport& report, const std::string& preset_label,
                 const std::string& trajectory_label) {
    std::string out = metrics_csv_header();
    append_metrics_csv(out, report, preset_label, trajectory_label);
    write_file(path, out);
}

}  // namespace retarget
