#include "retargetkit/chain_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace retarget {

namespace {

using json = nlohmann::ordered_json;
namespace pt = boost::property_tree;

constexpr int kFormatVersion = 1;

void check_format_version(const json& doc, const std::string& what) {
    if (!doc.contains("format_version") || !doc["format_version"].is_number_integer())
        throw std::invalid_argument(fmt::format("{}: missing format_version", what));
    const int v = doc["format_version"].get<int>();
    if (v != kFormatVersion)
        throw std::invalid_argument(fmt::format("{}: unsupported format_version {}", what, v));
}

Eigen::Vector3d parse_xyz(const std::string& s, const std::string& where) {
    std::istringstream in(s);
    Eigen::Vector3d v;
    if (!(in >> v.x() >> v.y() >> v.z()))
        throw std::invalid_argument(fmt::format("urdf: malformed vector '{}' in {}", s, where));
    return v;
}

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

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

KinematicChain parse_urdf_subset(const std::string& xml_text, const std::map<std::string, std::string>& roles) {
    pt::ptree tree;
    try {
        std::istringstream in(xml_text);
        pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw std::invalid_argument(fmt::format("urdf: malformed XML: {}", e.message()));
    }

    auto robot = tree.get_child_optional("robot");
    if (!robot) throw std::invalid_argument("urdf: missing <robot> root element");
    const std::string name = robot->get<std::string>("<xmlattr>.name", "robot");

    std::vector<JointSpec> joints;
    for (const auto& [tag, node] : *robot) {
        if (tag != "joint") continue;
        JointSpec j;
        j.name = node.get<std::string>("<xmlattr>.name", "");
        if (j.name.empty()) throw std::invalid_argument("urdf: joint without a name");
        const std::string type = node.get<std::string>("<xmlattr>.type", "");
        if (type == "revolute")
            j.type = JointType::Revolute;
        else if (type == "fixed")
            j.type = JointType::Fixed;
        else
            throw std::invalid_argument(fmt::format("urdf: joint '{}' has unsupported type '{}'", j.name, type));

        j.parent_link = node.get<std::string>("parent.<xmlattr>.link", "");
        j.child_link = node.get<std::string>("child.<xmlattr>.link", "");
        if (j.parent_link.empty() || j.child_link.empty())
            throw std::invalid_argument(fmt::format("urdf: joint '{}' missing parent/child link", j.name));

        j.origin.position = parse_xyz(node.get<std::string>("origin.<xmlattr>.xyz", "0 0 0"), j.name);
        const Eigen::Vector3d rpy = parse_xyz(node.get<std::string>("origin.<xmlattr>.rpy", "0 0 0"), j.name);
        j.origin.orientation = quat_from_rpy(rpy.x(), rpy.y(), rpy.z());

        if (j.type == JointType::Revolute) {
            j.axis = parse_xyz(node.get<std::string>("axis.<xmlattr>.xyz", "0 0 1"), j.name);
            const double n = j.axis.norm();
            if (n < 1e-12)
                throw std::invalid_argument(fmt::format("urdf: joint '{}' has zero axis", j.name));
            j.axis /= n;
            auto limit = node.get_child_optional("limit");
            if (!limit || !limit->get_optional<double>("<xmlattr>.lower") ||
                !limit->get_optional<double>("<xmlattr>.upper"))
                throw std::invalid_argument(fmt::format("urdf: revolute joint '{}' missing limit lower/upper", j.name));
            j.lower = limit->get<double>("<xmlattr>.lower");
            j.upper = limit->get<double>("<xmlattr>.upper");
        }
        joints.push_back(std::move(j));
    }

    return KinematicChain::build(name, std::move(joints), roles);
}

std::map<std::string, std::string> parse_role_map_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(fmt::format("role map: malformed JSON: {}", e.what()));
    }
    check_format_version(doc, "role map");
    if (doc.value("type", "") != "role_map")
        throw std::invalid_argument("role map: type must be 'role_map'");
    if (!doc.contains("frames") || !doc["frames"].is_object())
        throw std::invalid_argument("role map: missing 'frames' object");
    std::map<std::string, std::string> roles;
    for (const auto& [role, link] : doc["frames"].items()) {
        if (!link.is_string()) throw std::invalid_argument(fmt::format("role map: role '{}' is not a string", role));
        roles[role] = link.get<std::string>();
    }
    return roles;
}

std::string chain_to_json(const KinematicChain& chain) {
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["type"] = "chain";
    doc["name"] = chain.name();
    json joints = json::array();
    for (const auto& j : chain.joints()) {
        json node;
        node["name"] = j.name;
        node["type"] = j.type == JointType::Revolute ? "revolute" : "fixed";
        node["parent"] = j.parent_link;
        node["child"] = j.child_link;
        node["origin"]["xyz"] = {j.origin.position.x(), j.origin.position.y(), j.origin.position.z()};
        const auto& q = j.origin.orientation;
        node["origin"]["quat"] = {q.w(), q.x(), q.y(), q.z()};
        if (j.type == JointType::Revolute) {
            node["axis"] = {j.axis.x(), j.axis.y(), j.axis.z()};
            node["limits"] = {j.lower, j.upper};
        }
        joints.push_back(std::move(node));
    }
    doc["joints"] = std::move(joints);
    doc["frames"] = chain.frame_roles();
    return doc.dump(2) + "\n";
}

KinematicChain chain_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(fmt::format("chain: malformed JSON: {}", e.what()));
    }
    check_format_version(doc, "chain");
    if (doc.value("type", "") != "chain") throw std::invalid_argument("chain: type must be 'chain'");
    if (!doc.contains("joints") || !doc["joints"].is_array())
        throw std::invalid_argument("chain: missing 'joints' array");

    auto vec3 = [](const json& a, const std::string& what) {
        if (!a.is_array() || a.size() != 3)
            throw std::invalid_argument(fmt::format("chain: {} must be a 3-array", what));
        return Eigen::Vector3d(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
    };

    std::vector<JointSpec> joints;
    for (const auto& node : doc["joints"]) {
        JointSpec j;
        j.name = node.at("name").get<std::string>();
        const std::string type = node.at("type").get<std::string>();
        if (type == "revolute")
            j.type = JointType::Revolute;
        else if (type == "fixed")
            j.type = JointType::Fixed;
        else
            throw std::invalid_argument(fmt::format("chain: joint '{}' has unsupported type '{}'", j.name, type));
        j.parent_link = node.at("parent").get<std::string>();
        j.child_link = node.at("child").get<std::string>();
        j.origin.position = vec3(node.at("origin").at("xyz"), "origin.xyz");
        const auto& q = node.at("origin").at("quat");
        if (!q.is_array() || q.size() != 4)
            throw std::invalid_argument("chain: origin.quat must be a 4-array [w,x,y,z]");
        j.origin.orientation =
            Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
        if (j.type == JointType::Revolute) {
            j.axis = vec3(node.at("axis"), "axis");
            const auto& lim = node.at("limits");
            if (!lim.is_array() || lim.size() != 2)
                throw std::invalid_argument("chain: limits must be a 2-array");
            j.lower = lim[0].get<double>();
            j.upper = lim[1].get<double>();
        }
        joints.push_back(std::move(j));
    }

    std::map<std::string, std::string> roles;
    if (!doc.contains("frames") || !doc["frames"].is_object())
        throw std::invalid_argument("chain: missing 'frames' object");
    for (const auto& [role, link] : doc["frames"].items()) roles[role] = link.get<std::string>();

    return KinematicChain::build(doc.value("name", "robot"), std::move(joints), std::move(roles));
}

KinematicChain load_chain(const std::string& path, const std::string& roles_path) {
    const std::string text = read_file(path);
    if (ends_with(path, ".json")) return chain_from_json(text);
    if (ends_with(path, ".urdf") || ends_with(path, ".xml")) {
        if (roles_path.empty())
            throw std::invalid_argument("load_chain: URDF input needs a role-map file");
        return parse_urdf_subset(text, parse_role_map_json(read_file(roles_path)));
    }
    throw std::invalid_argument(fmt::format("load_chain: unrecognized extension on '{}'", path));
}

void save_chain_json(const std::string& path, const KinematicChain& chain) {
    write_file(path, chain_to_json(chain));
}

}  // namespace retarget
