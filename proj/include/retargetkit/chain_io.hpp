#pragma once

#include <map>
#include <string>

#include "retargetkit/chain.hpp"

namespace retarget {

/// Parse a URDF subset: revolute and fixed joints only, origin xyz/rpy,
/// axis, limits. Anything else (prismatic, continuous, mimic, ...) is
/// rejected with a named error. `roles` maps frame role -> link name.
KinematicChain parse_urdf_subset(const std::string& xml_text, const std::map<std::string, std::string>& roles);

/// Role-map sidecar JSON ({"format_version":1,"type":"role_map","frames":{...}}).
std::map<std::string, std::string> parse_role_map_json(const std::string& json_text);

/// Native chain description (format_version 1, type "chain").
std::string chain_to_json(const KinematicChain& chain);
KinematicChain chain_from_json(const std::string& json_text);

/// Load from disk: ".json" loads the native description, ".urdf"/".xml"
/// needs the role-map path. Throws std::runtime_error on IO failure and
/// std::invalid_argument on schema violations.
KinematicChain load_chain(const std::string& path, const std::string& roles_path = "");
void save_chain_json(const std::string& path, const KinematicChain& chain);

}  // namespace retarget
