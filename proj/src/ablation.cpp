#include "retargetkit/ablation.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace retarget {

PresetId preset_from_name(const std::string& name) {
    if (name == "full") return PresetId::Full;
    if (name == "a1") return PresetId::A1;
    if (name == "a2") return PresetId::A2;
    if (name == "a3") return PresetId::A3;
    if (name == "a4") return PresetId::A4;
    if (name == "a5") return PresetId::A5;
    if (name == "a6") return PresetId::A6;
    if (name == "a7") return PresetId::A7;
    if (name == "a8") return PresetId::A8;
    if (name == "dexmv") return PresetId::DexMvLike;
    if (name == "dexpilot") return PresetId::DexPilotLike;
    throw std::invalid_argument(fmt::format("unknown preset '{}'", name));
}

std::string preset_name(PresetId id) {
    switch (id) {
        case PresetId::Full: return "full";
        case PresetId::A1: return "a1";
        case PresetId::A2: return "a2";
        case PresetId::A3: return "a3";
        case PresetId::A4: return "a4";
        case PresetId::A5: return "a5";
        case PresetId::A6: return "a6";
        case PresetId::A7: return "a7";
        case PresetId::A8: return "a8";
        case PresetId::DexMvLike: return "dexmv";
        case PresetId::DexPilotLike: return "dexpilot";
    }
    throw std::logic_error("unreachable");
}

std::vector<PresetId> all_presets() {
    return {PresetId::Full, PresetId::A1, PresetId::A2, PresetId::A3, PresetId::A4, PresetId::A5,
            PresetId::A6, PresetId::A7, PresetId::A8, PresetId::DexMvLike, PresetId::DexPilotLike};
}

namespace {

void remove_pinch(ObjectiveConfig& c) {
    c.pinch_term = false;
    c.complementary_shape_weight = false;  // shape weight becomes a constant 1.0
}

}  // namespace

ObjectiveConfig preset(PresetId id, const ObjectiveConfig& base) {
    ObjectiveConfig c = base;
    switch (id) {
        case PresetId::Full:
            break;
        case PresetId::A1:
            remove_pinch(c);
            break;
        case PresetId::A2:
            c.pinch_rescale = false;
            break;
        case PresetId::A3:
            c.fingertip_rot_term = false;
            break;
        case PresetId::A4:
            c.fingertip_rot_uses_wrist_to_dip = true;
            break;
        case PresetId::A5:
            c.global_anchor = GlobalAnchor::WristPosition;
            break;
        case PresetId::A6:
            c.global_anchor = GlobalAnchor::WristPosition;
            remove_pinch(c);
            c.fingertip_rot_term = false;
            break;
        case PresetId::A7:
            c.joint_reg = false;  // L_vel is kept, the ablation names only L_joint
            break;
        case PresetId::A8:
            c.global_anchor = GlobalAnchor::WristPosition;
            remove_pinch(c);
            c.fingertip_rot_term = false;
            c.joint_reg = false;
            break;
        case PresetId::DexMvLike:
            // Wrist-to-DIP orientation vectors and no pinch term.
            c.fingertip_rot_uses_wrist_to_dip = true;
            remove_pinch(c);
            break;
        case PresetId::DexPilotLike:
            // Actual pinch distance and discrete step switching weights.
            c.pinch_rescale = false;
            c.weight_shape = SwitchingWeightShape::Step;
            break;
    }
    return c;
}

}  // namespace retarget
