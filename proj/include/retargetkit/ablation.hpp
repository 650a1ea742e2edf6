#pragma once

#include <string>
#include <vector>

#include "retargetkit/objective.hpp"

namespace retarget {

/// Named objective variants: the full objective, the eight ablations and the
/// two comparison variants. CLI-facing names: full, a1..a8, dexmv, dexpilot.
enum class PresetId {
    Full,
    A1,  // remove pinch term
    A2,  // actual pinch distance, no rescaling
    A3,  // remove fingertip orientation term
    A4,  // wrist-to-DIP vectors instead of DIP-to-tip
    A5,  // wrist position anchor instead of thumb tip
    A6,  // wrist anchor, no pinch, no fingertip orientation
    A7,  // remove joint position regularization
    A8,  // wrist anchor, no pinch, no fingertip orientation, no joint reg
    DexMvLike,
    DexPilotLike,
};

PresetId preset_from_name(const std::string& name);
std::string preset_name(PresetId id);
std::vector<PresetId> all_presets();

/// Apply a preset to a full-objective base config. FULL returns the base
/// unchanged; every other preset changes exactly its defining fields.
/// Presets that remove the pinch term also force the shape weight to 1.
ObjectiveConfig preset(PresetId id, const ObjectiveConfig& base);

}  // namespace retarget
