#pragma once

#include <nlohmann/json_fwd.hpp>

#include "pickbench/items.hpp"

namespace pickbench {

/// Scene snapshot: crate, punnet, pick pose and every item with its shape,
/// compliance and pose. Orientations are [w, x, y, z]. Numbers keep full
/// precision, so a snapshot read back compares equal to the original.
nlohmann::json scene_to_json(const Scene& scene);

/// Throws SchemaError on missing or malformed fields and duplicate item ids.
Scene scene_from_json(const nlohmann::json& j);

}  // namespace pickbench
