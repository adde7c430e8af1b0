#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "partmc/scene/scene.h"

namespace partmc {

class SceneError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kSceneSchemaVersion = 1;

/// Options applied on top of a scene description.
struct SceneOverrides {
    std::optional<int> width;
    std::optional<int> height;
    double emission_scale = 1.0;
};

/// Build a scene from a parsed document. Errors name the offending field.
Scene scene_from_json(const nlohmann::json& doc, const SceneOverrides& overrides = {});
/// Parse JSON text; syntax errors report line and column.
Scene parse_scene(std::string_view text, const SceneOverrides& overrides = {});
Scene load_scene(const std::filesystem::path& path, const SceneOverrides& overrides = {});

/// Names accepted by builtin_scene.
std::vector<std::string> builtin_scene_names();
/// The JSON description of a built-in scene.
nlohmann::json builtin_scene_json(std::string_view name);
Scene builtin_scene(std::string_view name, const SceneOverrides& overrides = {});

/// "builtin:<name>" selects a built-in scene, anything else is a file path.
Scene resolve_scene(std::string_view spec, const SceneOverrides& overrides = {});

}  // namespace partmc
