#pragma once

#include "polnlos/geometry.hpp"

#include <string>

namespace polnlos {

/// Parses and validates a JSON scene description.
///
/// Top-level keys: wall, scene, cameras, surface, polarizer, occluders,
/// noise_sigma, active, falloff_enabled, leakage_weights,
/// rotation_angles_deg / rotation_angles_rad. Angles take a `_deg` or `_rad`
/// suffix. A top-level `polarizer` applies to every camera that does not set
/// its own; a camera with `"polarizer": null` has none.
///
/// Polarizer keys: axis_deg | axis_rad, then either `normal` or `aim` (a
/// point the polarizer faces; default the wall centre), optional `reference`
/// (default the wall normal) and optional `axis_world`, which overrides the
/// axis built from angle and reference.
///
/// Throws ConfigError naming the field path for schema problems and the
/// library's InvariantError/GeometryError for invalid values.
SceneConfig parse_config(const std::string& text);
SceneConfig load_config(const std::string& path);

/// JSON that parse_config maps back to an identical SceneConfig.
std::string serialize_config(const SceneConfig& config);

}  // namespace polnlos
