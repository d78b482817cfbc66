#include "polnlos/config_io.hpp"

#include "polnlos/fileio.hpp"

#include <json.hpp>

#include <cmath>
#include <initializer_list>
#include <set>

namespace polnlos {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError(join(path, key) + ": unknown field");
  }
}

const json& field(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) throw ConfigError(join(path, key) + ": missing required field");
  return j.at(key);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path + ": expected a finite number");
  return v;
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    throw ConfigError(path + ": expected a nonnegative integer");
  }
  return j.get<std::size_t>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path + ": expected true or false");
  return j.get<bool>();
}

Vector3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(path + ": expected [x, y, z]");
  return Vector3(number(j[0], path + "[0]"), number(j[1], path + "[1]"),
                 number(j[2], path + "[2]"));
}

json vec3_json(const Vector3& v) { return json::array({v.x(), v.y(), v.z()}); }

// Reads `<stem>_deg` or `<stem>_rad`; exactly one must be present unless the
// field is optional.
std::optional<double> angle(const json& j, const std::string& path, const std::string& stem,
                            bool required) {
  const bool has_deg = j.contains(stem + "_deg");
  const bool has_rad = j.contains(stem + "_rad");
  if (has_deg && has_rad) {
    throw ConfigError(join(path, stem) + ": give either _deg or _rad, not both");
  }
  if (has_deg) return deg_to_rad(number(j.at(stem + "_deg"), join(path, stem + "_deg")));
  if (has_rad) return number(j.at(stem + "_rad"), join(path, stem + "_rad"));
  if (required) throw ConfigError(join(path, stem + "_deg") + ": missing required field");
  return std::nullopt;
}

WallGrid parse_wall(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"origin", "u_axis", "v_axis", "nu", "nv"});
  WallGrid w;
  w.origin = vec3(field(j, path, "origin"), join(path, "origin"));
  w.u_axis = vec3(field(j, path, "u_axis"), join(path, "u_axis"));
  w.v_axis = vec3(field(j, path, "v_axis"), join(path, "v_axis"));
  w.nu = count(field(j, path, "nu"), join(path, "nu"));
  w.nv = count(field(j, path, "nv"), join(path, "nv"));
  w.validate();
  return w;
}

SceneGrid parse_scene(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"origin", "u_axis", "v_axis", "w_axis", "nu", "nv", "nw", "emission"});
  SceneGrid s;
  s.origin = vec3(field(j, path, "origin"), join(path, "origin"));
  s.u_axis = vec3(field(j, path, "u_axis"), join(path, "u_axis"));
  s.v_axis = vec3(field(j, path, "v_axis"), join(path, "v_axis"));
  if (j.contains("w_axis")) s.w_axis = vec3(j.at("w_axis"), join(path, "w_axis"));
  s.nu = count(field(j, path, "nu"), join(path, "nu"));
  s.nv = count(field(j, path, "nv"), join(path, "nv"));
  if (j.contains("nw")) s.nw = count(j.at("nw"), join(path, "nw"));
  if (j.contains("emission")) {
    const auto& e = j.at("emission");
    const std::string epath = join(path, "emission");
    if (!e.is_array()) throw ConfigError(epath + ": expected an array of [i_p, i_s] pairs");
    std::vector<PolarizationComponents> comps;
    for (std::size_t k = 0; k < e.size(); ++k) {
      const std::string p = epath + "[" + std::to_string(k) + "]";
      if (!e[k].is_array() || e[k].size() != 2) throw ConfigError(p + ": expected [i_p, i_s]");
      comps.push_back(PolarizationComponents{number(e[k][0], p + "[0]"), number(e[k][1], p + "[1]")});
    }
    s.emission = std::move(comps);
  }
  s.validate();
  return s;
}

PolarizerConfig parse_polarizer(const json& j, const std::string& path, const Vector3& camera,
                                const WallGrid& wall) {
  require_object(j, path);
  check_keys(j, path,
             {"axis_deg", "axis_rad", "normal", "aim", "reference", "axis_world"});
  const double axis = *angle(j, path, "axis", true);
  if (j.contains("normal") && j.contains("aim")) {
    throw ConfigError(path + ": give either normal or aim, not both");
  }
  Vector3 normal;
  if (j.contains("normal")) {
    normal = vec3(j.at("normal"), join(path, "normal"));
  } else {
    const Vector3 aim = j.contains("aim") ? vec3(j.at("aim"), join(path, "aim")) : wall.center();
    normal = aim - camera;
    if (normal.norm() > 0.0) normal.normalize();
  }
  if (!(normal.norm() > 0.0)) throw ConfigError(path + ": polarizer normal has zero length");
  if (j.contains("axis_world")) {
    return PolarizerConfig(axis, normal, vec3(j.at("axis_world"), join(path, "axis_world")));
  }
  const Vector3 reference =
      j.contains("reference") ? vec3(j.at("reference"), join(path, "reference")) : wall.normal();
  return PolarizerConfig::from_reference(axis, normal, reference);
}

RoughSurface parse_surface(const json& j, const std::string& path, const WallGrid& wall) {
  require_object(j, path);
  check_keys(j, path, {"roughness", "refractive_index"});
  const double gamma = number(field(j, path, "roughness"), join(path, "roughness"));
  const double eta = number(field(j, path, "refractive_index"), join(path, "refractive_index"));
  return RoughSurface(gamma, FresnelMedium(eta), wall.normal());
}

OccluderRect parse_occluder(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"corner", "edge_u", "edge_v"});
  OccluderRect o;
  o.corner = vec3(field(j, path, "corner"), join(path, "corner"));
  o.edge_u = vec3(field(j, path, "edge_u"), join(path, "edge_u"));
  o.edge_v = vec3(field(j, path, "edge_v"), join(path, "edge_v"));
  o.validate();
  return o;
}

ActiveParams parse_active(const json& j, const std::string& path, const WallGrid& wall) {
  require_object(j, path);
  check_keys(j, path, {"bin_width_ps", "bin_count", "illumination_patch"});
  ActiveParams a;
  a.bin_width_ps = number(field(j, path, "bin_width_ps"), join(path, "bin_width_ps"));
  a.bin_count = count(field(j, path, "bin_count"), join(path, "bin_count"));
  a.illumination_patch =
      count(field(j, path, "illumination_patch"), join(path, "illumination_patch"));
  a.validate(wall);
  return a;
}

}  // namespace

SceneConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require_object(root, "<root>");
  check_keys(root, "",
             {"wall", "scene", "cameras", "surface", "polarizer", "occluders", "noise_sigma",
              "active", "falloff_enabled", "leakage_weights", "rotation_angles_deg",
              "rotation_angles_rad"});

  SceneConfig c;
  c.wall = parse_wall(field(root, "", "wall"), "wall");
  c.scene = parse_scene(field(root, "", "scene"), "scene");

  const auto& cams = field(root, "", "cameras");
  if (!cams.is_array() || cams.empty()) {
    throw ConfigError("cameras: expected a nonempty array");
  }
  for (std::size_t k = 0; k < cams.size(); ++k) {
    const std::string path = "cameras[" + std::to_string(k) + "]";
    const auto& cam = cams[k];
    require_object(cam, path);
    check_keys(cam, path, {"position", "polarizer"});
    CameraPose pose;
    pose.position = vec3(field(cam, path, "position"), join(path, "position"));
    if (cam.contains("polarizer")) {
      if (!cam.at("polarizer").is_null()) {
        pose.polarizer =
            parse_polarizer(cam.at("polarizer"), join(path, "polarizer"), pose.position, c.wall);
      }
    } else if (root.contains("polarizer")) {
      pose.polarizer = parse_polarizer(root.at("polarizer"), "polarizer", pose.position, c.wall);
    }
    c.cameras.push_back(pose);
  }

  if (root.contains("surface")) c.surface = parse_surface(root.at("surface"), "surface", c.wall);
  else c.surface = RoughSurface(c.surface.roughness(), c.surface.medium(), c.wall.normal());

  if (root.contains("occluders")) {
    const auto& occ = root.at("occluders");
    if (!occ.is_array()) throw ConfigError("occluders: expected an array");
    for (std::size_t k = 0; k < occ.size(); ++k) {
      c.occluders.push_back(parse_occluder(occ[k], "occluders[" + std::to_string(k) + "]"));
    }
  }
  if (root.contains("noise_sigma")) c.noise_sigma = number(root.at("noise_sigma"), "noise_sigma");
  if (root.contains("active")) c.active = parse_active(root.at("active"), "active", c.wall);
  if (root.contains("falloff_enabled")) {
    c.falloff_enabled = boolean(root.at("falloff_enabled"), "falloff_enabled");
  }
  if (root.contains("leakage_weights")) {
    const auto& w = root.at("leakage_weights");
    if (w == "literal") c.leakage_weights = LeakageWeights::Literal;
    else if (w == "malus") c.leakage_weights = LeakageWeights::Malus;
    else throw ConfigError("leakage_weights: expected \"literal\" or \"malus\"");
  }
  const bool deg = root.contains("rotation_angles_deg");
  const bool rad = root.contains("rotation_angles_rad");
  if (deg && rad) throw ConfigError("rotation_angles: give either _deg or _rad, not both");
  if (deg || rad) {
    const std::string key = deg ? "rotation_angles_deg" : "rotation_angles_rad";
    const auto& a = root.at(key);
    if (!a.is_array() || a.empty()) throw ConfigError(key + ": expected a nonempty array");
    c.rotation_angles.clear();
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double v = number(a[k], key + "[" + std::to_string(k) + "]");
      c.rotation_angles.push_back(deg ? deg_to_rad(v) : v);
    }
  }
  c.validate();
  return c;
}

SceneConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string serialize_config(const SceneConfig& c) {
  json root;
  root["wall"] = {{"origin", vec3_json(c.wall.origin)},
                  {"u_axis", vec3_json(c.wall.u_axis)},
                  {"v_axis", vec3_json(c.wall.v_axis)},
                  {"nu", c.wall.nu},
                  {"nv", c.wall.nv}};
  json scene = {{"origin", vec3_json(c.scene.origin)},
                {"u_axis", vec3_json(c.scene.u_axis)},
                {"v_axis", vec3_json(c.scene.v_axis)},
                {"w_axis", vec3_json(c.scene.w_axis)},
                {"nu", c.scene.nu},
                {"nv", c.scene.nv},
                {"nw", c.scene.nw}};
  if (c.scene.emission) {
    scene["emission"] = json::array();
    for (const auto& e : *c.scene.emission) scene["emission"].push_back({e.i_p, e.i_s});
  }
  root["scene"] = scene;
  root["cameras"] = json::array();
  for (const auto& cam : c.cameras) {
    json j = {{"position", vec3_json(cam.position)}};
    if (cam.polarizer) {
      j["polarizer"] = {{"axis_rad", cam.polarizer->axis_angle()},
                        {"normal", vec3_json(cam.polarizer->normal())},
                        {"axis_world", vec3_json(cam.polarizer->axis_world())}};
    } else {
      j["polarizer"] = nullptr;
    }
    root["cameras"].push_back(j);
  }
  root["surface"] = {{"roughness", c.surface.roughness()},
                     {"refractive_index", c.surface.medium().refractive_index()}};
  root["occluders"] = json::array();
  for (const auto& o : c.occluders) {
    root["occluders"].push_back({{"corner", vec3_json(o.corner)},
                                 {"edge_u", vec3_json(o.edge_u)},
                                 {"edge_v", vec3_json(o.edge_v)}});
  }
  root["noise_sigma"] = c.noise_sigma;
  if (c.active) {
    root["active"] = {{"bin_width_ps", c.active->bin_width_ps},
                      {"bin_count", c.active->bin_count},
                      {"illumination_patch", c.active->illumination_patch}};
  }
  root["falloff_enabled"] = c.falloff_enabled;
  root["leakage_weights"] = c.leakage_weights == LeakageWeights::Malus ? "malus" : "literal";
  root["rotation_angles_rad"] = c.rotation_angles;
  return root.dump(2) + "\n";
}

}  // namespace polnlos
