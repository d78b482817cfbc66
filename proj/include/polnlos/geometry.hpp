#pragma once

#include "polnlos/brdf.hpp"
#include "polnlos/common.hpp"
#include "polnlos/polarization.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace polnlos {

/// Regular grid of relay-wall patches. Axes are the per-cell steps in meters.
struct WallGrid {
  Vector3 origin = Vector3::Zero();
  Vector3 u_axis = Vector3::UnitX();
  Vector3 v_axis = Vector3::UnitY();
  std::size_t nu = 1;
  std::size_t nv = 1;

  std::size_t size() const { return nu * nv; }
  /// Unit normal u x v.
  Vector3 normal() const;
  /// Geometric centre of the whole grid.
  Vector3 center() const;
  void validate() const;

  friend bool operator==(const WallGrid&, const WallGrid&) = default;
};

/// Hidden-scene point grid. For the active model it is a voxel set with a
/// third axis (`w_axis`, `nw`); passive configurations use nw = 1.
struct SceneGrid {
  Vector3 origin = Vector3::Zero();
  Vector3 u_axis = Vector3::UnitX();
  Vector3 v_axis = Vector3::UnitY();
  Vector3 w_axis = Vector3::Zero();
  std::size_t nu = 1;
  std::size_t nv = 1;
  std::size_t nw = 1;
  /// Optional per-point emission (p/s intensities), row-major, size nu*nv*nw.
  std::optional<std::vector<PolarizationComponents>> emission;

  std::size_t size() const { return nu * nv * nw; }
  void validate() const;

  friend bool operator==(const SceneGrid&, const SceneGrid&) = default;
};

struct CameraPose {
  Vector3 position = Vector3::Zero();
  std::optional<PolarizerConfig> polarizer;

  friend bool operator==(const CameraPose&, const CameraPose&) = default;
};

/// Closed parallelogram corner + a*edge_u + b*edge_v, a, b in [0, 1].
struct OccluderRect {
  Vector3 corner = Vector3::Zero();
  Vector3 edge_u = Vector3::UnitX();
  Vector3 edge_v = Vector3::UnitY();

  void validate() const;

  friend bool operator==(const OccluderRect&, const OccluderRect&) = default;
};

/// Time-resolved capture parameters.
struct ActiveParams {
  double bin_width_ps = 5.0;  // picoseconds
  std::size_t bin_count = 1;
  std::size_t illumination_patch = 0;  // row-major wall patch index

  void validate(const WallGrid& wall) const;

  friend bool operator==(const ActiveParams&, const ActiveParams&) = default;
};

struct SceneConfig {
  WallGrid wall;
  SceneGrid scene;
  std::vector<CameraPose> cameras;
  RoughSurface surface{1.0, FresnelMedium{1.5}, Vector3::UnitZ()};
  std::vector<OccluderRect> occluders;
  double noise_sigma = 0.0;
  std::optional<ActiveParams> active;
  /// Include cos(incidence) / r^2 in passive transport entries.
  bool falloff_enabled = true;
  LeakageWeights leakage_weights = LeakageWeights::Literal;
  /// Polarizer rotations stacked for the rotating-polarizer comparison.
  std::vector<double> rotation_angles{0.0, kPi / 4.0, kPi / 2.0, 3.0 * kPi / 4.0};

  void validate() const;

  friend bool operator==(const SceneConfig&, const SceneConfig&) = default;
};

/// Center of cell (iu, iv) of a wall grid.
Vector3 patch_center(const WallGrid& grid, std::size_t iu, std::size_t iv);

/// Center of cell (iu, iv, iw) of a scene grid.
Vector3 patch_center(const SceneGrid& grid, std::size_t iu, std::size_t iv, std::size_t iw = 0);

/// All wall patch centers, row-major (iv outer, iu inner).
std::vector<Vector3> patch_centers(const WallGrid& grid);

/// All scene point centers, ordered iw, iv, iu from outer to inner.
std::vector<Vector3> patch_centers(const SceneGrid& grid);

/// (omega_i, omega_o): unit directions from wall point c toward scene point s
/// and toward the camera o.
std::pair<Vector3, Vector3> ray_directions(const Vector3& s, const Vector3& c, const Vector3& o);

/// Unit direction from `from` to `to`; throws GeometryError if they coincide.
Vector3 unit_direction(const Vector3& from, const Vector3& to);

/// Does the segment between a and b cross the (closed) rectangle at an
/// interior segment parameter t in (0, 1)?
bool segment_hits(const Vector3& a, const Vector3& b, const OccluderRect& occluder);

/// 1 if the open segment (s, c) misses every occluder, else 0.
int visibility(const Vector3& s, const Vector3& c, const std::vector<OccluderRect>& occluders);

}  // namespace polnlos
