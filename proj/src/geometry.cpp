#include "polnlos/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace polnlos {

namespace {

void require_finite(const Vector3& v, const char* what) {
  if (!v.allFinite()) throw InvariantError(std::string(what) + " must be finite");
}

// Lexicographic order on coordinates, used to make segment tests independent
// of endpoint order.
bool lex_less(const Vector3& a, const Vector3& b) {
  for (int k = 0; k < 3; ++k) {
    if (a[k] < b[k]) return true;
    if (a[k] > b[k]) return false;
  }
  return false;
}

}  // namespace

Vector3 WallGrid::normal() const { return u_axis.cross(v_axis).normalized(); }

Vector3 WallGrid::center() const {
  return origin + 0.5 * static_cast<double>(nu) * u_axis + 0.5 * static_cast<double>(nv) * v_axis;
}

void WallGrid::validate() const {
  require_finite(origin, "wall.origin");
  require_finite(u_axis, "wall.u_axis");
  require_finite(v_axis, "wall.v_axis");
  if (nu < 1 || nv < 1) throw InvariantError("wall grid needs nu, nv >= 1");
  const double lu = u_axis.norm();
  const double lv = v_axis.norm();
  if (!(lu > 0.0) || !(lv > 0.0)) throw InvariantError("wall axes must be nonzero");
  if (std::abs(u_axis.dot(v_axis)) > 1e-9 * lu * lv) {
    throw InvariantError("wall axes must be perpendicular (u_axis . v_axis = 0)");
  }
}

void SceneGrid::validate() const {
  require_finite(origin, "scene.origin");
  require_finite(u_axis, "scene.u_axis");
  require_finite(v_axis, "scene.v_axis");
  require_finite(w_axis, "scene.w_axis");
  if (nu < 1 || nv < 1 || nw < 1) throw InvariantError("scene grid needs nu, nv, nw >= 1");
  if (emission) {
    if (emission->size() != size()) {
      throw InvariantError("scene emission must have one entry per scene point");
    }
    for (const auto& e : *emission) e.validate();
  }
}

void OccluderRect::validate() const {
  require_finite(corner, "occluder.corner");
  require_finite(edge_u, "occluder.edge_u");
  require_finite(edge_v, "occluder.edge_v");
  const double area = edge_u.cross(edge_v).norm();
  if (!(area > 1e-12 * edge_u.norm() * edge_v.norm()) || !(area > 0.0)) {
    throw InvariantError("occluder edges must be linearly independent");
  }
}

void ActiveParams::validate(const WallGrid& wall) const {
  if (!std::isfinite(bin_width_ps) || !(bin_width_ps > 0.0)) {
    throw InvariantError("active.bin_width_ps must be positive");
  }
  if (bin_count < 1) throw InvariantError("active.bin_count must be >= 1");
  if (illumination_patch >= wall.size()) {
    throw InvariantError("active.illumination_patch is outside the wall grid");
  }
}

void SceneConfig::validate() const {
  wall.validate();
  scene.validate();
  if (cameras.empty()) throw InvariantError("at least one camera is required");
  const Vector3 n = wall.normal();
  for (const auto& cam : cameras) {
    require_finite(cam.position, "camera.position");
    if (std::abs((cam.position - wall.origin).dot(n)) <= 1e-12) {
      throw InvariantError("camera position must lie off the wall plane");
    }
  }
  for (const auto& occ : occluders) occ.validate();
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) {
    throw InvariantError("noise_sigma must be >= 0");
  }
  if (active) active->validate(wall);
  for (double a : rotation_angles) {
    if (!std::isfinite(a)) throw InvariantError("rotation angles must be finite");
  }
}

Vector3 patch_center(const WallGrid& grid, std::size_t iu, std::size_t iv) {
  if (iu >= grid.nu || iv >= grid.nv) throw DimensionError("wall patch index out of range");
  return grid.origin + (static_cast<double>(iu) + 0.5) * grid.u_axis +
         (static_cast<double>(iv) + 0.5) * grid.v_axis;
}

Vector3 patch_center(const SceneGrid& grid, std::size_t iu, std::size_t iv, std::size_t iw) {
  if (iu >= grid.nu || iv >= grid.nv || iw >= grid.nw) {
    throw DimensionError("scene point index out of range");
  }
  return grid.origin + (static_cast<double>(iu) + 0.5) * grid.u_axis +
         (static_cast<double>(iv) + 0.5) * grid.v_axis +
         (static_cast<double>(iw) + 0.5) * grid.w_axis;
}

std::vector<Vector3> patch_centers(const WallGrid& grid) {
  std::vector<Vector3> out;
  out.reserve(grid.size());
  for (std::size_t iv = 0; iv < grid.nv; ++iv) {
    for (std::size_t iu = 0; iu < grid.nu; ++iu) out.push_back(patch_center(grid, iu, iv));
  }
  return out;
}

std::vector<Vector3> patch_centers(const SceneGrid& grid) {
  std::vector<Vector3> out;
  out.reserve(grid.size());
  for (std::size_t iw = 0; iw < grid.nw; ++iw) {
    for (std::size_t iv = 0; iv < grid.nv; ++iv) {
      for (std::size_t iu = 0; iu < grid.nu; ++iu) out.push_back(patch_center(grid, iu, iv, iw));
    }
  }
  return out;
}

Vector3 unit_direction(const Vector3& from, const Vector3& to) {
  const Vector3 d = to - from;
  const double len = d.norm();
  if (!(len > 0.0)) throw GeometryError("coincident points have no direction");
  return d / len;
}

std::pair<Vector3, Vector3> ray_directions(const Vector3& s, const Vector3& c, const Vector3& o) {
  return {unit_direction(c, s), unit_direction(c, o)};
}

bool segment_hits(const Vector3& a_in, const Vector3& b_in, const OccluderRect& occ) {
  const bool swap = lex_less(b_in, a_in);
  const Vector3& a = swap ? b_in : a_in;
  const Vector3& b = swap ? a_in : b_in;

  const Vector3 d = b - a;
  const Vector3 pvec = d.cross(occ.edge_v);
  const double det = occ.edge_u.dot(pvec);
  if (std::abs(det) <= 1e-300) return false;  // segment parallel to the occluder plane
  const double inv = 1.0 / det;
  const Vector3 tvec = a - occ.corner;
  const double alpha = tvec.dot(pvec) * inv;
  if (alpha < 0.0 || alpha > 1.0) return false;
  const Vector3 qvec = tvec.cross(occ.edge_u);
  const double beta = d.dot(qvec) * inv;
  if (beta < 0.0 || beta > 1.0) return false;
  const double t = occ.edge_v.dot(qvec) * inv;
  return t > 0.0 && t < 1.0;
}

int visibility(const Vector3& s, const Vector3& c, const std::vector<OccluderRect>& occluders) {
  for (const auto& occ : occluders) {
    if (segment_hits(s, c, occ)) return 0;
  }
  return 1;
}

}  // namespace polnlos
