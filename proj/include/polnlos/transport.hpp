#pragma once

#include "polnlos/common.hpp"
#include "polnlos/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace polnlos {

/// Provenance of one observation row.
struct RowMeta {
  std::size_t camera = 0;
  std::size_t patch = 0;  // row-major wall patch index
  std::size_t bin = 0;    // time bin; always 0 for passive rows

  friend bool operator==(const RowMeta&, const RowMeta&) = default;
};

/// Scene point (or voxel) addressed by one column.
struct ColMeta {
  std::size_t index = 0;
  std::size_t iu = 0;
  std::size_t iv = 0;
  std::size_t iw = 0;

  friend bool operator==(const ColMeta&, const ColMeta&) = default;
};

/// Dense light-transport matrix with per-row and per-column provenance.
///
/// Rows are camera-major, then wall patches row-major, then time bins (active
/// only). Columns follow the scene grid order (iw, iv, iu outer to inner).
struct TransportMatrix {
  DenseMatrix data;
  std::vector<RowMeta> row_meta;
  std::vector<ColMeta> col_meta;

  std::size_t rows() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(data.cols()); }

  /// Scene image width/height implied by col_meta: width = nu, height = nv*nw.
  std::size_t scene_width() const;
  std::size_t scene_height() const;

  /// Checks shape/metadata agreement and that entries are finite and >= 0.
  void validate() const;

  friend bool operator==(const TransportMatrix& a, const TransportMatrix& b) {
    return a.data.rows() == b.data.rows() && a.data.cols() == b.data.cols() &&
           a.data == b.data && a.row_meta == b.row_meta && a.col_meta == b.col_meta;
  }
};

/// Column metadata for a scene grid.
std::vector<ColMeta> scene_col_meta(const SceneGrid& scene);

/// Passive transport for one camera. Entry (c, s) is
/// Omega(omega_i, omega_o) * F(s, c) * [lambda if use_polarizer], where
/// F = max(cos incidence, 0) / |s - c|^2 when falloff is enabled, else 1.
/// Scene emission components switch lambda to the polarized-scene form.
TransportMatrix build_passive_camera(const SceneConfig& config, std::size_t camera,
                                     bool use_polarizer);

/// Passive transport for every camera, stacked camera-major.
TransportMatrix build_passive(const SceneConfig& config, bool use_polarizer);

/// Passive transport with occluder shadowing (entries times visibility).
TransportMatrix build_occluded_camera(const SceneConfig& config, std::size_t camera,
                                      bool use_polarizer);
TransportMatrix build_occluded(const SceneConfig& config, bool use_polarizer);

/// Per-entry leakage factors for one camera in the passive row layout.
DenseMatrix leakage_matrix(const SceneConfig& config, std::size_t camera);

/// Visibility (0/1) per entry in the passive row layout.
DenseMatrix visibility_matrix(const SceneConfig& config);

/// Stack of camera `camera`'s polarized transport with the polarizer rotated
/// by each of config.rotation_angles.
TransportMatrix build_rotating(const SceneConfig& config, std::size_t camera, bool occluded);

/// Vertical concatenation. All inputs must share columns and col_meta.
TransportMatrix stack_cameras(const std::vector<TransportMatrix>& matrices);

struct ActiveDiagnostics {
  /// (camera, patch, voxel) triples whose path fell beyond the last bin.
  std::size_t truncated_paths = 0;
};

/// Time-resolved transport. For each camera, wall patch c, time bin b and
/// voxel s the entry is
///   Omega(l) Omega(c) / (|s-p|^2 |s-c|^2) * [lambda(omega_ic, omega_oc)]
/// when |s-p| + |s-c| falls in [b c dt, (b+1) c dt), else 0.
TransportMatrix build_active(const SceneConfig& config, bool use_polarizer,
                             ActiveDiagnostics* diagnostics = nullptr);

/// Per-entry leakage in the active layout: lambda placed in the same bin as
/// the transport entry.
DenseMatrix active_leakage_matrix(const SceneConfig& config);

/// i = T l + noise, noise ~ N(0, sigma^2) i.i.d. from `seed`, floored at 0.
DenseVector forward(const TransportMatrix& transport, const DenseVector& scene,
                    double noise_sigma, std::uint64_t seed);

}  // namespace polnlos
