#include "polnlos/transport.hpp"

#include "polnlos/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <string>

namespace polnlos {

namespace {

const PolarizerConfig& require_polarizer(const SceneConfig& config, std::size_t camera) {
  const auto& pol = config.cameras.at(camera).polarizer;
  if (!pol) {
    throw InvariantError("camera " + std::to_string(camera) +
                         " has no polarizer but use_polarizer was requested");
  }
  return *pol;
}

double entry_leakage(const SceneConfig& config, const PolarizerConfig& polarizer,
                     const Vector3& omega_i, const Vector3& omega_o, std::size_t scene_index) {
  const FresnelMedium& medium = config.surface.medium();
  if (config.scene.emission) {
    return leakage_polarized_scene(omega_i, omega_o, polarizer, medium,
                                   (*config.scene.emission)[scene_index], config.leakage_weights);
  }
  return leakage(omega_i, omega_o, polarizer, medium, config.leakage_weights);
}

// Unpolarized passive entry Omega * F.
double passive_base(const SceneConfig& config, const Vector3& omega_i, const Vector3& omega_o,
                    const Vector3& s, const Vector3& c) {
  const double omega = brdf_eval(omega_i, omega_o, config.surface);
  if (!config.falloff_enabled) return omega;
  const double cos_in = std::max(omega_i.dot(config.surface.wall_normal()), 0.0);
  const double r2 = (s - c).squaredNorm();
  return omega * (cos_in / r2);
}

std::vector<RowMeta> passive_row_meta(const WallGrid& wall, std::size_t camera) {
  std::vector<RowMeta> meta(wall.size());
  for (std::size_t c = 0; c < wall.size(); ++c) meta[c] = RowMeta{camera, c, 0};
  return meta;
}

TransportMatrix build_passive_impl(const SceneConfig& config, std::size_t camera,
                                   const PolarizerConfig* polarizer, bool occluded) {
  config.validate();
  const auto walls = patch_centers(config.wall);
  const auto scene = patch_centers(config.scene);
  const Vector3 o = config.cameras.at(camera).position;

  TransportMatrix t;
  t.data = DenseMatrix::Zero(static_cast<Eigen::Index>(walls.size()),
                             static_cast<Eigen::Index>(scene.size()));
  t.row_meta = passive_row_meta(config.wall, camera);
  t.col_meta = scene_col_meta(config.scene);

  parallel_for(walls.size(), [&](std::size_t r) {
    const Vector3& c = walls[r];
    for (std::size_t j = 0; j < scene.size(); ++j) {
      const Vector3& s = scene[j];
      const auto [omega_i, omega_o] = ray_directions(s, c, o);
      double value = passive_base(config, omega_i, omega_o, s, c);
      if (polarizer) value *= entry_leakage(config, *polarizer, omega_i, omega_o, j);
      if (occluded) value *= static_cast<double>(visibility(s, c, config.occluders));
      t.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = value;
    }
  });
  return t;
}

}  // namespace

std::size_t TransportMatrix::scene_width() const {
  std::size_t w = 0;
  for (const auto& m : col_meta) w = std::max(w, m.iu + 1);
  return w;
}

std::size_t TransportMatrix::scene_height() const {
  std::size_t v = 0;
  std::size_t d = 0;
  for (const auto& m : col_meta) {
    v = std::max(v, m.iv + 1);
    d = std::max(d, m.iw + 1);
  }
  return v * d;
}

void TransportMatrix::validate() const {
  if (row_meta.size() != rows()) throw DimensionError("row metadata does not match row count");
  if (col_meta.size() != cols()) throw DimensionError("column metadata does not match column count");
  if (!data.allFinite()) throw InvariantError("transport entries must be finite");
  if (data.size() > 0 && data.minCoeff() < 0.0) {
    throw InvariantError("transport entries must be nonnegative");
  }
}

std::vector<ColMeta> scene_col_meta(const SceneGrid& scene) {
  std::vector<ColMeta> meta;
  meta.reserve(scene.size());
  std::size_t index = 0;
  for (std::size_t iw = 0; iw < scene.nw; ++iw) {
    for (std::size_t iv = 0; iv < scene.nv; ++iv) {
      for (std::size_t iu = 0; iu < scene.nu; ++iu) meta.push_back(ColMeta{index++, iu, iv, iw});
    }
  }
  return meta;
}

TransportMatrix build_passive_camera(const SceneConfig& config, std::size_t camera,
                                     bool use_polarizer) {
  const PolarizerConfig* pol = use_polarizer ? &require_polarizer(config, camera) : nullptr;
  return build_passive_impl(config, camera, pol, false);
}

TransportMatrix build_passive(const SceneConfig& config, bool use_polarizer) {
  std::vector<TransportMatrix> parts;
  for (std::size_t k = 0; k < config.cameras.size(); ++k) {
    parts.push_back(build_passive_camera(config, k, use_polarizer));
  }
  return stack_cameras(parts);
}

TransportMatrix build_occluded_camera(const SceneConfig& config, std::size_t camera,
                                      bool use_polarizer) {
  const PolarizerConfig* pol = use_polarizer ? &require_polarizer(config, camera) : nullptr;
  return build_passive_impl(config, camera, pol, true);
}

TransportMatrix build_occluded(const SceneConfig& config, bool use_polarizer) {
  std::vector<TransportMatrix> parts;
  for (std::size_t k = 0; k < config.cameras.size(); ++k) {
    parts.push_back(build_occluded_camera(config, k, use_polarizer));
  }
  return stack_cameras(parts);
}

DenseMatrix leakage_matrix(const SceneConfig& config, std::size_t camera) {
  config.validate();
  const PolarizerConfig& pol = require_polarizer(config, camera);
  const auto walls = patch_centers(config.wall);
  const auto scene = patch_centers(config.scene);
  const Vector3 o = config.cameras.at(camera).position;
  DenseMatrix out(static_cast<Eigen::Index>(walls.size()), static_cast<Eigen::Index>(scene.size()));
  for (std::size_t r = 0; r < walls.size(); ++r) {
    for (std::size_t j = 0; j < scene.size(); ++j) {
      const auto [omega_i, omega_o] = ray_directions(scene[j], walls[r], o);
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          entry_leakage(config, pol, omega_i, omega_o, j);
    }
  }
  return out;
}

DenseMatrix visibility_matrix(const SceneConfig& config) {
  const auto walls = patch_centers(config.wall);
  const auto scene = patch_centers(config.scene);
  DenseMatrix out(static_cast<Eigen::Index>(walls.size()), static_cast<Eigen::Index>(scene.size()));
  for (std::size_t r = 0; r < walls.size(); ++r) {
    for (std::size_t j = 0; j < scene.size(); ++j) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          static_cast<double>(visibility(scene[j], walls[r], config.occluders));
    }
  }
  return out;
}

TransportMatrix build_rotating(const SceneConfig& config, std::size_t camera, bool occluded) {
  const PolarizerConfig& base = require_polarizer(config, camera);
  std::vector<TransportMatrix> parts;
  for (double angle : config.rotation_angles) {
    const PolarizerConfig pol = base.rotated(angle);
    parts.push_back(build_passive_impl(config, camera, &pol, occluded));
  }
  return stack_cameras(parts);
}

TransportMatrix stack_cameras(const std::vector<TransportMatrix>& matrices) {
  if (matrices.empty()) throw DimensionError("stack_cameras needs at least one matrix");
  const auto& first = matrices.front();
  std::size_t total_rows = 0;
  for (const auto& m : matrices) {
    if (m.cols() != first.cols() || m.col_meta != first.col_meta) {
      throw DimensionError("stack_cameras: column layouts differ (" + std::to_string(m.cols()) +
                           " vs " + std::to_string(first.cols()) + " columns)");
    }
    total_rows += m.rows();
  }
  TransportMatrix out;
  out.data.resize(static_cast<Eigen::Index>(total_rows), static_cast<Eigen::Index>(first.cols()));
  out.col_meta = first.col_meta;
  out.row_meta.reserve(total_rows);
  Eigen::Index offset = 0;
  for (const auto& m : matrices) {
    out.data.middleRows(offset, m.data.rows()) = m.data;
    offset += m.data.rows();
    out.row_meta.insert(out.row_meta.end(), m.row_meta.begin(), m.row_meta.end());
  }
  return out;
}

namespace {

// Shared traversal of the active layout. `emit` receives (row, column, value)
// for each nonzero-support entry; the per-entry value excludes lambda, which
// is passed separately.
template <typename Emit>
std::size_t for_each_active_entry(const SceneConfig& config, const Emit& emit) {
  config.validate();
  if (!config.active) throw InvariantError("active parameters are required for the active model");
  const ActiveParams& act = *config.active;
  const auto walls = patch_centers(config.wall);
  const auto voxels = patch_centers(config.scene);
  const Vector3 p = walls.at(act.illumination_patch);
  const double bin_length = kSpeedOfLight * (act.bin_width_ps * 1e-12);
  const std::size_t nb = act.bin_count;

  std::atomic<std::size_t> truncated{0};
  for (std::size_t k = 0; k < config.cameras.size(); ++k) {
    const Vector3 o = config.cameras[k].position;
    const Vector3 omega_ol = unit_direction(p, o);
    parallel_for(walls.size(), [&](std::size_t ci) {
      const Vector3& c = walls[ci];
      const Vector3 omega_oc = unit_direction(c, o);
      std::size_t local_truncated = 0;
      for (std::size_t j = 0; j < voxels.size(); ++j) {
        const Vector3& s = voxels[j];
        const double dist_l = (s - p).norm();
        const double dist_c = (s - c).norm();
        const double path = dist_l + dist_c;
        const double bin_f = std::floor(path / bin_length);
        if (!(bin_f < static_cast<double>(nb))) {
          ++local_truncated;
          continue;
        }
        const std::size_t bin = static_cast<std::size_t>(bin_f);
        const Vector3 omega_il = unit_direction(p, s);
        const Vector3 omega_ic = unit_direction(c, s);
        const double value = brdf_eval(omega_il, omega_ol, config.surface) *
                             brdf_eval(omega_ic, omega_oc, config.surface) /
                             (dist_l * dist_l * dist_c * dist_c);
        const std::size_t row = (k * walls.size() + ci) * nb + bin;
        emit(k, row, j, value, omega_ic, omega_oc);
      }
      truncated += local_truncated;
    });
  }
  return truncated.load();
}

std::vector<RowMeta> active_row_meta(const SceneConfig& config) {
  const std::size_t nb = config.active->bin_count;
  const std::size_t nwall = config.wall.size();
  std::vector<RowMeta> meta;
  meta.reserve(config.cameras.size() * nwall * nb);
  for (std::size_t k = 0; k < config.cameras.size(); ++k) {
    for (std::size_t c = 0; c < nwall; ++c) {
      for (std::size_t b = 0; b < nb; ++b) meta.push_back(RowMeta{k, c, b});
    }
  }
  return meta;
}

}  // namespace

TransportMatrix build_active(const SceneConfig& config, bool use_polarizer,
                             ActiveDiagnostics* diagnostics) {
  if (!config.active) throw InvariantError("active parameters are required for the active model");
  if (use_polarizer) {
    for (std::size_t k = 0; k < config.cameras.size(); ++k) require_polarizer(config, k);
  }
  const std::size_t rows = config.cameras.size() * config.wall.size() * config.active->bin_count;
  TransportMatrix t;
  t.data = DenseMatrix::Zero(static_cast<Eigen::Index>(rows),
                             static_cast<Eigen::Index>(config.scene.size()));
  t.row_meta = active_row_meta(config);
  t.col_meta = scene_col_meta(config.scene);

  const std::size_t truncated = for_each_active_entry(
      config, [&](std::size_t k, std::size_t row, std::size_t j, double value,
                  const Vector3& omega_ic, const Vector3& omega_oc) {
        if (use_polarizer) {
          value *= entry_leakage(config, *config.cameras[k].polarizer, omega_ic, omega_oc, j);
        }
        t.data(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) = value;
      });
  if (diagnostics) diagnostics->truncated_paths = truncated;
  return t;
}

DenseMatrix active_leakage_matrix(const SceneConfig& config) {
  if (!config.active) throw InvariantError("active parameters are required for the active model");
  for (std::size_t k = 0; k < config.cameras.size(); ++k) require_polarizer(config, k);
  const std::size_t rows = config.cameras.size() * config.wall.size() * config.active->bin_count;
  DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(rows),
                                      static_cast<Eigen::Index>(config.scene.size()));
  for_each_active_entry(config, [&](std::size_t k, std::size_t row, std::size_t j, double,
                                    const Vector3& omega_ic, const Vector3& omega_oc) {
    out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) =
        entry_leakage(config, *config.cameras[k].polarizer, omega_ic, omega_oc, j);
  });
  return out;
}

DenseVector forward(const TransportMatrix& transport, const DenseVector& scene, double noise_sigma,
                    std::uint64_t seed) {
  if (static_cast<std::size_t>(scene.size()) != transport.cols()) {
    throw DimensionError("forward: scene vector has " + std::to_string(scene.size()) +
                         " entries but the transport matrix has " +
                         std::to_string(transport.cols()) + " columns");
  }
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) {
    throw InvariantError("noise_sigma must be >= 0");
  }
  DenseVector obs = transport.data * scene;
  if (noise_sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sigma);
    for (Eigen::Index i = 0; i < obs.size(); ++i) obs[i] += noise(rng);
  }
  return obs.cwiseMax(0.0);
}

}  // namespace polnlos
