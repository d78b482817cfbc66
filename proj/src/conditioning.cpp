#include "polnlos/conditioning.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace polnlos {

double condition_number(const DenseMatrix& matrix) {
  if (matrix.rows() == 0 || matrix.cols() == 0) {
    throw DimensionError("condition_number of an empty matrix");
  }
  if (!matrix.allFinite()) throw InvariantError("condition_number needs finite entries");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smax > 0.0) || smin < smax * kRankTolerance) {
    return std::numeric_limits<double>::infinity();
  }
  return std::max(1.0, smax / smin);
}

double condition_number(const TransportMatrix& transport) {
  return condition_number(transport.data);
}

std::string configuration_name(Configuration c) {
  switch (c) {
    case Configuration::Unpolarized: return "unpolarized";
    case Configuration::PolarizedSingle: return "polarized_single";
    case Configuration::PolarizedMulti: return "polarized_multi";
    case Configuration::Rotating: return "rotating";
    case Configuration::OccludedUnpolarized: return "occluded_unpolarized";
    case Configuration::OccludedPolarizedSingle: return "occluded_polarized_single";
    case Configuration::OccludedPolarizedMulti: return "occluded_polarized_multi";
  }
  throw InvariantError("unknown configuration");
}

Configuration parse_configuration(const std::string& name) {
  for (auto c : {Configuration::Unpolarized, Configuration::PolarizedSingle,
                 Configuration::PolarizedMulti, Configuration::Rotating,
                 Configuration::OccludedUnpolarized, Configuration::OccludedPolarizedSingle,
                 Configuration::OccludedPolarizedMulti}) {
    if (configuration_name(c) == name) return c;
  }
  throw ConfigError("unknown configuration '" + name + "'");
}

Configuration baseline_of(Configuration c) {
  switch (c) {
    case Configuration::OccludedUnpolarized:
    case Configuration::OccludedPolarizedSingle:
    case Configuration::OccludedPolarizedMulti:
      return Configuration::OccludedUnpolarized;
    default:
      return Configuration::Unpolarized;
  }
}

TransportMatrix build_configuration(const SceneConfig& config, Configuration c) {
  switch (c) {
    case Configuration::Unpolarized: return build_passive_camera(config, 0, false);
    case Configuration::PolarizedSingle: return build_passive_camera(config, 0, true);
    case Configuration::PolarizedMulti: return build_passive(config, true);
    case Configuration::Rotating: return build_rotating(config, 0, false);
    case Configuration::OccludedUnpolarized: return build_occluded_camera(config, 0, false);
    case Configuration::OccludedPolarizedSingle: return build_occluded_camera(config, 0, true);
    case Configuration::OccludedPolarizedMulti: return build_occluded(config, true);
  }
  throw InvariantError("unknown configuration");
}

double SweepResult::ratio(std::size_t row, std::size_t s) const {
  return kappa.at(row).at(s) / kappa.at(row).at(baseline.at(s));
}

std::size_t SweepResult::series_index(const std::string& name) const {
  for (std::size_t s = 0; s < series.size(); ++s) {
    if (series[s] == name) return s;
  }
  throw DimensionError("sweep has no series '" + name + "'");
}

void SweepResult::validate() const {
  if (baseline.size() != series.size()) throw DimensionError("sweep baseline/series mismatch");
  if (kappa.size() != points.size()) throw DimensionError("sweep rows mismatch");
  for (std::size_t r = 0; r < points.size(); ++r) {
    if (points[r].size() != parameters.size() || kappa[r].size() != series.size()) {
      throw DimensionError("sweep row " + std::to_string(r) + " has the wrong width");
    }
    for (double k : kappa[r]) {
      if (!(k >= 1.0)) throw InvariantError("condition numbers must be >= 1");
    }
  }
}

SceneConfig with_parameter(const SceneConfig& base, const std::string& name, double value) {
  SceneConfig out = base;
  if (name == "roughness") {
    out.surface = base.surface.with_roughness(value);
  } else if (name == "refractive_index") {
    out.surface = RoughSurface(base.surface.roughness(), FresnelMedium(value),
                               base.surface.wall_normal());
  } else if (name == "polarizer_rotation_deg") {
    for (auto& cam : out.cameras) {
      if (cam.polarizer) cam.polarizer = cam.polarizer->rotated(deg_to_rad(value));
    }
  } else if (name == "noise_sigma") {
    out.noise_sigma = value;
  } else {
    throw ConfigError("unknown sweep parameter '" + name +
                      "' (expected roughness, refractive_index, polarizer_rotation_deg, "
                      "noise_sigma)");
  }
  out.validate();
  return out;
}

std::vector<double> linspace(double from, double to, std::size_t steps) {
  if (steps < 1) throw InvariantError("steps must be >= 1");
  if (!std::isfinite(from) || !std::isfinite(to)) throw InvariantError("sweep bounds must be finite");
  std::vector<double> out(steps);
  if (steps == 1) {
    out[0] = from;
    return out;
  }
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(steps - 1);
    out[k] = k + 1 == steps ? to : from + t * (to - from);
  }
  return out;
}

SweepResult parameter_sweep(const SceneConfig& base, const std::string& parameter,
                            const std::vector<double>& values,
                            const std::vector<Configuration>& configurations) {
  if (configurations.empty()) throw InvariantError("sweep needs at least one configuration");
  SweepResult result;
  result.parameters = {parameter};

  // Series are the requested configurations plus any missing baselines.
  std::vector<Configuration> series = configurations;
  for (auto c : configurations) {
    const auto b = baseline_of(c);
    bool present = false;
    for (auto s : series) present = present || s == b;
    if (!present) series.push_back(b);
  }
  for (auto c : series) result.series.push_back(configuration_name(c));
  for (auto c : series) {
    const auto b = baseline_of(c);
    for (std::size_t s = 0; s < series.size(); ++s) {
      if (series[s] == b) result.baseline.push_back(s);
    }
  }

  result.points.resize(values.size());
  result.kappa.assign(values.size(), std::vector<double>(series.size()));
  for (std::size_t r = 0; r < values.size(); ++r) {
    result.points[r] = {values[r]};
    const SceneConfig config = with_parameter(base, parameter, values[r]);
    for (std::size_t s = 0; s < series.size(); ++s) {
      result.kappa[r][s] = condition_number(build_configuration(config, series[s]));
    }
  }
  return result;
}

SweepResult roughness_sweep(const SceneConfig& base, const std::vector<double>& gammas,
                            const std::vector<Configuration>& configurations) {
  for (double g : gammas) {
    if (!(g >= 0.0 && g <= 1.0)) throw InvariantError("roughness values must lie in [0, 1]");
  }
  return parameter_sweep(base, "roughness", gammas, configurations);
}

SceneGrid resample_voxels(const SceneGrid& grid, std::size_t resolution) {
  if (resolution < 1) throw InvariantError("voxel resolution must be >= 1");
  if (grid.emission) throw InvariantError("cannot resample a scene with per-point emission");
  SceneGrid out = grid;
  const double r = static_cast<double>(resolution);
  out.u_axis = grid.u_axis * (static_cast<double>(grid.nu) / r);
  out.v_axis = grid.v_axis * (static_cast<double>(grid.nv) / r);
  out.w_axis = grid.w_axis * (static_cast<double>(grid.nw) / r);
  out.nu = out.nv = out.nw = resolution;
  return out;
}

SweepResult active_sweep(const SceneConfig& base, const std::vector<double>& gammas,
                         const std::vector<std::size_t>& resolutions) {
  if (!base.active) throw InvariantError("active_sweep needs active parameters in the config");
  SweepResult result;
  result.parameters = {"roughness", "resolution"};
  result.series = {"unpolarized", "polarized"};
  result.baseline = {0, 0};
  for (double g : gammas) {
    if (!(g >= 0.0 && g <= 1.0)) throw InvariantError("roughness values must lie in [0, 1]");
    for (std::size_t res : resolutions) {
      SceneConfig config = with_parameter(base, "roughness", g);
      config.scene = resample_voxels(base.scene, res);
      result.points.push_back({g, static_cast<double>(res)});
      result.kappa.push_back({condition_number(build_active(config, false)),
                              condition_number(build_active(config, true))});
    }
  }
  return result;
}

}  // namespace polnlos
