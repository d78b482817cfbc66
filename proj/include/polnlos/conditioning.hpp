#pragma once

#include "polnlos/common.hpp"
#include "polnlos/geometry.hpp"
#include "polnlos/transport.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace polnlos {

/// Singular values below this fraction of the largest mark a matrix as
/// rank deficient.
inline constexpr double kRankTolerance = 1e-14;

/// sigma_max / sigma_min from a full SVD, or +infinity when the matrix is
/// numerically rank deficient. Throws DimensionError for an empty matrix.
double condition_number(const DenseMatrix& matrix);
double condition_number(const TransportMatrix& transport);

/// Transport variants compared in the sweeps.
enum class Configuration {
  Unpolarized,        // camera 0, no polarizer
  PolarizedSingle,    // camera 0 with its polarizer
  PolarizedMulti,     // every camera with its polarizer, stacked
  Rotating,           // camera 0, polarizer rotated through rotation_angles
  OccludedUnpolarized,
  OccludedPolarizedSingle,
  OccludedPolarizedMulti,
};

std::string configuration_name(Configuration c);
Configuration parse_configuration(const std::string& name);

/// Configuration whose condition number is the denominator of c's ratio.
Configuration baseline_of(Configuration c);

/// Builds the transport matrix a configuration describes.
TransportMatrix build_configuration(const SceneConfig& config, Configuration c);

/// One row per parameter point; one condition number per series.
struct SweepResult {
  std::vector<std::string> parameters;      // column names of the sweep axes
  std::vector<std::vector<double>> points;  // points[row][axis]
  std::vector<std::string> series;          // condition-number column names
  std::vector<std::size_t> baseline;        // series index of each ratio denominator
  std::vector<std::vector<double>> kappa;   // kappa[row][series]

  std::size_t size() const { return points.size(); }
  /// kappa[row][s] / kappa[row][baseline[s]].
  double ratio(std::size_t row, std::size_t s) const;
  std::size_t series_index(const std::string& name) const;
  void validate() const;
};

/// Applies a named scalar parameter to a config. Known names: roughness,
/// refractive_index, polarizer_rotation_deg (rotates every polarizer about
/// its normal), noise_sigma.
SceneConfig with_parameter(const SceneConfig& base, const std::string& name, double value);

/// Evenly spaced values, `steps` >= 1 points from `from` to `to` inclusive.
std::vector<double> linspace(double from, double to, std::size_t steps);

/// Condition numbers of each configuration at each parameter value.
SweepResult parameter_sweep(const SceneConfig& base, const std::string& parameter,
                            const std::vector<double>& values,
                            const std::vector<Configuration>& configurations);

SweepResult roughness_sweep(const SceneConfig& base, const std::vector<double>& gammas,
                            const std::vector<Configuration>& configurations);

/// Scene grid with nu = nv = nw = resolution covering the same extent.
SceneGrid resample_voxels(const SceneGrid& grid, std::size_t resolution);

/// Active polarized vs unpolarized condition numbers over gamma x resolution.
/// Series: "unpolarized", "polarized".
SweepResult active_sweep(const SceneConfig& base, const std::vector<double>& gammas,
                         const std::vector<std::size_t>& resolutions);

}  // namespace polnlos
