#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <numbers>
#include <stdexcept>
#include <string>

namespace polnlos {

using Vector3 = Eigen::Vector3d;
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using DenseVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s, exact SI value

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Error hierarchy. Every failure surfaced by the library derives from Error so
// the CLI can map it to a diagnostic and a nonzero exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coincident points, grazing rays, or a direction that collapses a projection.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A value violates a documented domain invariant (e.g. refractive index <= 1).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Configuration document does not follow the schema.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace polnlos
