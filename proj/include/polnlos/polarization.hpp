#pragma once

#include "polnlos/common.hpp"

namespace polnlos {

/// Dielectric wall material. Only the refractive index matters for Fresnel
/// reflection; eta must exceed 1.
class FresnelMedium {
 public:
  explicit FresnelMedium(double refractive_index);

  double refractive_index() const { return eta_; }

  friend bool operator==(const FresnelMedium&, const FresnelMedium&) = default;

 private:
  double eta_;
};

/// Linear polarizer in front of a camera.
///
/// `normal` faces the incoming light, i.e. it points from the camera toward
/// the wall so that -omega_o . normal > 0 for rays reaching the camera.
/// `axis_world` is the transmission axis embedded in 3D; it lies in the
/// polarizer plane. `axis_angle` is the same axis expressed as an in-plane
/// angle relative to the reference direction used to build it.
class PolarizerConfig {
 public:
  PolarizerConfig(double axis_angle, const Vector3& normal, const Vector3& axis_world);

  /// Builds the axis from an in-plane reference direction: the reference is
  /// projected onto the polarizer plane and rotated by `axis_angle` about the
  /// normal (right-handed).
  static PolarizerConfig from_reference(double axis_angle, const Vector3& normal,
                                        const Vector3& reference);

  double axis_angle() const { return axis_angle_; }
  const Vector3& normal() const { return normal_; }
  const Vector3& axis_world() const { return axis_world_; }

  /// Same polarizer rotated about its normal by `delta` radians.
  PolarizerConfig rotated(double delta) const;

  friend bool operator==(const PolarizerConfig&, const PolarizerConfig&) = default;

 private:
  double axis_angle_;
  Vector3 normal_;
  Vector3 axis_world_;
};

/// Intensities of the p and s components of a polarized scene point.
struct PolarizationComponents {
  double i_p = 1.0;
  double i_s = 1.0;

  void validate() const;
  friend bool operator==(const PolarizationComponents&, const PolarizationComponents&) = default;
};

/// How the effective angle weights the two Fresnel reflectances in the
/// leakage factor. `Literal` uses first powers (cos, sin); `Malus` uses
/// squares (cos^2, sin^2).
enum class LeakageWeights { Literal, Malus };

/// Apparent transmission-axis angle of a polarizer seen along an oblique ray.
///
/// `theta` is the polarizer axis seen from the top, `azimuth` and `zenith`
/// locate the incident ray. The result is the axis direction of the
/// foreshortened projection, (cos, sin) ~ (-sin(theta - a), cos z cos(theta - a)),
/// reported as a line angle in (-pi/2, pi/2]. It equals
/// atan(-cos z / tan(theta - a)) wherever the tangent is defined.
///
/// Throws InvariantError for zenith outside [0, pi/2) or non-finite input.
double effective_polarizer_angle(double theta, double azimuth, double zenith);

/// p-polarized Fresnel reflectance at `incidence` radians. Uses the
/// normal-incidence limit ((eta-1)/(eta+1))^2 near zero.
double fresnel_rp(double incidence, const FresnelMedium& medium);

/// s-polarized Fresnel reflectance; same conventions as fresnel_rp.
double fresnel_rs(double incidence, const FresnelMedium& medium);

/// Incidence angle where fresnel_rp vanishes.
double brewster_angle(const FresnelMedium& medium);

/// Intermediate quantities of the leakage model, exposed for diagnostics and
/// tests.
struct LeakageTerms {
  double half_angle = 0.0;         // theta_h
  double zenith = 0.0;             // z
  double axis_minus_azimuth = 0.0; // theta - a
  double effective_angle = 0.0;    // theta'
  double rp = 0.0;
  double rs = 0.0;
};

LeakageTerms leakage_terms(const Vector3& omega_i, const Vector3& omega_o,
                           const PolarizerConfig& polarizer, const FresnelMedium& medium);

/// Fraction of the wall reflection that passes the camera polarizer for an
/// unpolarized scene point. Clamped below at zero.
double leakage(const Vector3& omega_i, const Vector3& omega_o, const PolarizerConfig& polarizer,
               const FresnelMedium& medium, LeakageWeights weights = LeakageWeights::Literal);

/// Leakage for a scene point emitting known p/s intensities.
double leakage_polarized_scene(const Vector3& omega_i, const Vector3& omega_o,
                               const PolarizerConfig& polarizer, const FresnelMedium& medium,
                               const PolarizationComponents& components,
                               LeakageWeights weights = LeakageWeights::Literal);

}  // namespace polnlos
