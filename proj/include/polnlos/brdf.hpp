#pragma once

#include "polnlos/common.hpp"
#include "polnlos/polarization.hpp"

namespace polnlos {

/// Angular width floor of the specular lobe; keeps gamma = 0 finite.
inline constexpr double kMinLobeWidth = 1e-3;

/// Wall reflectance model with one roughness knob.
///
/// gamma = 0 is a narrow Gaussian lobe around the mirror direction, gamma = 1
/// is Lambertian. In between the two are blended linearly and the lobe widens
/// with gamma:
///
///   Omega = (1 - gamma) * G(alpha; sigma(gamma)) + gamma / pi
///   sigma(gamma) = gamma * pi / 2 + kMinLobeWidth
///
/// where alpha is the angle between the mirrored incident direction and the
/// outgoing direction. G is normalized to unit integral over the lobe-centred
/// hemisphere; the normalization is computed once at construction.
class RoughSurface {
 public:
  RoughSurface(double roughness, FresnelMedium medium, const Vector3& wall_normal);

  double roughness() const { return roughness_; }
  const FresnelMedium& medium() const { return medium_; }
  const Vector3& wall_normal() const { return wall_normal_; }
  double lobe_width() const { return lobe_width_; }
  double lobe_normalization() const { return lobe_norm_; }

  /// Same wall with a different roughness.
  RoughSurface with_roughness(double roughness) const;

  friend bool operator==(const RoughSurface& a, const RoughSurface& b) {
    return a.roughness_ == b.roughness_ && a.medium_ == b.medium_ &&
           a.wall_normal_ == b.wall_normal_;
  }

 private:
  double roughness_;
  FresnelMedium medium_;
  Vector3 wall_normal_;
  double lobe_width_;
  double lobe_norm_;
};

/// sigma(gamma) for the specular lobe.
double lobe_width_for(double roughness);

/// Integral of exp(-alpha^2 / (2 sigma^2)) over the hemisphere centred on the
/// lobe axis, 2 pi * int_0^{pi/2} exp(-a^2/(2 s^2)) sin(a) da. Adaptive
/// Simpson to 1e-6 relative.
double lobe_normalization(double sigma);

/// Half of the angle between the two directions, in [0, pi/2].
double half_angle(const Vector3& omega_i, const Vector3& omega_o);

/// Omega(omega_i, omega_o). Both directions point away from the wall patch.
/// Returns 0 if either lies on or below the surface.
double brdf_eval(const Vector3& omega_i, const Vector3& omega_o, const RoughSurface& surface);

}  // namespace polnlos
