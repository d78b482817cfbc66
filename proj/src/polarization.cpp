#include "polnlos/polarization.hpp"

#include "polnlos/brdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polnlos {

namespace {

constexpr double kUnitTolerance = 1e-12;
constexpr double kNormalIncidenceCutoff = 1e-12;

bool is_unit(const Vector3& v) { return std::abs(v.norm() - 1.0) <= kUnitTolerance; }

bool all_finite(const Vector3& v) { return v.allFinite(); }

double normal_incidence_reflectance(double eta) {
  const double r = (eta - 1.0) / (eta + 1.0);
  return r * r;
}

void check_incidence(double incidence) {
  if (!std::isfinite(incidence) || incidence < 0.0 || incidence >= kPi / 2.0) {
    throw InvariantError("incidence angle must lie in [0, pi/2)");
  }
}

// Reduces a line angle to (-pi/2, pi/2].
double reduce_line_angle(double angle) {
  if (angle > kPi / 2.0) angle -= kPi;
  if (angle <= -kPi / 2.0) angle += kPi;
  return angle;
}

// theta' from (theta - a) and cos(z). cos(d + pi/2) = -sin d and
// sin(d + pi/2) = cos d are expanded so d = pi/2 lands exactly on the axis.
// A cosine component within rounding of zero is taken as exactly zero, so the
// +-pi/2 boundary resolves to +pi/2 regardless of the rounding direction.
double effective_angle_from(double axis_minus_azimuth, double cos_zenith) {
  double c = -std::sin(axis_minus_azimuth);
  const double s = cos_zenith * std::cos(axis_minus_azimuth);
  if (std::abs(c) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(s)) c = 0.0;
  return reduce_line_angle(std::atan2(s, c));
}

double combine(double rp, double rs, double weight_p, double weight_s, double effective,
               LeakageWeights weights) {
  const double c = std::cos(effective);
  const double s = std::sin(effective);
  double value = 0.0;
  if (weights == LeakageWeights::Literal) {
    value = weight_p * rp * c + weight_s * rs * s;
  } else {
    value = weight_p * rp * c * c + weight_s * rs * s * s;
  }
  return std::max(value, 0.0);
}

}  // namespace

FresnelMedium::FresnelMedium(double refractive_index) : eta_(refractive_index) {
  if (!std::isfinite(refractive_index) || refractive_index <= 1.0) {
    throw InvariantError("refractive_index violates η > 1");
  }
}

PolarizerConfig::PolarizerConfig(double axis_angle, const Vector3& normal,
                                 const Vector3& axis_world)
    : axis_angle_(axis_angle), normal_(normal), axis_world_(axis_world) {
  if (!std::isfinite(axis_angle) || !all_finite(normal) || !all_finite(axis_world)) {
    throw InvariantError("polarizer fields must be finite");
  }
  if (!is_unit(normal)) throw InvariantError("polarizer normal must be unit-length");
  if (!is_unit(axis_world)) throw InvariantError("polarizer axis must be unit-length");
  if (std::abs(axis_world.dot(normal)) > kUnitTolerance) {
    throw InvariantError("polarizer axis must be perpendicular to its normal");
  }
}

PolarizerConfig PolarizerConfig::from_reference(double axis_angle, const Vector3& normal,
                                                const Vector3& reference) {
  const double len = normal.norm();
  if (!(len > 0.0)) throw GeometryError("polarizer normal has zero length");
  const Vector3 n = normal / len;
  Vector3 e1 = reference - reference.dot(n) * n;
  if (e1.norm() < 1e-9) {
    throw GeometryError("polarizer reference direction is parallel to its normal");
  }
  e1.normalize();
  const Vector3 e2 = n.cross(e1);
  Vector3 q = std::cos(axis_angle) * e1 + std::sin(axis_angle) * e2;
  // Re-orthogonalize against rounding so the invariants hold to 1e-12.
  q -= q.dot(n) * n;
  q.normalize();
  return PolarizerConfig(axis_angle, n, q);
}

PolarizerConfig PolarizerConfig::rotated(double delta) const {
  const Vector3 e2 = normal_.cross(axis_world_);
  Vector3 q = std::cos(delta) * axis_world_ + std::sin(delta) * e2;
  q -= q.dot(normal_) * normal_;
  q.normalize();
  return PolarizerConfig(axis_angle_ + delta, normal_, q);
}

void PolarizationComponents::validate() const {
  if (!std::isfinite(i_p) || !std::isfinite(i_s) || i_p < 0.0 || i_s < 0.0) {
    throw InvariantError("polarization components must be finite and >= 0");
  }
}

double effective_polarizer_angle(double theta, double azimuth, double zenith) {
  if (!std::isfinite(theta) || !std::isfinite(azimuth) || !std::isfinite(zenith)) {
    throw InvariantError("effective_polarizer_angle: angles must be finite");
  }
  if (zenith < 0.0 || zenith >= kPi / 2.0) {
    throw InvariantError("effective_polarizer_angle: zenith must lie in [0, pi/2)");
  }
  return effective_angle_from(theta - azimuth, std::cos(zenith));
}

double fresnel_rp(double incidence, const FresnelMedium& medium) {
  check_incidence(incidence);
  const double eta = medium.refractive_index();
  if (incidence < kNormalIncidenceCutoff) return normal_incidence_reflectance(eta);
  const double refracted = std::asin(std::sin(incidence) / eta);
  const double num = std::tan(incidence - refracted);
  const double den = std::tan(incidence + refracted);
  return (num * num) / (den * den);
}

double fresnel_rs(double incidence, const FresnelMedium& medium) {
  check_incidence(incidence);
  const double eta = medium.refractive_index();
  if (incidence < kNormalIncidenceCutoff) return normal_incidence_reflectance(eta);
  const double refracted = std::asin(std::sin(incidence) / eta);
  const double num = std::sin(incidence - refracted);
  const double den = std::sin(incidence + refracted);
  return (num * num) / (den * den);
}

double brewster_angle(const FresnelMedium& medium) {
  return std::atan(medium.refractive_index());
}

LeakageTerms leakage_terms(const Vector3& omega_i, const Vector3& omega_o,
                           const PolarizerConfig& polarizer, const FresnelMedium& medium) {
  LeakageTerms t;
  t.half_angle = half_angle(omega_i, omega_o);

  const Vector3& n = polarizer.normal();
  const double cos_z = -omega_o.dot(n);
  if (!(cos_z > 0.0)) {
    throw GeometryError("ray does not enter the polarizer from its front side (zenith >= pi/2)");
  }
  t.zenith = std::acos(std::min(cos_z, 1.0));

  const Vector3 w_raw = omega_o + cos_z * n;
  const double w_len = w_raw.norm();
  if (w_len < 1e-15) {
    throw GeometryError("azimuth undefined: ray is parallel to the polarizer normal");
  }
  const Vector3 w = w_raw / w_len;
  // acos(-w . q), evaluated with atan2 so angles near 0 and pi stay accurate.
  const Vector3& q = polarizer.axis_world();
  t.axis_minus_azimuth = std::atan2(w.cross(q).norm(), -w.dot(q));
  t.effective_angle = effective_angle_from(t.axis_minus_azimuth, cos_z);

  if (t.half_angle >= kPi / 2.0) {
    t.rp = 1.0;
    t.rs = 1.0;
  } else {
    t.rp = fresnel_rp(t.half_angle, medium);
    t.rs = fresnel_rs(t.half_angle, medium);
  }
  return t;
}

double leakage(const Vector3& omega_i, const Vector3& omega_o, const PolarizerConfig& polarizer,
               const FresnelMedium& medium, LeakageWeights weights) {
  const LeakageTerms t = leakage_terms(omega_i, omega_o, polarizer, medium);
  return combine(t.rp, t.rs, 1.0, 1.0, t.effective_angle, weights);
}

double leakage_polarized_scene(const Vector3& omega_i, const Vector3& omega_o,
                               const PolarizerConfig& polarizer, const FresnelMedium& medium,
                               const PolarizationComponents& components,
                               LeakageWeights weights) {
  components.validate();
  const LeakageTerms t = leakage_terms(omega_i, omega_o, polarizer, medium);
  return combine(t.rp, t.rs, components.i_p, components.i_s, t.effective_angle, weights);
}

}  // namespace polnlos
