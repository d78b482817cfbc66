#include "polnlos/brdf.hpp"

#include <algorithm>
#include <cmath>

namespace polnlos {

namespace {

double lobe_integrand(double alpha, double sigma) {
  return std::exp(-alpha * alpha / (2.0 * sigma * sigma)) * std::sin(alpha);
}

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(double a, double b, double sigma, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = lobe_integrand(lm, sigma);
  const double frm = lobe_integrand(rm, sigma);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(a, m, sigma, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(m, b, sigma, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double lobe_width_for(double roughness) { return roughness * kPi / 2.0 + kMinLobeWidth; }

double lobe_normalization(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvariantError("lobe width must be positive");
  }
  // The integrand is concentrated within a few sigma of zero; split there so
  // narrow lobes are resolved.
  const double upper = kPi / 2.0;
  const double knee = std::min(upper, 8.0 * sigma);
  // Small-sigma closed form for the scale of the answer, used to set an
  // absolute tolerance consistent with 1e-6 relative accuracy.
  const double scale = sigma * sigma;
  const double tol = 1e-9 * scale;
  double total = 0.0;
  auto integrate = [&](double a, double b) {
    const double fa = lobe_integrand(a, sigma);
    const double fb = lobe_integrand(b, sigma);
    const double fm = lobe_integrand(0.5 * (a + b), sigma);
    return adaptive_simpson(a, b, sigma, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 40);
  };
  total += integrate(0.0, knee);
  if (knee < upper) total += integrate(knee, upper);
  return 2.0 * kPi * total;
}

RoughSurface::RoughSurface(double roughness, FresnelMedium medium, const Vector3& wall_normal)
    : roughness_(roughness), medium_(medium), wall_normal_(wall_normal) {
  if (!std::isfinite(roughness) || roughness < 0.0 || roughness > 1.0) {
    throw InvariantError("roughness must lie in [0, 1]");
  }
  if (!wall_normal.allFinite() || std::abs(wall_normal.norm() - 1.0) > 1e-12) {
    throw InvariantError("wall normal must be unit-length");
  }
  lobe_width_ = lobe_width_for(roughness);
  lobe_norm_ = polnlos::lobe_normalization(lobe_width_);
}

RoughSurface RoughSurface::with_roughness(double roughness) const {
  return RoughSurface(roughness, medium_, wall_normal_);
}

double half_angle(const Vector3& omega_i, const Vector3& omega_o) {
  return 0.5 * std::acos(std::clamp(omega_o.dot(omega_i), -1.0, 1.0));
}

double brdf_eval(const Vector3& omega_i, const Vector3& omega_o, const RoughSurface& surface) {
  const Vector3& n = surface.wall_normal();
  const double cos_i = omega_i.dot(n);
  const double cos_o = omega_o.dot(n);
  if (cos_i <= 0.0 || cos_o <= 0.0) return 0.0;

  const double gamma = surface.roughness();
  const Vector3 mirror = 2.0 * cos_i * n - omega_i;
  const double alpha = std::acos(std::clamp(mirror.dot(omega_o), -1.0, 1.0));
  const double sigma = surface.lobe_width();
  const double lobe = std::exp(-alpha * alpha / (2.0 * sigma * sigma)) / surface.lobe_normalization();
  return (1.0 - gamma) * lobe + gamma / kPi;
}

}  // namespace polnlos
