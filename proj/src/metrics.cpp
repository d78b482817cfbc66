#include "polnlos/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace polnlos {

namespace {

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b) {
  a.validate();
  b.validate();
  if (a.width != b.width || a.height != b.height) {
    throw DimensionError("image sizes differ: " + std::to_string(a.width) + "x" +
                         std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                         std::to_string(b.height));
  }
  if (a.size() == 0) throw DimensionError("images are empty");
}

}  // namespace

double psnr(const ImageBuffer& reference, const ImageBuffer& test) {
  require_same_shape(reference, test);
  double sse = 0.0;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    const double d = test.pixels[k] - reference.pixels[k];
    sse += d * d;
  }
  if (sse == 0.0) return kPsnrIdentical;
  const double mse = sse / static_cast<double>(reference.size());
  return 10.0 * std::log10(1.0 / mse);
}

double zncc(const ImageBuffer& reference, const ImageBuffer& test) {
  require_same_shape(reference, test);
  const double n = static_cast<double>(reference.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    ma += reference.pixels[k];
    mb += test.pixels[k];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    const double da = reference.pixels[k] - ma;
    const double db = test.pixels[k] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 && sbb == 0.0) {
    throw InvariantError("zncc is undefined for two constant images");
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double ssim(const ImageBuffer& reference, const ImageBuffer& test) {
  require_same_shape(reference, test);
  const std::size_t win = kSsimWindow;
  if (reference.width < win || reference.height < win) {
    throw DimensionError("ssim needs images of at least " + std::to_string(win) + "x" +
                         std::to_string(win) + " pixels");
  }
  std::vector<double> kernel(win);
  double ksum = 0.0;
  const double half = static_cast<double>(win - 1) / 2.0;
  for (std::size_t k = 0; k < win; ++k) {
    const double d = static_cast<double>(k) - half;
    kernel[k] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
    ksum += kernel[k];
  }
  for (double& k : kernel) k /= ksum;

  const double c1 = 0.01 * 0.01;
  const double c2 = 0.03 * 0.03;
  const std::size_t ow = reference.width - win + 1;
  const std::size_t oh = reference.height - win + 1;
  double total = 0.0;
  for (std::size_t y0 = 0; y0 < oh; ++y0) {
    for (std::size_t x0 = 0; x0 < ow; ++x0) {
      double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
      for (std::size_t j = 0; j < win; ++j) {
        for (std::size_t i = 0; i < win; ++i) {
          const double w = kernel[i] * kernel[j];
          const double x = reference.at(x0 + i, y0 + j);
          const double y = test.at(x0 + i, y0 + j);
          mx += w * x;
          my += w * y;
          sxx += w * (x * x);
          syy += w * (y * y);
          sxy += w * (x * y);
        }
      }
      const double vx = sxx - mx * mx;
      const double vy = syy - my * my;
      const double cxy = sxy - mx * my;
      total += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
               ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
  }
  return total / static_cast<double>(ow * oh);
}

}  // namespace polnlos
