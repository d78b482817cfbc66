#pragma once

#include "polnlos/image.hpp"

#include <limits>

namespace polnlos {

/// Returned by psnr for identical images.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// 10 log10(1 / MSE); peak value 1.
double psnr(const ImageBuffer& reference, const ImageBuffer& test);

/// Pearson correlation of the pixel values. Throws InvariantError when both
/// images are constant; returns 0 when exactly one is.
double zncc(const ImageBuffer& reference, const ImageBuffer& test);

/// Mean SSIM over all valid 11x11 Gaussian windows (sigma 1.5, K1 0.01,
/// K2 0.03, dynamic range 1). Both sides must be at least 11 pixels.
double ssim(const ImageBuffer& reference, const ImageBuffer& test);

inline constexpr std::size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

}  // namespace polnlos
