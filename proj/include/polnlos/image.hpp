#pragma once

#include "polnlos/common.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace polnlos {

/// Row-major grayscale image.
struct ImageBuffer {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;

  ImageBuffer() = default;
  ImageBuffer(std::size_t w, std::size_t h, double fill = 0.0)
      : width(w), height(h), pixels(w * h, fill) {}

  std::size_t size() const { return pixels.size(); }
  double& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
  double at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }

  /// Shape agrees with the pixel count and every value is finite.
  void validate() const;

  static ImageBuffer from_vector(const DenseVector& v, std::size_t width, std::size_t height);
  DenseVector to_vector() const;

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;
};

/// Synthetic reference scene: two flat blocks and a horizontal ramp on a
/// zero background. Values lie in [0, 1].
ImageBuffer test_pattern(std::size_t width, std::size_t height);

}  // namespace polnlos
