#include "polnlos/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace polnlos {

void ImageBuffer::validate() const {
  if (width * height != pixels.size()) {
    throw DimensionError("image is " + std::to_string(width) + "x" + std::to_string(height) +
                         " but holds " + std::to_string(pixels.size()) + " pixels");
  }
  for (double p : pixels) {
    if (!std::isfinite(p)) throw InvariantError("image pixels must be finite");
  }
}

ImageBuffer ImageBuffer::from_vector(const DenseVector& v, std::size_t width, std::size_t height) {
  if (static_cast<std::size_t>(v.size()) != width * height) {
    throw DimensionError("vector of length " + std::to_string(v.size()) + " is not a " +
                         std::to_string(width) + "x" + std::to_string(height) + " image");
  }
  ImageBuffer img(width, height);
  for (std::size_t k = 0; k < img.size(); ++k) img.pixels[k] = v[static_cast<Eigen::Index>(k)];
  return img;
}

DenseVector ImageBuffer::to_vector() const {
  DenseVector v(static_cast<Eigen::Index>(pixels.size()));
  for (std::size_t k = 0; k < pixels.size(); ++k) v[static_cast<Eigen::Index>(k)] = pixels[k];
  return v;
}

ImageBuffer test_pattern(std::size_t width, std::size_t height) {
  ImageBuffer img(width, height);
  const auto w = static_cast<double>(width);
  const auto h = static_cast<double>(height);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double fx = (static_cast<double>(x) + 0.5) / w;
      const double fy = (static_cast<double>(y) + 0.5) / h;
      double v = 0.0;
      if (fy >= 0.1875 && fy < 0.4375 && fx >= 0.1875 && fx < 0.8125) v = 1.0;
      if (fy >= 0.5625 && fy < 0.875 && fx >= 0.3125 && fx < 0.5) v = 0.7;
      if (fy >= 0.5 && fy < 0.875 && fx >= 0.625 && fx < 0.875) {
        v = 0.2 + 0.7 * std::clamp((fx - 0.625) / 0.1875, 0.0, 1.0);
      }
      img.at(x, y) = v;
    }
  }
  return img;
}

}  // namespace polnlos
