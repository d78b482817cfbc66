#pragma once

#include "polnlos/image.hpp"

#include <string>

namespace polnlos {

/// Binary PGM (P5), maxval 65535, big-endian samples. Values are clamped to
/// [0, 1] and quantized as round(v * 65535).
std::string encode_pgm(const ImageBuffer& image);
/// Accepts maxval 65535 only. Samples map back to sample / 65535.
ImageBuffer decode_pgm(const std::string& bytes);

void write_pgm(const ImageBuffer& image, const std::string& path);
ImageBuffer read_pgm(const std::string& path);

}  // namespace polnlos
