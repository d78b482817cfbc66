#include "polnlos/image_io.hpp"

#include "polnlos/fileio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>

namespace polnlos {

namespace {

constexpr double kMaxSample = 65535.0;

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(const std::string& bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const unsigned char c = static_cast<unsigned char>(bytes[pos]);
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(c)) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  if (start == pos) throw FormatError("malformed PGM header: unexpected end of file");
  return bytes.substr(start, pos - start);
}

std::size_t header_number(const std::string& bytes, std::size_t& pos, const char* what) {
  const std::string tok = header_token(bytes, pos);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(),
                                  [](unsigned char c) { return std::isdigit(c); }) ||
      tok.size() > 9) {
    throw FormatError(std::string("malformed PGM header: bad ") + what + " '" + tok + "'");
  }
  return static_cast<std::size_t>(std::stoul(tok));
}

}  // namespace

std::string encode_pgm(const ImageBuffer& image) {
  image.validate();
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                    "\n65535\n";
  out.reserve(out.size() + 2 * image.size());
  for (double v : image.pixels) {
    const auto s = static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * kMaxSample));
    out.push_back(static_cast<char>(s >> 8));
    out.push_back(static_cast<char>(s & 0xff));
  }
  return out;
}

ImageBuffer decode_pgm(const std::string& bytes) {
  std::size_t pos = 0;
  if (header_token(bytes, pos) != "P5") throw FormatError("malformed PGM header: expected P5");
  const std::size_t width = header_number(bytes, pos, "width");
  const std::size_t height = header_number(bytes, pos, "height");
  const std::size_t maxval = header_number(bytes, pos, "maxval");
  if (maxval != 65535) {
    throw FormatError("unsupported PGM maxval " + std::to_string(maxval) + " (expected 65535)");
  }
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw FormatError("malformed PGM header: missing separator before pixel data");
  }
  ++pos;
  if (bytes.size() - pos < 2 * width * height) {
    throw FormatError("truncated PGM: expected " + std::to_string(width * height) + " samples");
  }
  ImageBuffer img(width, height);
  for (std::size_t k = 0; k < img.size(); ++k) {
    const auto hi = static_cast<unsigned char>(bytes[pos + 2 * k]);
    const auto lo = static_cast<unsigned char>(bytes[pos + 2 * k + 1]);
    img.pixels[k] = static_cast<double>((hi << 8) | lo) / kMaxSample;
  }
  return img;
}

void write_pgm(const ImageBuffer& image, const std::string& path) {
  write_file_atomic(path, encode_pgm(image));
}

ImageBuffer read_pgm(const std::string& path) { return decode_pgm(read_file(path)); }

}  // namespace polnlos
