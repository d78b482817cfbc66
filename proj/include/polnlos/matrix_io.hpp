#pragma once

#include "polnlos/transport.hpp"

#include <cstdint>
#include <string>

namespace polnlos {

/// Binary matrix layout:
///   "PNLT" | u32 version | u64 rows | u64 cols | rows*cols f64, row-major |
///   optional u64 length + UTF-8 JSON with "rows" and "cols" metadata.
/// All integers and floats little-endian.
inline constexpr char kMatrixMagic[4] = {'P', 'N', 'L', 'T'};
inline constexpr std::uint32_t kMatrixVersion = 1;

std::string encode_matrix(const TransportMatrix& matrix);
/// Throws FormatError on wrong magic, unknown version, truncation, oversized
/// dimensions or malformed metadata.
TransportMatrix decode_matrix(const std::string& bytes);

void write_matrix(const TransportMatrix& matrix, const std::string& path);
TransportMatrix read_matrix(const std::string& path);

/// A plain vector stored as an n x 1 matrix.
TransportMatrix column_matrix(const DenseVector& v);

}  // namespace polnlos
