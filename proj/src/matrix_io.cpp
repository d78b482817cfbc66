#include "polnlos/matrix_io.hpp"

#include "polnlos/fileio.hpp"

#include <json.hpp>

#include <bit>
#include <limits>

namespace polnlos {

namespace {

template <typename T>
void put(std::string& out, T value) {
  for (std::size_t k = 0; k < sizeof(T); ++k) {
    out.push_back(static_cast<char>((value >> (8 * k)) & 0xff));
  }
}

void put_double(std::string& out, double v) { put(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* what) {
    if (remaining() < sizeof(T)) {
      throw FormatError(std::string("truncated matrix file: missing ") + what);
    }
    T value = 0;
    for (std::size_t k = 0; k < sizeof(T); ++k) {
      value |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + k])) << (8 * k);
    }
    pos_ += sizeof(T);
    return value;
  }

  std::string take(std::size_t n, const char* what) {
    if (remaining() < n) throw FormatError(std::string("truncated matrix file: missing ") + what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_matrix(const TransportMatrix& matrix) {
  std::string out;
  out.reserve(28 + 8 * static_cast<std::size_t>(matrix.data.size()));
  out.append(kMatrixMagic, 4);
  put(out, kMatrixVersion);
  put(out, static_cast<std::uint64_t>(matrix.rows()));
  put(out, static_cast<std::uint64_t>(matrix.cols()));
  for (Eigen::Index r = 0; r < matrix.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.data.cols(); ++c) put_double(out, matrix.data(r, c));
  }
  nlohmann::json meta;
  meta["rows"] = nlohmann::json::array();
  for (const auto& m : matrix.row_meta) meta["rows"].push_back({m.camera, m.patch, m.bin});
  meta["cols"] = nlohmann::json::array();
  for (const auto& m : matrix.col_meta) meta["cols"].push_back({m.index, m.iu, m.iv, m.iw});
  const std::string text = meta.dump();
  put(out, static_cast<std::uint64_t>(text.size()));
  out += text;
  return out;
}

TransportMatrix decode_matrix(const std::string& bytes) {
  Reader in(bytes);
  const std::string magic = in.take(4, "magic");
  if (magic != std::string(kMatrixMagic, 4)) {
    throw FormatError("bad magic: expected \"PNLT\"");
  }
  const auto version = in.get<std::uint32_t>("version");
  if (version != kMatrixVersion) {
    throw FormatError("unsupported matrix format version " + std::to_string(version));
  }
  const auto rows = in.get<std::uint64_t>("row count");
  const auto cols = in.get<std::uint64_t>("column count");
  const auto max_index = static_cast<std::uint64_t>(std::numeric_limits<Eigen::Index>::max());
  if (rows > max_index || cols > max_index || (cols != 0 && rows > max_index / cols / 8)) {
    throw FormatError("matrix dimensions " + std::to_string(rows) + "x" + std::to_string(cols) +
                      " overflow");
  }
  if (rows * cols * 8 > in.remaining()) {
    throw FormatError("truncated matrix file: expected " + std::to_string(rows * cols) +
                      " values");
  }

  TransportMatrix m;
  m.data.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.data.cols(); ++c) {
      m.data(r, c) = std::bit_cast<double>(in.get<std::uint64_t>("values"));
    }
  }

  if (in.remaining() == 0) {
    for (std::size_t r = 0; r < rows; ++r) m.row_meta.push_back(RowMeta{0, r, 0});
    for (std::size_t c = 0; c < cols; ++c) m.col_meta.push_back(ColMeta{c, c, 0, 0});
    return m;
  }
  const auto length = in.get<std::uint64_t>("metadata length");
  if (length > in.remaining()) throw FormatError("truncated matrix file: metadata cut short");
  const std::string text = in.take(static_cast<std::size_t>(length), "metadata");
  if (in.remaining() != 0) throw FormatError("trailing bytes after matrix metadata");
  try {
    const auto meta = nlohmann::json::parse(text);
    for (const auto& r : meta.at("rows")) {
      m.row_meta.push_back(RowMeta{r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>(),
                                   r.at(2).get<std::size_t>()});
    }
    for (const auto& c : meta.at("cols")) {
      m.col_meta.push_back(ColMeta{c.at(0).get<std::size_t>(), c.at(1).get<std::size_t>(),
                                   c.at(2).get<std::size_t>(), c.at(3).get<std::size_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed matrix metadata: ") + e.what());
  }
  if (m.row_meta.size() != rows || m.col_meta.size() != cols) {
    throw FormatError("matrix metadata does not match the matrix shape");
  }
  return m;
}

void write_matrix(const TransportMatrix& matrix, const std::string& path) {
  write_file_atomic(path, encode_matrix(matrix));
}

TransportMatrix read_matrix(const std::string& path) { return decode_matrix(read_file(path)); }

TransportMatrix column_matrix(const DenseVector& v) {
  TransportMatrix m;
  m.data = v;
  for (Eigen::Index r = 0; r < v.size(); ++r) {
    m.row_meta.push_back(RowMeta{0, static_cast<std::size_t>(r), 0});
  }
  m.col_meta.push_back(ColMeta{0, 0, 0, 0});
  return m;
}

}  // namespace polnlos
