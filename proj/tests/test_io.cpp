#include "random_config.hpp"
#include "polnlos/config_io.hpp"
#include "polnlos/csv.hpp"
#include "polnlos/fileio.hpp"
#include "polnlos/image_io.hpp"
#include "polnlos/matrix_io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <random>

using namespace polnlos;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({
  "wall": {"origin": [-0.1, -0.1, 0], "u_axis": [0.025, 0, 0], "v_axis": [0, 0.025, 0], "nu": 8, "nv": 8},
  "scene": {"origin": [0.0, 0.0, 0.2], "u_axis": [0.02, 0, 0], "v_axis": [0, 0.02, 0], "nu": 3, "nv": 3},
  "cameras": [{"position": [-0.15, 0, 0.1], "polarizer": {"axis_deg": 30, "aim": [0, 0, 0]}}],
  "surface": {"roughness": 0.5, "refractive_index": 1.5}
})";

std::string temp_path(const std::string& name) {
  return (fs::temp_directory_path() / ("polnlos_test_" + name)).string();
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

TransportMatrix random_transport(std::uint64_t seed) {
  const SceneConfig c = testutil::random_config(seed);
  return build_passive(c, true);
}

}  // namespace

TEST_CASE("minimal config parses and round trips") {
  const SceneConfig c = parse_config(kMinimal);
  CHECK(c.wall.nu == 8);
  CHECK(c.scene.size() == 9);
  REQUIRE(c.cameras.size() == 1);
  REQUIRE(c.cameras[0].polarizer);
  CHECK(c.cameras[0].polarizer->axis_angle() == doctest::Approx(kPi / 6.0).epsilon(1e-15));
  CHECK(c.cameras[0].polarizer->normal().isApprox(Vector3(0.15, 0, -0.1).normalized(), 1e-15));
  CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("shipped and random configs round trip") {
  for (const char* name : {"default_table1.json", "default_occluder.json", "default_active.json"}) {
    const SceneConfig c = load_config(std::string(POLNLOS_CONFIG_DIR) + "/" + name);
    CHECK(parse_config(serialize_config(c)) == c);
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SceneConfig c = testutil::random_config(seed, seed % 2 == 0);
    if (seed % 3 == 0) c.cameras[0].polarizer.reset();
    CHECK(parse_config(serialize_config(c)) == c);
  }
}

TEST_CASE("config errors name the field") {
  const std::string text = kMinimal;
  nlohmann::json doc = nlohmann::json::parse(text);
  doc.erase("wall");
  const std::string missing = error_of(doc.dump());
  CHECK(missing.find("wall") != std::string::npos);
  CHECK(missing.find("missing") != std::string::npos);
  CHECK(error_of(replace(text, "\"wall\"", "\"wal\"")).find("wal") != std::string::npos);
  const std::string eta = error_of(replace(text, "1.5}", "0.9}"));
  CHECK(eta.find("η > 1") != std::string::npos);
  CHECK_THROWS_AS(parse_config(replace(text, "1.5}", "0.9}")), InvariantError);
  CHECK(error_of(replace(text, "\"nu\": 8", "\"nu\": -8")).find("wall.nu") != std::string::npos);
  CHECK(error_of(replace(text, "[-0.15, 0, 0.1]", "[-0.15, 0]")).find("cameras[0].position") !=
        std::string::npos);
  CHECK(error_of(replace(text, "\"axis_deg\"", "\"axis_degrees\"")).find("axis_degrees") !=
        std::string::npos);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(text, "\"nu\": 8", "\"nu\": 0")), InvariantError);
  CHECK_THROWS_AS(load_config(temp_path("does_not_exist.json")), Error);
}

TEST_CASE("angles in degrees and radians agree") {
  const SceneConfig deg = parse_config(kMinimal);
  const SceneConfig rad =
      parse_config(replace(kMinimal, "\"axis_deg\": 30", "\"axis_rad\": 0.52359877559829882"));
  CHECK(deg.cameras[0].polarizer->axis_world().isApprox(rad.cameras[0].polarizer->axis_world(), 1e-15));
}

TEST_CASE("matrix round trip is bit exact") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TransportMatrix t = random_transport(seed);
    t.data(0, 0) = 1e-310;  // subnormal survives
    const std::string path = temp_path("matrix_" + std::to_string(seed) + ".bin");
    write_matrix(t, path);
    const TransportMatrix back = read_matrix(path);
    CHECK(back == t);
    CHECK(std::memcmp(back.data.data(), t.data.data(), sizeof(double) * t.data.size()) == 0);
    fs::remove(path);
  }
}

TEST_CASE("matrix layout") {
  TransportMatrix t;
  t.data.resize(1, 2);
  t.data << 1.0, -2.5;
  t.row_meta = {RowMeta{0, 3, 1}};
  t.col_meta = {ColMeta{0, 0, 0, 0}, ColMeta{1, 1, 0, 0}};
  const std::string bytes = encode_matrix(t);
  REQUIRE(bytes.size() > 4 + 4 + 8 + 8 + 16 + 8);
  CHECK(bytes.substr(0, 4) == "PNLT");
  CHECK(bytes.substr(4, 4) == std::string("\x01\x00\x00\x00", 4));
  CHECK(bytes.substr(8, 8) == std::string("\x01\0\0\0\0\0\0\0", 8));
  CHECK(bytes.substr(16, 8) == std::string("\x02\0\0\0\0\0\0\0", 8));
  // 1.0 = 0x3FF0000000000000 little-endian.
  CHECK(bytes.substr(24, 8) == std::string("\0\0\0\0\0\0\xF0\x3F", 8));
  CHECK(decode_matrix(bytes) == t);

  // Without metadata, readers fall back to positional metadata.
  const std::string bare = bytes.substr(0, 40);
  const TransportMatrix plain = decode_matrix(bare);
  CHECK(plain.data == t.data);
  CHECK(plain.rows() == 1);
  CHECK(plain.row_meta.size() == 1);
  CHECK(plain.col_meta.size() == 2);
}

TEST_CASE("matrix decoding errors") {
  const std::string bytes = encode_matrix(random_transport(1));
  for (std::size_t cut : {std::size_t(0), std::size_t(3), std::size_t(10), std::size_t(30), bytes.size() - 1}) {
    CHECK_THROWS_AS(decode_matrix(bytes.substr(0, cut)), FormatError);
  }
  std::string magic = bytes;
  magic[0] = 'X';
  try {
    decode_matrix(magic);
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("PNLT") != std::string::npos);
  }
  std::string version = bytes;
  version[4] = 9;
  CHECK_THROWS_AS(decode_matrix(version), FormatError);
  std::string huge = bytes;
  for (int k = 8; k < 24; ++k) huge[k] = '\xff';
  CHECK_THROWS_AS(decode_matrix(huge), FormatError);
  CHECK_THROWS_AS(decode_matrix(bytes + "x"), FormatError);
}

TEST_CASE("pgm") {
  SUBCASE("constant images") {
    const std::string zero = encode_pgm(ImageBuffer(3, 2, 0.0));
    const std::string one = encode_pgm(ImageBuffer(3, 2, 1.0));
    CHECK(zero.substr(0, 2) == "P5");
    CHECK(zero.substr(zero.size() - 12) == std::string(12, '\0'));
    CHECK(one.substr(one.size() - 12) == std::string(12, '\xff'));
  }
  SUBCASE("round trip within one quantum") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ImageBuffer img(17, 9);
    for (auto& p : img.pixels) p = u(rng);
    const std::string path = temp_path("img.pgm");
    write_pgm(img, path);
    const ImageBuffer back = read_pgm(path);
    REQUIRE(back.width == 17);
    REQUIRE(back.height == 9);
    for (std::size_t k = 0; k < img.size(); ++k) CHECK(std::abs(back.pixels[k] - img.pixels[k]) <= 1.0 / 65535.0);
    CHECK(encode_pgm(back) == encode_pgm(img));
    fs::remove(path);
  }
  SUBCASE("clamping and byte order") {
    ImageBuffer img(2, 1);
    img.pixels = {-0.5, 258.0 / 65535.0};
    const std::string bytes = encode_pgm(img);
    CHECK(bytes.substr(bytes.size() - 4) == std::string("\x00\x00\x01\x02", 4));
  }
  SUBCASE("header handling") {
    const std::string body = std::string("\x00\x01\xff\xff", 4);
    const ImageBuffer img = decode_pgm("P5 # comment\n2\n1 # size\n65535\n" + body);
    CHECK(img.pixels[0] == 1.0 / 65535.0);
    CHECK(img.pixels[1] == 1.0);
    CHECK_THROWS_AS(decode_pgm("P5\n2 1\n255\n\x01\x02"), FormatError);
    CHECK_THROWS_AS(decode_pgm("P2\n2 1\n65535\n" + body), FormatError);
    CHECK_THROWS_AS(decode_pgm("P5\n2 1\n65535\n" + body.substr(0, 3)), FormatError);
    CHECK_THROWS_AS(decode_pgm("P5\n2"), FormatError);
  }
}

TEST_CASE("csv") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) * std::pow(10.0, double(k % 40) - 20.0);
    CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
  }
  CHECK(csv_table({"a", "b"}, {{1.0, 2.5}, {3.0, 0.25}}) == "a,b\n1,2.5\n3,0.25\n");

  SweepResult s;
  s.parameters = {"roughness"};
  s.points = {{0.5}};
  s.series = {"unpolarized", "polarized_single"};
  s.baseline = {0, 0};
  s.kappa = {{4.0, 1.0}};
  CHECK(sweep_csv(s) == "roughness,kappa_unpolarized,kappa_polarized_single,ratio_polarized_single\n"
                        "0.5,4,1,0.25\n");
}

TEST_CASE("atomic writes") {
  const std::string path = temp_path("atomic.txt");
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  CHECK(read_file(path) == "second");
  CHECK_FALSE(fs::exists(path + ".tmp"));
  fs::remove(path);
  CHECK_THROWS_AS(read_file(path), FormatError);
  CHECK_THROWS(write_file_atomic(temp_path("no_such_dir/x.txt"), "x"));
}
