#include "polnlos/fileio.hpp"
#include "polnlos/image.hpp"
#include "polnlos/image_io.hpp"
#include "polnlos/matrix_io.hpp"

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

using namespace polnlos;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({
  "wall": {"origin": [-0.1, -0.1, 0], "u_axis": [0.025, 0, 0], "v_axis": [0, 0.025, 0], "nu": 8, "nv": 8},
  "scene": {"origin": [-0.03, -0.03, 0.2], "u_axis": [0.02, 0, 0], "v_axis": [0, 0.02, 0], "nu": 3, "nv": 3},
  "cameras": [{"position": [-0.15, 0, 0.1], "polarizer": {"axis_deg": 30}},
              {"position": [0.15, 0.05, 0.1], "polarizer": {"axis_deg": 100}}],
  "surface": {"roughness": 0.5, "refractive_index": 1.5},
  "noise_sigma": 1e-4
})";

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("polnlos_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

Run run(const std::string& args, const TempDir& dir) {
  const std::string err_path = dir / "stderr.txt";
  const std::string cmd = std::string(POLNLOS_CLI) + " " + args + " 2>" + err_path;
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.err = read_file(err_path);
  return r;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  TempDir dir;
  CHECK(run("", dir).status == 2);
  const Run bad = run("frobnicate", dir);
  CHECK(bad.status == 2);
  CHECK(contains(bad.err, "Usage"));
  CHECK(run("cond --bogus 1", dir).status == 2);
  CHECK(run("sweep --steps 0", dir).status == 2);
  CHECK(run("--help", dir).status == 0);
  CHECK(run("--version", dir).status == 0);
}

TEST_CASE("pipeline") {
  TempDir dir;
  const std::string cfg = dir / "small.json";
  write_file_atomic(cfg, kSmall);

  const Run t = run("transport --config " + cfg + " --out " + (dir / "T.bin"), dir);
  REQUIRE(t.status == 0);
  CHECK(line_count(t.out) == 1);
  CHECK(fs::exists(dir / "T.bin.manifest.json"));
  const TransportMatrix matrix = read_matrix(dir / "T.bin");
  CHECK(matrix.rows() == 128);
  CHECK(matrix.cols() == 9);

  const Run c = run("cond --transport " + (dir / "T.bin"), dir);
  CHECK(c.status == 0);
  CHECK(contains(c.out, "condition_number "));
  const Run c2 = run("cond --config " + cfg, dir);
  CHECK(c2.out == c.out);
  CHECK(run("cond --config " + cfg + " --polarizer off", dir).out != c.out);
  CHECK(run("cond --config " + cfg + " --polarizer maybe", dir).status == 2);

  const Run s = run("simulate --config " + cfg + " --seed 4 --out " + (dir / "obs.bin"), dir);
  REQUIRE(s.status == 0);
  const Run r = run("reconstruct --transport " + (dir / "T.bin") + " --obs " + (dir / "obs.bin") +
                        " --tv 0.001 --out " + (dir / "rec.pgm"),
                    dir);
  CHECK(r.status == 0);
  const ImageBuffer rec = read_pgm(dir / "rec.pgm");
  CHECK(rec.width == 3);
  CHECK(rec.height == 3);

  CHECK(run("metrics --ref " + (dir / "rec.pgm") + " --test " + (dir / "rec.pgm"), dir).status == 1);
  write_pgm(test_pattern(16, 16), dir / "a.pgm");
  const Run m = run("metrics --ref " + (dir / "a.pgm") + " --test " + (dir / "a.pgm") + " --out " +
                        (dir / "m.csv"),
                    dir);
  CHECK(m.status == 0);
  CHECK(m.out.rfind("psnr,zncc,ssim\n", 0) == 0);
  CHECK(read_file(dir / "m.csv") == m.out);
}

TEST_CASE("reconstruct dimension mismatch names both shapes") {
  TempDir dir;
  TransportMatrix t;
  t.data = DenseMatrix::Ones(6, 4);
  t.row_meta.resize(6);
  t.col_meta = {ColMeta{0, 0, 0, 0}, ColMeta{1, 1, 0, 0}, ColMeta{2, 0, 1, 0}, ColMeta{3, 1, 1, 0}};
  write_matrix(t, dir / "T.bin");
  write_matrix(column_matrix(DenseVector::Ones(5)), dir / "obs.bin");
  const Run r = run("reconstruct --transport " + (dir / "T.bin") + " --obs " + (dir / "obs.bin") +
                        " --out " + (dir / "rec.pgm"),
                    dir);
  CHECK(r.status == 1);
  CHECK(contains(r.err, "5x1"));
  CHECK(contains(r.err, "6x4"));
  CHECK_FALSE(fs::exists(dir / "rec.pgm"));
}

TEST_CASE("runtime errors exit 1") {
  TempDir dir;
  CHECK(run("cond --transport " + (dir / "missing.bin"), dir).status == 1);
  write_file_atomic(dir / "bad.json", R"({"wall": {}})");
  const Run r = run("cond --config " + (dir / "bad.json"), dir);
  CHECK(r.status == 1);
  CHECK(contains(r.err, "error:"));
  write_file_atomic(dir / "junk.bin", "NOPE1234");
  CHECK(contains(run("cond --transport " + (dir / "junk.bin"), dir).err, "PNLT"));
}

TEST_CASE("sweep writes one row per step and is deterministic") {
  TempDir dir;
  const std::string cfg = dir / "small.json";
  write_file_atomic(cfg, kSmall);
  const std::string args = "sweep --config " + cfg + " --param roughness --from 0 --to 1 --steps 11 --out ";
  REQUIRE(run(args + (dir / "a.csv"), dir).status == 0);
  REQUIRE(run(args + (dir / "b.csv"), dir).status == 0);
  const std::string a = read_file(dir / "a.csv");
  CHECK(line_count(a) == 12);
  CHECK(a.rfind("roughness,kappa_unpolarized,", 0) == 0);
  CHECK(a == read_file(dir / "b.csv"));
}

TEST_CASE("simulate is deterministic per seed") {
  TempDir dir;
  const std::string cfg = dir / "small.json";
  write_file_atomic(cfg, kSmall);
  auto sim = [&](const std::string& name, int seed) {
    REQUIRE(run("simulate --config " + cfg + " --seed " + std::to_string(seed) + " --out " + (dir / name),
                dir)
                .status == 0);
    return read_file(dir / name);
  };
  const std::string a = sim("a.bin", 7);
  CHECK(a == sim("b.bin", 7));
  CHECK(a != sim("c.bin", 8));
}

TEST_CASE("active-sim reports truncation") {
  TempDir dir;
  std::string cfg = kSmall;
  cfg.insert(cfg.rfind('}'), R"(, "active": {"bin_width_ps": 10, "bin_count": 3, "illumination_patch": 0})");
  write_file_atomic(dir / "active.json", cfg);
  const Run r = run("active-sim --config " + (dir / "active.json") + " --out " + (dir / "A.bin"), dir);
  CHECK(r.status == 0);
  CHECK(contains(r.err, "warning"));
  CHECK(read_matrix(dir / "A.bin").rows() == 2 * 64 * 3);
}
