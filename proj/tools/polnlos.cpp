// Command-line driver: one subcommand per pipeline stage.

#include "polnlos/conditioning.hpp"
#include "polnlos/config_io.hpp"
#include "polnlos/csv.hpp"
#include "polnlos/fileio.hpp"
#include "polnlos/image_io.hpp"
#include "polnlos/matrix_io.hpp"
#include "polnlos/metrics.hpp"
#include "polnlos/reconstruct.hpp"
#include "polnlos/transport.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

using namespace polnlos;
using nlohmann::json;

constexpr const char* kVersion = POLNLOS_VERSION;

struct Options {
  std::string config;
  std::string out;
  std::string transport;
  std::string obs;
  std::string polarizer = "on";
  double tv = AdmmParams{}.reg_weight;
  std::uint64_t seed = 0;
  std::string param = "roughness";
  double from = 0.1;
  double to = 0.9;
  std::size_t steps = 9;
  std::string ref;
  std::string test;
};

// Sidecar record next to each output file.
void write_manifest(const std::string& subcommand, const Options& o,
                    const std::map<std::string, json>& resolved) {
  if (o.out.empty()) return;
  json m;
  m["tool"] = "polnlos";
  m["version"] = kVersion;
  m["subcommand"] = subcommand;
  m["config"] = o.config;
  m["seed"] = o.seed;
  m["outputs"] = json::array({o.out});
  m["parameters"] = json(resolved);
  write_file_atomic(o.out + ".manifest.json", m.dump(2) + "\n");
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string("missing required option ") + flag);
}

bool polarizer_on(const Options& o) { return o.polarizer == "on"; }

DenseVector scene_vector(const Options& o, const SceneConfig& config) {
  const std::size_t width = config.scene.nu;
  const std::size_t height = config.scene.nv * config.scene.nw;
  if (o.ref.empty()) return test_pattern(width, height).to_vector();
  const ImageBuffer img = read_pgm(o.ref);
  if (img.width != width || img.height != height) {
    throw DimensionError("scene image " + o.ref + " is " + std::to_string(img.width) + "x" +
                         std::to_string(img.height) + " but the config scene is " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
  return img.to_vector();
}

int run_simulate(const Options& o) {
  require(o.config, "--config");
  require(o.out, "--out");
  const SceneConfig config = load_config(o.config);
  const TransportMatrix t = build_occluded(config, polarizer_on(o));
  const DenseVector obs = forward(t, scene_vector(o, config), config.noise_sigma, o.seed);
  TransportMatrix out = column_matrix(obs);
  out.row_meta = t.row_meta;
  write_matrix(out, o.out);
  write_manifest("simulate", o, {{"polarizer", o.polarizer}, {"noise_sigma", config.noise_sigma}});
  std::cout << "simulate: " << obs.size() << " observations -> " << o.out << "\n";
  return 0;
}

int run_transport(const Options& o) {
  require(o.config, "--config");
  require(o.out, "--out");
  const SceneConfig config = load_config(o.config);
  const TransportMatrix t = build_occluded(config, polarizer_on(o));
  write_matrix(t, o.out);
  write_manifest("transport", o, {{"polarizer", o.polarizer}});
  std::cout << "transport: " << t.rows() << "x" << t.cols() << " -> " << o.out << "\n";
  return 0;
}

int run_cond(const Options& o) {
  TransportMatrix t;
  if (!o.transport.empty()) {
    t = read_matrix(o.transport);
  } else {
    require(o.config, "--config or --transport");
    t = build_occluded(load_config(o.config), polarizer_on(o));
  }
  std::cout << "condition_number " << format_number(condition_number(t)) << "\n";
  return 0;
}

int run_reconstruct(const Options& o) {
  require(o.transport, "--transport");
  require(o.obs, "--obs");
  require(o.out, "--out");
  const TransportMatrix t = read_matrix(o.transport);
  const TransportMatrix obs = read_matrix(o.obs);
  if (obs.cols() != 1 || obs.rows() != t.rows()) {
    throw DimensionError("observation is " + std::to_string(obs.rows()) + "x" +
                         std::to_string(obs.cols()) + " but the transport matrix is " +
                         std::to_string(t.rows()) + "x" + std::to_string(t.cols()) +
                         " (expected a " + std::to_string(t.rows()) + "x1 observation)");
  }
  AdmmParams params;
  params.reg_weight = o.tv;
  const ReconResult r = admm_tv_box(t, obs.data.col(0), params);
  write_pgm(ImageBuffer::from_vector(r.estimate, t.scene_width(), t.scene_height()), o.out);
  write_manifest("reconstruct", o,
                 {{"tv", o.tv}, {"iterations", r.iterations}, {"converged", r.converged}});
  std::cout << "reconstruct: iterations " << r.iterations << " converged "
            << (r.converged ? "yes" : "no") << " objective " << format_number(r.objective)
            << " -> " << o.out << "\n";
  return 0;
}

int run_sweep(const Options& o) {
  require(o.config, "--config");
  require(o.out, "--out");
  const SceneConfig config = load_config(o.config);
  std::vector<Configuration> configs{Configuration::Unpolarized, Configuration::PolarizedSingle,
                                     Configuration::PolarizedMulti, Configuration::Rotating};
  if (!config.occluders.empty()) {
    configs.insert(configs.end(), {Configuration::OccludedUnpolarized,
                                   Configuration::OccludedPolarizedSingle,
                                   Configuration::OccludedPolarizedMulti});
  }
  const SweepResult s = parameter_sweep(config, o.param, linspace(o.from, o.to, o.steps), configs);
  write_file_atomic(o.out, sweep_csv(s));
  write_manifest("sweep", o,
                 {{"param", o.param}, {"from", o.from}, {"to", o.to}, {"steps", o.steps}});
  std::cout << "sweep: " << s.size() << " rows -> " << o.out << "\n";
  return 0;
}

int run_active_sim(const Options& o) {
  require(o.config, "--config");
  require(o.out, "--out");
  const SceneConfig config = load_config(o.config);
  ActiveDiagnostics diag;
  const TransportMatrix t = build_active(config, polarizer_on(o), &diag);
  if (diag.truncated_paths > 0) {
    std::cerr << "warning: " << diag.truncated_paths
              << " paths fall beyond the last time bin and were dropped\n";
  }
  write_matrix(t, o.out);
  write_manifest("active-sim", o,
                 {{"polarizer", o.polarizer}, {"truncated_paths", diag.truncated_paths}});
  std::cout << "active-sim: " << t.rows() << "x" << t.cols() << " truncated_paths "
            << diag.truncated_paths << " -> " << o.out << "\n";
  return 0;
}

int run_active_sweep(const Options& o) {
  require(o.config, "--config");
  require(o.out, "--out");
  if (o.param != "roughness") throw ConfigError("active-sweep supports --param roughness only");
  const SceneConfig config = load_config(o.config);
  const SweepResult s = active_sweep(config, linspace(o.from, o.to, o.steps), {2, 3});
  write_file_atomic(o.out, sweep_csv(s));
  write_manifest("active-sweep", o, {{"from", o.from}, {"to", o.to}, {"steps", o.steps}});
  std::cout << "active-sweep: " << s.size() << " rows -> " << o.out << "\n";
  return 0;
}

int run_metrics(const Options& o) {
  require(o.ref, "--ref");
  require(o.test, "--test");
  const ImageBuffer a = read_pgm(o.ref);
  const ImageBuffer b = read_pgm(o.test);
  const std::vector<double> row{psnr(a, b), zncc(a, b), ssim(a, b)};
  const std::string table = csv_table({"psnr", "zncc", "ssim"}, {row});
  if (!o.out.empty()) {
    write_file_atomic(o.out, table);
    write_manifest("metrics", o, {{"ref", o.ref}, {"test", o.test}});
  }
  std::cout << table;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polarization-enhanced NLOS transport, conditioning and reconstruction"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;

  auto add_config = [&](CLI::App* sub) { sub->add_option("--config", o.config, "JSON scene file"); };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", o.out, "output path"); };
  auto add_polarizer = [&](CLI::App* sub) {
    sub->add_option("--polarizer", o.polarizer, "use the camera polarizers")
        ->check(CLI::IsMember({"on", "off"}));
  };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", o.seed, "noise seed"); };
  auto add_range = [&](CLI::App* sub) {
    sub->add_option("--from", o.from, "first value");
    sub->add_option("--to", o.to, "last value");
    sub->add_option("--steps", o.steps, "number of values")->check(CLI::PositiveNumber);
  };

  auto* simulate = app.add_subcommand("simulate", "forward-simulate wall observations");
  add_config(simulate); add_out(simulate); add_polarizer(simulate); add_seed(simulate);
  simulate->add_option("--ref", o.ref, "scene image (PGM); default built-in pattern");

  auto* transport = app.add_subcommand("transport", "build the passive transport matrix");
  add_config(transport); add_out(transport); add_polarizer(transport);

  auto* cond = app.add_subcommand("cond", "print the condition number");
  cond->add_option("--transport", o.transport, "matrix file");
  add_config(cond); add_polarizer(cond);

  auto* reconstruct = app.add_subcommand("reconstruct", "TV-regularized reconstruction");
  reconstruct->add_option("--transport", o.transport, "matrix file");
  reconstruct->add_option("--obs", o.obs, "observation file");
  reconstruct->add_option("--tv", o.tv, "TV weight")->check(CLI::NonNegativeNumber);
  add_out(reconstruct);

  auto* sweep = app.add_subcommand("sweep", "condition numbers over a parameter range");
  add_config(sweep); add_out(sweep); add_range(sweep);
  sweep->add_option("--param", o.param,
                    "roughness | refractive_index | polarizer_rotation_deg | noise_sigma");

  auto* active_sim = app.add_subcommand("active-sim", "build the time-resolved transport matrix");
  add_config(active_sim); add_out(active_sim); add_polarizer(active_sim);

  auto* active_sweep_cmd =
      app.add_subcommand("active-sweep", "active condition numbers over roughness x {2, 3}^3 voxels");
  add_config(active_sweep_cmd); add_out(active_sweep_cmd); add_range(active_sweep_cmd);
  active_sweep_cmd->add_option("--param", o.param, "roughness");

  auto* metrics = app.add_subcommand("metrics", "PSNR, ZNCC and SSIM of two images");
  metrics->add_option("--ref", o.ref, "reference PGM");
  metrics->add_option("--test", o.test, "test PGM");
  add_out(metrics);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(o);
    if (transport->parsed()) return run_transport(o);
    if (cond->parsed()) return run_cond(o);
    if (reconstruct->parsed()) return run_reconstruct(o);
    if (sweep->parsed()) return run_sweep(o);
    if (active_sim->parsed()) return run_active_sim(o);
    if (active_sweep_cmd->parsed()) return run_active_sweep(o);
    if (metrics->parsed()) return run_metrics(o);
  } catch (const polnlos::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
