// Command-line front end: batch scenarios over the library.
//
// Subcommands: solve, verify, density, ctrw, ml, validate. Every scenario is
// reproducible from (config, seed); --config FILE overrides inline flags.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dofc/config.hpp"
#include "dofc/runner.hpp"
#include "dofc/special.hpp"
#include "dofc/version.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& subcommand, nlohmann::json flags,
        const std::string& config_path) {
  if (!config_path.empty()) {
    // the config file wins over inline flags
    flags = dofc::overlay_config(std::move(flags),
                                 nlohmann::json::parse(read_file(config_path)));
  }
  auto parsed = dofc::parse_config(flags.dump());
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) std::cerr << "error: " << e << "\n";
    return dofc::kExitValidation;
  }
  parsed.config->subcommand = subcommand;
  try {
    const auto started = std::chrono::steady_clock::now();
    const auto artifacts = dofc::run_scenario(*parsed.config);
    const auto elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    std::cout << artifacts.summary << "\n";
    for (const auto& f : artifacts.files) std::cout << "wrote " << f << "\n";
    std::fprintf(stderr, "wall time: %.3f s\n", elapsed);
    return dofc::kExitOk;
  } catch (const dofc::InversionError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return dofc::kExitNumerical;
  } catch (const dofc::QuadratureError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return dofc::kExitNumerical;
  }
}

nlohmann::json measure_from_file_or_inline(const std::string& measure_path,
                                           const std::string& inline_atoms) {
  if (!measure_path.empty())
    return nlohmann::json::parse(read_file(measure_path));
  if (!inline_atoms.empty()) return nlohmann::json::parse(inline_atoms);
  return nlohmann::json{{"atoms", {{{"beta", 0.5}, {"nu_weight", 1.0}}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed-order fractional Cauchy toolkit"};
  app.set_version_flag("--version", dofc::kVersion);
  app.require_subcommand(1);

  std::string config_path, measure_path, inline_measure, out_dir = "out";
  std::string method = "talbot", problem = "eigen", initial = "gaussian";
  std::uint64_t seed = 0;
  int threads = 1;
  double lambda = 1.0, gamma = 2.0, amplitude = 1.0;
  double t_single = 1.0, t_lo = 0.01, t_hi = 10.0;
  int t_points = 20;
  std::size_t grid_n = 256, mc_paths = 100000, ctrw_paths = 10000;
  double length = 20.0, dt = 1e-3, t_min = 0.1, t_max = 5.0;
  double ctrw_c = 1e4;
  double ml_alpha = 0.5, ml_z = -1.0;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config (overrides flags)");
    cmd->add_option("--spec,--nu", measure_path, "measure JSON file");
    cmd->add_option("--atoms", inline_measure, "inline measure JSON");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--threads", threads, "worker threads (speed only)");
  };

  auto* solve = app.add_subcommand("solve", "compute S(t)f traces");
  add_common(solve);
  solve->add_option("--problem", problem, "eigen | field");
  solve->add_option("--lambda", lambda, "eigenvalue of -L");
  solve->add_option("--amplitude", amplitude, "eigenmode amplitude");
  solve->add_option("--gamma", gamma, "fractional Laplacian order");
  solve->add_option("--n", grid_n, "grid points (power of two)");
  solve->add_option("--length", length, "periodic domain length");
  solve->add_option("--initial", initial, "gaussian | cosine");
  solve->add_option("--t-min", t_lo, "first solution time");
  solve->add_option("--t-max", t_hi, "last solution time");
  solve->add_option("--t-points", t_points, "log-spaced time count");
  solve->add_option("--method", method, "talbot | quad | mc");
  solve->add_option("--paths", mc_paths, "Monte Carlo paths");

  auto* verify = app.add_subcommand("verify", "governing-equation residuals");
  add_common(verify);
  verify->add_option("--lambda", lambda, "eigenvalue of -L");
  verify->add_option("--dt", dt, "base time step (halved twice)");
  verify->add_option("--res-t-min", t_min, "residual window start");
  verify->add_option("--res-t-max", t_max, "residual window end");

  auto* density = app.add_subcommand("density", "inverse-subordinator density");
  add_common(density);
  density->add_option("--t", t_single, "time of the density");
  density->add_option("--method", method, "talbot | mc");
  density->add_option("--paths", mc_paths, "Monte Carlo paths");

  auto* ctrw = app.add_subcommand("ctrw", "mixture CTRW jump counts");
  add_common(ctrw);
  ctrw->add_option("--c", ctrw_c, "scale parameter (>= 1)");
  ctrw->add_option("--t", t_single, "horizon");
  ctrw->add_option("--paths", ctrw_paths, "paths");

  auto* ml = app.add_subcommand("ml", "Mittag-Leffler value");
  ml->add_option("--alpha", ml_alpha, "order in (0,1]")->required();
  ml->add_option("--z", ml_z, "argument (<= 0)")->required();

  auto* validate_cmd = app.add_subcommand("validate", "check a measure");
  add_common(validate_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (ml->parsed()) {
      std::printf("%.17g\n", dofc::mittag_leffler(ml_alpha, ml_z));
      return dofc::kExitOk;
    }

    nlohmann::json flags;
    flags["measure"] = measure_from_file_or_inline(measure_path, inline_measure);
    flags["seed"] = seed;
    flags["threads"] = threads;
    flags["out"] = out_dir;
    flags["method"] = method;

    if (validate_cmd->parsed()) {
      auto parsed = dofc::parse_config(flags.dump());
      if (!parsed.ok()) {
        for (const auto& e : parsed.errors) std::cerr << "error: " << e << "\n";
        return dofc::kExitValidation;
      }
      const auto report = dofc::validate(*parsed.config->measure);
      std::printf("atoms: %zu\n", parsed.config->measure->size());
      std::printf("finiteness sum: %.17g\n", report.finiteness_sum);
      std::printf("valid: %s\n", report.valid ? "yes" : "no");
      for (const auto& issue : report.issues)
        std::printf("issue (atom %d): %s\n", issue.atom_index,
                    issue.message.c_str());
      return report.valid ? dofc::kExitOk : dofc::kExitValidation;
    }

    if (solve->parsed()) {
      if (problem == "eigen") {
        flags["problem"]["eigen"] = {{"lambda", lambda},
                                     {"amplitude", amplitude}};
      } else if (problem == "field") {
        nlohmann::json init;
        if (initial == "cosine")
          init = {{"kind", "cosine"}, {"wavenumber", 1}};
        else
          init = {{"kind", "gaussian"}};
        flags["problem"]["field"] = {{"gamma", gamma},
                                     {"n", grid_n},
                                     {"length", length},
                                     {"initial", init}};
      } else {
        std::cerr << "error: --problem must be eigen or field\n";
        return dofc::kExitValidation;
      }
      flags["numeric"]["t_grid"] = {{"kind", "log"},
                                    {"min", t_lo},
                                    {"max", t_hi},
                                    {"points", t_points}};
      flags["numeric"]["mc_paths"] = mc_paths;
      return run("solve", flags, config_path);
    }
    if (verify->parsed()) {
      flags["problem"]["eigen"] = {{"lambda", lambda}, {"amplitude", 1.0}};
      flags["numeric"]["dt"] = dt;
      flags["numeric"]["t_min"] = t_min;
      flags["numeric"]["t_max"] = t_max;
      return run("verify", flags, config_path);
    }
    if (density->parsed()) {
      flags["density"]["t"] = t_single;
      flags["numeric"]["mc_paths"] = mc_paths;
      return run("density", flags, config_path);
    }
    if (ctrw->parsed()) {
      flags["ctrw"] = {{"c", ctrw_c}, {"t", t_single}, {"paths", ctrw_paths}};
      return run("ctrw", flags, config_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dofc::kExitValidation;
  }
  return dofc::kExitValidation;
}
