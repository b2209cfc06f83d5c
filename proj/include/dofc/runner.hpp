#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dofc/config.hpp"
#include "dofc/ctrw.hpp"
#include "dofc/errors.hpp"
#include "dofc/fraccalc.hpp"
#include "dofc/solver.hpp"
#include "dofc/subordinate.hpp"
#include "dofc/version.hpp"

namespace dofc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

namespace detail {

// Full-precision decimal rendering; the shortest digit string would also be
// deterministic, but %.17g keeps the files diffable across platforms.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace detail

struct RunArtifacts {
  std::vector<std::string> files;
  std::string summary;  // printed to stdout by the CLI
};

// Dispatch a parsed scenario: compute, then write CSV artifacts plus a
// manifest under config.out_dir. Outputs are a pure function of
// (config, seed); timing and progress chatter belong on stderr, never in
// the artifacts.
inline RunArtifacts run_scenario(const ScenarioConfig& config) {
  namespace fs = std::filesystem;
  RunArtifacts artifacts;
  fs::create_directories(config.out_dir);

  const SubordinatorSpec spec(*config.measure);
  SolveOptions solve_opt;
  solve_opt.quad_nodes = config.quad_nodes;
  solve_opt.talbot_nodes = config.talbot_nodes;
  MonteCarloOptions mc;
  mc.n_paths = config.mc_paths;
  mc.seed = config.seed;
  mc.threads = config.threads;

  std::string csv;
  std::string csv_name;

  if (config.subcommand == "solve") {
    if (!config.eigen && !config.field)
      throw std::invalid_argument("run_scenario: solve needs a problem block");
    Problem problem = config.eigen ? Problem{*config.eigen}
                                   : Problem{*config.field};
    const auto trace = solve_trace(spec, problem, config.t_grid,
                                   config.solve_method(), solve_opt, mc);
    const bool has_se = !trace.stderr_values.empty();
    if (config.eigen) {
      csv = has_se ? "t,value,stderr\n" : "t,value\n";
      for (std::size_t i = 0; i < trace.t_grid.size(); ++i) {
        csv += detail::format_double(trace.t_grid[i]) + "," +
               detail::format_double(trace.values[i][0]);
        if (has_se)
          csv += "," + detail::format_double(trace.stderr_values[i][0]);
        csv += "\n";
      }
    } else {
      const std::size_t n = config.field->initial.n;
      csv = "t";
      for (std::size_t j = 0; j < n; ++j) csv += ",v" + std::to_string(j);
      if (has_se)
        for (std::size_t j = 0; j < n; ++j) csv += ",se" + std::to_string(j);
      csv += "\n";
      for (std::size_t i = 0; i < trace.t_grid.size(); ++i) {
        csv += detail::format_double(trace.t_grid[i]);
        for (double v : trace.values[i]) csv += "," + detail::format_double(v);
        if (has_se)
          for (double v : trace.stderr_values[i])
            csv += "," + detail::format_double(v);
        csv += "\n";
      }
    }
    csv_name = "solution.csv";
    artifacts.summary = "solve: " + std::to_string(trace.t_grid.size()) +
                        " time points, method " + trace.method;
  } else if (config.subcommand == "density") {
    DensityTable table;
    if (config.method == "mc") {
      const auto support = inverse_density(spec, config.density_t);
      table = inverse_density_mc(spec, config.density_t, support.l_grid, mc);
    } else {
      table = inverse_density(spec, config.density_t);
    }
    const bool has_se = !table.stderr_values.empty();
    csv = has_se ? "l,f,stderr\n" : "l,f\n";
    for (std::size_t i = 0; i < table.l_grid.size(); ++i) {
      csv += detail::format_double(table.l_grid[i]) + "," +
             detail::format_double(table.values[i]);
      if (has_se) csv += "," + detail::format_double(table.stderr_values[i]);
      csv += "\n";
    }
    csv_name = "density.csv";
    artifacts.summary = "density: method " + table.method + ", mass " +
                        detail::format_double(table.trapezoid_mass());
  } else if (config.subcommand == "verify") {
    if (!config.eigen)
      throw std::invalid_argument("run_scenario: verify needs an eigen block");
    const auto& mode = config.eigen->mode;
    const auto study = residual_study(spec, mode.lambda, config.dt,
                                      config.t_min, config.t_max, 3,
                                      config.talbot_nodes);
    csv = "dt,max_residual,argmax_t,order\n";
    for (std::size_t i = 0; i < study.dts.size(); ++i) {
      csv += detail::format_double(study.dts[i]) + "," +
             detail::format_double(study.reports[i].max_residual) + "," +
             detail::format_double(study.reports[i].argmax_t) + "," +
             (i == 0 ? std::string("")
                     : detail::format_double(study.orders[i - 1])) +
             "\n";
    }
    csv_name = "residuals.csv";
    artifacts.summary =
        "verify: max residual " +
        detail::format_double(study.reports.front().max_residual) + " at dt " +
        detail::format_double(study.dts.front()) + ", observed order " +
        detail::format_double(study.orders.front());
  } else if (config.subcommand == "ctrw") {
    const CtrwConfig ctrw_config(spec.measure(), config.ctrw_c, config.ctrw_t);
    const auto scaled = ctrw_scaled_counts(ctrw_config, config.ctrw_paths,
                                           config.seed, config.threads);
    std::vector<double> reference(scaled.size());
    for (std::size_t i = 0; i < reference.size(); ++i) {
      RandomStream stream(config.seed + 1, i);
      reference[i] = sample_inverse(spec, config.ctrw_t, stream);
    }
    const double ks = ks_distance(scaled, reference);
    const double critical = ks_critical_value(scaled.size(), reference.size());
    csv = "path,scaled_count\n";
    for (std::size_t i = 0; i < scaled.size(); ++i)
      csv += std::to_string(i) + "," + detail::format_double(scaled[i]) + "\n";
    csv_name = "ctrw.csv";
    artifacts.summary = "ctrw: ks " + detail::format_double(ks) +
                        " (1% critical " + detail::format_double(critical) +
                        ") over " + std::to_string(scaled.size()) + " paths";
  } else {
    throw std::invalid_argument("run_scenario: unknown subcommand '" +
                                config.subcommand + "'");
  }

  const auto csv_path = fs::path(config.out_dir) / csv_name;
  detail::write_file(csv_path, csv);
  artifacts.files.push_back(csv_path.string());

  nlohmann::json manifest;
  manifest["version"] = kVersion;
  manifest["seed"] = config.seed;
  manifest["subcommand"] = config.subcommand;
  manifest["config"] = nlohmann::json::parse(render_config(config));
  // threads affect speed only; keeping them out of the manifest makes runs
  // at different worker counts byte-comparable
  manifest["config"].erase("threads");
  manifest["outputs"] = {csv_name};
  const auto manifest_path = fs::path(config.out_dir) / "manifest.json";
  detail::write_file(manifest_path, manifest.dump(2) + "\n");
  artifacts.files.push_back(manifest_path.string());
  return artifacts;
}

}  // namespace dofc
