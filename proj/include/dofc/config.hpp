#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dofc/measures.hpp"
#include "dofc/semigroup.hpp"
#include "dofc/solver.hpp"

namespace dofc {

// One scenario: measure + problem + numeric controls. parse_config collects
// every error it can find instead of stopping at the first.
struct ScenarioConfig {
  std::string subcommand = "solve";

  nlohmann::json measure_spec;  // echo of the measure block
  std::optional<DistributedOrderMeasure> measure;

  std::optional<EigenProblem> eigen;
  std::optional<FieldProblem> field;

  std::vector<double> t_grid;
  nlohmann::json t_grid_spec;

  double dt = 1e-3;
  double t_min = 0.1;
  double t_max = 5.0;
  int quad_nodes = 256;
  int talbot_nodes = 32;
  std::size_t mc_paths = 100000;
  double density_t = 1.0;
  double ctrw_c = 1e4;
  std::size_t ctrw_paths = 10000;
  double ctrw_t = 1.0;

  std::string method = "talbot";  // talbot | quad | mc
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = "out";

  SolveMethod solve_method() const {
    if (method == "quad") return SolveMethod::quadrature;
    if (method == "mc") return SolveMethod::mc;
    return SolveMethod::talbot;
  }
};

struct ParseResult {
  std::optional<ScenarioConfig> config;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty() && config.has_value(); }
};

namespace detail {

inline bool expect_keys(const nlohmann::json& obj,
                        const std::vector<std::string>& allowed,
                        const std::string& where,
                        std::vector<std::string>& errors) {
  bool clean = true;
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const auto& k : allowed)
      if (key == k) {
        known = true;
        break;
      }
    if (!known) {
      errors.push_back(where + ": unknown key '" + key + "'");
      clean = false;
    }
  }
  return clean;
}

inline std::optional<DistributedOrderMeasure> parse_measure(
    const nlohmann::json& m, std::vector<std::string>& errors) {
  if (m.contains("kind")) {
    if (m["kind"] != "uniform") {
      errors.push_back("measure: unknown kind '" +
                       m["kind"].get<std::string>() + "'");
      return std::nullopt;
    }
    expect_keys(m, {"kind", "n"}, "measure", errors);
    const int n = m.value("n", 0);
    if (n < 1) {
      errors.push_back("measure: uniform family needs n >= 1");
      return std::nullopt;
    }
    return discretize([](double) { return 1.0; }, n);
  }
  if (!m.contains("atoms") || !m["atoms"].is_array() || m["atoms"].empty()) {
    errors.push_back("measure: needs a nonempty 'atoms' array or a family kind");
    return std::nullopt;
  }
  expect_keys(m, {"atoms"}, "measure", errors);
  std::vector<std::pair<double, double>> nu_atoms;
  bool usable = true;
  int index = 0;
  for (const auto& atom : m["atoms"]) {
    const std::string where = "measure.atoms[" + std::to_string(index) + "]";
    expect_keys(atom, {"beta", "nu_weight", "mu_weight"}, where, errors);
    if (!atom.contains("beta")) {
      errors.push_back(where + ": missing beta");
      usable = false;
      ++index;
      continue;
    }
    const double beta = atom["beta"].get<double>();
    const bool has_nu = atom.contains("nu_weight");
    const bool has_mu = atom.contains("mu_weight");
    if (has_nu == has_mu) {
      errors.push_back(where + ": give exactly one of nu_weight / mu_weight");
      usable = false;
      ++index;
      continue;
    }
    if (!(beta >= kBetaMargin && beta <= 1.0 - kBetaMargin)) {
      errors.push_back(where + ": beta " + std::to_string(beta) +
                       " outside the open interval (0,1)");
      usable = false;
      ++index;
      continue;
    }
    const double w = has_nu ? atom["nu_weight"].get<double>()
                            : atom["mu_weight"].get<double>() /
                                  gamma_fn(1.0 - beta);
    if (!(w > 0.0)) {
      errors.push_back(where + ": weight must be positive");
      usable = false;
      ++index;
      continue;
    }
    nu_atoms.emplace_back(beta, w);
    ++index;
  }
  if (!usable) return std::nullopt;
  const auto report = validate_atoms(nu_atoms);
  if (!report.valid) {
    for (const auto& issue : report.issues)
      errors.push_back("measure.atoms[" + std::to_string(issue.atom_index) +
                       "]: " + issue.message);
    return std::nullopt;
  }
  try {
    return DistributedOrderMeasure(std::move(nu_atoms));
  } catch (const std::exception& e) {
    errors.push_back(std::string("measure: ") + e.what());
    return std::nullopt;
  }
}

inline std::optional<GridFunction> parse_initial(const nlohmann::json& init,
                                                 std::size_t n, double length,
                                                 std::vector<std::string>& errors) {
  const std::string kind = init.value("kind", "gaussian");
  try {
    if (kind == "gaussian") {
      expect_keys(init, {"kind", "center", "width"}, "problem.field.initial",
                  errors);
      return make_gaussian_bump(n, length, init.value("center", length / 2.0),
                                init.value("width", length / 20.0));
    }
    if (kind == "cosine") {
      expect_keys(init, {"kind", "wavenumber"}, "problem.field.initial", errors);
      return make_cosine_mode(n, length, init.value("wavenumber", 1));
    }
    if (kind == "samples") {
      expect_keys(init, {"kind", "values"}, "problem.field.initial", errors);
      auto values = init.value("values", std::vector<double>{});
      return GridFunction(n, length, std::move(values));
    }
    if (kind == "csv") {
      expect_keys(init, {"kind", "path"}, "problem.field.initial", errors);
      const std::string path = init.value("path", "");
      std::ifstream in(path);
      if (!in) {
        errors.push_back("problem.field.initial: cannot read '" + path + "'");
        return std::nullopt;
      }
      std::vector<double> values;
      std::string line;
      while (std::getline(in, line))
        if (!line.empty()) values.push_back(std::stod(line));
      return GridFunction(n, length, std::move(values));
    }
  } catch (const std::exception& e) {
    errors.push_back(std::string("problem.field.initial: ") + e.what());
    return std::nullopt;
  }
  errors.push_back("problem.field.initial: unknown kind '" + kind + "'");
  return std::nullopt;
}

inline std::vector<double> parse_t_grid(const nlohmann::json& g,
                                        std::vector<std::string>& errors) {
  std::vector<double> grid;
  if (g.is_array()) {
    grid = g.get<std::vector<double>>();
  } else if (g.is_object() && g.value("kind", "log") == "log") {
    expect_keys(g, {"kind", "min", "max", "points"}, "numeric.t_grid", errors);
    const double lo = g.value("min", 0.01);
    const double hi = g.value("max", 10.0);
    const int points = g.value("points", 20);
    if (!(lo > 0.0 && hi > lo && points >= 1)) {
      errors.push_back("numeric.t_grid: need 0 < min < max and points >= 1");
      return grid;
    }
    for (int i = 0; i < points; ++i)
      grid.push_back(points == 1
                         ? lo
                         : lo * std::pow(hi / lo,
                                         static_cast<double>(i) / (points - 1)));
  } else {
    errors.push_back("numeric.t_grid: expected an array or {kind:'log',...}");
    return grid;
  }
  for (double t : grid)
    if (!(t > 0.0)) {
      errors.push_back("numeric.t_grid: every t must be positive");
      break;
    }
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1]) {
      errors.push_back("numeric.t_grid: values must ascend");
      break;
    }
  return grid;
}

}  // namespace detail

// Overlay semantics for --config FILE over inline flags: the file wins per
// top-level block, wholesale. Merging inside a block would let a flag-default
// problem or measure leak into the file's scenario.
inline nlohmann::json overlay_config(nlohmann::json flags,
                                     const nlohmann::json& file) {
  for (const auto& [key, value] : file.items()) flags[key] = value;
  return flags;
}

inline ParseResult parse_config(const std::string& text) {
  ParseResult result;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    result.errors.push_back(std::string("config: not valid JSON: ") + e.what());
    return result;
  }
  if (!doc.is_object()) {
    result.errors.push_back("config: top level must be an object");
    return result;
  }

  ScenarioConfig config;
  auto& errors = result.errors;
  detail::expect_keys(doc,
                      {"measure", "problem", "numeric", "method", "seed",
                       "threads", "out", "density", "ctrw"},
                      "config", errors);

  if (doc.contains("measure")) {
    config.measure_spec = doc["measure"];
    config.measure = detail::parse_measure(doc["measure"], errors);
  } else {
    errors.push_back("config: missing 'measure' block");
  }

  if (doc.contains("problem")) {
    const auto& p = doc["problem"];
    detail::expect_keys(p, {"eigen", "field"}, "problem", errors);
    if (p.contains("eigen") && p.contains("field")) {
      errors.push_back("problem: exactly one of eigen/field, got both");
    } else if (p.contains("eigen")) {
      detail::expect_keys(p["eigen"], {"lambda", "amplitude"}, "problem.eigen",
                          errors);
      const double lambda = p["eigen"].value("lambda", 1.0);
      const double amplitude = p["eigen"].value("amplitude", 1.0);
      if (!(lambda >= 0.0)) {
        errors.push_back("problem.eigen: lambda must be >= 0");
      } else {
        config.eigen = EigenProblem{EigenMode(lambda, amplitude)};
      }
    } else if (p.contains("field")) {
      const auto& f = p["field"];
      detail::expect_keys(f, {"gamma", "n", "length", "initial"},
                          "problem.field", errors);
      const double gamma = f.value("gamma", 2.0);
      const std::size_t n = f.value("n", std::size_t{256});
      const double length = f.value("length", 20.0);
      try {
        FractionalLaplacianOp op(gamma, n, length);
        auto initial = detail::parse_initial(
            f.value("initial", nlohmann::json{{"kind", "gaussian"}}), n,
            length, errors);
        if (initial) config.field = FieldProblem{op, std::move(*initial)};
      } catch (const std::exception& e) {
        errors.push_back(std::string("problem.field: ") + e.what());
      }
    } else {
      errors.push_back("problem: exactly one of eigen/field, got none");
    }
  }

  if (doc.contains("numeric")) {
    const auto& n = doc["numeric"];
    detail::expect_keys(n,
                        {"dt", "t_min", "t_max", "t_grid", "quad_nodes",
                         "talbot_nodes", "mc_paths"},
                        "numeric", errors);
    config.dt = n.value("dt", config.dt);
    config.t_min = n.value("t_min", config.t_min);
    config.t_max = n.value("t_max", config.t_max);
    config.quad_nodes = n.value("quad_nodes", config.quad_nodes);
    config.talbot_nodes = n.value("talbot_nodes", config.talbot_nodes);
    config.mc_paths = n.value("mc_paths", config.mc_paths);
    if (n.contains("t_grid")) {
      config.t_grid_spec = n["t_grid"];
      config.t_grid = detail::parse_t_grid(n["t_grid"], errors);
    }
    if (!(config.dt > 0.0)) errors.push_back("numeric.dt: must be positive");
    if (config.talbot_nodes < 8)
      errors.push_back("numeric.talbot_nodes: must be >= 8");
  }
  if (config.t_grid.empty()) config.t_grid = {1.0};

  if (doc.contains("density")) {
    detail::expect_keys(doc["density"], {"t"}, "density", errors);
    config.density_t = doc["density"].value("t", config.density_t);
    if (!(config.density_t > 0.0))
      errors.push_back("density.t: must be positive");
  }
  if (doc.contains("ctrw")) {
    detail::expect_keys(doc["ctrw"], {"c", "t", "paths"}, "ctrw", errors);
    config.ctrw_c = doc["ctrw"].value("c", config.ctrw_c);
    config.ctrw_t = doc["ctrw"].value("t", config.ctrw_t);
    config.ctrw_paths = doc["ctrw"].value("paths", config.ctrw_paths);
    if (!(config.ctrw_c >= 1.0)) errors.push_back("ctrw.c: must be >= 1");
    if (!(config.ctrw_t > 0.0)) errors.push_back("ctrw.t: must be positive");
  }

  config.method = doc.value("method", config.method);
  if (config.method != "talbot" && config.method != "quad" &&
      config.method != "mc")
    errors.push_back("method: expected talbot | quad | mc");
  config.seed = doc.value("seed", config.seed);
  config.threads = doc.value("threads", config.threads);
  if (config.threads < 1) errors.push_back("threads: must be >= 1");
  config.out_dir = doc.value("out", config.out_dir);

  if (errors.empty()) result.config = std::move(config);
  return result;
}

// Canonical JSON echo of a config; parse(render(c)) reproduces c.
inline std::string render_config(const ScenarioConfig& c) {
  nlohmann::json doc;
  doc["measure"] = c.measure_spec;
  if (c.eigen) {
    doc["problem"]["eigen"]["lambda"] = c.eigen->mode.lambda;
    doc["problem"]["eigen"]["amplitude"] = c.eigen->mode.amplitude;
  }
  if (c.field) {
    doc["problem"]["field"]["gamma"] = c.field->op.gamma;
    doc["problem"]["field"]["n"] = c.field->op.n;
    doc["problem"]["field"]["length"] = c.field->op.domain_length;
    doc["problem"]["field"]["initial"] = {{"kind", "samples"},
                                          {"values", c.field->initial.values}};
  }
  doc["numeric"]["dt"] = c.dt;
  doc["numeric"]["t_min"] = c.t_min;
  doc["numeric"]["t_max"] = c.t_max;
  doc["numeric"]["t_grid"] = c.t_grid;
  doc["numeric"]["quad_nodes"] = c.quad_nodes;
  doc["numeric"]["talbot_nodes"] = c.talbot_nodes;
  doc["numeric"]["mc_paths"] = c.mc_paths;
  doc["density"]["t"] = c.density_t;
  doc["ctrw"]["c"] = c.ctrw_c;
  doc["ctrw"]["t"] = c.ctrw_t;
  doc["ctrw"]["paths"] = c.ctrw_paths;
  doc["method"] = c.method;
  doc["seed"] = c.seed;
  doc["threads"] = c.threads;
  doc["out"] = c.out_dir;
  return doc.dump(2);
}

}  // namespace dofc
