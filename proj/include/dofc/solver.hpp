#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dofc/errors.hpp"
#include "dofc/laplace.hpp"
#include "dofc/measures.hpp"
#include "dofc/parallel.hpp"
#include "dofc/quad.hpp"
#include "dofc/semigroup.hpp"
#include "dofc/subordinate.hpp"

namespace dofc {

// ---------------------------------------------------------------------------
// Transform-space route

// Laplace transform of the eigenmode trace h(t; lambda):
//   r(s) = psi(s) / (s (psi(s) + lambda)).
template <typename Real>
std::complex<Real> mode_transform(const SubordinatorSpec& spec, double lambda,
                                  std::complex<Real> s) {
  const auto p = psi_eval<Real>(spec, s);
  return p / (s * (p + static_cast<Real>(lambda)));
}

inline double mode_solution(const SubordinatorSpec& spec, double lambda,
                            double t, int nodes = 32) {
  if (!(lambda >= 0.0))
    throw std::domain_error("mode_solution: lambda must be >= 0");
  TransformHandleL F{[&spec, lambda](std::complex<long double> s) {
    return mode_transform<long double>(spec, lambda, s);
  }};
  return talbot_invert(F, t, nodes).value;
}

// Transform of the two-term trace in explicit rational-in-powers form:
//   (c1 s^{b1-1} + c2 s^{b2-1}) / (c1 s^{b1} + c2 s^{b2} + lambda).
template <typename Real>
std::complex<Real> two_term_mode_transform(double c1, double b1, double c2,
                                           double b2, double lambda,
                                           std::complex<Real> s) {
  if (!(0.0 < b1 && b1 < b2 && b2 < 1.0))
    throw std::domain_error("two_term_mode_transform: need 0 < b1 < b2 < 1");
  const auto num = static_cast<Real>(c1) * complex_power(s, b1 - 1.0) +
                   static_cast<Real>(c2) * complex_power(s, b2 - 1.0);
  const auto den = static_cast<Real>(c1) * complex_power(s, b1) +
                   static_cast<Real>(c2) * complex_power(s, b2) +
                   static_cast<Real>(lambda);
  return num / den;
}

inline double two_term_mode_solution(double c1, double b1, double c2, double b2,
                                     double lambda, double t, int nodes = 32) {
  TransformHandleL F{[=](std::complex<long double> s) {
    return two_term_mode_transform<long double>(c1, b1, c2, b2, lambda, s);
  }};
  return talbot_invert(F, t, nodes).value;
}

// ---------------------------------------------------------------------------
// Quadrature route: S(t)f = integral of T(l)f against the density table

struct SolveOptions {
  int talbot_nodes = 32;
  int quad_nodes = 256;        // Gauss-Legendre nodes per refinement level
  double quad_rel_tol = 1e-5;  // refinement disagreement tolerance
  double quad_abs_tol = 1e-12;
};

namespace detail {

inline double density_support(const DensityEvaluator& density,
                              const SubordinatorSpec& spec, double t,
                              int nodes) {
  const double mean = std::max(inverse_mean(spec, t, nodes), 1e-12);
  const double floor = 1e-9 * (spec.levy_tail(t) + 1.0);
  double l_max = 4.0 * mean;
  while (density(l_max) > floor && l_max < 256.0 * mean) l_max *= 1.4142135623730951;
  return l_max;
}

// Panel boundaries graded geometrically toward 0, so that e^{-lambda l}
// factors with lambda up to ~2^{panels}/l_max are resolved.
inline std::vector<double> graded_panels(double l_max, int panels) {
  std::vector<double> b(panels + 1);
  b[0] = 0.0;
  for (int p = 1; p <= panels; ++p)
    b[p] = l_max * std::pow(0.5, panels - p);
  return b;
}

// Panels over [0, l_max], seeded geometrically toward 0 and then split
// adaptively until the density mass is resolved in every panel. Mixtures
// with orders near 1 make the density spike sharply, so fixed panel layouts
// are not enough.
inline std::vector<std::pair<double, double>> density_panels(
    const DensityEvaluator& density, double l_max, int seed_panels) {
  const auto seeds = graded_panels(l_max, seed_panels);
  std::vector<std::pair<double, double>> todo, done;
  for (std::size_t p = 0; p + 1 < seeds.size(); ++p)
    todo.emplace_back(seeds[p], seeds[p + 1]);
  double mass_estimate = 0.0;
  for (const auto& [a, b] : todo) {
    double v = 0.0, e = 0.0;
    gk15(density, a, b, v, e);
    mass_estimate += std::abs(v);
  }
  const double tol = 1e-9 * std::max(mass_estimate, 0.1);
  while (!todo.empty()) {
    const auto [a, b] = todo.back();
    todo.pop_back();
    double v = 0.0, e = 0.0;
    gk15(density, a, b, v, e);
    // the refinement-disagreement check downstream still guards accuracy if
    // the panel budget runs out
    if (e <= tol || b - a < 1e-9 * l_max ||
        done.size() + todo.size() > 20000) {
      done.emplace_back(a, b);
    } else {
      const double mid = 0.5 * (a + b);
      todo.emplace_back(a, mid);
      todo.emplace_back(mid, b);
    }
  }
  std::sort(done.begin(), done.end());
  return done;
}

// Gauss-Legendre nodes/weights over a panel set; refine = 2 halves each.
inline void panel_nodes(const std::vector<std::pair<double, double>>& panels,
                        int refine, const QuadRule& rule,
                        std::vector<double>& nodes,
                        std::vector<double>& weights) {
  nodes.clear();
  weights.clear();
  for (const auto& [a, b] : panels) {
    const double width = (b - a) / refine;
    for (int r = 0; r < refine; ++r) {
      const double lo = a + r * width;
      const double mid = lo + 0.5 * width;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        nodes.push_back(mid + 0.5 * width * rule.nodes[i]);
        weights.push_back(0.5 * width * rule.weights[i]);
      }
    }
  }
}

// Quadrature of density(l) * action(l) over [0, l_max] with a refinement
// disagreement check.
template <typename Action>
double subordinate_quadrature(const DensityEvaluator& density, double l_max,
                              const SolveOptions& opt, Action&& action,
                              const char* what) {
  const QuadRule rule = gauss_legendre(16);
  const auto panels =
      density_panels(density, l_max, std::max(8, opt.quad_nodes / 16));
  std::vector<double> nodes, weights;
  const auto level = [&](int refine) {
    panel_nodes(panels, refine, rule, nodes, weights);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      acc += weights[i] * density(nodes[i]) * action(nodes[i]);
    return acc;
  };
  const double coarse = level(1);
  const double fine = level(2);
  if (std::abs(fine - coarse) >
      std::max(opt.quad_abs_tol,
               opt.quad_rel_tol * std::max(std::abs(fine), 1e-300)))
    throw QuadratureError(std::string(what) +
                              ": quadrature refinement disagreement (" +
                              std::to_string(coarse) + " vs " +
                              std::to_string(fine) + ")",
                          coarse, fine);
  return fine;
}

}  // namespace detail

// Eigenmode problem: returns amplitude * integral e^{-lambda l} f_{E(t)}(l) dl.
inline double subordinate_apply(const SubordinatorSpec& spec,
                                const EigenMode& mode, double t,
                                const SolveOptions& opt = {}) {
  if (!(t > 0.0)) throw std::domain_error("subordinate_apply: t must be positive");
  const DensityEvaluator density(spec, t, opt.talbot_nodes);
  const double l_max =
      detail::density_support(density, spec, t, opt.talbot_nodes);
  const double h = detail::subordinate_quadrature(
      density, l_max, opt,
      [&](double l) { return std::exp(-mode.lambda * l); }, "subordinate_apply");
  return mode.amplitude * h;
}

// Field problem on the periodic grid: every Fourier mode is an eigenmode of
// the fractional Laplacian, so the subordinated factor is computed per mode
// from one shared set of density evaluations and mapped back.
inline GridFunction subordinate_apply(const SubordinatorSpec& spec,
                                      const FractionalLaplacianOp& op,
                                      const GridFunction& f, double t,
                                      const SolveOptions& opt = {}) {
  if (!(t > 0.0)) throw std::domain_error("subordinate_apply: t must be positive");
  op.check_grid(f);
  const DensityEvaluator density(spec, t, opt.talbot_nodes);
  const double l_max =
      detail::density_support(density, spec, t, opt.talbot_nodes);
  const auto lam = op.symbol();

  const QuadRule rule = gauss_legendre(16);
  const auto panels =
      detail::density_panels(density, l_max, std::max(8, opt.quad_nodes / 16));
  const auto factors = [&](int refine) {
    std::vector<double> nodes, weights;
    detail::panel_nodes(panels, refine, rule, nodes, weights);
    std::vector<double> rho(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      rho[i] = weights[i] * density(nodes[i]);
    std::vector<double> h(lam.size());
    for (std::size_t k = 0; k < lam.size(); ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < nodes.size(); ++i)
        acc += rho[i] * std::exp(-lam[k] * nodes[i]);
      h[k] = acc;
    }
    return h;
  };

  const auto coarse = factors(1);
  const auto fine = factors(2);
  double diff = 0.0, norm = 0.0;
  for (std::size_t k = 0; k < fine.size(); ++k) {
    diff = std::max(diff, std::abs(fine[k] - coarse[k]));
    norm = std::max(norm, std::abs(fine[k]));
  }
  if (diff > std::max(opt.quad_abs_tol, opt.quad_rel_tol * std::max(norm, 1e-300)))
    throw QuadratureError("subordinate_apply(field): refinement disagreement",
                          diff, norm);

  std::vector<std::complex<double>> hat(f.n);
  for (std::size_t i = 0; i < f.n; ++i) hat[i] = f.values[i];
  fft(hat);
  for (std::size_t k = 0; k < f.n; ++k) hat[k] *= fine[k];
  fft(hat, true);
  std::vector<double> out(f.n);
  for (std::size_t i = 0; i < f.n; ++i) out[i] = hat[i].real();
  return GridFunction(f.n, f.domain_length, std::move(out));
}

// ---------------------------------------------------------------------------
// Monte Carlo route: S(t)f = E[ T(E(t)) f ]

struct ScalarEstimate {
  double value = 0.0;
  double stderr_value = 0.0;
};

inline ScalarEstimate subordinate_apply_mc(const SubordinatorSpec& spec,
                                           const EigenMode& mode, double t,
                                           const MonteCarloOptions& mc) {
  if (mc.n_paths < 1000)
    throw std::invalid_argument("subordinate_apply_mc: n_paths must be >= 1e3");
  const std::size_t block = 4096;
  const std::size_t n_blocks = (mc.n_paths + block - 1) / block;
  std::vector<long double> sum(n_blocks), sumsq(n_blocks);
  parallel_for(n_blocks, mc.threads, [&](std::size_t b) {
    long double s1 = 0.0L, s2 = 0.0L;
    const std::size_t lo = b * block;
    const std::size_t hi = std::min(mc.n_paths, lo + block);
    for (std::size_t p = lo; p < hi; ++p) {
      RandomStream stream(mc.seed, p);
      const double e = sample_inverse(spec, t, stream);
      const double v = std::exp(-mode.lambda * e);
      s1 += v;
      s2 += static_cast<long double>(v) * v;
    }
    sum[b] = s1;
    sumsq[b] = s2;
  });
  long double s1 = 0.0L, s2 = 0.0L;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    s1 += sum[b];
    s2 += sumsq[b];
  }
  const long double n = static_cast<long double>(mc.n_paths);
  const long double mean = s1 / n;
  const long double var = std::max(0.0L, s2 / n - mean * mean);
  return {mode.amplitude * static_cast<double>(mean),
          std::abs(mode.amplitude) * static_cast<double>(std::sqrt(var / n))};
}

struct FieldEstimate {
  GridFunction mean;
  std::vector<double> stderr_values;
};

inline FieldEstimate subordinate_apply_mc(const SubordinatorSpec& spec,
                                          const FractionalLaplacianOp& op,
                                          const GridFunction& f, double t,
                                          const MonteCarloOptions& mc) {
  if (mc.n_paths < 1000)
    throw std::invalid_argument("subordinate_apply_mc: n_paths must be >= 1e3");
  op.check_grid(f);
  std::vector<std::complex<double>> fhat(f.n);
  for (std::size_t i = 0; i < f.n; ++i) fhat[i] = f.values[i];
  fft(fhat);
  const auto lam = op.symbol();

  const std::size_t block = 1024;
  const std::size_t n_blocks = (mc.n_paths + block - 1) / block;
  std::vector<std::vector<long double>> sum(n_blocks), sumsq(n_blocks);
  parallel_for(n_blocks, mc.threads, [&](std::size_t b) {
    sum[b].assign(f.n, 0.0L);
    sumsq[b].assign(f.n, 0.0L);
    std::vector<std::complex<double>> hat(f.n);
    const std::size_t lo = b * block;
    const std::size_t hi = std::min(mc.n_paths, lo + block);
    for (std::size_t p = lo; p < hi; ++p) {
      RandomStream stream(mc.seed, p);
      const double e = sample_inverse(spec, t, stream);
      for (std::size_t k = 0; k < f.n; ++k)
        hat[k] = fhat[k] * std::exp(-lam[k] * e);
      fft(hat, true);
      for (std::size_t i = 0; i < f.n; ++i) {
        const double v = hat[i].real();
        sum[b][i] += v;
        sumsq[b][i] += static_cast<long double>(v) * v;
      }
    }
  });

  std::vector<double> mean(f.n), se(f.n);
  const long double n = static_cast<long double>(mc.n_paths);
  for (std::size_t i = 0; i < f.n; ++i) {
    long double s1 = 0.0L, s2 = 0.0L;
    for (std::size_t b = 0; b < n_blocks; ++b) {
      s1 += sum[b][i];
      s2 += sumsq[b][i];
    }
    const long double m = s1 / n;
    const long double var = std::max(0.0L, s2 / n - m * m);
    mean[i] = static_cast<double>(m);
    se[i] = static_cast<double>(std::sqrt(var / n));
  }
  return {GridFunction(f.n, f.domain_length, std::move(mean)), std::move(se)};
}

// ---------------------------------------------------------------------------
// Trace assembly (CLI surface)

enum class SolveMethod { talbot, quadrature, mc };

struct EigenProblem {
  EigenMode mode;
};

struct FieldProblem {
  FractionalLaplacianOp op;
  GridFunction initial;
};

using Problem = std::variant<EigenProblem, FieldProblem>;

// Time series of solution values; scalar problems store one value per t.
struct SolutionTrace {
  std::vector<double> t_grid;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> stderr_values;  // empty unless mc
  std::string method;
};

inline SolutionTrace solve_trace(const SubordinatorSpec& spec,
                                 const Problem& problem,
                                 const std::vector<double>& t_grid,
                                 SolveMethod method, const SolveOptions& opt,
                                 const MonteCarloOptions& mc) {
  SolutionTrace trace;
  trace.t_grid = t_grid;
  // fields have no transform-inversion form; they fall back to quadrature
  const bool field_talbot = std::holds_alternative<FieldProblem>(problem) &&
                            method == SolveMethod::talbot;
  trace.method = method == SolveMethod::mc ? "mc"
                 : (method == SolveMethod::quadrature || field_talbot)
                     ? "quadrature"
                     : "talbot-mode";
  for (double t : t_grid) {
    if (const auto* eigen = std::get_if<EigenProblem>(&problem)) {
      if (method == SolveMethod::talbot) {
        trace.values.push_back({eigen->mode.amplitude *
                                mode_solution(spec, eigen->mode.lambda, t,
                                              opt.talbot_nodes)});
      } else if (method == SolveMethod::quadrature) {
        trace.values.push_back({subordinate_apply(spec, eigen->mode, t, opt)});
      } else {
        const auto est = subordinate_apply_mc(spec, eigen->mode, t, mc);
        trace.values.push_back({est.value});
        trace.stderr_values.push_back({est.stderr_value});
      }
    } else {
      const auto& field = std::get<FieldProblem>(problem);
      if (method == SolveMethod::mc) {
        auto est = subordinate_apply_mc(spec, field.op, field.initial, t, mc);
        trace.values.push_back(std::move(est.mean.values));
        trace.stderr_values.push_back(std::move(est.stderr_values));
      } else {
        // talbot has no field form; quadrature is the deterministic route
        auto u = subordinate_apply(spec, field.op, field.initial, t, opt);
        trace.values.push_back(std::move(u.values));
      }
    }
  }
  return trace;
}

}  // namespace dofc
