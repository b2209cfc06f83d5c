#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dofc/errors.hpp"
#include "dofc/laplace.hpp"
#include "dofc/measures.hpp"
#include "dofc/parallel.hpp"
#include "dofc/quad.hpp"
#include "dofc/rng.hpp"

namespace dofc {

// Tabulated inverse-subordinator density f_{E(t)}(l) on an l-grid.
struct DensityTable {
  double t = 0.0;
  std::vector<double> l_grid;
  std::vector<double> values;
  std::string method;  // "talbot" | "levy-tail-mc"
  std::vector<double> stderr_values;

  double trapezoid_mass() const {
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < l_grid.size(); ++i)
      mass += 0.5 * (values[i] + values[i + 1]) * (l_grid[i + 1] - l_grid[i]);
    return mass;
  }
};

// One subordinator path restricted to a tau lattice.
struct PathSample {
  std::vector<double> tau_grid;
  std::vector<double> d_values;
  std::uint64_t seed = 0;
};

struct MonteCarloOptions {
  std::size_t n_paths = 10000;
  std::uint64_t seed = 0;
  int threads = 1;
};

// ---------------------------------------------------------------------------
// Sampling

// Kanter draw of the unit one-sided stable S, E[e^{-sS}] = e^{-s^beta}:
// S = (A(U) / W)^{(1-beta)/beta}, U uniform on (0, pi), W unit exponential,
// A the Zolotarev function.
inline double sample_stable_unit(double beta, RandomStream& stream) {
  const double pi = 3.14159265358979323846;
  const double u = pi * stream.uniform();
  const double w = stream.exponential();
  const double b1 = beta / (1.0 - beta);
  const double log_a = std::log(std::sin((1.0 - beta) * u)) +
                       b1 * std::log(std::sin(beta * u)) -
                       (1.0 + b1) * std::log(std::sin(u));
  return std::exp((1.0 - beta) / beta * (log_a - std::log(w)));
}

// One draw of the standard beta-stable subordinator at time t,
// D(t) = t^{1/beta} D(1) in law.
inline double sample_stable(double beta, double t, RandomStream& stream) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("sample_stable: beta outside (0,1)");
  if (!(t > 0.0)) throw std::domain_error("sample_stable: t must be positive");
  return std::pow(t, 1.0 / beta) * sample_stable_unit(beta, stream);
}

// One draw of the mixture subordinator D_psi(t) = sum_j (c_j t)^{1/beta_j} S_j.
inline double sample_mixture(const SubordinatorSpec& spec, double t,
                             RandomStream& stream) {
  if (!(t > 0.0)) throw std::domain_error("sample_mixture: t must be positive");
  double acc = 0.0;
  for (const auto& a : spec.measure().atoms())
    acc += std::pow(a.mu_weight * t, 1.0 / a.beta) *
           sample_stable_unit(a.beta, stream);
  return acc;
}

namespace detail {

// Solve sum_j nu_j x^{-beta_j} = target for x >= lo. In y = log x the
// function is convex and decreasing, so Newton from the left endpoint
// converges monotonically.
inline double invert_levy_tail(const SubordinatorSpec& spec, double target,
                               double lo) {
  const auto& atoms = spec.measure().atoms();
  double y = std::log(lo);
  for (int iter = 0; iter < 60; ++iter) {
    double h = -target, dh = 0.0;
    for (const auto& a : atoms) {
      const double term = a.nu_weight * std::exp(-a.beta * y);
      h += term;
      dh -= a.beta * term;
    }
    const double step = h / dh;
    y -= step;
    if (std::abs(step) < 1e-14) break;
  }
  return std::exp(y);
}

}  // namespace detail

// One draw of the inverse subordinator E(t) = inf{tau : D(tau) > t}.
//
// Single atom: exact through E(t) = (t / D(1))^beta in law. Mixture: exact
// first passage of the jump-truncated process. Jumps larger than the cutoff
// arrive at Poisson rate phi(cutoff, inf) with sizes drawn by inverting the
// Levy tail; the sub-cutoff jump sea is replaced by its exact mean drift, so
// the truncation preserves E[D(tau)]. A driftless subordinator crosses levels
// by jumps, which is why the walk below must carry the crossing jump instead
// of re-drawing it at a finer scale.
inline double sample_inverse(const SubordinatorSpec& spec, double t,
                             RandomStream& stream,
                             double jump_cutoff_rel = 1e-3) {
  if (!(t > 0.0)) throw std::domain_error("sample_inverse: t must be positive");
  const auto& atoms = spec.measure().atoms();
  if (atoms.size() == 1) {
    const auto& a = atoms.front();
    const double s = sample_stable_unit(a.beta, stream);
    return std::pow(t, a.beta) / (a.mu_weight * std::pow(s, a.beta));
  }
  const double cutoff = jump_cutoff_rel * t;
  const double rate = spec.levy_tail(cutoff);
  // mean of the omitted jumps: sum_j nu_j beta_j cutoff^{1-beta_j} / (1-beta_j)
  double drift = 0.0;
  for (const auto& a : atoms)
    drift += a.nu_weight * a.beta * std::pow(cutoff, 1.0 - a.beta) /
             (1.0 - a.beta);

  double tau = 0.0, d = 0.0;
  for (long iter = 0; iter < 100000000; ++iter) {
    const double wait = stream.exponential() / rate;
    if (d + drift * wait > t) return tau + (t - d) / drift;  // creeping part
    tau += wait;
    d += drift * wait;
    const double jump =
        detail::invert_levy_tail(spec, stream.uniform() * rate, cutoff);
    if (d + jump > t) return tau;  // crossing happens at the jump instant
    d += jump;
  }
  throw std::runtime_error("sample_inverse: first-passage walk did not cross");
}

// Simulate D_psi on a fixed tau lattice (independent increments).
inline PathSample simulate_path(const SubordinatorSpec& spec,
                                const std::vector<double>& tau_grid,
                                RandomStream& stream) {
  PathSample path;
  path.tau_grid = tau_grid;
  path.d_values.reserve(tau_grid.size());
  path.seed = stream.seed();
  double d = 0.0, prev_tau = 0.0;
  for (double tau : tau_grid) {
    if (tau < prev_tau)
      throw std::invalid_argument("simulate_path: tau grid must ascend");
    if (tau > prev_tau) d += sample_mixture(spec, tau - prev_tau, stream);
    path.d_values.push_back(d);
    prev_tau = tau;
  }
  return path;
}

// First passage time of a tabulated path above level t (linear in the lattice).
inline double inverse_from_path(const PathSample& path, double t) {
  for (std::size_t i = 0; i < path.d_values.size(); ++i)
    if (path.d_values[i] > t) return path.tau_grid[i];
  return path.tau_grid.back();
}

// ---------------------------------------------------------------------------
// Density via the transform route

// E[E_psi(t)], from inverting 1/(s psi(s)).
inline double inverse_mean(const SubordinatorSpec& spec, double t,
                           int nodes = 32) {
  TransformHandleL F{[&spec](std::complex<long double> s) {
    return 1.0L / (s * psi_eval<long double>(spec, s));
  }};
  return talbot_invert(F, t, nodes).value;
}

namespace detail {

struct TailBound {
  double bound = std::numeric_limits<double>::infinity();
  double sigma = 1.0;  // minimizing line abscissa
};

// Rigorous-in-spirit upper bound on |f_{E(t)}(l)| from the Bromwich integral
// taken in absolute value on vertical lines: used to justify clamping the
// density to zero where the Talbot sum has cancelled away all its digits.
// The minimizing abscissa doubles as the line for the oscillatory fallback.
inline TailBound density_tail_bound(const SubordinatorSpec& spec, double t,
                                    double l) {
  TailBound best;
  for (int k = 0; k < 14; ++k) {
    const double sigma = (1.0 / t) * std::pow(2.0, k);
    const auto integrand = [&](double y) {
      const std::complex<double> s(sigma, y);
      const std::complex<double> p = spec.psi(s);
      const double e = l * p.real();
      return e > 700.0 ? 0.0 : std::abs(p) / std::abs(s) * std::exp(-e);
    };
    // extend geometrically until segments stop contributing
    double total = 0.0, lo = 0.0, hi = std::max(1.0, sigma);
    for (int seg = 0; seg < 40; ++seg) {
      const double part = integrate(integrand, lo, hi, 1e-300, 1e-6, 4);
      total += part;
      if (part < 1e-6 * total && seg > 2) break;
      lo = hi;
      hi *= 2.0;
    }
    const double bound = std::exp(sigma * t) / 3.14159265358979323846 * total;
    if (bound < best.bound) best = {bound, sigma};
    if (sigma * t > 40.0) break;
  }
  return best;
}

// Direct oscillatory quadrature of the Bromwich integral on the line
// Re s = sigma:
//   f = (1/pi) Int_0^inf Re[ psi(s) e^{s t - l psi(s)} / s ] dy.
// The e^{-l psi} factor that wrecks the Talbot contour is pure decay here;
// the steepest-order atom controls the truncation point.
inline double bromwich_density(const SubordinatorSpec& spec, double t,
                               double l, double sigma) {
  const auto integrand = [&](double y) {
    const std::complex<double> s(sigma, y);
    const std::complex<double> p = spec.psi(s);
    const std::complex<double> e(sigma * t - l * p.real(),
                                 y * t - l * p.imag());
    if (e.real() > 690.0) throw InversionError("bromwich_density overflow");
    return (p * std::exp(e) / s).real();
  };
  const double period = 2.0 * 3.14159265358979323846 / t;
  double total = 0.0, lo = 0.0;
  double hi = std::max({sigma, period, 1.0});
  double abs_recent = std::numeric_limits<double>::infinity();
  for (int seg = 0; seg < 60 && abs_recent > 1e-18; ++seg) {
    const int splits = static_cast<int>(
        std::min(512.0, std::max(8.0, (hi - lo) / period * 4.0)));
    const double part = integrate(integrand, lo, hi, 1e-300, 1e-10, splits);
    total += part;
    const std::complex<double> s(sigma, hi);
    const std::complex<double> p = spec.psi(s);
    abs_recent = std::abs(p) / std::abs(s) *
                 std::exp(std::min(700.0, sigma * t - l * p.real()));
    lo = hi;
    hi *= 2.0;
  }
  return total / 3.14159265358979323846;
}

}  // namespace detail

struct DensityPoint {
  double value = 0.0;
  double err_estimate = 0.0;
  bool clamped = false;  // true when the far-tail bound justified writing 0
};

// Pointwise f_{E(t)}(l) by fixed-Talbot inversion of psi(s) e^{-l psi(s)} / s
// in t. The e^{-l psi} factor can grow on the left part of the contour; the
// summation tracks its largest term, and when cancellation has destroyed the
// digits the value is replaced by zero if a Bromwich bound shows the true
// density is negligible there. Otherwise the point is reported as failed.
//
// The bound is monotone decreasing in l, so once one level clamps every
// larger level clamps too; the evaluator caches that frontier because the
// bound costs far more than the inversion itself.
class DensityEvaluator {
 public:
  DensityEvaluator(const SubordinatorSpec& spec, double t, int nodes = 32)
      : spec_(&spec), t_(t), nodes_(nodes) {
    if (!(t > 0.0))
      throw std::domain_error("DensityEvaluator: t must be positive");
    scale_ = spec.levy_tail(t) + 1.0;
  }

  DensityPoint point(double l) const {
    if (l < 0.0) throw std::domain_error("density: l must be >= 0");
    if (l == 0.0) return {spec_->levy_tail(t_), 1e-15, false};
    if (l >= clamp_from_.load(std::memory_order_relaxed))
      return {0.0, clamp_threshold(), true};

    const SubordinatorSpec& spec = *spec_;
    TransformHandleL F{[&spec, l](std::complex<long double> s) {
      const auto p = psi_eval<long double>(spec, s);
      const auto e = -static_cast<long double>(l) * p;
      if (e.real() > 11000.0L) throw InversionError("density transform overflow");
      return p * std::exp(e) / s;
    }};

    // Trust is established only by agreement between two node counts: in
    // the e^{-l psi} growth regime the trapezoid can diverge smoothly, so
    // no a-priori roundoff model is sound.
    double err = std::numeric_limits<double>::infinity();
    try {
      const auto a = talbot_invert(F, t_, nodes_);
      const auto b = talbot_invert(F, t_, nodes_ + 12);
      const double diff = std::abs(a.value - b.value);
      err = std::max(diff, b.max_term * (nodes_ + 12) * 1e-18);
      if (diff <= std::max(1e-10 * scale_, 1e-7 * std::abs(b.value)))
        return {std::max(b.value, 0.0), err, false};
    } catch (const InversionError&) {
    }

    // The Talbot contour is untrustworthy here. A Bromwich line bound
    // decides whether the point is negligible outright; if not, the
    // oscillatory line integral computes it, validated by agreement across
    // two distinct lines.
    const auto tail = detail::density_tail_bound(*spec_, t_, l);
    if (tail.bound < clamp_threshold()) {
      double expected = clamp_from_.load(std::memory_order_relaxed);
      while (l < expected &&
             !clamp_from_.compare_exchange_weak(expected, l,
                                                std::memory_order_relaxed)) {
      }
      return {0.0, tail.bound, true};
    }
    try {
      const double v1 = detail::bromwich_density(*spec_, t_, l, tail.sigma);
      const double v2 =
          detail::bromwich_density(*spec_, t_, l, 1.6 * tail.sigma);
      const double diff = std::abs(v1 - v2);
      if (diff <= std::max(1e-10 * scale_, 1e-6 * std::abs(v2)))
        return {std::clamp(v2, 0.0, tail.bound), std::max(diff, 1e-12), false};
    } catch (const InversionError&) {
    }
    if (tail.bound <= 1e-5 * scale_) return {0.0, tail.bound, true};
    throw InversionError(
        "density: inversion failed at l=" + std::to_string(l) +
        " (error estimate " + std::to_string(err) + ", tail bound " +
        std::to_string(tail.bound) + ")");
  }

  double operator()(double l) const { return point(l).value; }

  double t() const { return t_; }
  const SubordinatorSpec& spec() const { return *spec_; }

 private:
  double clamp_threshold() const { return std::max(1e-12, 1e-7 * scale_); }

  const SubordinatorSpec* spec_;
  double t_;
  int nodes_;
  double scale_;
  mutable std::atomic<double> clamp_from_{
      std::numeric_limits<double>::infinity()};
};

inline DensityPoint density_point(const SubordinatorSpec& spec, double t,
                                  double l, int nodes = 32) {
  return DensityEvaluator(spec, t, nodes).point(l);
}

struct DensityGridOptions {
  int nodes = 32;           // Talbot nodes
  int grid_points = 400;    // points per unit of initial support
  double mass_target = 0.99;
  double tail_value_cap = 1e-6;  // extend until the last value drops below
  int max_extensions = 24;
};

// Tabulate f_{E(t)} on the given grid, or on an automatic grid starting at
// [0, 4 * mean] and extended geometrically until the trapezoid mass reaches
// mass_target and the last value is negligible.
inline DensityTable inverse_density(const SubordinatorSpec& spec, double t,
                                    std::vector<double> l_grid = {},
                                    const DensityGridOptions& opt = {}) {
  DensityTable table;
  table.t = t;
  table.method = "talbot";

  const bool auto_grid = l_grid.empty();
  if (auto_grid) {
    const double mean = std::max(inverse_mean(spec, t, opt.nodes), 1e-12);
    const double l_max = 4.0 * mean;
    const int n = opt.grid_points;
    l_grid.resize(n + 1);
    for (int i = 0; i <= n; ++i) l_grid[i] = l_max * i / n;
  } else {
    if (!std::is_sorted(l_grid.begin(), l_grid.end()) || l_grid.front() < 0.0)
      throw std::invalid_argument("inverse_density: grid must ascend from >= 0");
  }

  const DensityEvaluator density(spec, t, opt.nodes);
  table.l_grid = std::move(l_grid);
  table.values.resize(table.l_grid.size());
  for (std::size_t i = 0; i < table.l_grid.size(); ++i)
    table.values[i] = density(table.l_grid[i]);

  if (auto_grid) {
    const double h = table.l_grid.back() / (table.l_grid.size() - 1);
    for (int ext = 0; ext < opt.max_extensions; ++ext) {
      const bool mass_ok = table.trapezoid_mass() >= opt.mass_target;
      const bool tail_ok = table.values.back() < opt.tail_value_cap;
      if (mass_ok && tail_ok) break;
      const double lo = table.l_grid.back();
      const double hi = lo * 1.5;
      for (double l = lo + h; l <= hi + 0.5 * h; l += h) {
        table.l_grid.push_back(l);
        table.values.push_back(density(l));
      }
    }
  }
  return table;
}

// Monte Carlo density through the Levy-tail representation:
//   f_{E(t)}(l) = E[ phi(t - D(l), inf) ; D(l) <= t ].
// One stable vector per path serves every grid point: for fixed l,
// sum_j (c_j l)^{1/beta_j} S_j has the law of D(l). Accumulation is blocked
// so results are identical for any thread count.
inline DensityTable inverse_density_mc(const SubordinatorSpec& spec, double t,
                                       const std::vector<double>& l_grid,
                                       const MonteCarloOptions& mc) {
  if (mc.n_paths < 1000)
    throw std::invalid_argument("inverse_density_mc: n_paths must be >= 1e3");
  if (l_grid.empty() || !std::is_sorted(l_grid.begin(), l_grid.end()) ||
      l_grid.front() < 0.0)
    throw std::invalid_argument("inverse_density_mc: grid must ascend from >= 0");

  const std::size_t n_grid = l_grid.size();
  const std::size_t block = 4096;
  const std::size_t n_blocks = (mc.n_paths + block - 1) / block;
  const auto& atoms = spec.measure().atoms();

  // (c_j l)^(1/beta_j) is path-independent
  std::vector<double> scales(n_grid * atoms.size());
  for (std::size_t g = 0; g < n_grid; ++g)
    for (std::size_t j = 0; j < atoms.size(); ++j)
      scales[g * atoms.size() + j] =
          l_grid[g] > 0.0
              ? std::pow(atoms[j].mu_weight * l_grid[g], 1.0 / atoms[j].beta)
              : 0.0;

  std::vector<std::vector<long double>> sum(n_blocks),
      sumsq(n_blocks);
  parallel_for(n_blocks, mc.threads, [&](std::size_t b) {
    sum[b].assign(n_grid, 0.0L);
    sumsq[b].assign(n_grid, 0.0L);
    std::vector<double> stables(atoms.size());
    const std::size_t lo = b * block;
    const std::size_t hi = std::min(mc.n_paths, lo + block);
    for (std::size_t p = lo; p < hi; ++p) {
      RandomStream stream(mc.seed, p);
      for (std::size_t j = 0; j < atoms.size(); ++j)
        stables[j] = sample_stable_unit(atoms[j].beta, stream);
      for (std::size_t g = 0; g < n_grid; ++g) {
        double d = 0.0;
        for (std::size_t j = 0; j < atoms.size(); ++j)
          d += scales[g * atoms.size() + j] * stables[j];
        double v = 0.0;
        if (t - d > 1e-300) v = spec.levy_tail(t - d);
        sum[b][g] += v;
        sumsq[b][g] += static_cast<long double>(v) * v;
      }
    }
  });

  DensityTable table;
  table.t = t;
  table.method = "levy-tail-mc";
  table.l_grid = l_grid;
  table.values.resize(n_grid);
  table.stderr_values.resize(n_grid);
  const long double n = static_cast<long double>(mc.n_paths);
  for (std::size_t g = 0; g < n_grid; ++g) {
    long double s1 = 0.0L, s2 = 0.0L;
    for (std::size_t b = 0; b < n_blocks; ++b) {
      s1 += sum[b][g];
      s2 += sumsq[b][g];
    }
    const long double mean = s1 / n;
    const long double var = std::max(0.0L, s2 / n - mean * mean);
    table.values[g] = static_cast<double>(mean);
    table.stderr_values[g] = static_cast<double>(std::sqrt(var / n));
  }
  return table;
}

}  // namespace dofc
