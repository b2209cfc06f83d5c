#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dofc/measures.hpp"
#include "dofc/parallel.hpp"
#include "dofc/rng.hpp"
#include "dofc/subordinate.hpp"

namespace dofc {

// Mixture CTRW: the order measure doubles as the mixing law of the waiting
// time exponent (weights normalized); c is the convergence scale parameter.
struct CtrwConfig {
  DistributedOrderMeasure nu;
  double c = 1.0;
  double horizon = 1.0;

  CtrwConfig(DistributedOrderMeasure nu_, double c_, double horizon_)
      : nu(std::move(nu_)), c(c_), horizon(horizon_) {
    if (!(c >= 1.0)) throw std::invalid_argument("CtrwConfig: c must be >= 1");
    if (!(horizon > 0.0))
      throw std::invalid_argument("CtrwConfig: horizon must be positive");
  }
};

// Draw B = beta_j with probability proportional to nu_weight_j, then
// J = (c U)^{-1/beta}, so that P(J > u | B = beta) = c^{-1} u^{-beta} on
// u >= c^{-1/beta}.
inline double sample_waiting_time(const DistributedOrderMeasure& nu, double c,
                                  RandomStream& stream) {
  if (!(c >= 1.0))
    throw std::invalid_argument("sample_waiting_time: c must be >= 1");
  const auto& atoms = nu.atoms();
  double beta = atoms.back().beta;
  if (atoms.size() > 1) {
    double pick = stream.uniform() * nu.total_nu_mass();
    for (const auto& a : atoms) {
      if (pick <= a.nu_weight) {
        beta = a.beta;
        break;
      }
      pick -= a.nu_weight;
    }
  }
  return std::pow(c * stream.uniform(), -1.0 / beta);
}

// Renewal count N_t^c = max{n : J_1 + ... + J_n <= t} by direct summation.
inline std::uint64_t count_jumps(const DistributedOrderMeasure& nu, double c,
                                 double t, RandomStream& stream) {
  std::uint64_t n = 0;
  double elapsed = 0.0;
  while (true) {
    elapsed += sample_waiting_time(nu, c, stream);
    if (elapsed > t) return n;
    ++n;
  }
}

// Rescaled counts c^{-1} N_t^c over an ensemble of paths, streams keyed by
// (seed, path index).
inline std::vector<double> ctrw_scaled_counts(const CtrwConfig& config,
                                              std::size_t n_paths,
                                              std::uint64_t seed,
                                              int threads = 1) {
  std::vector<double> out(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t p) {
    RandomStream stream(seed, p);
    out[p] = static_cast<double>(
                 count_jumps(config.nu, config.c, config.horizon, stream)) /
             config.c;
  });
  return out;
}

// Two-sample Kolmogorov-Smirnov statistic, sup |F_a - F_b|.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

// Asymptotic two-sample critical value at significance level alpha.
inline double ks_critical_value(std::size_t n, std::size_t m,
                                double alpha = 0.01) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(static_cast<double>(n + m) /
                       (static_cast<double>(n) * static_cast<double>(m)));
}

struct KsReport {
  double statistic = 0.0;
  double critical_value = 0.0;
  std::size_t n = 0;
  double median_a = 0.0;
  double median_b = 0.0;
  bool pass() const { return statistic <= critical_value; }
};

namespace detail {
inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
}  // namespace detail

// Checks the inverse scaling law E(c t) = c^beta E(t) in law on a single-atom
// spec: KS distance between draws of E(c_factor * t) and c_factor^beta times
// independent draws of E(t).
inline KsReport scaling_check(double beta, double c_factor, double t,
                              std::size_t n, std::uint64_t seed,
                              int threads = 1) {
  const SubordinatorSpec spec(
      DistributedOrderMeasure::from_mu_weights({{beta, 1.0}}));
  std::vector<double> a(n), b(n);
  parallel_for(n, threads, [&](std::size_t i) {
    RandomStream sa(seed, 2 * i);
    RandomStream sb(seed, 2 * i + 1);
    a[i] = sample_inverse(spec, c_factor * t, sa);
    b[i] = std::pow(c_factor, beta) * sample_inverse(spec, t, sb);
  });
  KsReport report;
  report.n = n;
  report.median_a = detail::median_of(a);
  report.median_b = detail::median_of(b);
  report.statistic = ks_distance(std::move(a), std::move(b));
  report.critical_value = ks_critical_value(n, n);
  return report;
}

}  // namespace dofc
