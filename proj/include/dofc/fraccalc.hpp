#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dofc/gamma.hpp"
#include "dofc/measures.hpp"
#include "dofc/solver.hpp"

namespace dofc {

// Uniformly sampled u(0), u(dt), u(2 dt), ...; u(0) doubles as the initial
// condition of the governing equation.
struct TimeSeries {
  double dt = 0.0;
  std::vector<double> samples;

  TimeSeries(double dt_, std::vector<double> samples_)
      : dt(dt_), samples(std::move(samples_)) {
    if (!(dt > 0.0)) throw std::invalid_argument("TimeSeries: dt must be positive");
    if (samples.size() < 3)
      throw std::invalid_argument("TimeSeries: need at least 3 samples");
  }

  std::size_t size() const { return samples.size(); }
};

// L1 scheme for the Caputo derivative of order beta in (0,1):
// piecewise-linear u, kernel (t-r)^{-beta}/Gamma(1-beta) integrated exactly.
// Output sample j approximates the derivative at t = (j+1) dt; the node at
// t = 0 is undefined for the scheme and omitted.
inline TimeSeries caputo(const TimeSeries& u, double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("caputo: beta outside (0,1)");
  const std::size_t K = u.size();
  const double q = 1.0 - beta;
  const double pref = std::pow(u.dt, -beta) / gamma_fn(2.0 - beta);

  std::vector<double> w(K - 1);  // w[m] = (m+1)^q - m^q
  for (std::size_t m = 0; m + 1 < K; ++m)
    w[m] = std::pow(m + 1.0, q) - std::pow(static_cast<double>(m), q);
  std::vector<double> du(K - 1);
  for (std::size_t j = 0; j + 1 < K; ++j) du[j] = u.samples[j + 1] - u.samples[j];

  std::vector<double> out(K - 1);
  for (std::size_t k = 1; k < K; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) acc += du[j] * w[k - 1 - j];
    out[k - 1] = pref * acc;
  }
  return TimeSeries(u.dt, std::move(out));
}

namespace detail {

// Product-trapezoid weights for the fractional integral of order 1-beta:
// integral over one step of sigma and (1-sigma) against (m+1-sigma)^{-beta}.
inline void rl_weights(double beta, std::size_t count, std::vector<double>& p0,
                       std::vector<double>& p1) {
  const double q = 1.0 - beta;
  p0.resize(count);
  p1.resize(count);
  for (std::size_t m = 0; m < count; ++m) {
    const double a = std::pow(m + 1.0, q) - std::pow(static_cast<double>(m), q);
    const double f1 = a / q;
    const double g = (m + 1.0) * f1 -
                     (std::pow(m + 1.0, q + 1.0) -
                      std::pow(static_cast<double>(m), q + 1.0)) /
                         (q + 1.0);
    p1[m] = g;
    p0[m] = f1 - g;
  }
}

}  // namespace detail

// Riemann-Liouville derivative: the order-(1-beta) fractional integral by
// product trapezoid, then a second-order time difference. Same output
// alignment as caputo (sample j is the derivative at t = (j+1) dt).
inline TimeSeries riemann_liouville(const TimeSeries& u, double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("riemann_liouville: beta outside (0,1)");
  const std::size_t K = u.size();
  const double q = 1.0 - beta;
  const double pref = std::pow(u.dt, q) / gamma_fn(1.0 - beta);

  std::vector<double> p0, p1;
  detail::rl_weights(beta, K - 1, p0, p1);

  std::vector<double> integral(K, 0.0);
  for (std::size_t k = 1; k < K; ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j)
      acc += p0[k - j] * u.samples[j - 1] + p1[k - j] * u.samples[j];
    integral[k] = pref * acc;
  }

  std::vector<double> out(K - 1);
  for (std::size_t k = 1; k + 1 < K; ++k)
    out[k - 1] = (integral[k + 1] - integral[k - 1]) / (2.0 * u.dt);
  out[K - 2] = (3.0 * integral[K - 1] - 4.0 * integral[K - 2] +
                integral[K - 3]) /
               (2.0 * u.dt);
  return TimeSeries(u.dt, std::move(out));
}

// Distributed-order derivative: weighted sum of Caputo derivatives over the
// atoms of mu.
inline TimeSeries distributed_derivative(const TimeSeries& u,
                                         const DistributedOrderMeasure& measure) {
  std::vector<double> acc;
  double dt = u.dt;
  for (const auto& atom : measure.atoms()) {
    const TimeSeries d = caputo(u, atom.beta);
    if (acc.empty()) acc.assign(d.size(), 0.0);
    for (std::size_t j = 0; j < d.size(); ++j)
      acc[j] += atom.mu_weight * d.samples[j];
  }
  return TimeSeries(dt, std::move(acc));
}

// Alternative form through the Riemann-Liouville derivative with the
// singular initial term removed per atom; agrees with the Caputo form on
// absolutely continuous inputs.
inline TimeSeries extended_distributed_derivative(
    const TimeSeries& u, const DistributedOrderMeasure& measure) {
  std::vector<double> acc;
  for (const auto& atom : measure.atoms()) {
    const TimeSeries d = riemann_liouville(u, atom.beta);
    if (acc.empty()) acc.assign(d.size(), 0.0);
    const double g = gamma_fn(1.0 - atom.beta);
    for (std::size_t j = 0; j < d.size(); ++j) {
      const double t = (j + 1) * u.dt;
      acc[j] += atom.mu_weight *
                (d.samples[j] - std::pow(t, -atom.beta) * u.samples[0] / g);
    }
  }
  return TimeSeries(u.dt, std::move(acc));
}

struct ResidualReport {
  double dt = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  double max_residual = 0.0;
  double argmax_t = 0.0;
};

// Max over the window of |D^(mu) h + lambda h| for a precomputed eigenmode
// trace h. The window starts away from 0 where the t^{-beta} singularity
// would dominate the scheme error.
inline ResidualReport residual(const SubordinatorSpec& spec, double lambda,
                               const TimeSeries& solution, double t_min,
                               double t_max) {
  if (!(solution.dt <= 1e-3 + 1e-15))
    throw std::invalid_argument("residual: needs dt <= 1e-3");
  if (!(t_min >= 0.1))
    throw std::invalid_argument("residual: needs t_min >= 0.1");
  if (!(t_max > t_min)) throw std::invalid_argument("residual: empty window");
  if ((solution.size() - 1) * solution.dt < t_max - 1e-12)
    throw std::invalid_argument("residual: series shorter than t_max");

  const TimeSeries d = distributed_derivative(solution, spec.measure());
  ResidualReport report;
  report.dt = solution.dt;
  report.t_min = t_min;
  report.t_max = t_max;
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double t = (j + 1) * solution.dt;
    if (t < t_min || t > t_max) continue;
    const double r = std::abs(d.samples[j] + lambda * solution.samples[j + 1]);
    if (r > report.max_residual) {
      report.max_residual = r;
      report.argmax_t = t;
    }
  }
  return report;
}

// Solve the eigenmode trace on a uniform grid via the transform route.
inline TimeSeries mode_solution_series(const SubordinatorSpec& spec,
                                       double lambda, double dt, double t_max,
                                       int talbot_nodes = 32) {
  const std::size_t K = static_cast<std::size_t>(std::round(t_max / dt)) + 1;
  std::vector<double> h(K);
  h[0] = 1.0;
  for (std::size_t k = 1; k < K; ++k)
    h[k] = mode_solution(spec, lambda, k * dt, talbot_nodes);
  return TimeSeries(dt, std::move(h));
}

struct ResidualStudy {
  std::vector<double> dts;
  std::vector<ResidualReport> reports;
  std::vector<double> orders;  // log2(R(dt) / R(dt/2))
};

// Residual of the computed solution at dt, dt/2, ..., with observed
// convergence orders between consecutive levels.
inline ResidualStudy residual_study(const SubordinatorSpec& spec,
                                    double lambda, double dt, double t_min,
                                    double t_max, int levels = 3,
                                    int talbot_nodes = 32) {
  ResidualStudy study;
  for (int level = 0; level < levels; ++level) {
    const double step = dt / std::pow(2.0, level);
    const TimeSeries h =
        mode_solution_series(spec, lambda, step, t_max, talbot_nodes);
    study.dts.push_back(step);
    study.reports.push_back(residual(spec, lambda, h, t_min, t_max));
  }
  for (int level = 0; level + 1 < levels; ++level)
    study.orders.push_back(
        std::log2(study.reports[level].max_residual /
                  study.reports[level + 1].max_residual));
  return study;
}

}  // namespace dofc
