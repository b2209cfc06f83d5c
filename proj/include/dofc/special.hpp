#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dofc/gamma.hpp"
#include "dofc/quad.hpp"

namespace dofc {
namespace detail {

// Taylor series sum_k z^k / Gamma(alpha k + 1). Returns false when the
// alternating terms grow past term_cap: past that point the cancellation has
// already eaten the digits a double can carry, so the caller must switch to
// the integral representation.
inline bool ml_series(double alpha, double z, double& out,
                      double term_cap = 1e4) {
  long double sum = 0.0L;
  double max_term = 0.0;
  const double abs_z = std::abs(z);
  const double log_abs_z = abs_z > 0.0 ? std::log(abs_z) : 0.0;
  for (int k = 0; k < 400; ++k) {
    const double log_term = k * log_abs_z - log_gamma(alpha * k + 1.0);
    const double mag = std::exp(log_term);
    max_term = std::max(max_term, mag);
    if (max_term > term_cap) return false;
    const double term = (z < 0.0 && (k & 1)) ? -mag : mag;
    sum += term;
    if (mag < 1e-18 && alpha * k + 1.0 > 2.0) {
      out = static_cast<double>(sum);
      return true;
    }
  }
  return false;
}

// Integral representation on the completely monotone branch, z = -x, x > 0:
//   E_alpha(-x) = sin(alpha pi)/(pi alpha) *
//                 1/x * Int_0^inf exp(-w^{1/alpha}) / D(w/x) dw,
// D(v) = v^2 + 2 v cos(alpha pi) + 1. Smooth, positive domain, no branch
// issues; handles the argument range where the series cancels catastrophically.
inline double ml_integral(double alpha, double x) {
  const double pi = 3.14159265358979323846;
  const double c = std::cos(alpha * pi);
  const double pref = std::sin(alpha * pi) / (pi * alpha) / x;
  const auto integrand = [&](double w) {
    const double v = w / x;
    const double denom = v * v + 2.0 * v * c + 1.0;
    const double e = std::pow(w, 1.0 / alpha);
    return e > 700.0 ? 0.0 : std::exp(-e) / denom;
  };
  // exp(-w^{1/alpha}) is below 1e-20 past w = 46^alpha. Breakpoints mark the
  // two places the integrand has structure the top-level quadrature panels
  // could straddle: the D(w/x) crossover near w ~ x, and (for alpha > 1/2)
  // the Lorentzian dip of D near w = |c| x of width x sin(alpha pi).
  const double w_exp = std::pow(46.0, alpha);
  std::vector<double> cuts = {0.0, w_exp};
  for (double m : {0.25, 1.0, 4.0}) {
    const double w = m * x;
    if (w > 0.0 && w < w_exp) cuts.push_back(w);
  }
  if (c < 0.0) {
    const double dip = -c * x;
    const double width = x * std::sqrt(1.0 - c * c);
    for (double w : {dip - 3.0 * width, dip, dip + 3.0 * width})
      if (w > 0.0 && w < w_exp) cuts.push_back(w);
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate(integrand, cuts[i], cuts[i + 1], 1e-16, 5e-14);
  return pref * total;
}

// Zolotarev's function for one-sided stable laws with transform e^{-s^beta}:
//   A(u) = sin((1-beta) u) sin(beta u)^{beta/(1-beta)} / sin(u)^{1/(1-beta)}.
inline double stable_zolotarev_a(double beta, double u) {
  const double b1 = beta / (1.0 - beta);
  return std::exp(std::log(std::sin((1.0 - beta) * u)) +
                  b1 * std::log(std::sin(beta * u)) -
                  (1.0 + b1) * std::log(std::sin(u)));
}

}  // namespace detail

// Mittag-Leffler E_alpha(z) for alpha in (0,1], z <= 0. Series while the
// terms stay small enough to sum in doubles (never past |z| = 5), integral
// representation otherwise.
inline double mittag_leffler(double alpha, double z) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("mittag_leffler: alpha outside (0,1]");
  if (!(z <= 0.0))
    throw std::domain_error("mittag_leffler: z must be <= 0");
  if (z == 0.0) return 1.0;
  if (alpha == 1.0) return std::exp(z);
  if (std::abs(z) <= 5.0) {
    double value;
    if (detail::ml_series(alpha, z, value)) return value;
  }
  return detail::ml_integral(alpha, -z);
}

// Density g_beta(x) of the unit one-sided stable law D(1),
// E[exp(-s D(1))] = exp(-s^beta), via the Zolotarev single-integral form
//   g(x) = beta/(1-beta) x^{-1/(1-beta)} (1/pi) Int_0^pi A(u) e^{-A(u) y} du,
// y = x^{-beta/(1-beta)}.
inline double stable_density(double beta, double x) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("stable_density: beta outside (0,1)");
  if (!(x > 0.0)) throw std::domain_error("stable_density: x must be positive");
  const double pi = 3.14159265358979323846;
  const double y = std::pow(x, -beta / (1.0 - beta));
  const auto integrand = [&](double u) {
    const double a = detail::stable_zolotarev_a(beta, u);
    const double e = a * y;
    return e > 700.0 ? 0.0 : a * std::exp(-e);
  };
  // A explodes at pi like (pi-u)^{-1/(1-beta)}; for small y the surviving
  // mass of A e^{-A y} concentrates against that endpoint, so it gets its
  // own panels.
  const double eps = 1e-12;
  double integral = 0.0;
  double lo = eps;
  for (double cut : {pi - 0.5, pi - 0.05, pi - 5e-4, pi - 5e-7, pi - eps}) {
    if (cut <= lo) continue;
    integral += integrate(integrand, lo, cut, 1e-300, 1e-12);
    lo = cut;
  }
  return beta / (1.0 - beta) * std::pow(x, -1.0 / (1.0 - beta)) * integral /
         pi;
}

// P(D(1) <= x) for the same law; shares A(u) with the density.
inline double stable_cdf(double beta, double x) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("stable_cdf: beta outside (0,1)");
  if (!(x > 0.0)) return 0.0;
  const double pi = 3.14159265358979323846;
  const double y = std::pow(x, -beta / (1.0 - beta));
  const auto integrand = [&](double u) {
    const double e = detail::stable_zolotarev_a(beta, u) * y;
    return e > 700.0 ? 0.0 : std::exp(-e);
  };
  const double eps = 1e-12;
  double integral = 0.0;
  double lo = eps;
  for (double cut : {pi - 0.5, pi - 0.05, pi - 5e-4, pi - 5e-7, pi - eps}) {
    if (cut <= lo) continue;
    integral += integrate(integrand, lo, cut, 1e-300, 1e-12);
    lo = cut;
  }
  return integral / pi;
}

}  // namespace dofc
