#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

#include "dofc/errors.hpp"
#include "dofc/measures.hpp"

namespace dofc {

// Principal-branch s^beta with an explicit branch-cut check. Every fractional
// power inside a transform goes through here so the branch choice is audited
// in one place.
template <typename Real>
std::complex<Real> complex_power(std::complex<Real> s, double beta) {
  if (s.imag() == Real(0) && s.real() <= Real(0))
    throw std::domain_error("complex_power: s on the branch cut (-inf, 0]");
  const Real r = std::abs(s);
  const Real theta = std::atan2(s.imag(), s.real());
  const Real mag = std::pow(r, static_cast<Real>(beta));
  const Real angle = static_cast<Real>(beta) * theta;
  return {mag * std::cos(angle), mag * std::sin(angle)};
}

template <typename Real>
std::complex<Real> psi_eval(const SubordinatorSpec& spec, std::complex<Real> s) {
  std::complex<Real> acc = 0.0;
  for (const auto& a : spec.measure().atoms())
    acc += static_cast<Real>(a.mu_weight) * complex_power(s, a.beta);
  return acc;
}

inline std::complex<double> SubordinatorSpec::psi(std::complex<double> s) const {
  std::complex<double> acc = 0.0;
  for (const auto& a : measure_.atoms())
    acc += a.mu_weight * complex_power(s, a.beta);
  return acc;
}

// A Laplace-domain function F(s), defined on the right half-plane and on
// inversion contours off the negative real axis. decay_order is advisory
// metadata (how fast F falls off at infinity). The scalar type is a template
// parameter: library-internal transforms run in long double so the Talbot
// sum is not limited by evaluation roundoff.
template <typename Real = double>
struct BasicTransform {
  std::function<std::complex<Real>(std::complex<Real>)> evaluator;
  double decay_order = 1.0;
};

using TransformHandle = BasicTransform<double>;
using TransformHandleL = BasicTransform<long double>;

struct TalbotResult {
  double value;
  double max_term;  // largest scaled |term|, for cancellation screening
};

// Fixed-Talbot inverse Laplace transform at time t: contour radius
// r = 2 M / (5 t), s(theta) = r theta (cot theta + i), theta_k = k pi / M.
// Summation and the exponential factor run in long double.
template <typename Real>
TalbotResult talbot_invert(const BasicTransform<Real>& F, double t, int nodes) {
  if (!(t >= 1e-8))
    throw std::domain_error("invert: t below 1e-8 is not supported");
  if (nodes < 8) throw std::invalid_argument("invert: nodes must be >= 8");
  const long double pi = 3.141592653589793238462643383279503L;
  const long double r = 2.0L * nodes / (5.0L * t);

  const auto eval = [&](std::complex<long double> s) -> std::complex<long double> {
    const std::complex<Real> sr(static_cast<Real>(s.real()),
                                static_cast<Real>(s.imag()));
    std::complex<Real> v;
    try {
      v = F.evaluator(sr);
    } catch (const std::exception& e) {
      throw InversionError("invert: evaluator failed at s=(" +
                           std::to_string(static_cast<double>(s.real())) + "," +
                           std::to_string(static_cast<double>(s.imag())) +
                           "): " + e.what());
    }
    if (!std::isfinite(static_cast<double>(v.real())) ||
        !std::isfinite(static_cast<double>(v.imag())))
      throw InversionError(
          "invert: evaluator returned non-finite value at s=(" +
          std::to_string(static_cast<double>(s.real())) + "," +
          std::to_string(static_cast<double>(s.imag())) + ")");
    return {static_cast<long double>(v.real()), static_cast<long double>(v.imag())};
  };

  // theta = 0 endpoint: s = r, weight 1/2.
  long double acc =
      0.5L * std::exp(r * static_cast<long double>(t)) *
      eval(std::complex<long double>(r, 0.0L)).real();
  long double max_term = std::fabs(acc);

  for (int k = 1; k < nodes; ++k) {
    const long double theta = pi * k / nodes;
    const long double cot = std::cos(theta) / std::sin(theta);
    const long double sigma = theta + (theta * cot - 1.0L) * cot;
    const std::complex<long double> s(r * theta * cot, r * theta);
    const std::complex<long double> ets =
        std::exp(std::complex<long double>(t * s.real(), t * s.imag()));
    const std::complex<long double> w(1.0L, sigma);
    const long double term = (ets * eval(s) * w).real();
    acc += term;
    max_term = std::max(max_term, std::fabs(term));
  }
  const long double scale = r / nodes;
  return {static_cast<double>(scale * acc),
          static_cast<double>(scale * max_term)};
}

template <typename Real>
double invert(const BasicTransform<Real>& F, double t, int nodes = 32) {
  return talbot_invert(F, t, nodes).value;
}

}  // namespace dofc
