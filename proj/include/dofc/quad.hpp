#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace dofc {

struct QuadRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre nodes and weights by Newton iteration on P_n.
inline QuadRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pi = 3.14159265358979323846;
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

// Composite Gauss-Legendre over [a, b] with p equal panels.
template <typename F>
double composite_gauss(F&& f, double a, double b, int panels, const QuadRule& rule) {
  if (!(b > a)) return 0.0;
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      acc += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    total += 0.5 * h * acc;
  }
  return total;
}

namespace detail {

// Gauss-Kronrod 7-15 pair (QUADPACK constants).
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0,
};
inline constexpr double kGK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
};
inline constexpr double kG7Weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
};

template <typename F>
inline void gk15(F&& f, double a, double b, double& kronrod, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fc = f(c);
  double k = kGK15Weights[7] * fc;
  double g = kG7Weights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double x = h * kGK15Nodes[i];
    const double f1 = f(c - x);
    const double f2 = f(c + x);
    k += kGK15Weights[i] * (f1 + f2);
    if (i % 2 == 1) g += kG7Weights[i / 2] * (f1 + f2);
  }
  kronrod = k * h;
  err = std::abs((k - g) * h);
}

template <typename F>
double adaptive_gk(F&& f, double a, double b, double abs_tol, double rel_tol,
                   int depth) {
  double value = 0.0, err = 0.0;
  gk15(f, a, b, value, err);
  if (err <= abs_tol || err <= rel_tol * std::abs(value) || depth >= 48 ||
      b - a < 1e-300)
    return value;
  const double c = 0.5 * (a + b);
  return adaptive_gk(f, a, c, 0.5 * abs_tol, rel_tol, depth + 1) +
         adaptive_gk(f, c, b, 0.5 * abs_tol, rel_tol, depth + 1);
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of f over the finite interval [a, b].
// The interval is pre-split so localized structure has a chance to register
// in the error estimate before adaptivity takes over; callers who know where
// their features live should still pass breakpoints explicitly.
template <typename F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-12,
                 double rel_tol = 1e-12, int pre_split = 8) {
  if (!(b > a)) return 0.0;
  double total = 0.0;
  const double h = (b - a) / pre_split;
  for (int i = 0; i < pre_split; ++i)
    total += detail::adaptive_gk(f, a + i * h, a + (i + 1) * h,
                                 abs_tol / pre_split, rel_tol, 0);
  return total;
}

}  // namespace dofc
