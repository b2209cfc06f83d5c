#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dofc/gamma.hpp"
#include "dofc/quad.hpp"

namespace dofc {

// One atom of the order measure: nu is the mixing weight of the waiting-time
// law, mu = Gamma(1-beta) * nu is the weight entering the Laplace exponent.
struct MeasureAtom {
  double beta;
  double nu_weight;
  double mu_weight;
};

struct ValidationIssue {
  int atom_index;  // -1 for measure-level problems
  std::string message;
};

struct ValidationReport {
  bool valid = true;
  double finiteness_sum = 0.0;  // sum nu_j / (1 - beta_j)
  std::vector<ValidationIssue> issues;
};

// Betas are kept strictly inside (margin, 1 - margin): Gamma(1-beta) and the
// finiteness sum blow up at 1, stable sampling degenerates at 0.
inline constexpr double kBetaMargin = 1e-6;
inline constexpr double kDefaultFinitenessCap = 1e4;

class DistributedOrderMeasure {
 public:
  // Atoms given as (beta, nu_weight); sorted ascending, betas must be distinct.
  explicit DistributedOrderMeasure(std::vector<std::pair<double, double>> atoms) {
    if (atoms.empty())
      throw std::invalid_argument("DistributedOrderMeasure: no atoms");
    std::sort(atoms.begin(), atoms.end());
    atoms_.reserve(atoms.size());
    for (const auto& [beta, nu] : atoms) {
      if (!(beta >= kBetaMargin && beta <= 1.0 - kBetaMargin))
        throw std::invalid_argument(
            "DistributedOrderMeasure: beta outside (0,1) at beta=" +
            std::to_string(beta));
      if (!(nu > 0.0) || !std::isfinite(nu))
        throw std::invalid_argument(
            "DistributedOrderMeasure: nonpositive weight at beta=" +
            std::to_string(beta));
      atoms_.push_back({beta, nu, gamma_fn(1.0 - beta) * nu});
    }
    for (std::size_t i = 1; i < atoms_.size(); ++i)
      if (atoms_[i].beta == atoms_[i - 1].beta)
        throw std::invalid_argument(
            "DistributedOrderMeasure: duplicate beta=" +
            std::to_string(atoms_[i].beta));
  }

  // Construction from the exponent coefficients: weights are the mu values
  // c_i of psi(s) = sum c_i s^{beta_i} directly.
  static DistributedOrderMeasure from_mu_weights(
      const std::vector<std::pair<double, double>>& mu_atoms) {
    std::vector<std::pair<double, double>> nu_atoms;
    nu_atoms.reserve(mu_atoms.size());
    for (const auto& [beta, c] : mu_atoms)
      nu_atoms.emplace_back(beta, c / gamma_fn(1.0 - beta));
    return DistributedOrderMeasure(std::move(nu_atoms));
  }

  const std::vector<MeasureAtom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  double total_nu_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.nu_weight;
    return s;
  }
  double total_mu_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.mu_weight;
    return s;
  }

 private:
  std::vector<MeasureAtom> atoms_;
};

// Checks the constructor invariants plus the discrete finiteness condition
// sum nu_j / (1 - beta_j) <= cap. Reports every violation, never throws.
inline ValidationReport validate(const DistributedOrderMeasure& measure,
                                 double finiteness_cap = kDefaultFinitenessCap) {
  ValidationReport report;
  const auto& atoms = measure.atoms();
  if (atoms.empty()) {
    report.valid = false;
    report.issues.push_back({-1, "measure has no atoms"});
    return report;
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    if (!(a.beta >= kBetaMargin && a.beta <= 1.0 - kBetaMargin)) {
      report.valid = false;
      report.issues.push_back(
          {static_cast<int>(i), "beta outside (0,1): " + std::to_string(a.beta)});
      continue;
    }
    if (!(a.nu_weight > 0.0)) {
      report.valid = false;
      report.issues.push_back(
          {static_cast<int>(i), "nonpositive weight: " + std::to_string(a.nu_weight)});
      continue;
    }
    report.finiteness_sum += a.nu_weight / (1.0 - a.beta);
  }
  if (report.valid && !(report.finiteness_sum <= finiteness_cap)) {
    report.valid = false;
    report.issues.push_back(
        {-1, "finiteness sum " + std::to_string(report.finiteness_sum) +
                 " exceeds cap " + std::to_string(finiteness_cap)});
  }
  if (report.valid && !(measure.total_mu_mass() > 0.0)) {
    report.valid = false;
    report.issues.push_back({-1, "total mu mass not positive"});
  }
  return report;
}

// Validation-report variant for raw atom lists, so invalid inputs can be
// described without constructing the measure.
inline ValidationReport validate_atoms(
    const std::vector<std::pair<double, double>>& atoms,
    double finiteness_cap = kDefaultFinitenessCap) {
  ValidationReport report;
  if (atoms.empty()) {
    report.valid = false;
    report.issues.push_back({-1, "measure has no atoms"});
    return report;
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& [beta, nu] = atoms[i];
    if (!(beta >= kBetaMargin && beta <= 1.0 - kBetaMargin)) {
      report.valid = false;
      report.issues.push_back(
          {static_cast<int>(i), "beta outside (0,1): " + std::to_string(beta)});
      continue;
    }
    if (!(nu > 0.0) || !std::isfinite(nu)) {
      report.valid = false;
      report.issues.push_back(
          {static_cast<int>(i), "nonpositive weight: " + std::to_string(nu)});
      continue;
    }
    report.finiteness_sum += nu / (1.0 - beta);
  }
  for (std::size_t i = 1; i < atoms.size(); ++i)
    if (atoms[i].first == atoms[i - 1].first) {
      report.valid = false;
      report.issues.push_back(
          {static_cast<int>(i), "duplicate beta: " + std::to_string(atoms[i].first)});
    }
  if (report.valid && !(report.finiteness_sum <= finiteness_cap)) {
    report.valid = false;
    report.issues.push_back(
        {-1, "finiteness sum " + std::to_string(report.finiteness_sum) +
                 " exceeds cap " + std::to_string(finiteness_cap)});
  }
  return report;
}

// Reduce a continuous order density on (0,1) to a finite atom list using
// Gauss-Legendre nodes; total nu mass is preserved to quadrature order.
inline DistributedOrderMeasure discretize(
    const std::function<double(double)>& density, int n) {
  if (n < 1) throw std::invalid_argument("discretize: n must be >= 1");
  const QuadRule rule = gauss_legendre(n);
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double beta = 0.5 * (rule.nodes[i] + 1.0);
    const double value = density(beta);
    if (value < 0.0)
      throw std::invalid_argument("discretize: density negative at beta=" +
                                  std::to_string(beta));
    if (value == 0.0) continue;
    atoms.emplace_back(beta, 0.5 * rule.weights[i] * value);
  }
  return DistributedOrderMeasure(std::move(atoms));
}

// Subordinator with Laplace exponent psi(s) = sum_j mu_j s^{beta_j}.
// Pure-jump only: a nonzero drift would invalidate the density formulas used
// downstream, so it is rejected at construction.
class SubordinatorSpec {
 public:
  explicit SubordinatorSpec(DistributedOrderMeasure measure, double drift = 0.0)
      : measure_(std::move(measure)) {
    if (drift != 0.0)
      throw std::invalid_argument("SubordinatorSpec: drift must be 0");
  }

  const DistributedOrderMeasure& measure() const { return measure_; }
  double drift() const { return 0.0; }

  double psi(double s) const {
    if (!(s > 0.0)) throw std::domain_error("psi: s must be positive");
    double acc = 0.0;
    for (const auto& a : measure_.atoms()) acc += a.mu_weight * std::pow(s, a.beta);
    return acc;
  }

  std::complex<double> psi(std::complex<double> s) const;  // in laplace.hpp

  // Levy tail phi(t, infinity) = sum_j nu_j t^{-beta_j}; diverges at t -> 0.
  double levy_tail(double t) const {
    if (!(t > 0.0)) throw std::domain_error("levy_tail: t must be positive");
    double acc = 0.0;
    for (const auto& a : measure_.atoms()) acc += a.nu_weight * std::pow(t, -a.beta);
    return acc;
  }

  double beta_min() const { return measure_.atoms().front().beta; }
  double beta_max() const { return measure_.atoms().back().beta; }

 private:
  DistributedOrderMeasure measure_;
};

inline double psi_eval(const SubordinatorSpec& spec, double s) {
  return spec.psi(s);
}
inline double levy_tail(const SubordinatorSpec& spec, double t) {
  return spec.levy_tail(t);
}

}  // namespace dofc
