// Acceptance suite: one check per numbered criterion, each printing a
// single PASS/FAIL line with the measured quantities and its runtime.
// Exit status is the number of failed criteria. Usage:
//   dofc_acceptance        run everything
//   dofc_acceptance N      run criterion N only

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "dofc/config.hpp"
#include "dofc/ctrw.hpp"
#include "dofc/fft.hpp"
#include "dofc/fraccalc.hpp"
#include "dofc/runner.hpp"
#include "dofc/solver.hpp"
#include "dofc/special.hpp"
#include "dofc/subordinate.hpp"

namespace {

using dofc::DistributedOrderMeasure;
using dofc::EigenMode;
using dofc::MonteCarloOptions;
using dofc::RandomStream;
using dofc::SubordinatorSpec;

constexpr int kThreads = 2;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

SubordinatorSpec atom_mu1(double beta) {
  return SubordinatorSpec(DistributedOrderMeasure::from_mu_weights({{beta, 1.0}}));
}

SubordinatorSpec two_term_spec() {
  return SubordinatorSpec(
      DistributedOrderMeasure::from_mu_weights({{0.4, 1.0}, {0.8, 1.0}}));
}

// 1. Talbot mode solutions against the Mittag-Leffler oracle, relative 1e-8.
bool criterion_1(std::string& detail) {
  double worst = 0.0;
  for (double beta : {0.3, 0.5, 0.8}) {
    const auto spec = atom_mu1(beta);
    for (double lambda : {0.5, 1.0, 2.0}) {
      for (int i = 0; i < 20; ++i) {
        const double t = 0.01 * std::pow(1000.0, i / 19.0);
        const double reference =
            dofc::mittag_leffler(beta, -lambda * std::pow(t, beta));
        const double computed = dofc::mode_solution(spec, lambda, t);
        worst = std::max(worst,
                         std::abs(computed - reference) / std::abs(reference));
      }
    }
  }
  detail = "max relative error " + fmt(worst);
  return worst <= 1e-8;
}

// 2. Three routes on the two-term problem: transform inversion, density
// quadrature, Monte Carlo.
bool criterion_2(std::string& detail) {
  const auto spec = two_term_spec();
  double worst_det = 0.0, worst_mc_sigmas = 0.0;
  for (double t : {0.1, 1.0, 5.0}) {
    const double talbot = dofc::two_term_mode_solution(1.0, 0.4, 1.0, 0.8, 1.0, t);
    const double quad = dofc::subordinate_apply(spec, EigenMode(1.0, 1.0), t);
    worst_det = std::max(worst_det, std::abs(quad - talbot) / std::abs(talbot));

    MonteCarloOptions mc;
    mc.n_paths = 100000;
    mc.seed = 2025;
    mc.threads = kThreads;
    const auto est = dofc::subordinate_apply_mc(spec, EigenMode(1.0, 1.0), t, mc);
    worst_mc_sigmas = std::max(
        worst_mc_sigmas, std::abs(est.value - talbot) / est.stderr_value);
  }
  detail = "deterministic rel " + fmt(worst_det) + ", mc " +
           fmt(worst_mc_sigmas) + " sigma";
  return worst_det <= 1e-4 && worst_mc_sigmas <= 4.0;
}

// 3. Governing-equation residuals for the two-term case and a 10-atom
// discretized-uniform measure, with observed order under two halvings.
bool criterion_3(std::string& detail) {
  bool ok = true;
  std::ostringstream ss;
  {
    const auto study = dofc::residual_study(two_term_spec(), 1.0, 1e-3, 0.1, 5.0, 3);
    const double r = study.reports.front().max_residual;
    const double order = *std::min_element(study.orders.begin(), study.orders.end());
    ss << "two-term residual " << r << " order " << order;
    ok = ok && r <= 5e-3 && order >= 1.0;
  }
  {
    const auto uniform =
        SubordinatorSpec(dofc::discretize([](double) { return 1.0; }, 10));
    const auto study = dofc::residual_study(uniform, 1.0, 1e-3, 0.1, 5.0, 3);
    const double r = study.reports.front().max_residual;
    const double order = *std::min_element(study.orders.begin(), study.orders.end());
    ss << "; uniform-10 residual " << r << " order " << order;
    ok = ok && r <= 5e-3 && order >= 1.0;
  }
  detail = ss.str();
  return ok;
}

// 4. Density duality: transform route vs Levy-tail Monte Carlo, and the
// table mass.
bool criterion_4(std::string& detail) {
  const auto spec = atom_mu1(0.5);
  const auto table = dofc::inverse_density(spec, 1.0);
  MonteCarloOptions mc;
  mc.n_paths = 1000000;
  mc.seed = 4;
  mc.threads = kThreads;
  const auto sampled = dofc::inverse_density_mc(spec, 1.0, table.l_grid, mc);
  double worst_gap = -std::numeric_limits<double>::infinity();
  bool pointwise = true;
  for (std::size_t i = 0; i < table.l_grid.size(); ++i) {
    const double tol = std::max(3.0 * sampled.stderr_values[i], 0.01);
    const double gap = std::abs(sampled.values[i] - table.values[i]);
    worst_gap = std::max(worst_gap, gap - tol);
    pointwise = pointwise && gap <= tol;
  }
  const double mass = table.trapezoid_mass();
  detail = "worst pointwise slack " + fmt(-worst_gap) + ", mass " +
           fmt(mass);
  return pointwise && std::abs(mass - 1.0) <= 1e-4;
}

// 5. Mean of the inverse subordinator against the transform of 1/(s psi(s)).
bool criterion_5(std::string& detail) {
  const auto spec = atom_mu1(0.5);
  const double oracle = dofc::inverse_mean(spec, 1.0);  // = 2/sqrt(pi)
  const std::size_t n = 1000000;
  const std::size_t block = 4096;
  const std::size_t n_blocks = (n + block - 1) / block;
  std::vector<long double> sums(n_blocks), sumsqs(n_blocks);
  dofc::parallel_for(n_blocks, kThreads, [&](std::size_t b) {
    long double s1 = 0.0L, s2 = 0.0L;
    for (std::size_t p = b * block; p < std::min(n, (b + 1) * block); ++p) {
      RandomStream stream(5, p);
      const double v = dofc::sample_inverse(spec, 1.0, stream);
      s1 += v;
      s2 += static_cast<long double>(v) * v;
    }
    sums[b] = s1;
    sumsqs[b] = s2;
  });
  long double s1 = 0.0L, s2 = 0.0L;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    s1 += sums[b];
    s2 += sumsqs[b];
  }
  const double mean = static_cast<double>(s1 / n);
  const double var = static_cast<double>(s2 / n) - mean * mean;
  const double se = std::sqrt(var / n);
  const double sigmas = std::abs(mean - oracle) / se;
  detail = "mean " + fmt(mean) + " vs " + fmt(oracle) +
           " (" + fmt(sigmas) + " sigma), oracle-closed gap " +
           fmt(std::abs(oracle - 2.0 / std::sqrt(3.14159265358979323846)));
  return sigmas <= 3.0;
}

// 6. Inverse scaling law E(2t) = 2^beta E(t) in distribution.
bool criterion_6(std::string& detail) {
  const auto report = dofc::scaling_check(0.5, 2.0, 1.0, 100000, 6, kThreads);
  detail = "ks " + fmt(report.statistic);
  return report.statistic <= 0.02;
}

// 7. CTRW convergence: KS at c = 1e4 plus a strictly decreasing median KS
// over c in {1e2, 1e3, 1e4}.
bool criterion_7(std::string& detail) {
  const auto nu = DistributedOrderMeasure({{0.3, 0.5}, {0.7, 0.5}});
  const auto spec = SubordinatorSpec(nu);

  std::vector<double> reference(10000);
  for (std::size_t i = 0; i < reference.size(); ++i) {
    RandomStream stream(7, i);
    reference[i] = dofc::sample_inverse(spec, 1.0, stream);
  }
  const dofc::CtrwConfig config(nu, 1e4, 1.0);
  const auto counts = dofc::ctrw_scaled_counts(config, 10000, 77, kThreads);
  const double ks = dofc::ks_distance(counts, reference);

  // paired design: each repetition draws one fresh reference sample and
  // compares all three scales against it, so the c-ordering is not masked
  // by reference noise
  const std::size_t n_rep = 10000;
  std::vector<std::vector<double>> stats(3);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> ref(n_rep);
    dofc::parallel_for(n_rep, kThreads, [&](std::size_t i) {
      RandomStream stream(7000 + rep, i);
      ref[i] = dofc::sample_inverse(spec, 1.0, stream);
    });
    const double cs[3] = {1e2, 1e3, 1e4};
    for (int k = 0; k < 3; ++k) {
      const dofc::CtrwConfig cc(nu, cs[k], 1.0);
      stats[k].push_back(dofc::ks_distance(
          dofc::ctrw_scaled_counts(cc, n_rep, 700 + rep, kThreads), ref));
    }
  }
  std::vector<double> medians;
  for (auto& s : stats) {
    std::sort(s.begin(), s.end());
    medians.push_back(0.5 * (s[9] + s[10]));
  }
  detail = "ks@1e4 " + fmt(ks) + ", medians " +
           fmt(medians[0]) + " > " + fmt(medians[1]) +
           " > " + fmt(medians[2]);
  return ks <= 0.05 && medians[1] < medians[0] && medians[2] < medians[1];
}

// 8. Field-level check: gamma = 1.5 fractional Laplacian under a beta = 0.7
// time change matches the per-mode Mittag-Leffler reconstruction.
bool criterion_8(std::string& detail) {
  const std::size_t n = 256;
  const double length = 20.0, beta = 0.7, gamma = 1.5;
  const auto spec = atom_mu1(beta);
  const dofc::FractionalLaplacianOp op(gamma, n, length);
  const auto f = dofc::make_gaussian_bump(n, length, 10.0, 1.0);

  double worst = 0.0;
  bool bounded = true;
  for (double t : {0.5, 2.0}) {
    const auto u = dofc::subordinate_apply(spec, op, f, t);
    std::vector<std::complex<double>> hat(n);
    for (std::size_t i = 0; i < n; ++i) hat[i] = f.values[i];
    dofc::fft(hat);
    const auto lam = op.symbol();
    for (std::size_t k = 0; k < n; ++k)
      hat[k] *= dofc::mittag_leffler(beta, -lam[k] * std::pow(t, beta));
    dofc::fft(hat, true);
    double diff = 0.0, ref_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diff = std::max(diff, std::abs(u.values[i] - hat[i].real()));
      ref_norm = std::max(ref_norm, std::abs(hat[i].real()));
    }
    worst = std::max(worst, diff / ref_norm);
    bounded = bounded && u.max_norm() <= f.max_norm() * (1.0 + 1e-12);
  }
  detail = "max relative max-norm error " + fmt(worst) +
           (bounded ? ", norm bounded" : ", NORM GREW");
  return worst <= 1e-4 && bounded;
}

// 9. Fractional-calculus unit oracles.
bool criterion_9(std::string& detail) {
  const double dt = 1e-4;
  std::vector<double> linear;
  for (double t = 0.0; t <= 1.0 + 0.5 * dt; t += dt) linear.push_back(t);
  const dofc::TimeSeries u_linear(dt, std::move(linear));
  const double caputo_val = dofc::caputo(u_linear, 0.5).samples.back();
  const double caputo_ref = 1.0 / dofc::gamma_fn(1.5);
  const double caputo_err = std::abs(caputo_val - caputo_ref);

  const double dt2 = 1e-3;
  std::vector<double> shifted;
  for (double t = 0.0; t <= 2.0 + 0.5 * dt2; t += dt2)
    shifted.push_back(1.0 + t * t);
  const dofc::TimeSeries u_shifted(dt2, std::move(shifted));
  const auto rl = dofc::riemann_liouville(u_shifted, 0.5);
  const auto cap = dofc::caputo(u_shifted, 0.5);
  double relation_err = 0.0;
  for (std::size_t j = 0; j < rl.size(); ++j) {
    const double t = (j + 1) * dt2;
    if (t < 0.1) continue;
    const double singular =
        std::pow(t, -0.5) * u_shifted.samples[0] / dofc::gamma_fn(0.5);
    relation_err = std::max(
        relation_err, std::abs(rl.samples[j] - cap.samples[j] - singular));
  }
  detail = "caputo error " + fmt(caputo_err) + ", relation error " +
           fmt(relation_err);
  return caputo_err <= 1e-3 && relation_err <= 2e-3;
}

// 10. Byte-identical artifacts for identical config and seed, across thread
// counts.
bool criterion_10(std::string& detail) {
  const char* text = R"({
    "measure": {"atoms": [{"beta": 0.4, "mu_weight": 1.0},
                           {"beta": 0.8, "mu_weight": 1.0}]},
    "problem": {"eigen": {"lambda": 1.0}},
    "numeric": {"t_grid": [0.1, 1.0, 5.0], "mc_paths": 20000},
    "method": "mc",
    "seed": 10
  })";
  auto parsed = dofc::parse_config(text);
  if (!parsed.ok()) {
    detail = "config did not parse";
    return false;
  }
  const auto out_dir =
      (std::filesystem::temp_directory_path() / "dofc_acceptance_det").string();
  const auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::vector<std::string> csvs, manifests;
  for (int threads : {1, 2, 3}) {
    auto config = *parsed.config;
    config.subcommand = "solve";
    config.threads = threads;
    config.out_dir = out_dir;
    const auto artifacts = dofc::run_scenario(config);
    csvs.push_back(slurp(artifacts.files[0]));
    manifests.push_back(slurp(artifacts.files[1]));
  }
  const bool same = csvs[0] == csvs[1] && csvs[1] == csvs[2] &&
                    manifests[0] == manifests[1] && manifests[1] == manifests[2];
  detail = same ? "csv and manifest bytes identical for threads {1,2,3}"
                : "outputs differ across reruns";
  return same;
}

struct Criterion {
  int id;
  const char* label;
  double time_limit;
  std::function<bool(std::string&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "mittag-leffler cross-validation", 5.0, criterion_1},
      {2, "three-route agreement", 60.0, criterion_2},
      {3, "governing-equation residual", 120.0, criterion_3},
      {4, "density duality", 60.0, criterion_4},
      {5, "inverse-subordinator moment", 30.0, criterion_5},
      {6, "scaling law", 20.0, criterion_6},
      {7, "ctrw convergence", 120.0, criterion_7},
      {8, "fractional-laplacian field check", 30.0, criterion_8},
      {9, "fractional-calculus oracles", 5.0, criterion_9},
      {10, "determinism", 30.0, criterion_10},
  };

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (only != 0 && criterion.id != only) continue;
    std::string detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
      ok = false;
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const bool in_time = elapsed < criterion.time_limit;
    if (!in_time) detail += " [exceeded " + std::to_string(criterion.time_limit) + " s]";
    const bool pass = ok && in_time;
    std::printf("[%s] criterion %2d (%s): %s (%.2f s)\n",
                pass ? "PASS" : "FAIL", criterion.id, criterion.label,
                detail.c_str(), elapsed);
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  return failures;
}
