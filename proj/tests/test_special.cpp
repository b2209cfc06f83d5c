#include <catch2/catch.hpp>

#include <cmath>
#include <complex>

#include "dofc/gamma.hpp"
#include "dofc/laplace.hpp"
#include "dofc/quad.hpp"
#include "dofc/special.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

// Test-local oracle: plain Taylor sum in long double, usable where the terms
// stay tame. Independent of the implementation's branch logic.
double ml_series_oracle(double alpha, double z, int terms) {
  long double sum = 0.0L;
  for (int k = terms - 1; k >= 0; --k)
    sum += std::pow<long double>(z, k) /
           std::exp(static_cast<long double>(dofc::log_gamma(alpha * k + 1.0)));
  return static_cast<double>(sum);
}

// Test-local oracle: convergent large-x series for the one-sided stable
// density, g(x) = (1/pi) sum_{k>=1} (-1)^{k+1} Gamma(beta k + 1)/k!
//                 sin(pi beta k) x^{-beta k - 1}.
double stable_series_oracle(double beta, double x) {
  long double sum = 0.0L;
  for (int k = 1; k < 400; ++k) {
    const long double mag =
        std::exp(static_cast<long double>(dofc::log_gamma(beta * k + 1.0)) -
                 static_cast<long double>(dofc::log_gamma(k + 1.0)) -
                 (beta * k + 1.0) * std::log(static_cast<long double>(x)));
    const long double term =
        ((k & 1) ? 1.0L : -1.0L) * mag * std::sin(kPi * beta * k);
    sum += term;
    if (mag < 1e-22L && k > 8) break;
  }
  return static_cast<double>(sum / kPi);
}

}  // namespace

TEST_CASE("mittag-leffler base cases") {
  CHECK(dofc::mittag_leffler(1.0, -1.0) == Approx(std::exp(-1.0)).epsilon(1e-13));
  CHECK(dofc::mittag_leffler(0.37, 0.0) == 1.0);
  CHECK(dofc::mittag_leffler(0.9, 0.0) == 1.0);
  CHECK_THROWS_AS(dofc::mittag_leffler(0.0, -1.0), std::domain_error);
  CHECK_THROWS_AS(dofc::mittag_leffler(1.2, -1.0), std::domain_error);
  CHECK_THROWS_AS(dofc::mittag_leffler(0.5, 0.5), std::domain_error);
}

TEST_CASE("mittag-leffler half-order identity E_{1/2}(-x) = e^{x^2} erfc(x)") {
  // the identity itself is cross-checked by a 200-term series at x = 1
  const double identity = std::exp(1.0) * std::erfc(1.0);
  CHECK(ml_series_oracle(0.5, -1.0, 200) == Approx(identity).epsilon(1e-12));

  for (double x : {0.3, 1.0, 2.0, 4.0, 9.0}) {
    CHECK(dofc::mittag_leffler(0.5, -x) ==
          Approx(std::exp(x * x) * std::erfc(x)).epsilon(1e-10));
  }
  CHECK(dofc::mittag_leffler(0.5, -1.0) == Approx(0.4275836).margin(1e-7));
}

TEST_CASE("mittag-leffler series and integral branches agree") {
  // windows chosen so the series loses no digits (max term stays small)
  const struct {
    double alpha;
    double zmax;
  } windows[] = {{0.3, 1.5}, {0.5, 3.0}, {0.8, 5.0}};
  for (const auto& w : windows) {
    for (int i = 1; i <= 12; ++i) {
      const double z = -w.zmax * i / 12.0;
      double series = 0.0;
      REQUIRE(dofc::detail::ml_series(w.alpha, z, series));
      const double integral = dofc::detail::ml_integral(w.alpha, -z);
      CHECK(series == Approx(integral).margin(1e-10));
    }
  }
}

TEST_CASE("mittag-leffler trace is completely monotone in t") {
  for (double alpha : {0.3, 0.6, 0.95}) {
    std::vector<double> vals;
    for (int i = 0; i <= 200; ++i) {
      const double t = 0.01 + 0.05 * i;
      vals.push_back(dofc::mittag_leffler(alpha, -2.0 * std::pow(t, alpha)));
    }
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
      CHECK(vals[i + 1] <= vals[i]);
      CHECK(vals[i] > 0.0);
      CHECK(vals[i] <= 1.0);
    }
    for (std::size_t i = 1; i + 1 < vals.size(); ++i)
      CHECK(vals[i + 1] - 2.0 * vals[i] + vals[i - 1] >= -1e-12);  // convex
  }
}

TEST_CASE("stable density matches the half-order closed form") {
  // closed form (2 sqrt(pi))^{-1} x^{-3/2} e^{-1/(4x)}; itself verified by
  // numerically inverting exp(-sqrt(s)) at t = 1.
  const auto levy = [](double x) {
    return std::exp(-0.25 / x) / (2.0 * std::sqrt(kPi) * std::pow(x, 1.5));
  };
  dofc::TransformHandle lt{[](std::complex<double> s) {
    return std::exp(-dofc::complex_power(s, 0.5));
  }};
  CHECK(dofc::invert(lt, 1.0) == Approx(levy(1.0)).margin(1e-9));
  CHECK(levy(1.0) == Approx(0.2196956).margin(1e-7));

  for (double x : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    CHECK(dofc::stable_density(0.5, x) == Approx(levy(x)).epsilon(1e-9));
  }
}

TEST_CASE("stable density agrees with the convergent series oracle") {
  for (double beta : {0.3, 0.7}) {
    for (double x : {1.0, 2.0, 5.0, 20.0}) {
      CHECK(dofc::stable_density(beta, x) ==
            Approx(stable_series_oracle(beta, x)).epsilon(1e-8));
    }
  }
}

TEST_CASE("stable density integrates to one") {
  // beta = 1/2: exact tail from the Levy CDF erfc(1/(2 sqrt(x)))
  const double body =
      dofc::integrate([](double x) { return dofc::stable_density(0.5, x); },
                      1e-8, 30.0, 1e-12, 1e-10);
  const double tail = std::erf(1.0 / (2.0 * std::sqrt(30.0)));
  CHECK(body + tail == Approx(1.0).margin(1e-8));

  CHECK(dofc::stable_cdf(0.5, 30.0) == Approx(1.0 - tail).epsilon(1e-9));
  CHECK(dofc::stable_cdf(0.5, 1.0) == Approx(std::erfc(0.5)).epsilon(1e-9));
}

TEST_CASE("stable density vanishes at the origin") {
  // monotone decay into the stretched-exponential left tail
  CHECK(dofc::stable_density(0.3, 1e-6) < 1e-10);
  CHECK(dofc::stable_density(0.5, 1e-3) < 1e-10);
  CHECK(dofc::stable_density(0.3, 1e-4) < dofc::stable_density(0.3, 1e-2));
  CHECK(dofc::stable_density(0.3, 1e-6) < dofc::stable_density(0.3, 1e-4));
}

TEST_CASE("stable density deep in the left tail agrees with a transform route") {
  // g_0.3(1e-4) is ~6e-6, small but far from zero; cross-check the Zolotarev
  // integral against direct numerical inversion of exp(-s^0.3).
  using CL = std::complex<long double>;
  dofc::TransformHandleL lt{[](CL s) {
    return std::exp(-dofc::complex_power(s, 0.3));
  }};
  const double via_talbot = dofc::invert(lt, 1e-4, 48);
  CHECK(dofc::stable_density(0.3, 1e-4) ==
        Approx(via_talbot).epsilon(1e-6));
}

TEST_CASE("stable truncated mean grows without bound") {
  const double beta = 0.6;
  double prev = 0.0;
  for (double cutoff : {10.0, 100.0, 1000.0}) {
    const double m = dofc::integrate(
        [&](double x) { return x * dofc::stable_density(beta, x); }, 1e-6,
        cutoff, 1e-10, 1e-8);
    CHECK(m > prev * 1.5);
    prev = m;
  }
}
