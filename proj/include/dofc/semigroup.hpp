#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dofc/fft.hpp"

namespace dofc {

// Diagonalized semigroup input: T(t) acts on an eigenmode of the generator
// (eigenvalue -lambda) as multiplication by e^{-lambda t}.
struct EigenMode {
  double lambda = 0.0;
  double amplitude = 1.0;

  EigenMode(double lambda_, double amplitude_)
      : lambda(lambda_), amplitude(amplitude_) {
    if (!(lambda >= 0.0))
      throw std::invalid_argument("EigenMode: lambda must be >= 0");
  }
};

inline double eigenmode_apply(const EigenMode& mode, double t) {
  if (!(t >= 0.0)) throw std::domain_error("eigenmode_apply: t must be >= 0");
  return mode.amplitude * std::exp(-mode.lambda * t);
}

// Periodic samples of f on [0, L); n a power of two so the spectral
// operators below are exact on the grid.
struct GridFunction {
  std::size_t n = 0;
  double domain_length = 0.0;
  std::vector<double> values;

  GridFunction(std::size_t n_, double length, std::vector<double> samples)
      : n(n_), domain_length(length), values(std::move(samples)) {
    if (n < 8 || (n & (n - 1)) != 0)
      throw std::invalid_argument("GridFunction: n must be a power of two >= 8");
    if (!(domain_length > 0.0))
      throw std::invalid_argument("GridFunction: domain length must be positive");
    if (values.size() != n)
      throw std::invalid_argument("GridFunction: sample count mismatch");
    for (double v : values)
      if (!std::isfinite(v))
        throw std::invalid_argument("GridFunction: non-finite sample");
  }

  double max_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

// Fractional Laplacian -(-Delta)^{gamma/2} on the periodic grid, realized as
// the Fourier multiplier -|xi_k|^gamma, xi_k = 2 pi k / L.
struct FractionalLaplacianOp {
  double gamma = 2.0;
  std::size_t n = 0;
  double domain_length = 0.0;

  FractionalLaplacianOp(double gamma_, std::size_t n_, double length)
      : gamma(gamma_), n(n_), domain_length(length) {
    if (!(gamma > 0.0 && gamma <= 2.0))
      throw std::invalid_argument("FractionalLaplacianOp: gamma outside (0,2]");
    if (n < 8 || (n & (n - 1)) != 0)
      throw std::invalid_argument("FractionalLaplacianOp: n must be a power of two >= 8");
    if (!(domain_length > 0.0))
      throw std::invalid_argument("FractionalLaplacianOp: bad domain length");
  }

  // |xi_k|^gamma for each FFT bin (bins above n/2 alias to negative k).
  std::vector<double> symbol() const {
    std::vector<double> lam(n);
    const double base = 2.0 * 3.14159265358979323846 / domain_length;
    for (std::size_t k = 0; k < n; ++k) {
      const double kk = k <= n / 2
                            ? static_cast<double>(k)
                            : static_cast<double>(k) - static_cast<double>(n);
      lam[k] = std::pow(std::abs(kk * base), gamma);
    }
    return lam;
  }

  void check_grid(const GridFunction& f) const {
    if (f.n != n || f.domain_length != domain_length)
      throw std::invalid_argument("FractionalLaplacianOp: grid mismatch");
  }
};

namespace detail {

template <typename PerMode>
GridFunction spectral_map(const FractionalLaplacianOp& op,
                          const GridFunction& f, PerMode&& factor) {
  op.check_grid(f);
  std::vector<std::complex<double>> hat(f.n);
  for (std::size_t i = 0; i < f.n; ++i) hat[i] = f.values[i];
  fft(hat);
  const auto lam = op.symbol();
  for (std::size_t k = 0; k < f.n; ++k) hat[k] *= factor(lam[k]);
  fft(hat, true);
  std::vector<double> out(f.n);
  for (std::size_t i = 0; i < f.n; ++i) out[i] = hat[i].real();
  return GridFunction(f.n, f.domain_length, std::move(out));
}

}  // namespace detail

// T(t) f: multiply mode k by e^{-t |xi_k|^gamma}.
inline GridFunction multiplier_apply(const FractionalLaplacianOp& op,
                                     const GridFunction& f, double t) {
  if (!(t >= 0.0)) throw std::domain_error("multiplier_apply: t must be >= 0");
  return detail::spectral_map(op, f,
                              [t](double lam) { return std::exp(-t * lam); });
}

// L f: multiply mode k by -|xi_k|^gamma.
inline GridFunction generator_apply(const FractionalLaplacianOp& op,
                                    const GridFunction& f) {
  return detail::spectral_map(op, f, [](double lam) { return -lam; });
}

// Fraction of spectral energy in the top third of the spectrum. Inputs to
// the subordinated solver should keep this negligible.
inline double band_tail_energy_fraction(const GridFunction& f) {
  std::vector<std::complex<double>> hat(f.n);
  for (std::size_t i = 0; i < f.n; ++i) hat[i] = f.values[i];
  fft(hat);
  double total = 0.0, tail = 0.0;
  for (std::size_t k = 0; k < f.n; ++k) {
    const std::size_t wav = k <= f.n / 2 ? k : f.n - k;
    const double e = std::norm(hat[k]);
    total += e;
    if (3 * wav > f.n) tail += e;  // |k| > n/3
  }
  return total > 0.0 ? tail / total : 0.0;
}

// Named initial-data presets.
inline GridFunction make_gaussian_bump(std::size_t n, double length,
                                       double center, double width) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = length * static_cast<double>(i) / static_cast<double>(n);
    // include the nearest periodic images
    double acc = 0.0;
    for (int im = -2; im <= 2; ++im) {
      const double dx = x - center + im * length;
      acc += std::exp(-0.5 * dx * dx / (width * width));
    }
    v[i] = acc;
  }
  return GridFunction(n, length, std::move(v));
}

inline GridFunction make_cosine_mode(std::size_t n, double length,
                                     int wavenumber) {
  std::vector<double> v(n);
  const double base = 2.0 * 3.14159265358979323846 / length;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = length * static_cast<double>(i) / static_cast<double>(n);
    v[i] = std::cos(base * wavenumber * x);
  }
  return GridFunction(n, length, std::move(v));
}

}  // namespace dofc
