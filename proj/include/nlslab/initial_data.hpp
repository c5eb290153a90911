#pragma once

// Initial-data library: Gaussians, modulated Gaussians and seeded random
// band-limited fields.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "nlslab/field.hpp"
#include "nlslab/norms.hpp"

namespace nlslab {

/// Seeded generator with platform-independent conversions (std::*_distribution
/// output is implementation-defined, so it is not used).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal by Box-Muller (one value per call; the pair partner is dropped).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// A exp(-x^2/sigma^2) exp(2 pi i nu x), centered at x0.
inline Field gaussian(const SpectralGrid& grid, double amplitude, double sigma, double nu = 0.0, double x0 = 0.0) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be positive");
  return Field::sample(grid, [=](double x) {
    const double y = x - x0;
    return amplitude * std::exp(-y * y / (sigma * sigma)) * std::exp(Complex(0.0, kTwoPi * nu * x));
  });
}

struct RandomFieldParams {
  int band = 4;           // modes |k| <= band are populated
  double decay = 1.0;     // coefficient envelope (1+|k|)^(-decay)
  double l2_norm = 1.0;   // rescale to this L^2 norm (<= 0 keeps the raw draw)
  std::uint64_t seed = 1;
};

/// Random trigonometric polynomial with complex Gaussian coefficients.
inline Field random_band_limited(const SpectralGrid& grid, const RandomFieldParams& p) {
  if (p.band < 0 || p.band > grid.max_mode())
    throw std::invalid_argument("random_band_limited: band outside the grid's mode range");
  Rng rng(p.seed);
  std::vector<Complex> c(static_cast<std::size_t>(grid.num_modes()));
  for (int k = -p.band; k <= p.band; ++k) {
    const double env = std::pow(1.0 + std::abs(k), -p.decay);
    const double re = rng.normal();
    const double im = rng.normal();
    c[static_cast<std::size_t>(grid.slot_of_mode(k))] = env * Complex(re, im) / std::sqrt(2.0);
  }
  Field f = Field::from_spectral(grid, std::move(c));
  if (p.l2_norm > 0.0) {
    const double n = lp_norm(f, 2.0);
    if (n > 0.0) {
      std::vector<Complex> s(f.spectral().begin(), f.spectral().end());
      for (auto& z : s) z *= p.l2_norm / n;
      f = Field::from_spectral(grid, std::move(s));
    }
  }
  return f;
}

/// Largest |u| over the two outermost samples at each end of the box.
inline double boundary_magnitude(const Field& f) {
  const int k = f.grid().num_modes();
  double m = 0.0;
  for (int j : {0, 1, k - 2, k - 1}) m = std::max(m, std::abs(f.at(j)));
  return m;
}

}  // namespace nlslab
