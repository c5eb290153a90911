#pragma once

// Norm catalogue: L^p, Sobolev, mixed space-time, windowed X^{s,b} proxy,
// plus the conserved quantities of the quintic equation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nlslab/fft.hpp"
#include "nlslab/field.hpp"
#include "nlslab/parallel.hpp"

namespace nlslab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// <a> = 1 + |a|
inline double japanese(double a) { return 1.0 + std::abs(a); }

/// Exponent pair for L^q_t L^r_x.
struct MixedNormSpec {
  double q = 2.0;
  double r = 2.0;

  MixedNormSpec() = default;
  MixedNormSpec(double q_, double r_) : q(q_), r(r_) {
    if (!(q >= 2.0) || !(r >= 2.0)) throw std::invalid_argument("MixedNormSpec: exponents must lie in [2, inf]");
  }

  /// 2/q + 1/r = 1/2, evaluated exactly for the catalogue values (2/inf = 0).
  bool admissible() const { return 2.0 / q + 1.0 / r == 0.5; }
};

/// Finite admissible-pair catalogue used for the S_I supremum.
inline std::vector<MixedNormSpec> admissible_catalogue() {
  return {MixedNormSpec(kInf, 2.0), MixedNormSpec(8.0, 4.0), MixedNormSpec(6.0, 6.0), MixedNormSpec(4.0, kInf)};
}

inline double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const auto u = f.physical();
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& z : u) m = std::max(m, std::abs(z));
    return m;
  }
  double acc = 0.0;
  if (p == 2.0) {
    for (const auto& z : u) acc += std::norm(z);
    return std::sqrt(acc * f.grid().dx());
  }
  for (const auto& z : u) acc += std::pow(std::abs(z), p);
  return std::pow(acc * f.grid().dx(), 1.0 / p);
}

/// ||u||_{H^s} with weight <2 pi xi>^s, or ||u||_{Hdot^s} with |2 pi xi|^s.
inline double sobolev_norm(const Field& f, double s, bool homogeneous) {
  const auto& g = f.grid();
  const auto c = f.spectral();
  if (homogeneous && s < 0.0) {
    double cmax = 0.0;
    for (const auto& z : c) cmax = std::max(cmax, std::abs(z));
    if (std::abs(f.coeff(0)) > 1e-13 * cmax)
      throw std::invalid_argument("sobolev_norm: homogeneous norm with s < 0 needs a zero-mean field");
  }
  double acc = 0.0;
  for (int slot = 0; slot < g.num_modes(); ++slot) {
    const int k = g.mode_of_slot(slot);
    const double w = g.angular_frequency(k);
    double weight;
    if (homogeneous) {
      if (k == 0) weight = (s == 0.0) ? 1.0 : 0.0;
      else weight = std::pow(std::abs(w), 2.0 * s);
    } else {
      weight = std::pow(japanese(w), 2.0 * s);
    }
    acc += weight * std::norm(c[static_cast<std::size_t>(slot)]);
  }
  return std::sqrt(acc * g.box_length());
}

/// int |u|^p dx for even integer p, evaluated on a refined grid so the
/// quadrature of the interpolating trigonometric polynomial is exact.
inline double power_integral(const Field& f, int p) {
  if (p < 2 || p % 2 != 0) throw std::invalid_argument("power_integral: p must be an even integer >= 2");
  const Field fine = resample(f, f.grid().refined(p / 2 + 1));
  double acc = 0.0;
  for (const auto& z : fine.physical()) acc += std::pow(std::norm(z), p / 2);
  return acc * fine.grid().dx();
}

inline double mass(const Field& f) {
  const double n = lp_norm(f, 2.0);
  return n * n;
}

/// E(u) = 1/2 ||u_x||^2 + 1/6 ||u||_6^6, both terms exact for the
/// trigonometric interpolant.
inline double energy(const Field& f) {
  const double kin = sobolev_norm(f, 1.0, true);
  return 0.5 * kin * kin + power_integral(f, 6) / 6.0;
}

/// Total momentum int 2 Im(conj(u) u_x) dx.
inline double momentum(const Field& f) {
  const Field du = derivative(f);
  double acc = 0.0;
  for (int j = 0; j < f.grid().num_modes(); ++j) acc += 2.0 * std::imag(std::conj(f.at(j)) * du.at(j));
  return acc * f.grid().dx();
}

/// (int ||u(t)||_{L^r}^q dt)^{1/q} from per-sample spatial norms.
inline double mixed_norm_from_samples(const std::vector<double>& spatial, double dt_sample, double q) {
  if (spatial.empty()) throw std::invalid_argument("mixed_norm: empty trajectory");
  if (std::isinf(q)) return *std::max_element(spatial.begin(), spatial.end());
  const auto w = trapezoid_weights(spatial.size(), dt_sample);
  double acc = 0.0;
  for (std::size_t i = 0; i < spatial.size(); ++i) acc += w[i] * std::pow(spatial[i], q);
  return std::pow(acc, 1.0 / q);
}

inline double mixed_norm(const Trajectory& tr, const MixedNormSpec& spec) {
  if (tr.empty()) throw std::invalid_argument("mixed_norm: empty trajectory");
  std::vector<double> spatial(tr.size());
  parallel::for_each_index(static_cast<std::ptrdiff_t>(tr.size()), [&](std::ptrdiff_t i) {
    spatial[static_cast<std::size_t>(i)] = lp_norm(tr[static_cast<std::size_t>(i)], spec.r);
  });
  return mixed_norm_from_samples(spatial, tr.dt_sample(), spec.q);
}

/// Hann window of length M.
inline std::vector<double> hann_window(std::size_t m) {
  std::vector<double> w(m);
  for (std::size_t n = 0; n < m; ++n)
    w[n] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(n) / static_cast<double>(m - 1)));
  return w;
}

/// Representative of tau (mod period) in [center - period/2, center + period/2).
inline double unwrap_frequency(double tau, double center, double period) {
  return tau + period * std::floor((center + 0.5 * period - tau) / period);
}

/// Windowed X^{s,b} proxy.
///
/// The trajectory is multiplied by a Hann window in time, zero-padded to
/// twice its length and transformed in t with kernel exp(-i tau t) (angular
/// tau). Each mode's tau lattice is read in the period centred on the
/// dispersion curve tau = -(2 pi xi)^2. The weighted sum is normalized so that
/// (s, b) = (0, 0) returns the windowed L^2_{t,x} norm
///   (sum_n dt ||w_n u(t_n)||^2_{L^2})^{1/2}.
/// No infimum over extensions is taken: this is a diagnostic, not the
/// restriction norm.
inline double windowed_xsb_norm(const Trajectory& tr, double s, double b) {
  const std::size_t m = tr.size();
  if (m < 16) throw std::invalid_argument("windowed_xsb_norm: need at least 16 samples");
  const auto& g = tr.grid();
  const std::size_t p = 2 * m;
  const double dt = tr.dt_sample();
  const double period = kTwoPi / dt;
  const auto w = hann_window(m);
  const int kn = g.num_modes();

  const double total = parallel::reduce_sum<double>(kn, [&](std::ptrdiff_t slot) {
    const int k = g.mode_of_slot(static_cast<int>(slot));
    const double omega = g.angular_frequency(k);
    std::vector<Complex> series(p);
    for (std::size_t n = 0; n < m; ++n) series[n] = w[n] * tr[n].spectral()[static_cast<std::size_t>(slot)];
    const auto spec = fft::forward(series);
    const double center = -omega * omega;
    const double sw = std::pow(japanese(omega), 2.0 * s);
    double acc = 0.0;
    for (std::size_t q = 0; q < p; ++q) {
      const double tau = unwrap_frequency(kTwoPi * static_cast<double>(q) / (static_cast<double>(p) * dt), center, period);
      const double tw = std::pow(japanese(tau + omega * omega), 2.0 * b);
      acc += tw * std::norm(dt * spec[q]);
    }
    return sw * acc;
  });
  return std::sqrt(g.box_length() * total / (static_cast<double>(p) * dt));
}

}  // namespace nlslab
