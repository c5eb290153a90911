#pragma once

// Field values on a SpectralGrid and the transforms between samples and
// Fourier-series coefficients.
//
// Normalization: the spectral coefficients are the Fourier-series
// coefficients c_k of u(x) = sum_k c_k exp(2 pi i xi_k x), so that
//   c_k = (1/K) sum_j u(x_j) exp(-2 pi i xi_k x_j),
// and Plancherel reads  sum_j |u_j|^2 dx = L * sum_k |c_k|^2.
// The continuous transform corresponds to u_hat(xi_k) ~ L c_k.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nlslab/fft.hpp"
#include "nlslab/grid.hpp"

namespace nlslab {

/// Physical samples -> spectral coefficients (slot order).
inline std::vector<Complex> forward_transform(const SpectralGrid& grid, std::span<const Complex> physical) {
  if (static_cast<int>(physical.size()) != grid.num_modes())
    throw std::invalid_argument("forward_transform: sample count does not match grid");
  std::vector<Complex> out = fft::forward(physical);
  const double inv = 1.0 / grid.num_modes();
  // The grid starts at x = -L/2, contributing exp(i pi k) = (-1)^k = (-1)^slot.
  for (std::size_t s = 0; s < out.size(); ++s) out[s] *= (s % 2 == 0 ? inv : -inv);
  return out;
}

/// Spectral coefficients (slot order) -> physical samples.
inline std::vector<Complex> inverse_transform(const SpectralGrid& grid, std::span<const Complex> spectral) {
  if (static_cast<int>(spectral.size()) != grid.num_modes())
    throw std::invalid_argument("inverse_transform: coefficient count does not match grid");
  std::vector<Complex> shifted(spectral.begin(), spectral.end());
  for (std::size_t s = 1; s < shifted.size(); s += 2) shifted[s] = -shifted[s];
  return fft::backward(shifted);
}

/// A complex field u(x) at one instant, held in both representations.
/// Immutable after construction; both views are always consistent.
class Field {
 public:
  enum class Source { kPhysical, kSpectral };

  static Field from_physical(const SpectralGrid& grid, std::vector<Complex> samples) {
    auto coeffs = forward_transform(grid, samples);
    return Field(grid, std::move(samples), std::move(coeffs), Source::kPhysical);
  }

  static Field from_spectral(const SpectralGrid& grid, std::vector<Complex> coeffs) {
    auto samples = inverse_transform(grid, coeffs);
    return Field(grid, std::move(samples), std::move(coeffs), Source::kSpectral);
  }

  static Field zero(const SpectralGrid& grid) {
    std::vector<Complex> z(static_cast<std::size_t>(grid.num_modes()));
    return Field(grid, z, z, Source::kPhysical);
  }

  /// Build from a function of x sampled on the grid.
  static Field sample(const SpectralGrid& grid, const std::function<Complex(double)>& fn) {
    std::vector<Complex> v(static_cast<std::size_t>(grid.num_modes()));
    for (int j = 0; j < grid.num_modes(); ++j) v[static_cast<std::size_t>(j)] = fn(grid.position(j));
    return from_physical(grid, std::move(v));
  }

  const SpectralGrid& grid() const { return grid_; }
  std::span<const Complex> physical() const { return physical_; }
  std::span<const Complex> spectral() const { return spectral_; }
  /// Which representation was authoritative when the field was built.
  Source source() const { return source_; }

  /// Coefficient of mode k; zero outside the grid's mode range.
  Complex coeff(int k) const {
    return grid_.contains_mode(k) ? spectral_[static_cast<std::size_t>(grid_.slot_of_mode(k))] : Complex{};
  }

  Complex at(int j) const { return physical_[static_cast<std::size_t>(j)]; }

 private:
  Field(const SpectralGrid& grid, std::vector<Complex> physical, std::vector<Complex> spectral, Source src)
      : grid_(grid), physical_(std::move(physical)), spectral_(std::move(spectral)), source_(src) {}

  SpectralGrid grid_;
  std::vector<Complex> physical_;
  std::vector<Complex> spectral_;
  Source source_;
};

/// Multiply spectral coefficients by sym(xi_k), xi_k = k / L.
inline Field apply_multiplier(const Field& f, const std::function<Complex(double)>& sym) {
  const auto& g = f.grid();
  std::vector<Complex> c(f.spectral().begin(), f.spectral().end());
  for (int s = 0; s < g.num_modes(); ++s) {
    const Complex w = sym(g.frequency(g.mode_of_slot(s)));
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
      throw std::invalid_argument("apply_multiplier: symbol is not finite on the frequency lattice");
    c[static_cast<std::size_t>(s)] *= w;
  }
  return Field::from_spectral(g, std::move(c));
}

/// Spectral derivative d/dx (symbol 2 pi i xi).
inline Field derivative(const Field& f, int order = 1) {
  return apply_multiplier(f, [order](double xi) { return std::pow(Complex(0.0, kTwoPi * xi), order); });
}

/// Zero all modes with |k| > band.
inline Field project(const Field& f, int band) {
  const auto& g = f.grid();
  std::vector<Complex> c(f.spectral().begin(), f.spectral().end());
  for (int s = 0; s < g.num_modes(); ++s)
    if (std::abs(g.mode_of_slot(s)) > band) c[static_cast<std::size_t>(s)] = 0.0;
  return Field::from_spectral(g, std::move(c));
}

/// Largest |k| whose coefficient exceeds rel_tol * max|c|; 0 for the zero field.
inline int effective_band(const Field& f, double rel_tol = 1e-10) {
  const auto& g = f.grid();
  double cmax = 0.0;
  for (const auto& c : f.spectral()) cmax = std::max(cmax, std::abs(c));
  if (cmax == 0.0) return 0;
  int band = 0;
  for (int s = 0; s < g.num_modes(); ++s)
    if (std::abs(f.spectral()[static_cast<std::size_t>(s)]) > rel_tol * cmax)
      band = std::max(band, std::abs(g.mode_of_slot(s)));
  return band;
}

/// Re-express a field on a finer (or coarser) grid with the same box by
/// zero-padding (or truncating) the spectrum. When refining, the unpaired
/// mode -K/2 is split evenly between -K/2 and +K/2 (the real-symmetric
/// interpolant), so the samples on the original grid are reproduced.
inline Field resample(const Field& f, const SpectralGrid& target) {
  if (target.box_length() != f.grid().box_length())
    throw std::invalid_argument("resample: box lengths differ");
  const auto& g = f.grid();
  if (target.num_modes() == g.num_modes()) return f;
  std::vector<Complex> c(static_cast<std::size_t>(target.num_modes()));
  const int kmax = std::min(g.num_modes(), target.num_modes()) / 2 - 1;
  for (int k = -kmax; k <= kmax; ++k) c[static_cast<std::size_t>(target.slot_of_mode(k))] = f.coeff(k);
  if (target.num_modes() > g.num_modes()) {
    const int ny = g.num_modes() / 2;
    const Complex half = 0.5 * f.coeff(-ny);
    c[static_cast<std::size_t>(target.slot_of_mode(-ny))] = half;
    c[static_cast<std::size_t>(target.slot_of_mode(ny))] = half;
  }
  return Field::from_spectral(target, std::move(c));
}

/// Pointwise map in physical space.
template <typename Fn>
Field map_physical(const Field& f, Fn&& fn) {
  std::vector<Complex> v(f.physical().begin(), f.physical().end());
  for (auto& z : v) z = fn(z);
  return Field::from_physical(f.grid(), std::move(v));
}

/// a + alpha * b on a shared grid.
inline Field axpy(const Field& a, Complex alpha, const Field& b) {
  require_same_grid(a.grid(), b.grid(), "axpy");
  std::vector<Complex> v(a.physical().begin(), a.physical().end());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] += alpha * b.physical()[j];
  return Field::from_physical(a.grid(), std::move(v));
}

inline Field conj(const Field& f) {
  return map_physical(f, [](Complex z) { return std::conj(z); });
}

/// Time-ordered samples u(t0 + i * dt_sample), all on one grid.
class Trajectory {
 public:
  Trajectory(std::vector<Field> fields, double t0, double dt_sample)
      : fields_(std::move(fields)), t0_(t0), dt_sample_(dt_sample) {
    if (!(dt_sample > 0.0)) throw std::invalid_argument("Trajectory: dt_sample must be positive");
    for (const auto& f : fields_) require_same_grid(f.grid(), fields_.front().grid(), "Trajectory");
  }

  std::size_t size() const { return fields_.size(); }
  bool empty() const { return fields_.empty(); }
  const Field& operator[](std::size_t i) const { return fields_[i]; }
  const Field& front() const { return fields_.front(); }
  const Field& back() const { return fields_.back(); }
  const std::vector<Field>& fields() const { return fields_; }
  double t0() const { return t0_; }
  double dt_sample() const { return dt_sample_; }
  double time(std::size_t i) const { return t0_ + static_cast<double>(i) * dt_sample_; }
  double duration() const { return fields_.empty() ? 0.0 : dt_sample_ * static_cast<double>(fields_.size() - 1); }
  const SpectralGrid& grid() const { return fields_.front().grid(); }

  /// Apply fn to every field, keeping the time axis.
  template <typename Fn>
  Trajectory map(Fn&& fn) const {
    std::vector<Field> out;
    out.reserve(fields_.size());
    for (const auto& f : fields_) out.push_back(fn(f));
    return Trajectory(std::move(out), t0_, dt_sample_);
  }

  /// Every stride-th sample, starting at the first.
  Trajectory subsample(std::size_t stride) const {
    if (stride == 0) throw std::invalid_argument("Trajectory::subsample: stride must be >= 1");
    std::vector<Field> out;
    for (std::size_t i = 0; i < fields_.size(); i += stride) out.push_back(fields_[i]);
    return Trajectory(std::move(out), t0_, dt_sample_ * static_cast<double>(stride));
  }

 private:
  std::vector<Field> fields_;
  double t0_;
  double dt_sample_;
};

/// Trapezoid weights for n equispaced samples with step h.
inline std::vector<double> trapezoid_weights(std::size_t n, double h) {
  std::vector<double> w(n, h);
  if (n == 0) return w;
  if (n == 1) {
    w[0] = 0.0;
    return w;
  }
  w.front() = w.back() = 0.5 * h;
  return w;
}

}  // namespace nlslab
