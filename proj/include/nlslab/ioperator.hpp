#pragma once

// The smoothing operator I, the first modified energy E(Iu), the Z_I norm
// surrogate and the quintic commutator I(|u|^4 u) - |Iu|^4 Iu.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlslab/field.hpp"
#include "nlslab/norms.hpp"
#include "nlslab/parallel.hpp"

namespace nlslab {

/// Shape of m on the transition zone N < |xi| < 2N.
///  kHermite:        log2 m = (s-1)(2x^2 - x^3), x = log2(|xi|/N). C^1 and
///                   monotone; matches both the constant and the power law
///                   in value and log-log slope at the zone ends.
///  kPiecewisePower: m = min(1, (|xi|/N)^(s-1)), continuous only. Used to
///                   check that fitted decay slopes do not depend on the blend.
enum class BlendKind { kHermite, kPiecewisePower };

struct ISymbolParams {
  double N = 16.0;
  double s = 0.5;
  BlendKind blend = BlendKind::kHermite;

  void validate() const {
    if (!(N >= 1.0) || !std::isfinite(N)) throw std::invalid_argument("ISymbolParams: N must be >= 1");
    if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("ISymbolParams: s must lie in (0, 1]");
  }
};

/// m(xi); xi is the frequency in cycles per unit length.
inline double i_symbol(double xi, const ISymbolParams& p) {
  const double a = std::abs(xi);
  if (p.s == 1.0 || a <= p.N) return 1.0;
  if (p.blend == BlendKind::kPiecewisePower || a >= 2.0 * p.N) return std::pow(a / p.N, p.s - 1.0);
  const double x = std::log2(a / p.N);
  return std::exp2((p.s - 1.0) * x * x * (2.0 - x));
}

inline Field apply_I(const Field& f, const ISymbolParams& p) {
  p.validate();
  return apply_multiplier(f, [&p](double xi) { return Complex(i_symbol(xi, p)); });
}

/// E^1(u) = E(Iu) = 1/2 ||(Iu)_x||^2 + 1/6 int |Iu|^6.
inline double first_modified_energy(const Field& f, const ISymbolParams& p) {
  return energy(apply_I(f, p));
}

/// |u|^4 u pointwise.
inline Field quintic(const Field& f) {
  return map_physical(f, [](Complex z) {
    const double a2 = std::norm(z);
    return a2 * a2 * z;
  });
}

/// Largest band a field may occupy for commutator(): K/3.
inline int commutator_band_limit(const SpectralGrid& g) { return g.num_modes() / 3; }

/// I(|f|^4 f) - |If|^4 If.
///
/// The quintic products are formed on a grid with four times as many
/// samples (same box), where a field of band <= K/3 produces no aliasing at
/// all. The result lives on that refined grid, since the product's spectrum
/// extends to 5K/3. Fields whose effective band exceeds K/3 are rejected.
inline Field commutator(const Field& f, const ISymbolParams& p) {
  p.validate();
  const auto& g = f.grid();
  const int band = effective_band(f, 1e-10);
  if (band > commutator_band_limit(g))
    throw std::invalid_argument("commutator: effective band " + std::to_string(band) + " exceeds the aliasing limit K/3 = " +
                                std::to_string(commutator_band_limit(g)));
  const Field fine = resample(f, g.refined(4));
  const Field a = apply_I(quintic(fine), p);
  const Field b = quintic(apply_I(fine, p));
  return axpy(a, -1.0, b);
}

struct CommutatorNorms {
  double c0 = 0.0;  // ||I N - N(Iu)||_{L^1_t L^2_x}
  double c1 = 0.0;  // ||d/dx (I N - N(Iu))||_{L^1_t L^2_x}
  double zi = 0.0;  // Z_I surrogate of u on the window
};

struct ZiOptions {
  bool include_xsb = false;  // also max with the windowed X^{1,b} proxy of Iu
  double b = 0.51;
};

/// <d_x> I u on every sample.
inline Trajectory smoothed_trajectory(const Trajectory& tr, const ISymbolParams& p) {
  p.validate();
  return tr.map([&p](const Field& f) {
    return apply_multiplier(f, [&p](double xi) { return Complex(japanese(kTwoPi * xi) * i_symbol(xi, p)); });
  });
}

/// max over the admissible catalogue of ||<d_x> I u||_{L^q_t L^r_x},
/// optionally also the windowed X^{1,b} proxy of Iu.
inline double zi_surrogate(const Trajectory& tr, const ISymbolParams& p, const ZiOptions& opt = {}) {
  const Trajectory v = smoothed_trajectory(tr, p);
  double z = 0.0;
  for (const auto& spec : admissible_catalogue()) z = std::max(z, mixed_norm(v, spec));
  if (opt.include_xsb) {
    const Trajectory iu = tr.map([&p](const Field& f) { return apply_I(f, p); });
    z = std::max(z, windowed_xsb_norm(iu, 1.0, opt.b));
  }
  return z;
}

/// Fields on the trajectory projected to |k| <= K/3 (the commutator's domain).
inline Trajectory project_commutator_band(const Trajectory& tr) {
  const int band = commutator_band_limit(tr.grid());
  return tr.map([band](const Field& f) { return project(f, band); });
}

inline CommutatorNorms commutator_decay_norms(const Trajectory& tr, const ISymbolParams& p, const ZiOptions& opt = {}) {
  if (tr.empty()) throw std::invalid_argument("commutator_decay_norms: empty trajectory");
  const Trajectory u = project_commutator_band(tr);
  std::vector<double> n0(u.size()), n1(u.size());
  parallel::for_each_index(static_cast<std::ptrdiff_t>(u.size()), [&](std::ptrdiff_t i) {
    const Field c = commutator(u[static_cast<std::size_t>(i)], p);
    n0[static_cast<std::size_t>(i)] = lp_norm(c, 2.0);
    n1[static_cast<std::size_t>(i)] = sobolev_norm(c, 1.0, true);
  });
  CommutatorNorms out;
  out.c0 = mixed_norm_from_samples(n0, u.dt_sample(), 1.0);
  out.c1 = mixed_norm_from_samples(n1, u.dt_sample(), 1.0);
  out.zi = zi_surrogate(u, p, opt);
  return out;
}

}  // namespace nlslab
