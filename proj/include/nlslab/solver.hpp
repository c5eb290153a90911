#pragma once

// Strang split-step integrator for i u_t + u_xx - |u|^4 u = 0 on the torus.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlslab/field.hpp"
#include "nlslab/initial_data.hpp"
#include "nlslab/norms.hpp"

namespace nlslab {

/// How the nonlinear half-step is taken.
///  kPhase:    exact pointwise flow u -> u exp(-i |u|^4 dt), with optional
///             2/3-rule zeroing before each substep.
///  kGalerkin: the state lives in |k| <= K/3 and the substep integrates
///             v_t = -i P(|v|^4 v) by RK4, products formed alias-free on a
///             padded grid. This is the semi-discrete system whose invariants
///             are exactly the lattice sums of the multilinear module.
enum class NonlinearStep { kPhase, kGalerkin };

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  int record_every = 10;
  bool dealias = true;
  NonlinearStep nonlinear_step = NonlinearStep::kPhase;
  bool reverse = false;              // integrate backward in time
  bool check_boundary = false;       // require |u| < boundary_tol at the box edge
  double boundary_tol = 1e-10;
  double blowup_threshold = 1e6;
};

struct ConservationSample {
  double t;
  double mass;
  double energy;
};

struct ConservationReport {
  double mass_drift = 0.0;
  double energy_drift = 0.0;
  std::vector<ConservationSample> per_sample;
};

class BlowupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Galerkin band for a K-mode grid.
inline int galerkin_band(const SpectralGrid& g) { return g.num_modes() / 3; }

inline Field linear_propagator(const Field& f, double t) {
  return apply_multiplier(f, [t](double xi) {
    const double w = kTwoPi * xi;
    return std::polar(1.0, -w * w * t);
  });
}

inline Field nonlinear_phase(const Field& f, double dt) {
  return map_physical(f, [dt](Complex z) {
    const double a2 = std::norm(z);
    return z * std::polar(1.0, -a2 * a2 * dt);
  });
}

namespace detail {

inline void zero_above(const SpectralGrid& g, std::vector<Complex>& c, int band) {
  for (int s = 0; s < g.num_modes(); ++s)
    if (std::abs(g.mode_of_slot(s)) > band) c[static_cast<std::size_t>(s)] = 0.0;
}

/// Spectral coefficients (|k| <= band, on grid g) of P_band(|v|^4 v),
/// formed on a padded grid of 3K samples so no alias reaches the band.
inline std::vector<Complex> projected_quintic(const SpectralGrid& g, const std::vector<Complex>& c, int band) {
  const SpectralGrid fine = g.refined(3);
  std::vector<Complex> cf(static_cast<std::size_t>(fine.num_modes()));
  for (int k = -band; k <= band; ++k)
    cf[static_cast<std::size_t>(fine.slot_of_mode(k))] = c[static_cast<std::size_t>(g.slot_of_mode(k))];
  auto u = inverse_transform(fine, cf);
  for (auto& z : u) {
    const double a2 = std::norm(z);
    z *= a2 * a2;
  }
  const auto nf = forward_transform(fine, u);
  std::vector<Complex> out(static_cast<std::size_t>(g.num_modes()));
  for (int k = -band; k <= band; ++k)
    out[static_cast<std::size_t>(g.slot_of_mode(k))] = nf[static_cast<std::size_t>(fine.slot_of_mode(k))];
  return out;
}

inline void galerkin_nonlinear_rk4(const SpectralGrid& g, std::vector<Complex>& c, double h, int band) {
  const Complex mi(0.0, -1.0);
  auto rhs = [&](const std::vector<Complex>& v) {
    auto n = projected_quintic(g, v, band);
    for (auto& z : n) z *= mi;
    return n;
  };
  auto shifted = [&](const std::vector<Complex>& k, double a) {
    std::vector<Complex> v(c);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += a * k[i];
    return v;
  };
  const auto k1 = rhs(c);
  const auto k2 = rhs(shifted(k1, 0.5 * h));
  const auto k3 = rhs(shifted(k2, 0.5 * h));
  const auto k4 = rhs(shifted(k3, h));
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

}  // namespace detail

/// One nonlinear substep of length h in Galerkin mode (exposed for tests).
inline Field galerkin_nonlinear(const Field& f, double h) {
  const auto& g = f.grid();
  std::vector<Complex> c(f.spectral().begin(), f.spectral().end());
  const int band = galerkin_band(g);
  detail::zero_above(g, c, band);
  detail::galerkin_nonlinear_rk4(g, c, h, band);
  return Field::from_spectral(g, std::move(c));
}

/// Number of steps implied by the config; rejects invalid configurations.
inline long long solver_steps(const SolverConfig& cfg, const SpectralGrid& g) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw std::invalid_argument("SolverConfig: dt must be positive");
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) throw std::invalid_argument("SolverConfig: t_end must be positive");
  if (cfg.record_every < 1) throw std::invalid_argument("SolverConfig: record_every must be >= 1");
  const double ratio = cfg.t_end / cfg.dt;
  if (ratio > 9.0e15) throw std::invalid_argument("SolverConfig: t_end / dt exceeds the integer range");
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * ratio)
    throw std::invalid_argument("SolverConfig: t_end must be an integer multiple of dt");
  const double wmax = kTwoPi * std::abs(g.frequency(g.min_mode()));
  if (cfg.dt * wmax * wmax >= 1e4) throw std::invalid_argument("SolverConfig: dt * (2 pi xi_max)^2 must stay below 1e4");
  return static_cast<long long>(n);
}

/// Strang composition: half nonlinear, full linear, half nonlinear.
/// The returned trajectory starts with f0 (projected to the Galerkin band in
/// Galerkin mode) and holds every record_every-th state.
inline Trajectory evolve(const Field& f0, const SolverConfig& cfg) {
  const auto& g = f0.grid();
  const long long steps = solver_steps(cfg, g);
  if (cfg.check_boundary && boundary_magnitude(f0) >= cfg.boundary_tol)
    throw std::invalid_argument("evolve: initial data does not decay at the box boundary (|u| = " +
                                std::to_string(boundary_magnitude(f0)) + ")");
  const double dt = cfg.reverse ? -cfg.dt : cfg.dt;
  const int kn = g.num_modes();
  const bool galerkin = cfg.nonlinear_step == NonlinearStep::kGalerkin;
  const int band = galerkin ? galerkin_band(g) : kn / 3;

  std::vector<Complex> lin(static_cast<std::size_t>(kn));
  for (int s = 0; s < kn; ++s) {
    const double w = g.angular_frequency(g.mode_of_slot(s));
    lin[static_cast<std::size_t>(s)] = std::polar(1.0, -w * w * dt);
  }

  std::vector<Complex> c(f0.spectral().begin(), f0.spectral().end());
  if (galerkin) detail::zero_above(g, c, band);

  auto half_nonlinear = [&]() {
    if (galerkin) {
      detail::galerkin_nonlinear_rk4(g, c, 0.5 * dt, band);
      return;
    }
    if (cfg.dealias) detail::zero_above(g, c, band);
    auto u = inverse_transform(g, c);
    for (auto& z : u) {
      const double a2 = std::norm(z);
      z *= std::polar(1.0, -a2 * a2 * 0.5 * dt);
    }
    c = forward_transform(g, u);
  };

  std::vector<Field> out;
  out.reserve(static_cast<std::size_t>(steps / cfg.record_every + 1));
  out.push_back(galerkin ? Field::from_spectral(g, c) : f0);
  for (long long n = 1; n <= steps; ++n) {
    half_nonlinear();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= lin[i];
    half_nonlinear();
    if (n % cfg.record_every == 0) {
      Field f = Field::from_spectral(g, c);
      if (lp_norm(f, kInf) > cfg.blowup_threshold || !std::isfinite(lp_norm(f, 2.0)))
        throw BlowupError("evolve: |u| exceeded the blow-up guard at t = " + std::to_string(n * cfg.dt));
      out.push_back(std::move(f));
    }
  }
  return Trajectory(std::move(out), 0.0, cfg.dt * cfg.record_every);
}

/// Convenience: the state at t_end only.
inline Field evolve_to(const Field& f0, SolverConfig cfg) {
  cfg.record_every = static_cast<int>(solver_steps(cfg, f0.grid()));
  return evolve(f0, cfg).back();
}

inline ConservationReport conserved_report(const Trajectory& tr) {
  if (tr.empty()) throw std::invalid_argument("conserved_report: empty trajectory");
  ConservationReport rep;
  rep.per_sample.resize(tr.size());
  parallel::for_each_index(static_cast<std::ptrdiff_t>(tr.size()), [&](std::ptrdiff_t i) {
    const auto& f = tr[static_cast<std::size_t>(i)];
    rep.per_sample[static_cast<std::size_t>(i)] = {tr.time(static_cast<std::size_t>(i)), mass(f), energy(f)};
  });
  auto rel = [](double x, double x0) { return x0 != 0.0 ? std::abs(x - x0) / std::abs(x0) : std::abs(x - x0); };
  const auto& s0 = rep.per_sample.front();
  for (const auto& s : rep.per_sample) {
    rep.mass_drift = std::max(rep.mass_drift, rel(s.mass, s0.mass));
    rep.energy_drift = std::max(rep.energy_drift, rel(s.energy, s0.energy));
  }
  return rep;
}

/// v(x) = lambda^{-1/2} f(x / lambda) on the box stretched by lambda.
inline Field rescale(const Field& f, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("rescale: lambda must be positive and finite");
  const double len = f.grid().box_length() * lambda;
  if (!std::isfinite(len) || !(len > 0.0)) throw std::invalid_argument("rescale: scaled box length is not representable");
  const SpectralGrid g = f.grid().scaled(lambda);
  std::vector<Complex> c(f.spectral().begin(), f.spectral().end());
  const double a = 1.0 / std::sqrt(lambda);
  for (auto& z : c) z *= a;
  return Field::from_spectral(g, std::move(c));
}

}  // namespace nlslab
