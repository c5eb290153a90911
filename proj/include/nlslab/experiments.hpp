#pragma once

// Config-driven experiment runners. Each returns a typed result; report.hpp
// turns results into CSV/JSON/SVG.

#include <cmath>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nlslab/config.hpp"
#include "nlslab/fit.hpp"
#include "nlslab/initial_data.hpp"
#include "nlslab/ioperator.hpp"
#include "nlslab/morawetz.hpp"
#include "nlslab/multilinear.hpp"
#include "nlslab/norms.hpp"
#include "nlslab/solver.hpp"

namespace nlslab {

inline SpectralGrid config_grid(const ExperimentConfig& c) { return SpectralGrid(c.grid.box_length, c.grid.modes); }

inline Field initial_data(const ExperimentConfig& c) {
  const auto g = config_grid(c);
  if (c.data.kind == "gaussian") return gaussian(g, c.data.amplitude, c.data.sigma, c.data.nu, c.data.x0);
  RandomFieldParams rp;
  rp.band = c.data.band;
  rp.decay = c.data.decay;
  rp.l2_norm = c.data.l2_norm;
  rp.seed = c.seed;
  return random_band_limited(g, rp);
}

inline ISymbolParams symbol_params(double N, double s) {
  ISymbolParams p;
  p.N = N;
  p.s = s;
  p.validate();
  return p;
}

namespace detail {

inline void require_whole_samples(const SolverConfig& cfg, const SpectralGrid& g) {
  if (solver_steps(cfg, g) % cfg.record_every != 0)
    throw ConfigError("solver: t_end / dt must be a multiple of record_every");
}

template <typename Fn>
auto with_budget_context(double N, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const WorkBudgetError& e) {
    std::ostringstream os;
    os << e.what() << " (at N = " << N << ")";
    throw WorkBudgetError(os.str());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// decay sweeps

struct EnergyDecayRow {
  double N, increment, e2_t0, e2_t1;
};

struct EnergyDecayResult {
  DecayFit fit;
  std::vector<EnergyDecayRow> rows;
  double energy_drift = 0.0;
  double t0 = 0.0, t1 = 0.0;
};

inline EnergyDecayResult run_energy_decay(const ExperimentConfig& c) {
  const auto g = config_grid(c);
  detail::require_whole_samples(c.solver, g);
  const Trajectory tr = evolve(initial_data(c), c.solver);
  const int band = galerkin_band(g);
  EnergyDecayResult r;
  r.t0 = tr.time(0);
  r.t1 = tr.time(tr.size() - 1);
  const double e0 = energy(tr.front());
  r.energy_drift = std::abs(energy(tr.back()) - e0);
  const double floor = std::max(r.energy_drift, 1e-14 * std::abs(e0));
  std::vector<std::pair<double, double>> pts;
  for (double N : c.N_list) {
    const auto p = symbol_params(N, c.s);
    const auto a = detail::with_budget_context(N, [&] { return second_modified_energy(tr.front(), p, band, c.m6, c.budget); });
    const auto b = detail::with_budget_context(N, [&] { return second_modified_energy(tr.back(), p, band, c.m6, c.budget); });
    r.rows.push_back({N, std::abs(b.e2 - a.e2), a.e2, b.e2});
    pts.emplace_back(N, std::abs(b.e2 - a.e2));
  }
  r.fit = fit_with_floor(pts, floor);
  return r;
}

struct GapDecayRow {
  double N, gap, e1, e2;
};

struct GapDecayResult {
  DecayFit fit;
  std::vector<GapDecayRow> rows;
};

inline GapDecayResult run_gap_decay(const ExperimentConfig& c) {
  const auto g = config_grid(c);
  Field u = initial_data(c);
  const int band = galerkin_band(g);
  u = project(u, band);
  GapDecayResult r;
  const double floor = std::max(1e-13 * std::abs(energy(u)), 1e-300);
  std::vector<std::pair<double, double>> pts;
  for (double N : c.N_list) {
    const auto p = symbol_params(N, c.s);
    const auto e = detail::with_budget_context(N, [&] { return second_modified_energy(u, p, band, c.m6, c.budget); });
    r.rows.push_back({N, e.gap, e.e1, e.e2});
    pts.emplace_back(N, e.gap);
  }
  r.fit = fit_with_floor(pts, floor);
  return r;
}

struct CommutatorDecayRow {
  double N, c1, c0, zi;
  double interaction = 0.0, interaction_reduced = 0.0, bound = 0.0;
  bool violation = false;
};

struct CommutatorDecayResult {
  DecayFit fit;
  std::vector<CommutatorDecayRow> rows;
  bool interaction_checked = false;
  int violations = 0;
  int interaction_modes = 0;
};

/// The trajectory on a coarser grid of the same box, for the 4D quadrature.
inline Trajectory interaction_trajectory(const Trajectory& tr, int modes, int stride) {
  const SpectralGrid g(tr.grid().box_length(), modes);
  const Trajectory t = tr.subsample(static_cast<std::size_t>(stride));
  return t.map([&g](const Field& f) { return resample(f, g); });
}

inline CommutatorDecayResult run_commutator_decay(const ExperimentConfig& c) {
  const auto g = config_grid(c);
  detail::require_whole_samples(c.solver, g);
  const Trajectory tr = evolve(initial_data(c), c.solver);
  CommutatorDecayResult r;
  r.interaction_checked = c.interaction.enabled;
  r.interaction_modes = std::min(c.interaction.modes, g.num_modes());
  std::optional<Trajectory> small;
  if (c.interaction.enabled) small = interaction_trajectory(tr, r.interaction_modes, c.interaction.time_stride);
  std::vector<std::pair<double, double>> pts;
  double scale = 0.0;
  for (double N : c.N_list) {
    const auto p = symbol_params(N, c.s);
    const auto n = commutator_decay_norms(tr, p);
    CommutatorDecayRow row{N, n.c1, n.c0, n.zi};
    scale = std::max(scale, std::pow(n.zi, 5));
    if (c.interaction.enabled) {
      InteractionOptions exact, reduced;
      reduced.form = BracketForm::kReduced;
      row.interaction = interaction_error_integral(*small, p, exact);
      row.interaction_reduced = interaction_error_integral(*small, p, reduced);
      row.bound = interaction_factored_bound(commutator_decay_norms(*small, p));
      row.violation = !(row.interaction <= row.bound);
      if (row.violation) ++r.violations;
    }
    r.rows.push_back(row);
    pts.emplace_back(N, n.c1);
  }
  r.fit = fit_with_floor(pts, std::max(1e-13 * scale, 1e-300));
  return r;
}

// ---------------------------------------------------------------------------
// Morawetz ensemble

struct MorawetzRun {
  int run;
  double amplitude, sigma, nu, x0;
  double residual_coarse, residual_fine, residual_ratio;
  int violations;
  double min_derivative;
  double l8_ratio_T, l8_ratio_2T, l8_growth;
  double l8i_ratio_T, l8i_ratio_2T;
};

struct MorawetzResult {
  std::vector<MorawetzRun> runs;
  double T = 0.0;
  int total_violations = 0;
  double min_residual_ratio = 0.0, max_residual_ratio = 0.0;
  double max_l8_ratio_T = 0.0, max_l8_ratio_2T = 0.0, max_l8_growth = 0.0;
};

inline Trajectory prefix(const Trajectory& tr, std::size_t n) {
  std::vector<Field> f(tr.fields().begin(), tr.fields().begin() + static_cast<std::ptrdiff_t>(n));
  return Trajectory(std::move(f), tr.t0(), tr.dt_sample());
}

inline MorawetzResult run_morawetz(const ExperimentConfig& c) {
  const auto g = config_grid(c);
  detail::require_whole_samples(c.solver, g);
  SolverConfig sc = c.solver;
  sc.t_end = 2.0 * c.solver.t_end;
  const auto w = smooth_abs_weight(c.morawetz.weight_ell);
  const double Nref = c.N_list.empty() ? 4.0 : c.N_list.front();
  const auto p = symbol_params(Nref, c.s);
  std::mt19937_64 rng(c.seed);
  auto draw = [&rng](const std::array<double, 2>& r) { return std::uniform_real_distribution<double>(r[0], r[1])(rng); };
  MorawetzResult out;
  out.T = c.solver.t_end;
  out.min_residual_ratio = 1e300;
  for (int k = 0; k < c.morawetz.runs; ++k) {
    MorawetzRun run{};
    run.run = k;
    run.amplitude = draw(c.morawetz.amplitude_range);
    run.sigma = draw(c.morawetz.sigma_range);
    run.nu = draw(c.morawetz.nu_range);
    run.x0 = draw(c.morawetz.x0_range);
    const Trajectory full = evolve(gaussian(g, run.amplitude, run.sigma, run.nu, run.x0), sc);
    const Trajectory half = prefix(full, (full.size() + 1) / 2);
    const auto fine = morawetz_check(full, w);
    run.residual_fine = fine.residual;
    run.residual_coarse = morawetz_identity_residual(full.subsample(2), w);
    run.residual_ratio = run.residual_fine > 0.0 ? run.residual_coarse / run.residual_fine : 0.0;
    run.violations = fine.monotonicity_violations;
    run.min_derivative = fine.min_derivative;
    const auto a = l8_bound_sides(half, p, false), b = l8_bound_sides(full, p, false);
    run.l8_ratio_T = a.ratio;
    run.l8_ratio_2T = b.ratio;
    run.l8_growth = a.ratio > 0.0 ? b.ratio / a.ratio : 0.0;
    run.l8i_ratio_T = l8_bound_sides(half, p, true).ratio;
    run.l8i_ratio_2T = l8_bound_sides(full, p, true).ratio;
    out.total_violations += run.violations;
    out.min_residual_ratio = std::min(out.min_residual_ratio, run.residual_ratio);
    out.max_residual_ratio = std::max(out.max_residual_ratio, run.residual_ratio);
    out.max_l8_ratio_T = std::max(out.max_l8_ratio_T, run.l8_ratio_T);
    out.max_l8_ratio_2T = std::max(out.max_l8_ratio_2T, run.l8_ratio_2T);
    out.max_l8_growth = std::max(out.max_l8_growth, run.l8_growth);
    out.runs.push_back(run);
  }
  return out;
}

// ---------------------------------------------------------------------------
// increment identity under sampling refinement

struct IncrementRow {
  double dt, dt_sample, lhs, rhs, resonant, residual;
};

struct IncrementExperiment {
  double N = 0.0;
  int band = 0;
  std::vector<IncrementRow> rows;
  double ratio = 0.0;  // residual(coarse) / residual(fine)
};

inline IncrementExperiment run_increment(const ExperimentConfig& c) {
  const auto g = config_grid(c);
  if (c.solver.nonlinear_step != NonlinearStep::kGalerkin)
    throw ConfigError("increment: solver.nonlinear_step must be galerkin (the identity is exact for the Galerkin flow)");
  if (c.increment.band > galerkin_band(g)) throw ConfigError("increment.band exceeds the Galerkin band K/3");
  IncrementExperiment r;
  r.N = c.N_list.empty() ? 1.0 : c.N_list.front();
  r.band = c.increment.band;
  const auto p = symbol_params(r.N, c.s);
  const Field u0 = initial_data(c);
  for (int level = 0; level < 2; ++level) {
    SolverConfig sc = c.solver;
    sc.dt = c.solver.dt / (level == 0 ? 1.0 : 2.0);
    detail::require_whole_samples(sc, g);
    const Trajectory tr = evolve(u0, sc);
    const auto res = detail::with_budget_context(r.N, [&] { return increment_check(tr, p, r.band, c.m6, c.budget); });
    r.rows.push_back({sc.dt, tr.dt_sample(), res.lhs, res.rhs, res.resonant, res.residual});
  }
  r.ratio = r.rows[1].residual > 0.0 ? r.rows[0].residual / r.rows[1].residual : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// global iteration bookkeeping

struct GwpInterval {
  double t_start, t_end, l6_mass;
};

struct GwpSweepPoint {
  double T0;
  int L_count;
  double predicted_L;
};

struct GwpReport {
  double s = 0.0, N = 0.0, lambda = 0.0, mu = 0.0;
  std::vector<GwpInterval> intervals;
  int L_count = 0;
  double predicted_L = 0.0;
  std::vector<std::pair<double, double>> h1_trace;
  std::vector<std::pair<double, double>> hs_sup;  // (T, sup_[0,T] ||u||_{H^s}) in original time
  double growth_exponent_observed = 0.0;
  double growth_exponent_predicted = 0.0;
  double window = 0.0;      // lambda^2 T0
  double total_mass = 0.0;  // whole-window ||I u^lambda||_{L^6 L^6}^6
  bool partition_ok = true;
  std::string failure;
  std::vector<GwpSweepPoint> sweep;
};

inline double gwp_lambda(double N, double s) { return std::pow(N, (1.0 - s) / s); }
inline double gwp_growth_exponent(double s) { return s * (1.0 - s) / (2.0 * (3.0 * s - 1.0)); }
inline double gwp_predicted_L(double bootstrap_K, double window, double N, double mu) {
  return std::pow(2.0 * bootstrap_K, 6) * std::cbrt(window) * std::pow(N, 2.0 / 3.0) / mu;
}

struct Partition {
  std::vector<GwpInterval> intervals;
  bool ok = true;
  std::string failure;
};

/// Greedy cut of the first n samples: extend until the next step would push
/// the interval's L^6 mass above mu.
inline Partition greedy_partition(const std::vector<double>& density, double dt_sample, std::size_t n, double mu) {
  Partition out;
  if (n < 2) return out;
  std::size_t start = 0;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double step = 0.5 * dt_sample * (density[i] + density[i + 1]);
    if (step > mu) {
      std::ostringstream os;
      os << "partition failure: one sample step [" << dt_sample * static_cast<double>(i) << ", "
         << dt_sample * static_cast<double>(i + 1) << "] carries L6 mass " << step << " > mu = " << mu;
      out.ok = false;
      out.failure = os.str();
      return out;
    }
    if (acc + step > mu) {
      out.intervals.push_back({dt_sample * static_cast<double>(start), dt_sample * static_cast<double>(i), acc});
      start = i;
      acc = 0.0;
    }
    acc += step;
  }
  out.intervals.push_back({dt_sample * static_cast<double>(start), dt_sample * static_cast<double>(n - 1), acc});
  return out;
}

inline GwpReport run_gwp(const ExperimentConfig& c) {
  if (c.N_list.empty()) throw ConfigError("gwp: N_list needs one entry");
  GwpReport r;
  r.s = c.s;
  r.N = c.N_list.front();
  r.lambda = gwp_lambda(r.N, c.s);
  r.growth_exponent_predicted = gwp_growth_exponent(c.s);
  const auto p = symbol_params(r.N, c.s);
  const Field u0 = initial_data(c);
  const Field v0 = rescale(u0, r.lambda);
  // solver config in the rescaled frame
  SolverConfig sc = c.solver;
  sc.dt = c.solver.dt * r.lambda * r.lambda;
  sc.t_end = c.gwp.T0 * r.lambda * r.lambda;
  const double steps = std::round(c.gwp.T0 / c.solver.dt);
  if (std::abs(steps * c.solver.dt - c.gwp.T0) > 1e-9 * c.gwp.T0 || static_cast<long long>(steps) % sc.record_every != 0)
    throw ConfigError("gwp: T0 / dt must be a multiple of record_every");
  r.window = sc.t_end;
  const Trajectory tr = evolve(v0, sc);
  // ||I u0^lambda||_{L2}^6 is scale invariant, like the L6 space-time mass
  const double m_iu0 = lp_norm(apply_I(v0, p), 2.0);
  r.mu = c.gwp.mu > 0.0 ? c.gwp.mu : c.gwp.mu_factor * std::pow(m_iu0, 6);
  std::vector<double> dens(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const Field iu = apply_I(tr[i], p);
    dens[i] = power_integral(iu, 6);
    r.h1_trace.emplace_back(tr.time(i), sobolev_norm(iu, 1.0, false));
  }
  for (std::size_t i = 0; i + 1 < tr.size(); ++i) r.total_mass += 0.5 * tr.dt_sample() * (dens[i] + dens[i + 1]);
  const auto part = greedy_partition(dens, tr.dt_sample(), tr.size(), r.mu);
  r.intervals = part.intervals;
  r.partition_ok = part.ok;
  r.failure = part.failure;
  r.L_count = static_cast<int>(r.intervals.size());
  r.predicted_L = gwp_predicted_L(c.gwp.bootstrap_K, r.window, r.N, r.mu);
  // prefixes T0/4, T0/2, T0 of the same run
  for (int q : {4, 2, 1}) {
    const std::size_t n = (tr.size() - 1) / static_cast<std::size_t>(q) + 1;
    const auto pp = greedy_partition(dens, tr.dt_sample(), n, r.mu);
    const double win = tr.dt_sample() * static_cast<double>(n - 1);
    r.sweep.push_back({c.gwp.T0 / q, pp.ok ? static_cast<int>(pp.intervals.size()) : -1,
                       gwp_predicted_L(c.gwp.bootstrap_K, win, r.N, r.mu)});
  }
  // sup ||u(t)||_{H^s} in original variables: u(x, t) = lambda^{1/2} u^lambda(lambda x, lambda^2 t)
  const auto g0 = u0.grid();
  std::vector<double> hs(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    std::vector<Complex> v(tr[i].physical().begin(), tr[i].physical().end());
    for (auto& z : v) z *= std::sqrt(r.lambda);
    hs[i] = sobolev_norm(Field::from_physical(g0, std::move(v)), c.s, false);
  }
  const int C = c.gwp.checkpoints;
  std::vector<double> lx, ly;
  double sup = 0.0;
  std::size_t i = 0;
  for (int j = 1; j <= C; ++j) {
    const std::size_t upto = (tr.size() - 1) * static_cast<std::size_t>(j) / static_cast<std::size_t>(C);
    for (; i <= upto; ++i) sup = std::max(sup, hs[i]);
    const double T = c.gwp.T0 * static_cast<double>(upto) / static_cast<double>(tr.size() - 1);
    r.hs_sup.emplace_back(T, sup);
    lx.push_back(std::log1p(T));
    ly.push_back(std::log(sup));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(ly.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  r.growth_exponent_observed = sxx > 0.0 ? sxy / sxx : 0.0;
  return r;
}

/// Intervals tile [0, window]: contiguous, ordered, first at 0, last at window;
/// masses add up to the whole-window mass.
inline bool gwp_tiling_ok(const GwpReport& r, double tol = 1e-12) {
  if (!r.partition_ok || r.intervals.empty()) return false;
  if (r.intervals.front().t_start != 0.0) return false;
  double mass = 0.0;
  for (std::size_t k = 0; k < r.intervals.size(); ++k) {
    const auto& iv = r.intervals[k];
    if (!(iv.t_end > iv.t_start)) return false;
    if (k > 0 && iv.t_start != r.intervals[k - 1].t_end) return false;
    if (iv.l6_mass > r.mu) return false;
    mass += iv.l6_mass;
  }
  if (std::abs(r.intervals.back().t_end - r.window) > tol * r.window) return false;
  return std::abs(mass - r.total_mass) <= tol * std::max(1.0, r.total_mass);
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateResult {
  std::vector<std::array<double, 4>> samples;  // t, mass, energy, momentum
  double mass_drift = 0.0, energy_drift = 0.0;
};

inline SimulateResult run_simulate(const ExperimentConfig& c) {
  const Trajectory tr = evolve(initial_data(c), c.solver);
  SimulateResult r;
  const double m0 = mass(tr.front()), e0 = energy(tr.front());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto& f = tr[i];
    r.samples.push_back({tr.time(i), mass(f), energy(f), momentum(f)});
    r.mass_drift = std::max(r.mass_drift, std::abs(mass(f) - m0) / std::max(std::abs(m0), 1e-300));
    r.energy_drift = std::max(r.energy_drift, std::abs(energy(f) - e0) / std::max(std::abs(e0), 1e-300));
  }
  return r;
}

}  // namespace nlslab
