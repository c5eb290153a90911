#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "nlslab/initial_data.hpp"
#include "nlslab/morawetz.hpp"
#include "nlslab/solver.hpp"

using namespace nlslab;

namespace {

ISymbolParams params(double N, double s) {
  ISymbolParams p;
  p.N = N;
  p.s = s;
  return p;
}

Trajectory run(const Field& f0, double dt, double t_end, int record_every) {
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.record_every = record_every;
  return evolve(f0, cfg);
}

Field quintic_of(const Field& f) {
  return map_physical(f, [](Complex z) { return std::norm(z) * std::norm(z) * z; });
}

}  // namespace

TEST(MomentumFields, BoostedGaussianMomentum) {
  const auto g = make_grid(40.0, 512);
  const double nu = 0.7;
  const auto u = gaussian(g, 1.3, 1.5, nu);
  const double m2 = lp_norm(u, 2.0) * lp_norm(u, 2.0);
  EXPECT_NEAR(morawetz_action(u, momentum_weight()), 2.0 * kTwoPi * nu * m2, 1e-10 * m2);
  const auto mf = momentum_fields(u);
  double total = 0.0;
  for (double d : mf.density) total += d * g.dx();
  EXPECT_NEAR(total, momentum(u), 1e-10 * m2);
  // real data carries no momentum density
  const auto r = gaussian(g, 1.0, 2.0);
  for (double d : momentum_fields(r).density) EXPECT_LT(std::abs(d), 1e-12);
}

TEST(MomentumFields, CurrentOfPlaneWave) {
  // u = A e^{2 pi i k x / L}: |u|^2 constant, current = 4 A^2 (2 pi k / L)^2
  const auto g = make_grid(2.0, 64);
  const double A = 0.8;
  const int k = 3;
  const auto u = Field::sample(g, [&](double x) { return A * std::exp(Complex(0.0, kTwoPi * k * x / 2.0)); });
  const auto mf = momentum_fields(u);
  const double w = kTwoPi * k / 2.0;
  for (std::size_t j = 0; j < mf.current.size(); ++j) {
    EXPECT_NEAR(mf.current[j], 4.0 * A * A * w * w, 1e-9);
    EXPECT_NEAR(mf.density[j], 2.0 * A * A * w, 1e-10);
  }
}

TEST(MomentumFields, LocalConservationLaw) {
  // d_t T0 + d_x L = 2 {N, u}_p along the flow
  const auto g = make_grid(40.0, 256);
  const auto u0 = gaussian(g, 1.0, 1.5, 0.4);
  auto defect = [&](double dt) {
    const auto tr = run(u0, dt, 4.0 * dt, 1);
    const auto before = momentum_fields(tr[1]), after = momentum_fields(tr[3]);
    const auto mid = momentum_fields(tr[2]);
    const auto br = momentum_bracket(quintic_of(tr[2]), tr[2]);
    std::vector<Complex> cur(mid.current.begin(), mid.current.end());
    const auto dcur = derivative(Field::from_physical(g, std::move(cur)));
    double e = 0.0;
    for (int j = 0; j < g.num_modes(); ++j) {
      const auto i = static_cast<std::size_t>(j);
      const double dt_t0 = (after.density[i] - before.density[i]) / (2.0 * dt);
      e = std::max(e, std::abs(dt_t0 + dcur.at(j).real() - 2.0 * br[i]));
    }
    return e;
  };
  const double e1 = defect(2e-3), e2 = defect(1e-3);
  EXPECT_LT(e2, 1e-2);
  EXPECT_GT(e1 / e2, 3.0);
}

TEST(MomentumBracket, QuinticIdentity) {
  // {|u|^4 u, u}_p = -d/dx (2/3 |u|^6)
  const auto g = make_grid(30.0, 512);
  const auto u = gaussian(g, 1.1, 2.0, 0.3, 1.0);
  const auto br = momentum_bracket(quintic_of(u), u);
  const auto six = map_physical(u, [](Complex z) { return Complex(2.0 / 3.0 * std::pow(std::norm(z), 3)); });
  const auto d = derivative(six);
  for (int j = 0; j < g.num_modes(); ++j) EXPECT_NEAR(br[static_cast<std::size_t>(j)], -d.at(j).real(), 1e-10);
}

TEST(MomentumBracket, AntisymmetricAndGridChecked) {
  const auto g = make_grid(10.0, 128);
  const auto f = gaussian(g, 1.0, 1.0, 0.5), h = gaussian(g, 0.5, 2.0, -0.2, 1.0);
  const auto a = momentum_bracket(f, h), b = momentum_bracket(h, f);
  for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], -b[j], 1e-14);
  EXPECT_THROW(momentum_bracket(f, gaussian(make_grid(10.0, 64), 1.0, 1.0)), std::invalid_argument);
}

TEST(MorawetzWeights, ClosedFormDerivatives) {
  const auto w = smooth_abs_weight(0.7, 0.3);
  for (double x = -5.0; x <= 5.0; x += 0.37) {
    const double h = 1e-3;
    EXPECT_NEAR(w.d1(x), (w.a(x + h) - w.a(x - h)) / (2 * h), 1e-6);
    EXPECT_NEAR(w.d2(x), (w.d1(x + h) - w.d1(x - h)) / (2 * h), 1e-5);
    const double d3p = (w.d2(x + 2 * h) - w.d2(x)) / (2 * h), d3m = (w.d2(x) - w.d2(x - 2 * h)) / (2 * h);
    EXPECT_NEAR(w.d4(x), (d3p - d3m) / (2 * h), 1e-3 * std::max(1.0, std::abs(w.d4(x))));
    EXPECT_GT(w.d2(x), 0.0);
    EXPECT_LT(std::abs(w.d1(x)), 1.0);
  }
  EXPECT_THROW(smooth_abs_weight(0.0), std::invalid_argument);
}

TEST(MorawetzIdentity, MomentumConservedAndVirial) {
  const auto g = make_grid(40.0, 256);
  const auto u0 = gaussian(g, 1.0, 1.5, 0.3);
  const auto tr = run(u0, 1e-3, 0.1, 5);
  const auto mom = morawetz_check(tr, momentum_weight());
  for (double d : mom.derivative) EXPECT_LT(std::abs(d), 1e-8);
  // virial: d/dt int x Im(conj u u_x) * 2 = 8 E
  const auto vir = morawetz_check(tr, virial_weight());
  const double e8 = 8.0 * energy(u0);
  for (double d : vir.derivative) EXPECT_NEAR(d, e8, 1e-4 * e8);
}

TEST(MorawetzIdentity, ResidualSecondOrder) {
  const auto g = make_grid(40.0, 256);
  const auto u0 = gaussian(g, 1.0, 1.5, 0.3);
  const auto w = smooth_abs_weight();
  const double r1 = morawetz_identity_residual(run(u0, 2e-3, 0.2, 2), w);
  const double r2 = morawetz_identity_residual(run(u0, 1e-3, 0.2, 2), w);
  EXPECT_LT(r2, 1e-3);
  EXPECT_GT(r1 / r2, 3.0);
  EXPECT_THROW(morawetz_check(Trajectory({u0, u0}, 0.0, 0.1), w), std::invalid_argument);
}

TEST(MorawetzIdentity, RhsPiecesMatchNorms) {
  const auto g = make_grid(40.0, 256);
  const auto u = gaussian(g, 0.9, 1.2, 0.2);
  const auto r = morawetz_rhs(u, virial_weight());
  const double kin = sobolev_norm(u, 1.0, true);
  EXPECT_NEAR(r.hessian, 4.0 * kin * kin, 1e-10 * r.hessian);
  EXPECT_NEAR(r.potential, 4.0 / 3.0 * power_integral(u, 6), 1e-10 * r.potential);
  EXPECT_EQ(r.bilaplacian, 0.0);
}

TEST(L8Sides, FrozenTrajectory) {
  const auto g = make_grid(30.0, 256);
  const auto u = gaussian(g, 1.0, 1.5, 0.4);
  Trajectory tr(std::vector<Field>(5, u), 0.0, 0.5);  // duration 2
  const auto s = l8_bound_sides(tr, params(4.0, 0.5), false);
  EXPECT_NEAR(s.lhs, 2.0 * power_integral(u, 8), 1e-10 * s.lhs);
  EXPECT_NEAR(s.rhs, sobolev_norm(u, 1.0, true) * std::pow(lp_norm(u, 2.0), 7), 1e-12 * s.rhs);
  // Gagliardo-Nirenberg on the line: int |u|^8 <= ||u||_2^5 ||u'||_2^3
  EXPECT_LE(power_integral(u, 8), std::pow(lp_norm(u, 2.0), 5) * std::pow(sobolev_norm(u, 1.0, true), 3));
  const auto si = l8_bound_sides(tr, params(1e6, 0.5), true);
  EXPECT_NEAR(si.lhs, s.lhs, 1e-12 * s.lhs);
}

TEST(InteractionWeight, RotationForm) {
  const auto A = InteractionWeight::rotation();
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(A[0][i], 0.5, 1e-15);
    for (int j = 0; j < 4; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 4; ++k) dot += A[i][k] * A[j][k];
      EXPECT_NEAR(dot, i == j ? 1.0 : 0.0, 1e-14);
    }
  }
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int n = 0; n < 1000; ++n) {
    InteractionWeight::Point x{U(rng), U(rng), U(rng), U(rng)};
    double q = 0.0;
    for (int i = 1; i < 4; ++i) {
      double z = 0.0;
      for (int k = 0; k < 4; ++k) z += A[i][k] * x[k];
      q += z * z;
    }
    EXPECT_NEAR(InteractionWeight::value(x), std::sqrt(q), 1e-12);
    // invariant along the diagonal
    InteractionWeight::Point y{x[0] + 0.7, x[1] + 0.7, x[2] + 0.7, x[3] + 0.7};
    EXPECT_NEAR(InteractionWeight::value(y), InteractionWeight::value(x), 1e-12);
  }
}

TEST(InteractionWeight, UnitGradientOffDiagonal) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  double worst = 0.0;
  for (int n = 0; n < 100000; ++n) {
    InteractionWeight::Point x{U(rng), U(rng), U(rng), U(rng)};
    const auto gr = InteractionWeight::gradient(x);
    const double norm = std::sqrt(gr[0] * gr[0] + gr[1] * gr[1] + gr[2] * gr[2] + gr[3] * gr[3]);
    worst = std::max(worst, std::abs(norm - 1.0));
    if (n < 200) {
      for (int i = 0; i < 4; ++i) {
        auto xp = x, xm = x;
        xp[static_cast<std::size_t>(i)] += 1e-6;
        xm[static_cast<std::size_t>(i)] -= 1e-6;
        EXPECT_NEAR(gr[static_cast<std::size_t>(i)],
                    (InteractionWeight::value(xp) - InteractionWeight::value(xm)) / 2e-6, 1e-6);
      }
    }
  }
  EXPECT_LT(worst, 1e-12);
  const auto z = InteractionWeight::gradient({1.5, 1.5, 1.5, 1.5});
  for (double c : z) EXPECT_EQ(c, 0.0);
}

TEST(NbadField, ScalarOracle) {
  const auto g = make_grid(1.0, 24);
  RandomFieldParams rp;
  rp.band = 8;
  rp.l2_norm = 1.2;
  std::array<Field, 4> fs{Field::zero(g), Field::zero(g), Field::zero(g), Field::zero(g)};
  for (std::size_t k = 0; k < 4; ++k) {
    rp.seed = 20 + k;
    fs[k] = random_band_limited(g, rp);
  }
  const auto p = params(2.0, 0.4);
  const NbadField nb(fs, p);
  // oracle: commutator on an 8x grid, sampled at the base points
  const auto fine = g.refined(8);
  std::array<std::vector<Complex>, 4> C, V;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto ff = resample(fs[k], fine);
    const auto iq = apply_I(quintic_of(ff), p);
    const auto qi = quintic_of(apply_I(ff, p));
    const auto v = apply_I(fs[k], p);
    for (int j = 0; j < g.num_modes(); ++j) {
      C[k].push_back(iq.at(8 * j) - qi.at(8 * j));
      V[k].push_back(v.at(j));
    }
  }
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> J(0, g.num_modes() - 1);
  double scale = 0.0;
  for (int n = 0; n < 200; ++n) {
    const std::array<int, 4> i{J(rng), J(rng), J(rng), J(rng)};
    Complex want{};
    for (std::size_t k = 0; k < 4; ++k) {
      Complex t = C[k][static_cast<std::size_t>(i[k])];
      for (std::size_t j = 0; j < 4; ++j)
        if (j != k) t *= V[j][static_cast<std::size_t>(i[j])];
      want += t;
    }
    scale = std::max(scale, std::abs(want));
    EXPECT_LT(std::abs(nb(i[0], i[1], i[2], i[3]) - want), 1e-11 * std::max(1.0, std::abs(want)));
  }
  EXPECT_GT(scale, 1e-6);
  // s = 1: nothing to commute
  const NbadField one(fs, params(2.0, 1.0));
  EXPECT_LT(std::abs(one(1, 2, 3, 4)), 1e-12);
}

TEST(InteractionIntegrand, ExactEqualsReducedForRealInputs) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> G;
  for (int n = 0; n < 200; ++n) {
    std::array<Complex, 4> v{}, dv{}, c{}, dc{};
    for (std::size_t i = 0; i < 4; ++i) {
      v[i] = G(rng);
      dv[i] = G(rng);
      c[i] = G(rng);
      dc[i] = G(rng);
    }
    const auto grad = InteractionWeight::gradient({G(rng), G(rng), G(rng), G(rng)});
    const double a = detail::interaction_integrand(v, dv, c, dc, grad, BracketForm::kExact);
    const double b = detail::interaction_integrand(v, dv, c, dc, grad, BracketForm::kReduced);
    EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST(InteractionIntegrand, PermutationSymmetric) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> G;
  auto cplx = [&] { return Complex(G(rng), G(rng)); };
  for (int n = 0; n < 100; ++n) {
    std::array<Complex, 4> v{}, dv{}, c{}, dc{};
    InteractionWeight::Point x{};
    for (std::size_t i = 0; i < 4; ++i) {
      v[i] = cplx();
      dv[i] = cplx();
      c[i] = cplx();
      dc[i] = cplx();
      x[i] = G(rng);
    }
    const double base =
        detail::interaction_integrand(v, dv, c, dc, InteractionWeight::gradient(x), BracketForm::kExact);
    std::array<std::size_t, 4> perm{0, 1, 2, 3};
    while (std::next_permutation(perm.begin(), perm.end())) {
      std::array<Complex, 4> pv{}, pdv{}, pc{}, pdc{};
      InteractionWeight::Point px{};
      for (std::size_t i = 0; i < 4; ++i) {
        pv[i] = v[perm[i]];
        pdv[i] = dv[perm[i]];
        pc[i] = c[perm[i]];
        pdc[i] = dc[perm[i]];
        px[i] = x[perm[i]];
      }
      EXPECT_NEAR(detail::interaction_integrand(pv, pdv, pc, pdc, InteractionWeight::gradient(px), BracketForm::kExact),
                  base, 1e-12 * std::max(1.0, std::abs(base)));
    }
  }
}

TEST(InteractionError, BudgetAndTrivialCases) {
  const auto g = make_grid(1.0, 64);
  Trajectory big(std::vector<Field>(3, Field::zero(g)), 0.0, 0.1);
  EXPECT_THROW(interaction_error_integral(big, params(4.0, 0.5)), WorkBudgetError);
  const auto g2 = make_grid(1.0, 24);
  RandomFieldParams rp;
  rp.band = 8;
  rp.seed = 4;
  const auto f = random_band_limited(g2, rp);
  Trajectory tr(std::vector<Field>(3, f), 0.0, 0.1);
  EXPECT_LT(interaction_error_integral(tr, params(4.0, 1.0)), 1e-14);
  EXPECT_GT(interaction_error_integral(tr, params(2.0, 0.4)), 0.0);
}

TEST(InteractionError, BelowFactoredBound) {
  const auto g = make_grid(1.0, 36);
  RandomFieldParams rp;
  rp.band = 12;
  rp.decay = 1.0;
  rp.l2_norm = 1.0;
  SolverConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 2e-3;
  cfg.record_every = 4;
  cfg.nonlinear_step = NonlinearStep::kGalerkin;
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    rp.seed = seed;
    const auto tr = evolve(random_band_limited(g, rp), cfg);
    for (double N : {2.0, 4.0}) {
      const auto p = params(N, 0.5);
      const double e = interaction_error_integral(tr, p);
      const double bound = interaction_factored_bound(commutator_decay_norms(tr, p));
      EXPECT_GT(e, 0.0);
      EXPECT_LE(e, bound) << "seed " << seed << " N " << N;
    }
  }
}

TEST(MomentumBracket, SelfBracketAndTotalDerivative) {
  const auto g = make_grid(20.0, 256);
  const auto u = gaussian(g, 1.0, 1.3, 0.6, -0.5);
  for (double b : momentum_bracket(u, u)) EXPECT_EQ(b, 0.0);
  double total = 0.0;
  for (double b : momentum_bracket(quintic_of(u), u)) total += b * g.dx();
  EXPECT_LT(std::abs(total), 1e-12);
}

TEST(MorawetzIdentity, ZeroAndLinearFlow) {
  const auto g = make_grid(40.0, 256);
  Trajectory zero(std::vector<Field>(4, Field::zero(g)), 0.0, 0.1);
  EXPECT_EQ(morawetz_identity_residual(zero, smooth_abs_weight()), 0.0);
  // amplitude 1e-3: the sextic term is ~1e-18 of the rest
  const auto u0 = gaussian(g, 1e-3, 1.5, 0.3);
  const auto w = smooth_abs_weight();
  const double r1 = morawetz_identity_residual(run(u0, 2e-3, 0.2, 2), w);
  const double r2 = morawetz_identity_residual(run(u0, 1e-3, 0.2, 2), w);
  EXPECT_NEAR(r1 / r2, 4.0, 0.5);
}

TEST(MorawetzIdentity, MomentumConserved) {
  const auto g = make_grid(40.0, 256);
  const auto u0 = gaussian(g, 1.2, 1.0, 0.5);
  auto drift = [&](double dt) {
    const auto tr = run(u0, dt, 0.2, 10);
    double d = 0.0;
    for (const auto& f : tr.fields()) d = std::max(d, std::abs(momentum(f) - momentum(u0)));
    return d;
  };
  // Strang with spectral derivatives conserves momentum up to roundoff
  EXPECT_LT(drift(1e-3), 1e-9 * std::abs(momentum(u0)));
}

TEST(L8Sides, ZeroTrajectory) {
  const auto g = make_grid(10.0, 64);
  Trajectory zero(std::vector<Field>(3, Field::zero(g)), 0.0, 0.1);
  const auto s = l8_bound_sides(zero, params(2.0, 0.5), true);
  EXPECT_EQ(s.lhs, 0.0);
  EXPECT_EQ(s.rhs, 0.0);
  EXPECT_EQ(s.ratio, 0.0);
}

TEST(NbadField, VanishesBelowCutoff) {
  const auto g = make_grid(1.0, 48);
  RandomFieldParams rp;
  rp.band = 3;  // quintic support |k| <= 15 < N
  std::array<Field, 4> fs{Field::zero(g), Field::zero(g), Field::zero(g), Field::zero(g)};
  for (std::size_t k = 0; k < 4; ++k) {
    rp.seed = 40 + k;
    fs[k] = random_band_limited(g, rp);
  }
  const NbadField nb(fs, params(16.0, 0.4));
  for (int i = 0; i < 48; i += 5) EXPECT_LT(std::abs(nb(i, (i + 7) % 48, (i + 13) % 48, (i + 29) % 48)), 1e-12);
  std::array<Field, 4> mixed = fs;
  mixed[2] = Field::zero(make_grid(1.0, 24));
  EXPECT_THROW(NbadField(mixed, params(16.0, 0.4)), std::invalid_argument);
}

TEST(InteractionError, DecaysWithN) {
  const auto g = make_grid(0.25, 36);
  RandomFieldParams rp;
  rp.band = 12;
  rp.decay = 1.0;
  rp.seed = 3;
  SolverConfig cfg;
  cfg.dt = 1e-6;
  cfg.t_end = 2e-5;
  cfg.record_every = 5;
  cfg.nonlinear_step = NonlinearStep::kGalerkin;
  const auto tr = evolve(random_band_limited(g, rp), cfg);
  std::vector<double> x, y;
  for (double N : {8.0, 16.0, 32.0}) {
    x.push_back(std::log(N));
    y.push_back(std::log(interaction_error_integral(tr, params(N, 0.4))));
  }
  const double slope = (y[2] - y[0]) / (x[2] - x[0]);
  EXPECT_LE(slope, -0.5);
}
