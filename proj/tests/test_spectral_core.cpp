#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "nlslab/field.hpp"
#include "nlslab/initial_data.hpp"
#include "nlslab/norms.hpp"
#include "nlslab/solver.hpp"

using namespace nlslab;

namespace {

// c_k = (1/K) sum_j u_j exp(-2 pi i k x_j / L), straight from the definition.
std::vector<Complex> direct_dft(const SpectralGrid& g, std::span<const Complex> u) {
  const int n = g.num_modes();
  std::vector<Complex> c(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    const int k = g.mode_of_slot(s);
    Complex acc{};
    for (int j = 0; j < n; ++j) acc += u[static_cast<std::size_t>(j)] * std::polar(1.0, -kTwoPi * k * g.position(j) / g.box_length());
    c[static_cast<std::size_t>(s)] = acc / static_cast<double>(n);
  }
  return c;
}

std::vector<Complex> random_samples(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Complex> v(static_cast<std::size_t>(n));
  for (auto& z : v) z = {rng.normal(), rng.normal()};
  return v;
}

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(std::span<const Complex> a) {
  double m = 0.0;
  for (const auto& z : a) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

TEST(Grid, LatticeUnitBox) {
  const auto g = make_grid(1.0, 8);
  const std::vector<double> want{-4, -3, -2, -1, 0, 1, 2, 3};
  EXPECT_EQ(g.frequencies(), want);
}

TEST(Grid, LatticeBoxTwo) {
  const auto g = make_grid(2.0, 8);
  const std::vector<double> want{-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5};
  EXPECT_EQ(g.frequencies(), want);
}

TEST(Grid, SpacingAndMaxFrequency) {
  const auto g = make_grid(32.0, 256);
  EXPECT_DOUBLE_EQ(g.dx(), 0.125);
  EXPECT_DOUBLE_EQ(std::abs(g.frequency(g.min_mode())), 4.0);
}

TEST(Grid, RejectsBadArguments) {
  EXPECT_THROW(make_grid(1.0, 7), std::invalid_argument);
  EXPECT_THROW(make_grid(1.0, 6), std::invalid_argument);
  EXPECT_THROW(make_grid(0.0, 8), std::invalid_argument);
  EXPECT_THROW(make_grid(-1.0, 8), std::invalid_argument);
}

TEST(Grid, SymmetricExceptNyquist) {
  const auto g = make_grid(3.0, 16);
  for (int k = 1; k <= 7; ++k) EXPECT_DOUBLE_EQ(g.frequency(k), -g.frequency(-k));
  EXPECT_FALSE(g.contains_mode(8));
  EXPECT_TRUE(g.contains_mode(-8));
}

TEST(Transform, ConstantField) {
  const auto g = make_grid(2.5, 16);
  const Complex c{0.7, -0.2};
  const auto f = Field::sample(g, [&](double) { return c; });
  EXPECT_NEAR(std::abs(f.coeff(0) - c), 0.0, 1e-15);
  for (int k = g.min_mode(); k <= g.max_mode(); ++k) {
    if (k != 0) {
      EXPECT_LT(std::abs(f.coeff(k)), 1e-15);
    }
  }
}

TEST(Transform, SingleMode) {
  const auto g = make_grid(3.0, 32);
  const int k0 = 5;
  const auto f = Field::sample(g, [&](double x) { return std::polar(1.0, kTwoPi * g.frequency(k0) * x); });
  for (int k = g.min_mode(); k <= g.max_mode(); ++k) {
    const double want = k == k0 ? 1.0 : 0.0;
    EXPECT_NEAR(std::abs(f.coeff(k) - want), 0.0, 1e-14);
  }
}

TEST(Transform, MatchesDirectDftOracle) {
  for (int n : {8, 16, 30, 64}) {
    const auto g = make_grid(1.7, n);
    const auto u = random_samples(n, 11 + static_cast<std::uint64_t>(n));
    const auto f = Field::from_physical(g, u);
    const auto oracle = direct_dft(g, u);
    EXPECT_LT(max_abs_diff(f.spectral(), oracle), 1e-12 * max_abs(oracle)) << "K=" << n;
  }
}

TEST(Transform, RoundTripAllSizes) {
  for (int n = 8; n <= 1024; n *= 2) {
    const auto g = make_grid(5.0, n);
    const auto u = random_samples(n, static_cast<std::uint64_t>(n));
    const auto back = inverse_transform(g, forward_transform(g, u));
    EXPECT_LT(max_abs_diff(back, u), 1e-12 * max_abs(u)) << "K=" << n;
  }
}

TEST(Transform, Plancherel) {
  const auto g = make_grid(6.0, 128);
  const auto f = Field::from_physical(g, random_samples(128, 3));
  double phys = 0.0, spec = 0.0;
  for (const auto& z : f.physical()) phys += std::norm(z);
  for (const auto& z : f.spectral()) spec += std::norm(z);
  phys *= g.dx();
  spec *= g.box_length();
  EXPECT_NEAR(phys, spec, 1e-10 * phys);
}

TEST(Transform, FieldRepresentationsAgree) {
  const auto g = make_grid(2.0, 32);
  const auto a = Field::from_physical(g, random_samples(32, 5));
  const auto b = Field::from_spectral(g, std::vector<Complex>(a.spectral().begin(), a.spectral().end()));
  EXPECT_EQ(a.source(), Field::Source::kPhysical);
  EXPECT_EQ(b.source(), Field::Source::kSpectral);
  EXPECT_LT(max_abs_diff(a.physical(), b.physical()), 1e-12 * max_abs(a.physical()));
}

TEST(Multiplier, IdentitySymbol) {
  const auto g = make_grid(2.0, 32);
  const auto f = Field::from_physical(g, random_samples(32, 7));
  const auto h = apply_multiplier(f, [](double) { return Complex(1.0); });
  EXPECT_EQ(max_abs_diff(f.spectral(), h.spectral()), 0.0);
  const auto h0 = apply_multiplier(f, [](double xi) { return Complex(std::pow(japanese(kTwoPi * xi), 0.0)); });
  EXPECT_LT(max_abs_diff(f.physical(), h0.physical()), 1e-13 * max_abs(f.physical()));
}

TEST(Multiplier, DerivativeMatchesCentralDifference) {
  // Central difference error for e^{i w x}: |w - sin(w dx)/dx| = w^3 dx^2 / 6 + O(dx^4).
  for (int n : {64, 128, 256}) {
    const auto g = make_grid(4.0, n);
    const double xi0 = g.frequency(3);
    const double w = kTwoPi * xi0;
    const auto f = Field::sample(g, [&](double x) { return std::polar(1.0, w * x); });
    const auto d = apply_multiplier(f, [](double xi) { return Complex(0.0, kTwoPi * xi); });
    double err = 0.0;
    for (int j = 0; j < n; ++j) {
      const Complex fd = (f.at((j + 1) % n) - f.at((j + n - 1) % n)) / (2.0 * g.dx());
      err = std::max(err, std::abs(fd - d.at(j)));
    }
    const double predicted = w * w * w * g.dx() * g.dx() / 6.0;
    EXPECT_NEAR(err, predicted, 0.02 * predicted) << "K=" << n;
    EXPECT_NEAR(std::abs(d.at(0)), w, 1e-12 * w);
  }
}

TEST(Multiplier, RejectsNonFinite) {
  const auto g = make_grid(2.0, 16);
  const auto f = Field::from_physical(g, random_samples(16, 1));
  EXPECT_THROW(apply_multiplier(f, [](double xi) { return Complex(1.0 / xi); }), std::invalid_argument);
  EXPECT_THROW(apply_multiplier(f, [](double) { return Complex(std::nan("")); }), std::invalid_argument);
}

TEST(Multiplier, Composes) {
  const auto g = make_grid(2.0, 64);
  const auto f = Field::from_physical(g, random_samples(64, 9));
  auto s1 = [](double xi) { return Complex(std::cos(xi), 0.3 * xi); };
  auto s2 = [](double xi) { return Complex(1.0 / (1.0 + xi * xi), -0.1); };
  const auto a = apply_multiplier(apply_multiplier(f, s1), s2);
  const auto b = apply_multiplier(f, [&](double xi) { return s1(xi) * s2(xi); });
  EXPECT_LT(max_abs_diff(a.spectral(), b.spectral()), 1e-15 * max_abs(b.spectral()) * 4);
}

TEST(LpNorm, ConstantField) {
  const auto g = make_grid(3.0, 16);
  const auto f = Field::sample(g, [](double) { return Complex(0.0, -2.0); });
  for (double p : {1.0, 2.0, 3.5, 6.0}) EXPECT_NEAR(lp_norm(f, p), 2.0 * std::pow(3.0, 1.0 / p), 1e-13);
  EXPECT_DOUBLE_EQ(lp_norm(f, kInf), 2.0);
}

TEST(LpNorm, ZeroField) {
  const auto f = Field::zero(make_grid(1.0, 8));
  for (double p : {1.0, 2.0, 8.0, kInf}) EXPECT_EQ(lp_norm(f, p), 0.0);
}

TEST(LpNorm, GaussianMatchesAdaptiveQuadrature) {
  const auto g = make_grid(20.0, 256);
  const double a = 1.3, sigma = 1.1;
  const auto f = gaussian(g, a, sigma);
  for (double p : {1.0, 2.0, 3.0, 6.0, 8.0}) {
    auto integrand = [&](double x) { return std::pow(a * std::exp(-x * x / (sigma * sigma)), p); };
    const double q = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, -10.0, 10.0, 15, 1e-14);
    EXPECT_NEAR(lp_norm(f, p), std::pow(q, 1.0 / p), 1e-6 * std::pow(q, 1.0 / p)) << "p=" << p;
  }
}

TEST(LpNorm, RejectsSmallP) {
  EXPECT_THROW(lp_norm(Field::zero(make_grid(1.0, 8)), 0.5), std::invalid_argument);
}

TEST(Sobolev, ZeroOrderIsL2) {
  const auto g = make_grid(2.0, 64);
  const auto f = Field::from_physical(g, random_samples(64, 13));
  EXPECT_NEAR(sobolev_norm(f, 0.0, false), lp_norm(f, 2.0), 1e-12 * lp_norm(f, 2.0));
  EXPECT_NEAR(sobolev_norm(f, 0.0, true), lp_norm(f, 2.0), 1e-12 * lp_norm(f, 2.0));
}

TEST(Sobolev, SingleMode) {
  const auto g = make_grid(2.0, 32);
  const double amp = 0.8;
  const int k0 = -3;
  const auto f = Field::sample(g, [&](double x) { return amp * std::polar(1.0, kTwoPi * g.frequency(k0) * x); });
  for (double s : {0.5, 1.0, 1.7}) {
    const double want = amp * std::sqrt(2.0) * std::pow(kTwoPi * std::abs(g.frequency(k0)), s);
    EXPECT_NEAR(sobolev_norm(f, s, true), want, 1e-12 * want);
  }
}

TEST(Sobolev, FirstOrderIsDerivativeNorm) {
  const auto g = make_grid(2.0, 64);
  const auto f = Field::from_physical(g, random_samples(64, 17));
  const auto d = apply_multiplier(f, [](double xi) { return Complex(0.0, kTwoPi * xi); });
  EXPECT_NEAR(sobolev_norm(f, 1.0, true), lp_norm(d, 2.0), 1e-12 * lp_norm(d, 2.0));
}

TEST(Sobolev, RejectsNegativeHomogeneousWithMean) {
  const auto g = make_grid(2.0, 16);
  const auto f = Field::sample(g, [](double) { return Complex(1.0); });
  EXPECT_THROW(sobolev_norm(f, -0.5, true), std::invalid_argument);
  const auto z = Field::sample(g, [&](double x) { return std::polar(1.0, kTwoPi * g.frequency(1) * x); });
  EXPECT_NO_THROW(sobolev_norm(z, -0.5, true));
}

TEST(Sobolev, MonotoneInS) {
  const auto g = make_grid(2.0, 64);
  const auto f = Field::from_physical(g, random_samples(64, 19));
  double prev = 0.0;
  for (double s = -1.0; s <= 2.0; s += 0.25) {
    const double v = sobolev_norm(f, s, false);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(MixedNorm, AdmissibleFlag) {
  for (const auto& p : admissible_catalogue()) EXPECT_TRUE(p.admissible());
  EXPECT_FALSE(MixedNormSpec(6.0, 2.0).admissible());
  EXPECT_FALSE(MixedNormSpec(8.0, 8.0).admissible());
  EXPECT_THROW(MixedNormSpec(1.0, 2.0), std::invalid_argument);
}

TEST(MixedNorm, TimeConstantField) {
  const auto g = make_grid(4.0, 64);
  const auto f = gaussian(g, 1.0, 0.5);
  const double T = 0.8;
  std::vector<Field> fs(17, f);
  const Trajectory tr(fs, 0.0, T / 16.0);
  EXPECT_NEAR(mixed_norm(tr, {6.0, 6.0}), std::pow(T, 1.0 / 6.0) * lp_norm(f, 6.0), 1e-12);
  EXPECT_NEAR(mixed_norm(tr, {kInf, 2.0}), lp_norm(f, 2.0), 1e-15);
}

TEST(MixedNorm, MassConservingTrajectory) {
  const auto g = make_grid(16.0, 128);
  const auto f = gaussian(g, 1.0, 1.0);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.2;
  cfg.record_every = 10;
  const auto tr = evolve(f, cfg);
  EXPECT_NEAR(mixed_norm(tr, {kInf, 2.0}), lp_norm(f, 2.0), 1e-12);
}

TEST(MixedNorm, DiagonalEqualsFlattenedSpaceTime) {
  const auto g = make_grid(8.0, 64);
  std::vector<Field> fs;
  for (int i = 0; i < 9; ++i) fs.push_back(gaussian(g, 1.0 + 0.1 * i, 1.0, 0.2 * i));
  const Trajectory tr(fs, 0.0, 0.05);
  const auto w = trapezoid_weights(fs.size(), 0.05);
  for (double p : {2.0, 4.0, 6.0}) {
    double flat = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i)
      for (const auto& z : fs[i].physical()) flat += w[i] * g.dx() * std::pow(std::abs(z), p);
    flat = std::pow(flat, 1.0 / p);
    EXPECT_NEAR(mixed_norm(tr, {p, p}), flat, 1e-10 * flat);
  }
}

TEST(MixedNorm, RefinedSamplingOracle) {
  const auto g = make_grid(16.0, 128);
  const auto f = gaussian(g, 1.0, 1.0);
  auto build = [&](int samples) {
    std::vector<Field> fs;
    const double h = 0.5 / samples;
    for (int i = 0; i <= samples; ++i) fs.push_back(linear_propagator(f, i * h));
    return Trajectory(fs, 0.0, h);
  };
  const double coarse = mixed_norm(build(200), {8.0, 8.0});
  const double fine = mixed_norm(build(400), {8.0, 8.0});
  EXPECT_NEAR(coarse, fine, 1e-4 * fine);
}

TEST(WindowedXsb, ZeroTrajectory) {
  const auto g = make_grid(2.0, 16);
  const Trajectory tr(std::vector<Field>(20, Field::zero(g)), 0.0, 0.01);
  EXPECT_EQ(windowed_xsb_norm(tr, 1.0, 0.6), 0.0);
}

TEST(WindowedXsb, RejectsShortTrajectory) {
  const auto g = make_grid(2.0, 16);
  const Trajectory tr(std::vector<Field>(15, Field::zero(g)), 0.0, 0.01);
  EXPECT_THROW(windowed_xsb_norm(tr, 1.0, 0.6), std::invalid_argument);
}

TEST(WindowedXsb, ZeroWeightsGiveWindowedL2) {
  const auto g = make_grid(4.0, 32);
  const auto f = Field::from_physical(g, random_samples(32, 23));
  std::vector<Field> fs;
  for (int i = 0; i < 24; ++i) fs.push_back(nonlinear_phase(linear_propagator(f, 0.01 * i), 0.02 * i));
  const Trajectory tr(fs, 0.0, 0.01);
  const auto w = hann_window(fs.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < fs.size(); ++n) acc += 0.01 * w[n] * w[n] * mass(fs[n]);
  EXPECT_NEAR(windowed_xsb_norm(tr, 0.0, 0.0), std::sqrt(acc), 1e-12 * std::sqrt(acc));
}

namespace {

// Space-time transform written out directly: both DFTs as plain sums, the
// temporal frequency placed by choosing the alias nearest the dispersion curve.
double xsb_direct_oracle(const Trajectory& tr, double s, double b) {
  const auto& g = tr.grid();
  const int kn = g.num_modes();
  const std::size_t m = tr.size(), p = 2 * m;
  const double dt = tr.dt_sample();
  double total = 0.0;
  for (int k = g.min_mode(); k <= g.max_mode(); ++k) {
    const double omega = kTwoPi * k / g.box_length();
    std::vector<Complex> ck(m);
    for (std::size_t n = 0; n < m; ++n) {
      Complex acc{};
      for (int j = 0; j < kn; ++j) acc += tr[n].at(j) * std::polar(1.0, -omega * g.position(j));
      const double wn = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(n) / static_cast<double>(m - 1)));
      ck[n] = wn * acc / static_cast<double>(kn);
    }
    for (std::size_t q = 0; q < p; ++q) {
      double tau = 2.0 * kPi * static_cast<double>(q) / (static_cast<double>(p) * dt);
      const double period = 2.0 * kPi / dt;
      const double shift = std::round((-omega * omega - tau) / period);
      tau += shift * period;
      Complex acc{};
      for (std::size_t n = 0; n < m; ++n) acc += ck[n] * std::polar(1.0, -tau * static_cast<double>(n) * dt);
      acc *= dt;
      total += std::pow(1.0 + std::abs(omega), 2 * s) * std::pow(1.0 + std::abs(tau + omega * omega), 2 * b) * std::norm(acc);
    }
  }
  return std::sqrt(g.box_length() * total / (static_cast<double>(p) * dt));
}

}  // namespace

TEST(WindowedXsb, LinearSingleModeMatchesDirectOracle) {
  const auto g = make_grid(2.0, 16);
  const int k0 = 3;
  const auto f = Field::sample(g, [&](double x) { return std::polar(0.9, kTwoPi * g.frequency(k0) * x); });
  std::vector<Field> fs;
  const double dt = 0.01;
  for (int i = 0; i < 64; ++i) fs.push_back(linear_propagator(f, i * dt));
  const Trajectory tr(fs, 0.0, dt);
  const double got = windowed_xsb_norm(tr, 1.0, 0.6);
  const double want = xsb_direct_oracle(tr, 1.0, 0.6);
  EXPECT_NEAR(got, want, 1e-8 * want);
  // Concentration near the curve: the same mode frozen in time sits at
  // tau = 0, far from -(2 pi xi)^2, and pays a much larger b-weight.
  const Trajectory frozen(std::vector<Field>(64, f), 0.0, dt);
  EXPECT_LT(got, 0.25 * windowed_xsb_norm(frozen, 1.0, 0.6));
}

TEST(WindowedXsb, RandomTrajectoryMatchesDirectOracle) {
  const auto g = make_grid(3.0, 16);
  const auto f = Field::from_physical(g, random_samples(16, 29));
  std::vector<Field> fs;
  for (int i = 0; i < 18; ++i) fs.push_back(nonlinear_phase(linear_propagator(f, 0.003 * i), 0.01));
  const Trajectory tr(fs, 0.0, 0.003);
  const double got = windowed_xsb_norm(tr, 0.5, 0.7);
  const double want = xsb_direct_oracle(tr, 0.5, 0.7);
  EXPECT_NEAR(got, want, 1e-8 * want);
}
