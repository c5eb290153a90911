#pragma once

// Momentum density and current, Morawetz actions and their identity, the two
// sides of the interaction L^8 bound, and the almost-Morawetz error term
// built from N_bad on the four-fold tensor product.

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlslab/field.hpp"
#include "nlslab/ioperator.hpp"
#include "nlslab/multilinear.hpp"
#include "nlslab/norms.hpp"
#include "nlslab/parallel.hpp"

namespace nlslab {

struct MomentumFields {
  SpectralGrid grid;
  std::vector<double> density;  // 2 Im(conj(u) u_x)
  std::vector<double> current;  // -(|u|^2)_xx + 4 |u_x|^2
};

inline MomentumFields momentum_fields(const Field& f) {
  const auto& g = f.grid();
  const Field d = derivative(f);
  const Field rho = map_physical(f, [](Complex z) { return Complex(std::norm(z)); });
  const Field rho_xx = derivative(rho, 2);
  MomentumFields m{g, std::vector<double>(static_cast<std::size_t>(g.num_modes())),
                   std::vector<double>(static_cast<std::size_t>(g.num_modes()))};
  for (int j = 0; j < g.num_modes(); ++j) {
    const Complex u = f.at(j), ux = d.at(j);
    m.density[static_cast<std::size_t>(j)] = 2.0 * (std::conj(u) * ux).imag();
    m.current[static_cast<std::size_t>(j)] = -rho_xx.at(j).real() + 4.0 * std::norm(ux);
  }
  return m;
}

/// {f, g}_p = Re(f conj(g_x) - g conj(f_x)) pointwise.
inline std::vector<double> momentum_bracket(const Field& f, const Field& g) {
  require_same_grid(f.grid(), g.grid(), "momentum_bracket");
  const Field fx = derivative(f), gx = derivative(g);
  std::vector<double> out(static_cast<std::size_t>(f.grid().num_modes()));
  for (int j = 0; j < f.grid().num_modes(); ++j)
    out[static_cast<std::size_t>(j)] = (f.at(j) * std::conj(gx.at(j)) - g.at(j) * std::conj(fx.at(j))).real();
  return out;
}

/// A weight on the line with its derivatives up to order four.
struct MorawetzWeight {
  std::function<double(double)> a, d1, d2, d4;
};

/// a(x) = sqrt(ell^2 + (x - x0)^2): convex, |a'| < 1.
inline MorawetzWeight smooth_abs_weight(double ell = 1.0, double x0 = 0.0) {
  if (!(ell > 0.0)) throw std::invalid_argument("smooth_abs_weight: ell must be positive");
  const double l2 = ell * ell;
  return {[=](double x) { return std::sqrt(l2 + (x - x0) * (x - x0)); },
          [=](double x) { return (x - x0) / std::sqrt(l2 + (x - x0) * (x - x0)); },
          [=](double x) { return l2 / std::pow(l2 + (x - x0) * (x - x0), 1.5); },
          [=](double x) {
            const double y2 = (x - x0) * (x - x0);
            return l2 * (12.0 * y2 - 3.0 * l2) / std::pow(l2 + y2, 3.5);
          }};
}

/// a(x) = x: M_a is the total momentum, dM/dt = 0.
inline MorawetzWeight momentum_weight() {
  return {[](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; },
          [](double) { return 0.0; }};
}

/// a(x) = x^2 / 2: virial weight, dM/dt = 8 E(u).
inline MorawetzWeight virial_weight() {
  return {[](double x) { return 0.5 * x * x; }, [](double x) { return x; }, [](double) { return 1.0; },
          [](double) { return 0.0; }};
}

/// M_a = 2 int a'(x) Im(conj(u) u_x) dx.
inline double morawetz_action(const Field& f, const MorawetzWeight& w) {
  const auto& g = f.grid();
  const Field d = derivative(f);
  double acc = 0.0;
  for (int j = 0; j < g.num_modes(); ++j) acc += w.d1(g.position(j)) * (std::conj(f.at(j)) * d.at(j)).imag();
  return 2.0 * acc * g.dx();
}

struct MorawetzRhs {
  double bilaplacian = 0.0;  // -int a'''' |u|^2
  double hessian = 0.0;      // 4 int a'' |u_x|^2
  double potential = 0.0;    // 2 int a'' (2/3) |u|^6
  double total() const { return bilaplacian + hessian + potential; }
};

inline MorawetzRhs morawetz_rhs(const Field& f, const MorawetzWeight& w) {
  const auto& g = f.grid();
  const Field d = derivative(f);
  MorawetzRhs r;
  for (int j = 0; j < g.num_modes(); ++j) {
    const double x = g.position(j);
    const double rho = std::norm(f.at(j));
    r.bilaplacian -= w.d4(x) * rho;
    r.hessian += 4.0 * w.d2(x) * std::norm(d.at(j));
    r.potential += 2.0 * w.d2(x) * (2.0 / 3.0) * rho * rho * rho;
  }
  r.bilaplacian *= g.dx();
  r.hessian *= g.dx();
  r.potential *= g.dx();
  return r;
}

struct MorawetzCheck {
  double residual = 0.0;            // max |dM/dt (central difference) - rhs|
  double min_derivative = 0.0;      // min over interior samples of dM/dt
  int monotonicity_violations = 0;  // samples with dM/dt < -residual
  std::vector<double> times, action, derivative, rhs;
};

inline MorawetzCheck morawetz_check(const Trajectory& tr, const MorawetzWeight& w) {
  if (tr.size() < 3) throw std::invalid_argument("morawetz_check: need at least three samples");
  MorawetzCheck c;
  std::vector<double> m(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) m[i] = morawetz_action(tr[i], w);
  c.action = m;
  c.min_derivative = 1e300;
  for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
    const double fd = (m[i + 1] - m[i - 1]) / (2.0 * tr.dt_sample());
    const double rhs = morawetz_rhs(tr[i], w).total();
    c.times.push_back(tr.time(i));
    c.derivative.push_back(fd);
    c.rhs.push_back(rhs);
    c.residual = std::max(c.residual, std::abs(fd - rhs));
    c.min_derivative = std::min(c.min_derivative, fd);
  }
  for (double d : c.derivative)
    if (d < -c.residual) ++c.monotonicity_violations;
  return c;
}

inline double morawetz_identity_residual(const Trajectory& tr, const MorawetzWeight& w) {
  return morawetz_check(tr, w).residual;
}

// ---------------------------------------------------------------------------
// Interaction L^8 bound

struct L8Sides {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// lhs = ||v||_{L^8_t L^8_x}^8, rhs = sup_t ||v||_{H^1 hom} ||v||_{L^2}^7, v = Iu or u.
inline L8Sides l8_bound_sides(const Trajectory& tr, const ISymbolParams& p, bool use_I) {
  if (tr.empty()) throw std::invalid_argument("l8_bound_sides: empty trajectory");
  const Trajectory v = use_I ? tr.map([&p](const Field& f) { return apply_I(f, p); }) : tr;
  L8Sides s;
  s.lhs = std::pow(mixed_norm(v, MixedNormSpec{8.0, 8.0}), 8.0);
  for (const auto& f : v.fields()) s.rhs = std::max(s.rhs, sobolev_norm(f, 1.0, true) * std::pow(lp_norm(f, 2.0), 7.0));
  s.ratio = s.rhs > 0.0 ? s.lhs / s.rhs : 0.0;
  return s;
}

// ---------------------------------------------------------------------------
// Interaction weight on R^4

/// a(x) = |(z2, z3, z4)| for z = A x, A orthonormal with first row (1/2,1/2,1/2,1/2);
/// z2^2 + z3^2 + z4^2 = |x|^2 - (sum x)^2 / 4.
struct InteractionWeight {
  using Point = std::array<double, 4>;

  /// Householder reflection taking e1 to (1/2,1/2,1/2,1/2); symmetric, so
  /// its first row is that vector.
  static std::array<Point, 4> rotation() {
    const Point h{0.5, 0.5, 0.5, 0.5};
    Point w{1.0 - h[0], -h[1], -h[2], -h[3]};
    double ww = 0.0;
    for (double x : w) ww += x * x;
    std::array<Point, 4> a{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a[i][j] = (i == j ? 1.0 : 0.0) - 2.0 * w[i] * w[j] / ww;
    return a;
  }

  static double value(const Point& x) {
    const double s = x[0] + x[1] + x[2] + x[3];
    const double q = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] - 0.25 * s * s;
    return std::sqrt(std::max(q, 0.0));
  }

  /// grad a = (x - mean(x)) / a; zero on the diagonal.
  static Point gradient(const Point& x) {
    const double a = value(x);
    if (a == 0.0) return {0.0, 0.0, 0.0, 0.0};
    const double mean = 0.25 * (x[0] + x[1] + x[2] + x[3]);
    return {(x[0] - mean) / a, (x[1] - mean) / a, (x[2] - mean) / a, (x[3] - mean) / a};
  }
};

// ---------------------------------------------------------------------------
// N_bad and the interaction error integral

/// Per-field samples on the base grid used by N_bad: v = I f, its derivative,
/// C = I(|f|^4 f) - |If|^4 If and its derivative.
struct NbadFactors {
  std::vector<Complex> v, dv, c, dc;
};

inline NbadFactors nbad_factors(const Field& f, const ISymbolParams& p) {
  const auto& g = f.grid();
  const Field v = apply_I(f, p);
  const Field dv = derivative(v);
  const Field c = commutator(f, p);
  const Field dc = derivative(c);
  const int stride = c.grid().num_modes() / g.num_modes();
  NbadFactors out;
  const auto n = static_cast<std::size_t>(g.num_modes());
  out.v.resize(n);
  out.dv.resize(n);
  out.c.resize(n);
  out.dc.resize(n);
  for (int j = 0; j < g.num_modes(); ++j) {
    out.v[static_cast<std::size_t>(j)] = v.at(j);
    out.dv[static_cast<std::size_t>(j)] = dv.at(j);
    out.c[static_cast<std::size_t>(j)] = c.at(stride * j);
    out.dc[static_cast<std::size_t>(j)] = dc.at(stride * j);
  }
  return out;
}

/// N_bad(x1..x4) = sum_k C_k(x_k) prod_{j != k} I f_j(x_j) on the 4-point grid.
class NbadField {
 public:
  NbadField(const std::array<Field, 4>& fs, const ISymbolParams& p) {
    for (int k = 1; k < 4; ++k) require_same_grid(fs[0].grid(), fs[static_cast<std::size_t>(k)].grid(), "NbadField");
    for (std::size_t k = 0; k < 4; ++k) factors_[k] = nbad_factors(fs[k], p);
  }

  Complex operator()(int i1, int i2, int i3, int i4) const {
    const std::array<std::size_t, 4> idx{static_cast<std::size_t>(i1), static_cast<std::size_t>(i2),
                                         static_cast<std::size_t>(i3), static_cast<std::size_t>(i4)};
    Complex acc{};
    for (std::size_t k = 0; k < 4; ++k) {
      Complex term = factors_[k].c[idx[k]];
      for (std::size_t j = 0; j < 4; ++j)
        if (j != k) term *= factors_[j].v[idx[j]];
      acc += term;
    }
    return acc;
  }

 private:
  std::array<NbadFactors, 4> factors_;
};

/// kExact: grad a . {N_bad, prod I u_j}_p with every conjugate kept.
/// kReduced: sum_k d_k a Re([C_k v_k' - C_k' v_k] prod_{j != k} v_j^2), the
/// form obtained when the conjugates are dropped.
enum class BracketForm { kExact, kReduced };

struct InteractionOptions {
  BracketForm form = BracketForm::kExact;
  int max_modes = 48;
};

namespace detail {

inline double interaction_integrand(const std::array<Complex, 4>& v, const std::array<Complex, 4>& dv,
                                    const std::array<Complex, 4>& c, const std::array<Complex, 4>& dc,
                                    const std::array<double, 4>& grad, BracketForm form) {
  double acc = 0.0;
  if (form == BracketForm::kReduced) {
    for (std::size_t k = 0; k < 4; ++k) {
      Complex rest = 1.0;
      for (std::size_t j = 0; j < 4; ++j)
        if (j != k) rest *= v[j] * v[j];
      acc += grad[k] * ((c[k] * dv[k] - dc[k] * v[k]) * rest).real();
    }
    return acc;
  }
  // products of v over all indices except one or two
  std::array<Complex, 4> ex1{};
  for (std::size_t k = 0; k < 4; ++k) {
    Complex p = 1.0;
    for (std::size_t j = 0; j < 4; ++j)
      if (j != k) p *= v[j];
    ex1[k] = p;
  }
  Complex g = v[0] * v[1] * v[2] * v[3];
  Complex f{};
  for (std::size_t k = 0; k < 4; ++k) f += c[k] * ex1[k];
  for (std::size_t i = 0; i < 4; ++i) {
    const Complex dg = dv[i] * ex1[i];
    Complex df = dc[i] * ex1[i];
    for (std::size_t k = 0; k < 4; ++k) {
      if (k == i) continue;
      Complex p = c[k] * dv[i];
      for (std::size_t j = 0; j < 4; ++j)
        if (j != k && j != i) p *= v[j];
      df += p;
    }
    acc += grad[i] * (f * std::conj(dg) - g * std::conj(df)).real();
  }
  return acc;
}

}  // namespace detail

/// int_R^4 grad a . {N_bad, prod I u_j}_p dx at one time (all four copies = f).
inline double interaction_error_density(const Field& f, const ISymbolParams& p, const InteractionOptions& opt = {}) {
  const auto& g = f.grid();
  const int K = g.num_modes();
  const NbadFactors nf = nbad_factors(f, p);
  std::vector<double> x(static_cast<std::size_t>(K));
  for (int j = 0; j < K; ++j) x[static_cast<std::size_t>(j)] = g.position(j);
  const double dx4 = std::pow(g.dx(), 4);
  const double total = parallel::reduce_sum<double>(K, [&](std::ptrdiff_t i1) {
    double acc = 0.0;
    std::array<Complex, 4> v{}, dv{}, c{}, dc{};
    auto load = [&](std::size_t slot, std::size_t j) {
      v[slot] = nf.v[j];
      dv[slot] = nf.dv[j];
      c[slot] = nf.c[j];
      dc[slot] = nf.dc[j];
    };
    load(0, static_cast<std::size_t>(i1));
    for (int i2 = 0; i2 < K; ++i2) {
      load(1, static_cast<std::size_t>(i2));
      for (int i3 = 0; i3 < K; ++i3) {
        load(2, static_cast<std::size_t>(i3));
        for (int i4 = 0; i4 < K; ++i4) {
          load(3, static_cast<std::size_t>(i4));
          const auto grad = InteractionWeight::gradient({x[static_cast<std::size_t>(i1)], x[static_cast<std::size_t>(i2)],
                                                         x[static_cast<std::size_t>(i3)], x[static_cast<std::size_t>(i4)]});
          acc += detail::interaction_integrand(v, dv, c, dc, grad, opt.form);
        }
      }
    }
    return acc;
  });
  return total * dx4;
}

/// |int_t int_R^4 grad a . {N_bad, prod I u_j}_p|, trapezoid in time.
inline double interaction_error_integral(const Trajectory& tr, const ISymbolParams& p, const InteractionOptions& opt = {}) {
  if (tr.empty()) throw std::invalid_argument("interaction_error_integral: empty trajectory");
  if (tr.grid().num_modes() > opt.max_modes)
    throw WorkBudgetError("interaction_error_integral: K = " + std::to_string(tr.grid().num_modes()) +
                          " exceeds the 4D quadrature budget K <= " + std::to_string(opt.max_modes));
  const Trajectory u = project_commutator_band(tr);
  const auto w = trapezoid_weights(u.size(), u.dt_sample());
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += w[i] * interaction_error_density(u[i], p, opt);
  return std::abs(acc);
}

/// (c0 + c1) zi^7: the factored bound on the same (band-projected) trajectory.
inline double interaction_factored_bound(const CommutatorNorms& n) { return (n.c0 + n.c1) * std::pow(n.zi, 7.0); }

}  // namespace nlslab
