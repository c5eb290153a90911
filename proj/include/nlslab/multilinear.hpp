#pragma once

// Multilinear forms on the zero-sum lattice, the symbols M6 and M10, the
// second modified energy, the differentiation law and the increment identity.
//
// Conventions (Fourier-series coefficients c_k of field.hpp):
//   Lambda_n(M; f) = L * sum_{k in Gamma_n, |k_j| <= band} M(xi) prod_j g_j(k_j),
//   g_j(k) = c_k for odd j and conj(c_{-k}) for even j (1-based slots),
// so Lambda_2(1) = ||f||^2 and Lambda_6(prod m_j) = int |If|^6.
// Symbols take xi_k = k / L; dispersive weights carry (2 pi)^2 explicitly.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlslab/field.hpp"
#include "nlslab/ioperator.hpp"
#include "nlslab/parallel.hpp"
#include "nlslab/solver.hpp"

namespace nlslab {

class WorkBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WorkBudget {
  long long max_tuples = 39135393;  // 33^5: Gamma_6 up to band 16
  int max_increment_band = 6;
};

/// A symbol of fixed arity evaluated on frequencies xi (cycles per length).
struct Symbol {
  int arity = 0;
  std::function<Complex(std::span<const double>)> fn;

  Complex operator()(std::span<const double> xi) const {
    if (static_cast<int>(xi.size()) != arity) throw std::invalid_argument("Symbol: arity mismatch");
    return fn(xi);
  }
};

inline Symbol constant_symbol(int arity, Complex value) {
  return {arity, [value](std::span<const double>) { return value; }};
}

/// X_j^l(M): slot j (1-based) receives xi_j + ... + xi_{j+l}.
inline Symbol elongate(const Symbol& m, int j, int l) {
  if (j < 1 || j > m.arity) throw std::invalid_argument("elongate: slot index out of range");
  if (l < 0 || l % 2 != 0) throw std::invalid_argument("elongate: l must be a non-negative even integer");
  if (l == 0) return m;
  const int n = m.arity;
  return {n + l, [m, j, l, n](std::span<const double> xi) {
            std::vector<double> y;
            y.reserve(static_cast<std::size_t>(n));
            for (int i = 0; i < j - 1; ++i) y.push_back(xi[static_cast<std::size_t>(i)]);
            double merged = 0.0;
            for (int i = j - 1; i < j + l; ++i) merged += xi[static_cast<std::size_t>(i)];
            y.push_back(merged);
            for (int i = j + l; i < n + l; ++i) y.push_back(xi[static_cast<std::size_t>(i)]);
            return m.fn(y);
          }};
}

/// One integer zero-sum tuple.
struct FrequencyTuple {
  std::vector<int> k;
  double box_length = 1.0;

  int n() const { return static_cast<int>(k.size()); }
  double xi(int j) const { return k[static_cast<std::size_t>(j)] / box_length; }
  std::vector<double> xis() const {
    std::vector<double> out(k.size());
    for (std::size_t j = 0; j < k.size(); ++j) out[j] = k[j] / box_length;
    return out;
  }
};

// ---------------------------------------------------------------------------
// Lattice engine

/// Coefficients g(k), |k| <= band, for one slot of a form.
struct Slot {
  int band = 0;
  std::vector<Complex> g;  // index k + band

  Complex operator()(int k) const { return g[static_cast<std::size_t>(k + band)]; }
};

/// Slot built from mode coefficients c_k (|k| <= band): c_k, or conj(c_{-k})
/// when conj_reflect is set.
inline Slot make_slot(const std::vector<Complex>& by_mode, int band, bool conj_reflect) {
  Slot s;
  s.band = band;
  s.g.resize(static_cast<std::size_t>(2 * band + 1));
  for (int k = -band; k <= band; ++k)
    s.g[static_cast<std::size_t>(k + band)] =
        conj_reflect ? std::conj(by_mode[static_cast<std::size_t>(-k + band)]) : by_mode[static_cast<std::size_t>(k + band)];
  return s;
}

/// Coefficients c_k of f for |k| <= band (index k + band).
inline std::vector<Complex> band_coefficients(const Field& f, int band) {
  std::vector<Complex> c(static_cast<std::size_t>(2 * band + 1));
  for (int k = -band; k <= band; ++k) c[static_cast<std::size_t>(k + band)] = f.coeff(k);
  return c;
}

/// The alternating slots f, conj f, f, ... for Lambda_n(M; f).
inline std::vector<Slot> alternating_slots(const std::vector<Complex>& c, int band, int n) {
  std::vector<Slot> slots;
  for (int j = 1; j <= n; ++j) slots.push_back(make_slot(c, band, j % 2 == 0));
  return slots;
}

inline long long lattice_work(const std::vector<Slot>& slots) {
  long long w = 1;
  for (std::size_t i = 0; i + 1 < slots.size(); ++i) {
    w *= 2LL * slots[i].band + 1;
    if (w > (1LL << 62) / 64) return w;
  }
  return w;
}

inline void check_budget(const std::vector<Slot>& slots, const WorkBudget& budget, const char* where) {
  const long long w = lattice_work(slots);
  if (w > budget.max_tuples)
    throw WorkBudgetError(std::string(where) + ": lattice work " + std::to_string(w) + " exceeds the budget of " +
                          std::to_string(budget.max_tuples) + " tuples");
}

namespace detail {

template <typename Sym>
struct LatticeWalker {
  const Sym& sym;
  const std::vector<Slot>& slots;
  int n;
  std::vector<int> tail;  // tail[d] = sum of bands of slots d..n-1

  Complex walk(int depth, int partial, Complex prod, std::array<int, 16>& k) const {
    if (depth == n - 1) {
      const int last = -partial;
      if (std::abs(last) > slots[static_cast<std::size_t>(depth)].band) return {};
      const Complex g = slots[static_cast<std::size_t>(depth)](last);
      if (g == Complex{}) return {};
      k[static_cast<std::size_t>(depth)] = last;
      return Complex(sym(k.data())) * prod * g;
    }
    const Slot& s = slots[static_cast<std::size_t>(depth)];
    const int rest = tail[static_cast<std::size_t>(depth + 1)];
    const int lo = std::max(-s.band, -partial - rest);
    const int hi = std::min(s.band, -partial + rest);
    Complex acc{};
    for (int kk = lo; kk <= hi; ++kk) {
      const Complex g = s(kk);
      if (g == Complex{}) continue;
      k[static_cast<std::size_t>(depth)] = kk;
      acc += walk(depth + 1, partial + kk, prod * g, k);
    }
    return acc;
  }
};

}  // namespace detail

/// L * sum over the zero-sum lattice of sym(k) * prod_j slots[j](k_j).
/// sym is called with a pointer to n integer modes.
template <typename Sym>
Complex lattice_sum(const Sym& sym, const std::vector<Slot>& slots, double box_length, const WorkBudget& budget = {}) {
  const int n = static_cast<int>(slots.size());
  if (n < 2 || n > 16) throw std::invalid_argument("lattice_sum: arity must lie in [2, 16]");
  check_budget(slots, budget, "lattice_sum");
  detail::LatticeWalker<Sym> w{sym, slots, n, std::vector<int>(static_cast<std::size_t>(n + 1), 0)};
  for (int d = n - 1; d >= 0; --d)
    w.tail[static_cast<std::size_t>(d)] = w.tail[static_cast<std::size_t>(d + 1)] + slots[static_cast<std::size_t>(d)].band;
  const int b0 = slots[0].band;
  const Complex total = parallel::reduce_sum<Complex>(2 * b0 + 1, [&](std::ptrdiff_t i) {
    const int k0 = static_cast<int>(i) - b0;
    if (std::abs(k0) > w.tail[1]) return Complex{};
    const Complex g = slots[0](k0);
    if (g == Complex{}) return Complex{};
    std::array<int, 16> k{};
    k[0] = k0;
    return w.walk(1, k0, g, k);
  });
  return box_length * total;
}

/// Enumerate Gamma_n on |k_j| <= band (each tuple exactly once).
inline std::vector<FrequencyTuple> gamma_lattice(int n, const SpectralGrid& grid, int band, const WorkBudget& budget = {}) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("gamma_lattice: n must be even and >= 2");
  if (band < 0 || band > grid.num_modes() / 2) throw std::invalid_argument("gamma_lattice: band must lie in [0, K/2]");
  std::vector<Slot> slots(static_cast<std::size_t>(n), Slot{band, std::vector<Complex>(static_cast<std::size_t>(2 * band + 1), 1.0)});
  check_budget(slots, budget, "gamma_lattice");
  std::vector<FrequencyTuple> out;
  std::vector<int> k(static_cast<std::size_t>(n));
  std::function<void(int, int)> rec = [&](int d, int partial) {
    const int rest = (n - 1 - d) * band;
    if (d == n - 1) {
      if (std::abs(partial) <= band) {
        k[static_cast<std::size_t>(d)] = -partial;
        out.push_back({k, grid.box_length()});
      }
      return;
    }
    for (int kk = std::max(-band, -partial - rest); kk <= std::min(band, -partial + rest); ++kk) {
      k[static_cast<std::size_t>(d)] = kk;
      rec(d + 1, partial + kk);
    }
  };
  rec(0, 0);
  return out;
}

/// Lambda_n(M; f) with M a Symbol on xi values.
inline Complex lambda_form(const Symbol& m, const Field& f, int n, int band, const WorkBudget& budget = {}) {
  if (m.arity != n) throw std::invalid_argument("lambda_form: symbol arity does not match n");
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("lambda_form: n must be even and >= 2");
  const double len = f.grid().box_length();
  const auto slots = alternating_slots(band_coefficients(f, band), band, n);
  return lattice_sum(
      [&](const int* k) {
        std::array<double, 16> xi{};
        for (int j = 0; j < n; ++j) xi[static_cast<std::size_t>(j)] = k[j] / len;
        return m.fn(std::span<const double>(xi.data(), static_cast<std::size_t>(n)));
      },
      slots, len, budget);
}

// ---------------------------------------------------------------------------
// M6

/// Prefactor of M6. kUnit (+1) makes M6 = prod m_j = 1 below N and cancels
/// the six-linear terms in dE2/dt; kDisplayed (-1/3) is kept for comparison.
enum class M6Normalization { kUnit, kDisplayed };

inline double m6_prefactor(M6Normalization n) { return n == M6Normalization::kUnit ? 1.0 : -1.0 / 3.0; }

struct M6Options {
  double eps_res = 1e-9;
  M6Normalization normalization = M6Normalization::kUnit;
};

/// Fixed zero-sum probe direction: sqrt of the first six primes minus their
/// mean. Its components are rationally independent up to the zero-sum
/// relation, so sum_j (-1)^{j+1} xi_j v_j cannot vanish on a lattice tuple
/// unless the tuple has the form (c, -c, c, -c, c, -c).
inline const std::array<double, 6>& resonance_direction() {
  static const std::array<double, 6> v = [] {
    std::array<double, 6> r{std::sqrt(2.0), std::sqrt(3.0), std::sqrt(5.0), std::sqrt(7.0), std::sqrt(11.0), std::sqrt(13.0)};
    const double mean = (r[0] + r[1] + r[2] + r[3] + r[4] + r[5]) / 6.0;
    for (double& x : r) x -= mean;
    return r;
  }();
  return v;
}

namespace detail {

inline double m6_ratio(const std::array<double, 6>& xi, const ISymbolParams& p) {
  double num = 0.0, den = 0.0;
  for (int j = 0; j < 6; ++j) {
    const double x = xi[static_cast<std::size_t>(j)];
    const double mj = i_symbol(x, p);
    const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
    num += sgn * mj * mj * x * x;
    den += sgn * x * x;
  }
  return num / den;
}

inline double m6_probe(std::array<double, 6> xi, double h, const ISymbolParams& p) {
  // canonical order inside each parity class
  std::array<double, 3> o{xi[0], xi[2], xi[4]}, e{xi[1], xi[3], xi[5]};
  std::sort(o.begin(), o.end());
  std::sort(e.begin(), e.end());
  for (std::size_t i = 0; i < 3; ++i) {
    xi[2 * i] = o[i];
    xi[2 * i + 1] = e[i];
  }
  const auto& v = resonance_direction();
  std::array<double, 6> a{}, b{};
  for (std::size_t j = 0; j < 6; ++j) {
    a[j] = xi[j] + h * v[j];
    b[j] = xi[j] - h * v[j];
  }
  return 0.5 * (m6_ratio(a, p) + m6_ratio(b, p));
}

/// Two-point probe along the fixed direction, made invariant under
/// permutations within each parity class and under the conjugation map
/// (xi_1..xi_6) -> (-xi_2, -xi_1, -xi_4, -xi_3, -xi_6, -xi_5), so that the
/// forms of M6 stay real.
inline double m6_directional(const std::array<double, 6>& xi, double scale, const ISymbolParams& p, double eps_res) {
  const double h = std::sqrt(eps_res) * scale;
  const std::array<double, 6> sw{-xi[1], -xi[0], -xi[3], -xi[2], -xi[5], -xi[4]};
  return 0.5 * (m6_probe(xi, h, p) + m6_probe(sw, h, p));
}

}  // namespace detail

/// c6 * sum_j (-1)^{j+1} m_j^2 xi_j^2 / sum_j (-1)^{j+1} xi_j^2 on Gamma_6.
/// Where all |xi_j| <= N the ratio is identically 1 and c6 is returned.
/// Where |denominator| < eps_res * max xi_j^2 the value is the average of the
/// ratio at xi +- h v, h = sqrt(eps_res) * max|xi_j|.
inline double m6(std::span<const double> xi, const ISymbolParams& p, const M6Options& opt = {}) {
  if (xi.size() != 6) throw std::invalid_argument("m6: need six frequencies");
  const double c6 = m6_prefactor(opt.normalization);
  std::array<double, 6> x{};
  double scale = 0.0, den = 0.0;
  bool low = true;
  for (std::size_t j = 0; j < 6; ++j) {
    x[j] = xi[j];
    scale = std::max(scale, std::abs(xi[j]));
    den += (j % 2 == 0 ? 1.0 : -1.0) * xi[j] * xi[j];
    if (std::abs(xi[j]) > p.N) low = false;
  }
  if (low || p.s == 1.0 || scale == 0.0) return c6;
  if (std::abs(den) < opt.eps_res * scale * scale) return c6 * detail::m6_directional(x, scale, p, opt.eps_res);
  return c6 * detail::m6_ratio(x, p);
}

inline double m6(const FrequencyTuple& t, const ISymbolParams& p, const M6Options& opt = {}) {
  const auto xi = t.xis();
  return m6(std::span<const double>(xi), p, opt);
}

inline Symbol m6_symbol(const ISymbolParams& p, const M6Options& opt = {}) {
  return {6, [p, opt](std::span<const double> xi) { return Complex(m6(xi, p, opt)); }};
}

/// M6 on integer modes |k| <= band with tabulated m^2 xi^2; the resonance test
/// uses the exact integer denominator. Agrees with m6() on the lattice.
class M6Lattice {
 public:
  M6Lattice(double box_length, int band, const ISymbolParams& p, const M6Options& opt = {})
      : len_(box_length), band_(band), p_(p), opt_(opt), c6_(m6_prefactor(opt.normalization)) {
    p.validate();
    m2x2_.resize(static_cast<std::size_t>(2 * band + 1));
    low_.resize(static_cast<std::size_t>(2 * band + 1));
    for (int k = -band; k <= band; ++k) {
      const double xi = k / box_length;
      const double m = i_symbol(xi, p);
      m2x2_[static_cast<std::size_t>(k + band)] = m * m * xi * xi;
      low_[static_cast<std::size_t>(k + band)] = (p.s == 1.0 || std::abs(xi) <= p.N) ? 1 : 0;
    }
  }

  double operator()(const int* k) const {
    bool low = true;
    long long den = 0;
    double num = 0.0;
    for (int j = 0; j < 6; ++j) {
      const std::size_t idx = static_cast<std::size_t>(k[j] + band_);
      low = low && low_[idx];
      const long long kk = static_cast<long long>(k[j]) * k[j];
      if (j % 2 == 0) {
        den += kk;
        num += m2x2_[idx];
      } else {
        den -= kk;
        num -= m2x2_[idx];
      }
    }
    if (low) return c6_;
    if (den == 0) return resonant(k);
    return c6_ * num / (static_cast<double>(den) / (len_ * len_));
  }

  /// True when the integer denominator vanishes.
  static bool is_resonant(const int* k) {
    long long den = 0;
    for (int j = 0; j < 6; ++j) den += (j % 2 == 0 ? 1 : -1) * static_cast<long long>(k[j]) * k[j];
    return den == 0;
  }

  /// Numerator sum_j (-1)^{j+1} m_j^2 xi_j^2.
  double numerator(const int* k) const {
    double num = 0.0;
    for (int j = 0; j < 6; ++j) num += (j % 2 == 0 ? 1.0 : -1.0) * m2x2_[static_cast<std::size_t>(k[j] + band_)];
    return num;
  }

  int band() const { return band_; }

 private:
  double resonant(const int* k) const {
    std::array<double, 6> xi{};
    double scale = 0.0;
    for (std::size_t j = 0; j < 6; ++j) {
      xi[j] = k[j] / len_;
      scale = std::max(scale, std::abs(xi[j]));
    }
    if (scale == 0.0) return c6_;
    return c6_ * detail::m6_directional(xi, scale, p_, opt_.eps_res);
  }

  double len_;
  int band_;
  ISymbolParams p_;
  M6Options opt_;
  double c6_;
  std::vector<double> m2x2_;
  std::vector<char> low_;
};

/// Complete (k1..k4) to an exactly resonant Gamma_6 tuple: k5 + k6 = s and
/// k5^2 - k6^2 = d solved in integers when possible.
inline std::optional<std::array<int, 6>> resonant_completion(int k1, int k2, int k3, int k4, int free_mode = 0) {
  const long long s = -(static_cast<long long>(k1) + k2 + k3 + k4);
  const long long d = -(1LL * k1 * k1 - 1LL * k2 * k2 + 1LL * k3 * k3 - 1LL * k4 * k4);
  if (s == 0) {
    if (d != 0) return std::nullopt;
    return std::array<int, 6>{k1, k2, k3, k4, free_mode, -free_mode};
  }
  if (d % s != 0) return std::nullopt;
  const long long q = d / s;  // k5 - k6
  if ((s + q) % 2 != 0) return std::nullopt;
  return std::array<int, 6>{k1, k2, k3, k4, static_cast<int>((s + q) / 2), static_cast<int>((s - q) / 2)};
}

// ---------------------------------------------------------------------------
// M10

/// The 5! x 5! pairs of (odd, even) index permutations, materialized once.
inline const std::vector<std::array<std::uint8_t, 10>>& m10_orderings() {
  static const std::vector<std::array<std::uint8_t, 10>> table = [] {
    std::vector<std::array<std::uint8_t, 10>> t;
    std::array<std::uint8_t, 5> odd{0, 2, 4, 6, 8};
    do {
      std::array<std::uint8_t, 5> even{1, 3, 5, 7, 9};
      do {
        std::array<std::uint8_t, 10> o{};
        for (std::size_t i = 0; i < 5; ++i) {
          o[2 * i] = odd[i];
          o[2 * i + 1] = even[i];
        }
        t.push_back(o);
      } while (std::next_permutation(even.begin(), even.end()));
    } while (std::next_permutation(odd.begin(), odd.end()));
    return t;
  }();
  return table;
}

/// M10 = -(i / (5! 6!)) sum over (odd, even) permutations (a b c d e f g h i j)
/// of  M6(xi_abcde, ...) - M6(xi_a, xi_bcdef, ...) + ... - M6(..., xi_fghij),
/// the merged group sliding from slot 1 to slot 6.
inline Complex m10(std::span<const double> xi, const ISymbolParams& p, const M6Options& opt = {}) {
  if (xi.size() != 10) throw std::invalid_argument("m10: need ten frequencies");
  const auto& orders = m10_orderings();
  const double total = parallel::reduce_sum<double>(static_cast<std::ptrdiff_t>(orders.size()), [&](std::ptrdiff_t idx) {
    const auto& o = orders[static_cast<std::size_t>(idx)];
    std::array<double, 10> y{};
    for (std::size_t i = 0; i < 10; ++i) y[i] = xi[o[i]];
    double acc = 0.0;
    for (int j = 0; j < 6; ++j) {
      std::array<double, 6> a{};
      for (int i = 0; i < j; ++i) a[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)];
      double merged = 0.0;
      for (int i = j; i < j + 5; ++i) merged += y[static_cast<std::size_t>(i)];
      a[static_cast<std::size_t>(j)] = merged;
      for (int i = j + 1; i < 6; ++i) a[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i + 4)];
      acc += (j % 2 == 0 ? 1.0 : -1.0) * m6(std::span<const double>(a), p, opt);
    }
    return acc;
  });
  return Complex(0.0, -1.0) * total / 86400.0;
}

inline Complex m10(const FrequencyTuple& t, const ISymbolParams& p, const M6Options& opt = {}) {
  const auto xi = t.xis();
  return m10(std::span<const double>(xi), p, opt);
}

// ---------------------------------------------------------------------------
// Energies

struct EnergyPair {
  double e1 = 0.0;
  double e2 = 0.0;
  double gap = 0.0;
};

/// -1/2 Lambda_2((2 pi)^2 m1 xi1 m2 xi2) = 1/2 ||d_x I f||^2 on the band.
inline double kinetic_form(const std::vector<Complex>& c, int band, double len, const ISymbolParams& p) {
  std::vector<double> w(static_cast<std::size_t>(2 * band + 1));
  for (int k = -band; k <= band; ++k) w[static_cast<std::size_t>(k + band)] = i_symbol(k / len, p) * kTwoPi * k / len;
  const auto slots = alternating_slots(c, band, 2);
  const Complex v = lattice_sum(
      [&](const int* k) { return w[static_cast<std::size_t>(k[0] + band)] * w[static_cast<std::size_t>(k[1] + band)]; },
      slots, len);
  return -0.5 * v.real();
}

/// Lambda_6(M6; f) restricted to |k| <= band.
inline Complex lambda6_m6(const std::vector<Complex>& c, int band, double len, const ISymbolParams& p,
                          const M6Options& opt = {}, const WorkBudget& budget = {}) {
  const M6Lattice sym(len, band, p, opt);
  return lattice_sum(sym, alternating_slots(c, band, 6), len, budget);
}

/// E2 = -1/2 Lambda_2((2 pi)^2 m1 xi1 m2 xi2) + 1/6 Lambda_6(M6) on |k| <= band,
/// paired with E1 = E(If) evaluated in physical space.
inline EnergyPair second_modified_energy(const Field& f, const ISymbolParams& p, int band, const M6Options& opt = {},
                                         const WorkBudget& budget = {}) {
  p.validate();
  if (band < 0 || band > f.grid().num_modes() / 2) throw std::invalid_argument("second_modified_energy: band out of range");
  const double len = f.grid().box_length();
  const auto c = band_coefficients(f, band);
  EnergyPair e;
  e.e2 = kinetic_form(c, band, len, p) + lambda6_m6(c, band, len, p, opt, budget).real() / 6.0;
  e.e1 = first_modified_energy(f, p);
  e.gap = std::abs(e.e2 - e.e1);
  return e;
}

// ---------------------------------------------------------------------------
// Differentiation law

/// Coefficients (|k| <= band) of P_band(|f_band|^4 f_band), alias-free.
inline std::vector<Complex> quintic_band_coefficients(const Field& f, int band) {
  const auto& g = f.grid();
  std::vector<Complex> slots(static_cast<std::size_t>(g.num_modes()));
  for (int k = -band; k <= band; ++k) slots[static_cast<std::size_t>(g.slot_of_mode(k))] = f.coeff(k);
  const auto q = detail::projected_quintic(g, slots, band);
  std::vector<Complex> out(static_cast<std::size_t>(2 * band + 1));
  for (int k = -band; k <= band; ++k) out[static_cast<std::size_t>(k + band)] = q[static_cast<std::size_t>(g.slot_of_mode(k))];
  return out;
}

/// Sign of the quintic term in the differentiation law. For
/// i u_t + u_xx - |u|^4 u = 0 with slots (f, conj f, ...) the derivation gives
///   d/dt Lambda_n(M) = i Lambda_n(M sum_j (-1)^j (2 pi xi_j)^2)
///                      + i sum_j (-1)^j Lambda_{n+4}(X_j^4 M),
/// i.e. kDerived; kDisplayed flips the last term for comparison.
enum class QuinticSign { kDerived, kDisplayed };

/// sum_j (-1)^j Lambda_{n+4}(X_j^4 M), evaluated through the elongation
/// identity: slot j of Lambda_n receives the band-projected quintic
/// coefficients (odd j) or their conjugate reflection (even j). This is the
/// Galerkin-consistent form (merged frequency restricted to the band).
template <typename Sym>
Complex elongated_quintic_sum(const Sym& sym, const std::vector<Complex>& c, const std::vector<Complex>& q, int band,
                              double len, int n, const WorkBudget& budget = {}) {
  Complex acc{};
  for (int j = 1; j <= n; ++j) {
    auto slots = alternating_slots(c, band, n);
    slots[static_cast<std::size_t>(j - 1)] = make_slot(q, band, j % 2 == 0);
    acc += (j % 2 == 0 ? 1.0 : -1.0) * lattice_sum(sym, slots, len, budget);
  }
  return acc;
}

/// Right-hand side of the differentiation law for a lattice symbol.
template <typename Sym>
Complex differentiation_rhs(const Sym& sym, const Field& f, int n, int band, QuinticSign sign = QuinticSign::kDerived,
                            const WorkBudget& budget = {}) {
  const double len = f.grid().box_length();
  const auto c = band_coefficients(f, band);
  const auto slots = alternating_slots(c, band, n);
  const Complex lin = lattice_sum(
      [&](const int* k) {
        double w = 0.0;
        for (int j = 0; j < n; ++j) {
          const double om = kTwoPi * k[j] / len;
          w += ((j + 1) % 2 == 0 ? 1.0 : -1.0) * om * om;
        }
        return Complex(sym(k)) * w;
      },
      slots, len, budget);
  const auto q = quintic_band_coefficients(f, band);
  const Complex nl = elongated_quintic_sum(sym, c, q, band, len, n, budget);
  const double sgn = sign == QuinticSign::kDerived ? 1.0 : -1.0;
  return Complex(0.0, 1.0) * lin + sgn * Complex(0.0, 1.0) * nl;
}

/// Adapter: a Symbol on xi values as a lattice symbol.
struct SymbolOnLattice {
  const Symbol& m;
  double len;
  Complex operator()(const int* k) const {
    std::array<double, 16> xi{};
    for (int j = 0; j < m.arity; ++j) xi[static_cast<std::size_t>(j)] = k[j] / len;
    return m.fn(std::span<const double>(xi.data(), static_cast<std::size_t>(m.arity)));
  }
};

/// max over interior samples of |central-difference d/dt Lambda_n(M) - RHS|.
inline double differentiation_residual(const Trajectory& tr, const Symbol& m, int band,
                                       QuinticSign sign = QuinticSign::kDerived, const WorkBudget& budget = {}) {
  const int n = m.arity;
  if (n != 2 && n != 6) throw std::invalid_argument("differentiation_residual: n must be 2 or 6");
  if (tr.size() < 3) throw std::invalid_argument("differentiation_residual: need at least three samples");
  const double len = tr.grid().box_length();
  const SymbolOnLattice sym{m, len};
  std::vector<Complex> lam(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i)
    lam[i] = lattice_sum(sym, alternating_slots(band_coefficients(tr[i], band), band, n), len, budget);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
    const Complex fd = (lam[i + 1] - lam[i - 1]) / (2.0 * tr.dt_sample());
    const Complex rhs = differentiation_rhs(sym, tr[i], n, band, sign, budget);
    worst = std::max(worst, std::abs(fd - rhs));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Increment identity

/// Lambda_10(M10; f) in its Galerkin-consistent elongation form,
///   (i/6) sum_j (-1)^j Lambda_6(M6; slot j <- P N).
/// The permutation average in M10 drops out because Lambda is symmetric
/// under odd/even slot permutations.
inline Complex lambda10_m10(const Field& f, const ISymbolParams& p, int band, const M6Options& opt = {},
                            const WorkBudget& budget = {}) {
  const double len = f.grid().box_length();
  const M6Lattice sym(len, band, p, opt);
  const auto c = band_coefficients(f, band);
  const auto q = quintic_band_coefficients(f, band);
  return Complex(0.0, 1.0 / 6.0) * elongated_quintic_sum(sym, c, q, band, len, 6, budget);
}

/// Exactly resonant lattice tuples (integer denominator zero) whose
/// numerator does not vanish contribute
///   R = (i (2 pi)^2 / 6) Lambda_6(S_m 1[S_1 = 0]),
/// S_m = sum (-1)^{j+1} m_j^2 xi_j^2, to dE2/dt; away from resonance the
/// kinetic and M6 dispersive terms cancel exactly.
inline Complex resonant_term(const Field& f, const ISymbolParams& p, int band, const WorkBudget& budget = {}) {
  const double len = f.grid().box_length();
  const M6Lattice sym(len, band, p);
  const auto c = band_coefficients(f, band);
  const Complex v = lattice_sum(
      [&](const int* k) { return M6Lattice::is_resonant(k) ? sym.numerator(k) : 0.0; }, alternating_slots(c, band, 6), len,
      budget);
  return Complex(0.0, kTwoPi * kTwoPi / 6.0) * v;
}

struct IncrementResult {
  double lhs = 0.0;       // E2(t1) - E2(t0)
  double rhs = 0.0;       // int Lambda_10(M10) dt
  double resonant = 0.0;  // int R dt (lattice resonances)
  double residual = 0.0;  // |lhs - rhs - resonant|
};

inline IncrementResult increment_check(const Trajectory& tr, const ISymbolParams& p, int band, const M6Options& opt = {},
                                       const WorkBudget& budget = {}) {
  if (band > budget.max_increment_band)
    throw WorkBudgetError("increment_check: band " + std::to_string(band) + " exceeds the increment budget " +
                          std::to_string(budget.max_increment_band));
  if (tr.empty()) throw std::invalid_argument("increment_check: empty trajectory");
  IncrementResult r;
  const double e0 = second_modified_energy(tr.front(), p, band, opt, budget).e2;
  const double e1 = second_modified_energy(tr.back(), p, band, opt, budget).e2;
  r.lhs = e1 - e0;
  std::vector<double> a(tr.size()), b(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    a[i] = lambda10_m10(tr[i], p, band, opt, budget).real();
    b[i] = resonant_term(tr[i], p, band, budget).real();
  }
  const auto w = trapezoid_weights(tr.size(), tr.dt_sample());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    r.rhs += w[i] * a[i];
    r.resonant += w[i] * b[i];
  }
  r.residual = std::abs(r.lhs - r.rhs - r.resonant);
  return r;
}

}  // namespace nlslab
