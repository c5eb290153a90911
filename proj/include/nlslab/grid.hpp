#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlslab {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Periodic 1D discretization of [-L/2, L/2) with K samples.
///
/// Mode k in {-K/2, ..., K/2-1} carries the frequency xi_k = k / L (cycles
/// per unit length); the angular frequency 2*pi*xi_k is derived on demand.
/// Storage ("slot") order follows the FFT: slot s holds k = s for s < K/2 and
/// k = s - K otherwise.
class SpectralGrid {
 public:
  SpectralGrid(double box_length, int num_modes) : box_length_(box_length), num_modes_(num_modes) {
    if (!(box_length > 0.0) || !std::isfinite(box_length))
      throw std::invalid_argument("SpectralGrid: box_length must be positive and finite");
    if (num_modes < 8) throw std::invalid_argument("SpectralGrid: num_modes must be >= 8");
    if (num_modes % 2 != 0) throw std::invalid_argument("SpectralGrid: num_modes must be even");
  }

  double box_length() const { return box_length_; }
  int num_modes() const { return num_modes_; }
  double dx() const { return box_length_ / num_modes_; }

  int min_mode() const { return -num_modes_ / 2; }
  int max_mode() const { return num_modes_ / 2 - 1; }

  double frequency(int k) const { return k / box_length_; }
  double angular_frequency(int k) const { return kTwoPi * k / box_length_; }

  int mode_of_slot(int slot) const { return slot < num_modes_ / 2 ? slot : slot - num_modes_; }
  int slot_of_mode(int k) const { return k >= 0 ? k : k + num_modes_; }
  bool contains_mode(int k) const { return k >= min_mode() && k <= max_mode(); }

  double position(int j) const { return -0.5 * box_length_ + j * dx(); }

  /// Frequencies in ascending mode order k = -K/2 .. K/2-1.
  std::vector<double> frequencies() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(num_modes_));
    for (int k = min_mode(); k <= max_mode(); ++k) out.push_back(frequency(k));
    return out;
  }

  std::vector<double> positions() const {
    std::vector<double> out(static_cast<std::size_t>(num_modes_));
    for (int j = 0; j < num_modes_; ++j) out[static_cast<std::size_t>(j)] = position(j);
    return out;
  }

  /// Same box, factor times as many samples.
  SpectralGrid refined(int factor) const { return SpectralGrid(box_length_, num_modes_ * factor); }

  /// Same sample count, box stretched by lambda.
  SpectralGrid scaled(double lambda) const { return SpectralGrid(box_length_ * lambda, num_modes_); }

  friend bool operator==(const SpectralGrid& a, const SpectralGrid& b) {
    return a.box_length_ == b.box_length_ && a.num_modes_ == b.num_modes_;
  }

 private:
  double box_length_;
  int num_modes_;
};

inline SpectralGrid make_grid(double box_length, int num_modes) {
  return SpectralGrid(box_length, num_modes);
}

inline void require_same_grid(const SpectralGrid& a, const SpectralGrid& b, const char* where) {
  if (!(a == b)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

}  // namespace nlslab
