#pragma once

// Thin FFTW wrapper: one cached plan per (size, direction), executed on
// caller-owned buffers through the new-array interface.

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nlslab::fft {

using Complex = std::complex<double>;

namespace detail {

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // FFTW_ESTIMATE keeps the algorithm choice independent of timing, which
    // keeps results bitwise reproducible run to run.
    std::vector<Complex> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("fftw: failed to create plan");
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

inline void execute(std::span<const Complex> in, std::span<Complex> out, int sign) {
  if (in.size() != out.size()) throw std::invalid_argument("fft: size mismatch");
  const int n = static_cast<int>(in.size());
  fftw_plan plan = PlanCache::instance().get(n, sign);
  // FFTW does not write to the input of an out-of-place complex transform.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace detail

/// Unnormalized forward DFT: out[k] = sum_j in[j] e^{-2 pi i jk/n}.
inline std::vector<Complex> forward(std::span<const Complex> in) {
  std::vector<Complex> out(in.size());
  detail::execute(in, out, FFTW_FORWARD);
  return out;
}

/// Unnormalized backward DFT: out[j] = sum_k in[k] e^{+2 pi i jk/n}.
inline std::vector<Complex> backward(std::span<const Complex> in) {
  std::vector<Complex> out(in.size());
  detail::execute(in, out, FFTW_BACKWARD);
  return out;
}

}  // namespace nlslab::fft
