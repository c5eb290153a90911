#pragma once

// Thread-count control and reductions with an optional fixed-order mode.
//
// In deterministic mode every reduction is evaluated as an ordered sum of
// per-chunk partials, where the chunking depends only on the problem size.
// The result is then bitwise identical for any thread count.

#include <atomic>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nlslab::parallel {

/// Environment variable consulted for the default thread count.
inline constexpr const char* kThreadsEnv = "NLSLAB_THREADS";

namespace detail {
inline std::atomic<bool>& deterministic_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}
}  // namespace detail

inline void set_deterministic(bool on) { detail::deterministic_flag() = on; }
inline bool deterministic() { return detail::deterministic_flag(); }

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

inline int threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Resolve the thread count: an explicit flag wins over the environment.
/// Returns 0 when neither is set (runtime default).
inline int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv(kThreadsEnv)) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return 0;
}

/// Sum fn(i) for i in [0, count). T must support += and value-init to zero.
template <typename T, typename Fn>
T reduce_sum(std::ptrdiff_t count, Fn&& fn) {
  if (count <= 0) return T{};
  if (deterministic()) {
    std::vector<T> partial(static_cast<std::size_t>(count), T{});
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) partial[static_cast<std::size_t>(i)] = fn(i);
    T acc{};
    for (const T& p : partial) acc += p;
    return acc;
  }
  T acc{};
#pragma omp parallel
  {
    T local{};
#pragma omp for schedule(dynamic, 1) nowait
    for (std::ptrdiff_t i = 0; i < count; ++i) local += fn(i);
#pragma omp critical(nlslab_reduce)
    acc += local;
  }
  return acc;
}

/// Max of fn(i); order never matters for max, so no deterministic branch.
template <typename Fn>
double reduce_max(std::ptrdiff_t count, Fn&& fn, double init = 0.0) {
  std::vector<double> partial(static_cast<std::size_t>(count > 0 ? count : 0), init);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) partial[static_cast<std::size_t>(i)] = fn(i);
  double m = init;
  for (double p : partial) m = p > m ? p : m;
  return m;
}

/// Run fn(i) for independent work items. The first exception thrown by any
/// item (lowest index) is rethrown after the loop.
template <typename Fn>
void for_each_index(std::ptrdiff_t count, Fn&& fn) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count > 0 ? count : 0));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      fn(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace nlslab::parallel
