#pragma once

// Log-log least squares for decay exponents.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nlslab {

enum class FitStatus { kOk, kAtFloor, kEmpty };

inline const char* to_string(FitStatus s) {
  switch (s) {
    case FitStatus::kOk: return "ok";
    case FitStatus::kAtFloor: return "at numerical floor";
    case FitStatus::kEmpty: return "empty";
  }
  return "?";
}

struct DecayFit {
  std::vector<std::pair<double, double>> points;  // (N, value)
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  FitStatus status = FitStatus::kEmpty;
  double floor = 0.0;  // conservation floor used by the degenerate policy
};

/// OLS of log(value) on log(N). Requires >= 3 points with positive N and value.
inline DecayFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("fit_power_law: need at least 3 points");
  for (const auto& [n, v] : points) {
    if (!(n > 0.0) || !(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << "fit_power_law: non-positive value " << v << " at N = " << n << " (log undefined)";
      throw std::invalid_argument(os.str());
    }
  }
  const double m = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [n, v] : points) {
    mx += std::log(n);
    my += std::log(v);
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [n, v] : points) {
    const double dx = std::log(n) - mx, dy = std::log(v) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_power_law: all N coincide");
  DecayFit f;
  f.points = points;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (const auto& [n, v] : points) {
    const double r = std::log(v) - (f.intercept + f.slope * std::log(n));
    ssr += r * r;
  }
  // constant data: the line is exact, count it as a perfect fit
  f.r2 = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  f.status = FitStatus::kOk;
  return f;
}

/// Fit unless every value sits below 10x the floor; then report the points
/// with status kAtFloor and no slope.
inline DecayFit fit_with_floor(const std::vector<std::pair<double, double>>& points, double floor) {
  bool all_low = !points.empty();
  for (const auto& pt : points)
    if (!(pt.second < 10.0 * floor)) all_low = false;
  if (points.empty() || all_low) {
    DecayFit f;
    f.points = points;
    f.floor = floor;
    f.status = points.empty() ? FitStatus::kEmpty : FitStatus::kAtFloor;
    return f;
  }
  DecayFit f = fit_power_law(points);
  f.floor = floor;
  return f;
}

}  // namespace nlslab
