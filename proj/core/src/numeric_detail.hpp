#pragma once

#include <cmath>
#include <complex>
#include <functional>

namespace aoi::detail {

/// 1 - exp(-z) without cancellation for small |z|.
inline std::complex<double> one_minus_exp_neg(std::complex<double> z) {
  if (std::abs(z) < 1e-3) {
    return z * (1.0 - z / 2.0 * (1.0 - z / 3.0 * (1.0 - z / 4.0 * (1.0 - z / 5.0))));
  }
  return 1.0 - std::exp(-z);
}

struct Derivatives {
  double first;
  double second;
  /// Magnitude of the last Richardson correction, relative to the estimate.
  double first_change;
  double second_change;
};

/// Central differences at 0 with steps h, h/2, h/4 and two Richardson
/// eliminations. `f` is evaluated at small negative arguments as well.
inline Derivatives richardson_at_zero(const std::function<double(double)>& f, double h) {
  const double f0 = f(0.0);
  double d1[3];
  double d2[3];
  for (int k = 0; k < 3; ++k) {
    const double step = h / static_cast<double>(1 << k);
    const double fp = f(step);
    const double fm = f(-step);
    d1[k] = (fp - fm) / (2.0 * step);
    d2[k] = (fp - 2.0 * f0 + fm) / (step * step);
  }
  auto extrapolate = [](const double (&d)[3], double& change) {
    const double r01 = (4.0 * d[1] - d[0]) / 3.0;
    const double r12 = (4.0 * d[2] - d[1]) / 3.0;
    const double r = (16.0 * r12 - r01) / 15.0;
    change = std::abs(r - r12) / std::max(std::abs(r), 1e-300);
    return r;
  };
  Derivatives out{};
  out.first = extrapolate(d1, out.first_change);
  out.second = extrapolate(d2, out.second_change);
  return out;
}

}  // namespace aoi::detail
