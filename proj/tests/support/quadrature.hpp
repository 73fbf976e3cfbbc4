#pragma once

// Test-only oracle: composite Gauss-Legendre quadrature. Deliberately shares
// no code with the closed-form integrals under test.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace aoi::testing {

namespace detail {

// 10-point Gauss-Legendre nodes and weights on [-1, 1].
inline constexpr std::array<double, 5> kNodes{0.1488743389816312, 0.4333953941292472,
                                              0.6794095682990244, 0.8650633666889845,
                                              0.9739065285171717};
inline constexpr std::array<double, 5> kWeights{0.2955242247147529, 0.2692667193099963,
                                                0.2190863625159820, 0.1494513491505806,
                                                0.0666713443086881};

}  // namespace detail

using ComplexFn = std::function<std::complex<double>(double)>;

/// Integral over [a, b] with `panels` equal panels of 10-point Gauss-Legendre.
inline std::complex<double> integrate(const ComplexFn& f, double a, double b, int panels = 400) {
  if (b <= a) return 0.0;
  const double width = (b - a) / panels;
  std::complex<double> total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double mid = lo + 0.5 * width;
    const double half = 0.5 * width;
    for (std::size_t k = 0; k < detail::kNodes.size(); ++k) {
      total += detail::kWeights[k] * half *
               (f(mid - half * detail::kNodes[k]) + f(mid + half * detail::kNodes[k]));
    }
  }
  return total;
}

/// Integral over [a, b] split at the given interior breakpoints, so that
/// piecewise-smooth integrands (jumps at atoms) integrate to full accuracy.
inline std::complex<double> integrate_piecewise(const ComplexFn& f, double a, double b,
                                                std::vector<double> breaks, int panels = 400) {
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  std::complex<double> total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = std::max(a, breaks[i]);
    const double hi = std::min(b, breaks[i + 1]);
    if (hi > lo) total += integrate(f, lo, hi, panels);
  }
  return total;
}

}  // namespace aoi::testing
