#include "aoi/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "aoi/error.hpp"

namespace aoi {

namespace {

// Binomial weights C(m, j) / 2^m.
std::vector<double> euler_weights(int m) {
  std::vector<double> w(static_cast<std::size_t>(m) + 1);
  double c = std::ldexp(1.0, -m);
  for (int j = 0; j <= m; ++j) {
    w[static_cast<std::size_t>(j)] = c;
    c = c * (m - j) / (j + 1);
  }
  return w;
}

}  // namespace

EulerParams default_euler_params(const AoiTransform& a) {
  EulerParams p;
  if (!a.conditional().kernels().model().service.atoms().empty()) {
    p.half_terms = 1600;
    p.averaged_sums = 48;
  }
  return p;
}

CcdfEstimate ccdf_estimate(const AoiTransform& a, double nu) {
  return ccdf_estimate(a, nu, default_euler_params(a));
}

double ccdf(const AoiTransform& a, double nu) { return ccdf(a, nu, default_euler_params(a)); }

double find_threshold(const AoiTransform& a, double epsilon) {
  return find_threshold(a, epsilon, default_euler_params(a));
}

CcdfEstimate ccdf_estimate(const AoiTransform& a, double nu, const EulerParams& params) {
  if (nu <= 0.0) return {1.0, 1.0, 0.0};
  if (params.half_terms < 1 || params.averaged_sums < 2 ||
      params.averaged_sums > 2 * params.half_terms + 1 || !(params.damping > 0.0)) {
    throw InvalidArgument("invalid Euler inversion parameters");
  }
  const auto transform = [&](Complex s) { return (1.0 - a.phi(s)) / s; };

  const int total_terms = 2 * params.half_terms + 1;
  const double scale = std::exp(params.damping / 2.0) / nu;
  const double re = params.damping / (2.0 * nu);

  std::vector<double> partial(static_cast<std::size_t>(total_terms));
  double sum = 0.5 * scale * transform(Complex(re, 0.0)).real();
  partial[0] = sum;
  for (int k = 1; k < total_terms; ++k) {
    const Complex s(re, k * std::numbers::pi / nu);
    const double term = scale * transform(s).real();
    sum += (k % 2 == 0) ? term : -term;
    partial[static_cast<std::size_t>(k)] = sum;
  }

  const int m = params.averaged_sums - 1;
  const auto w = euler_weights(m);
  auto average_ending_at = [&](int last) {
    double e = 0.0;
    for (int j = 0; j <= m; ++j) {
      e += w[static_cast<std::size_t>(j)] * partial[static_cast<std::size_t>(last - m + j)];
    }
    return e;
  };
  const double value = average_ending_at(total_terms - 1);
  const double previous = average_ending_at(total_terms - 2);
  return {std::clamp(value, 0.0, 1.0), value, std::abs(value - previous)};
}

double ccdf(const AoiTransform& a, double nu, const EulerParams& params) {
  return ccdf_estimate(a, nu, params).probability;
}

double find_threshold(const AoiTransform& a, double epsilon, const EulerParams& params) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  const double mean = mean_aoi(a);
  const double limit = 1e4 * mean;
  const double tolerance = 1e-6 * mean;

  double lo = 0.0;
  double hi = mean;
  while (ccdf(a, hi, params) > epsilon) {
    lo = hi;
    hi *= 2.0;
    if (hi > limit) {
      if (ccdf(a, limit, params) > epsilon) {
        throw BracketError("CCDF does not fall below epsilon within 1e4 mean AoI");
      }
      hi = limit;
      break;
    }
  }
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (ccdf(a, mid, params) > epsilon) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace aoi
