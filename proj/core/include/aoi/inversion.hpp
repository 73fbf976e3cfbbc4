#pragma once

#include "aoi/stationary.hpp"

namespace aoi {

/// Parameters of the Euler-summation Fourier-series inversion.
struct EulerParams {
  /// 2 * half_terms + 1 terms of the alternating series are summed.
  int half_terms = 25;
  /// Binomial (Euler) averaging over this many trailing partial sums.
  int averaged_sums = 12;
  /// Damping A; the discretization error is about exp(-A).
  double damping = 18.4;
};

struct CcdfEstimate {
  /// P(alpha > nu), clamped to [0, 1].
  double probability;
  /// Value before clamping.
  double raw;
  /// Difference between the last two Euler averages.
  double error_estimate;

  static constexpr double kAccuracyLimit = 1e-6;
  bool accurate() const noexcept { return error_estimate <= kAccuracyLimit; }
};

/// Parameters used when none are given. The plain defaults suit smooth
/// CCDFs. An atom in the service law leaves a kink in the CCDF, where the
/// series converges only algebraically, so those models get 3201 terms and
/// 48 averaged sums (error near 1e-7 instead of 1e-4).
EulerParams default_euler_params(const AoiTransform& a);

/// P(alpha > nu) by inverting (1 - phi(s)) / s at t = nu. Returns 1 for nu <= 0.
CcdfEstimate ccdf_estimate(const AoiTransform& a, double nu, const EulerParams& params);
CcdfEstimate ccdf_estimate(const AoiTransform& a, double nu);

double ccdf(const AoiTransform& a, double nu, const EulerParams& params);
double ccdf(const AoiTransform& a, double nu);

/// Threshold nu and tolerance epsilon of a tail requirement P(alpha > nu) < epsilon.
struct TailQuery {
  double nu;
  std::optional<double> epsilon_target;
};

/// Smallest nu with ccdf(nu) <= epsilon, by bisection to 1e-6 * mean AoI.
/// Throws BracketError if the CCDF stays above epsilon up to 1e4 * mean AoI.
double find_threshold(const AoiTransform& a, double epsilon, const EulerParams& params);
double find_threshold(const AoiTransform& a, double epsilon);

}  // namespace aoi
