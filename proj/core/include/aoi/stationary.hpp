#pragma once

#include <array>

#include "aoi/kernels.hpp"

namespace aoi {

/// First two moments of a conditional transform at the origin.
struct Moments {
  double first = 0.0;
  double second = 0.0;
};

/// Stationary AoI Laplace transform E exp(-s alpha(0)), assembled from the
/// conditional transforms by the Palm inversion over one departure cycle:
///
///   phi(s) = sum_i A_i(s) (1 - C_i(s)) p_i / (s E0[S_1 - S_0])
///
/// with A_i the age at a departure given K_0 = i and C_i the next cycle
/// length given that it starts from occupancy i.
class AoiTransform {
 public:
  AoiTransform(ConditionalTransforms transforms, const PolicyConstants& constants);

  Complex phi(Complex s) const;

  /// E0[exp(-s alpha(0)) | K_0 = k] = p0 age(0, k) + p1 age(1, k).
  Complex age_given(Occupancy k0, Complex s) const;
  /// E0[exp(-s (S_0 - S_{-1})) | K_{-1} = k] = p0 cycle(k, 0) + p1 cycle(k, 1).
  Complex cycle_given(Occupancy kprev, Complex s) const;

  /// E0[S_1 - S_0].
  double mean_cycle() const noexcept { return mean_cycle_; }
  /// Moments of the cycle transform cycle_given(k, .).
  const Moments& cycle_moments(Occupancy k) const { return cycle_moments_[index(k)]; }
  /// Moments of the departure-age transform age_given(k, .).
  const Moments& age_moments(Occupancy k) const { return age_moments_[index(k)]; }

  const PolicyConstants& constants() const noexcept { return constants_; }
  const ConditionalTransforms& conditional() const noexcept { return transforms_; }

  /// Below |s| T = kTaylorRadius, with T the root second moment of C_i,
  /// phi uses the Taylor expansion of (1 - C_i(s)) / s.
  static constexpr double kTaylorRadius = 1e-4;
  /// Smallest switch-over modulus over the branches.
  double taylor_radius() const noexcept;

 private:
  bool branch_active(Occupancy k) const noexcept;
  Complex cycle_tail_over_s(Occupancy k, Complex s) const;

  ConditionalTransforms transforms_;
  PolicyConstants constants_;
  std::array<Moments, 2> cycle_moments_{};
  std::array<Moments, 2> age_moments_{};
  double mean_cycle_ = 0.0;
  std::array<double, 2> taylor_radius_{kTaylorRadius, kTaylorRadius};
};

AoiTransform assemble(const ConditionalTransforms& ct, const PolicyConstants& c);

/// Convenience: constants, kernels and conditional transforms for one model.
AoiTransform analyze(const ModelParams& m, QueuedAgeForm form = QueuedAgeForm::kServiceOnly);

/// Stationary mean AoI from the cycle moment identity
///   E alpha = sum_i p_i (E[A_i] E[C_i] + E[C_i^2] / 2) / E0[S_1 - S_0].
double mean_aoi(const AoiTransform& a);

double mean_aoi(const ModelParams& m, QueuedAgeForm form = QueuedAgeForm::kServiceOnly);

}  // namespace aoi
