#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aoi/kernels.hpp"

namespace aoi {

/// Arrival rate and service law; the threshold is the decision variable.
struct BaseModel {
  double lambda;
  ServiceDistribution service;

  ModelParams with_threshold(Threshold theta) const { return {lambda, theta, service}; }
};

struct SweepPoint {
  Threshold theta;
  /// Empty when the moment computation failed at this threshold.
  std::optional<double> mean_aoi;
  std::string error;
};

struct SweepResult {
  /// Sorted by threshold, infinity last; always contains 0 and infinity.
  std::vector<SweepPoint> grid;
  Threshold best_theta;
  double best_mean = 0.0;
  std::optional<double> mean_at_zero;
  std::optional<double> mean_at_infinity;
};

/// Mean AoI over the given thresholds plus both endpoints. Per-threshold
/// failures are recorded in the point and do not abort the sweep.
SweepResult sweep(const BaseModel& m, std::span<const Threshold> thetas,
                  QueuedAgeForm form = QueuedAgeForm::kServiceOnly);

/// {0, 0.1, ..., 5.0} times the mean service time, then infinity.
std::vector<Threshold> default_theta_grid(const ServiceDistribution& service);

struct RefineResult {
  double theta;
  double mean_aoi;
  int evaluations;
};

/// Golden-section polish of a local minimum inside [lo, hi] down to
/// 1e-4 * mean service time. `interior` (default: midpoint) must beat both
/// ends, otherwise BracketError. The result is never worse than `interior`.
/// No global claim: the objective is not known to be unimodal.
RefineResult refine(const BaseModel& m, double lo, double hi,
                    std::optional<double> interior = std::nullopt,
                    QueuedAgeForm form = QueuedAgeForm::kServiceOnly);

}  // namespace aoi
