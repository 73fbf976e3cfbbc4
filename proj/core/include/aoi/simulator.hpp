#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aoi/service_distribution.hpp"

namespace aoi {

/// Admission rule applied when a message arrives while the server is busy.
enum class Policy {
  /// Preempt the in-service message if its elapsed service is <= theta,
  /// otherwise replace the waiting message.
  kThreshold,
  /// Wait (replacing any waiting message) if 0 < elapsed < theta, otherwise preempt.
  kThresholdVariant,
  /// Non-preemptive, at most one message; arrivals to a busy server are dropped.
  kBlocking1,
  /// Non-preemptive, at most two messages; arrivals to a full system are dropped.
  kBlocking2,
};

std::string_view to_string(Policy p) noexcept;
Policy parse_policy(std::string_view text);

struct SimConfig {
  ModelParams model;
  Policy policy = Policy::kThreshold;
  /// Arrivals generated per replication.
  std::int64_t horizon_events = 1'000'000;
  /// Leading fraction of arrivals excluded from every statistic.
  double warmup_fraction = 0.1;
  int replications = 10;
  std::uint64_t seed = 1;
  /// Ascending nu values at which the empirical CCDF is accumulated.
  std::vector<double> ccdf_grid;
  /// Replications run on up to this many threads.
  int threads = 1;

  void validate() const;
};

/// Event counts summed over replications, for policy sanity checks.
struct PolicyCounters {
  std::int64_t arrivals = 0;
  std::int64_t departures = 0;
  std::int64_t preemptions = 0;
  /// Arrivals placed in the waiting cell.
  std::int64_t queued = 0;
  /// Waiting messages replaced by a newer arrival.
  std::int64_t pushouts = 0;
  std::int64_t drops = 0;
  /// Largest elapsed service of a preempted message.
  double max_preempted_elapsed = 0.0;
};

struct CcdfSample {
  double nu;
  double probability;
  /// Across replications; NaN for a single replication.
  double standard_error;
};

struct SimResult {
  /// Time-average AoI, averaged over replications.
  double mean_aoi = 0.0;
  /// 95% normal-approximation half-width across replications (NaN for one replication).
  double mean_aoi_ci_halfwidth = 0.0;
  std::vector<CcdfSample> ccdf_samples;
  /// Fraction of departures that leave the waiting cell empty.
  double p0_empirical = 0.0;
  double p0_standard_error = 0.0;
  /// Mean time between successive departures.
  double mean_cycle_empirical = 0.0;
  std::vector<double> replication_means;
  PolicyCounters counters;
};

SimResult simulate(const SimConfig& cfg);

/// Empirical E exp(-s X) with its standard error, per requested s.
struct LstSamples {
  std::vector<double> mean;
  std::vector<double> standard_error;
};

struct CellEstimate {
  std::int64_t count = 0;
  LstSamples cycle;
  LstSamples age;
};

/// Departure-level statistics of the embedded chain (S_n, K_n).
struct EmpiricalKernels {
  std::vector<double> s_values;
  /// Indexed [K_{-1}][K_0]: cycle = S_0 - S_{-1}, age = alpha(S_0).
  std::array<std::array<CellEstimate, 2>, 2> cells;
  std::array<std::array<std::int64_t, 2>, 2> transitions{};
  double p0 = 0.0;
  double p0_standard_error = 0.0;
  /// Pearson chi-square of independence of consecutive K on the 2x2 table (1 dof).
  double chi_square = 0.0;
  double chi_square_p_value = 1.0;
  /// Sample correlation of alpha(S_0) and S_1 - S_0 given K_0 = i.
  std::array<double, 2> age_cycle_correlation{};
  std::vector<std::string> warnings;
};

/// Pools all replications. Warns when any (K_{-1}, K_0) cell has fewer than
/// 1000 observations.
EmpiricalKernels empirical_kernels(const SimConfig& cfg, std::span<const double> s_values);

/// AoI of replication 0 at the given ascending absolute instants (warmup is
/// not applied). Instants past the simulated horizon yield NaN.
std::vector<double> sample_age_path(const SimConfig& cfg, std::span<const double> instants);

struct PathEvent {
  enum class Kind { kArrival, kDeparture };
  Kind kind;
  double time;
  double age_before;
  double age_after;
};

/// The first `max_events` events of replication 0, for pathwise checks.
std::vector<PathEvent> trace_path(const SimConfig& cfg, std::size_t max_events);

}  // namespace aoi
