#pragma once

#include <array>

#include "aoi/service_distribution.hpp"

namespace aoi {

/// Occupancy K_n just after a successful departure: whether a message is
/// left waiting in the queue cell.
enum class Occupancy : int { kEmpty = 0, kQueued = 1 };

inline constexpr std::array<Occupancy, 2> kOccupancies{Occupancy::kEmpty, Occupancy::kQueued};

constexpr int index(Occupancy k) noexcept { return static_cast<int>(k); }

/// Embedded-chain constants of the threshold policy.
struct PolicyConstants {
  /// Probability that one service attempt is preempted, P(tau < theta ^ sigma).
  double q;
  /// Success probability of one attempt, 1 - q, computed from its own formula.
  double success;
  /// P(K_n = 0).
  double p0;
  /// P(K_n = 1).
  double p1;
  /// G-hat(lambda) = P(no arrival during a service).
  double g_lambda;

  double p(Occupancy k) const noexcept { return k == Occupancy::kEmpty ? p0 : p1; }
};

PolicyConstants compute_constants(const ModelParams& m);

/// The four per-attempt laws behind the cycle decomposition, as Laplace
/// transforms evaluable at complex arguments with Re(s) >= 0:
///
///  - failed_attempt:   J, the length of a preempted attempt, (tau | tau < theta ^ sigma)
///  - service_no_arrival: F0, a successful service with no arrival during it, (sigma | tau > sigma)
///  - service_with_queued: F1, a successful service that leaves a message queued,
///                      (sigma | sigma > tau > theta)
///  - queued_lead:      H, how long before the departure the queued message arrived,
///                      (tau | tau < sigma - theta, sigma > theta)
class KernelTransforms {
 public:
  KernelTransforms(ModelParams model, const PolicyConstants& constants);

  Complex failed_attempt(Complex s) const;
  Complex service_no_arrival(Complex s) const;
  /// Requires f1_defined().
  Complex service_with_queued(Complex s) const;
  /// Requires f1_defined().
  Complex queued_lead(Complex s) const;

  /// False when G(theta) = 1, i.e. no service ever outlasts the threshold.
  bool f1_defined() const noexcept { return tail_.has_value(); }

  const ModelParams& model() const noexcept { return model_; }

 private:
  ModelParams model_;
  double q_;
  double g_lambda_;
  std::optional<TailIntegrals> tail_;
};

KernelTransforms build_kernels(const ModelParams& m, const PolicyConstants& c);

/// How the age at a departure is formed when the cycle starts from a queued
/// message (K_{-1} = 1) and the first attempt succeeds.
///
/// The delivered message then is the queued one, and its age is the lead V
/// plus the successful service time. kServiceOnly uses exactly that,
/// H-hat * F_j-hat. kFullCycle multiplies H-hat by the whole conditional cycle
/// transform, which also carries the geometric factor of preempted attempts.
/// The two agree at theta = 0 and theta = inf. Simulation supports
/// kServiceOnly; kFullCycle is kept for comparison.
enum class QueuedAgeForm { kServiceOnly, kFullCycle };

/// The eight conditional transforms indexed by (K_{-1}, K_0):
/// cycle(i, j) = E0[exp(-s (S_0 - S_{-1})) | K_{-1}=i, K_0=j] and
/// age(i, j)   = E0[exp(-s alpha(S_0))     | K_{-1}=i, K_0=j].
class ConditionalTransforms {
 public:
  ConditionalTransforms(KernelTransforms kernels, const PolicyConstants& constants,
                        QueuedAgeForm form = QueuedAgeForm::kServiceOnly);

  /// Entries are absent when p1 = 0: the queued state is then never visited
  /// and F1/H are undefined.
  bool defined(Occupancy prev, Occupancy next) const noexcept;

  Complex cycle(Occupancy prev, Occupancy next, Complex s) const;
  Complex age(Occupancy prev, Occupancy next, Complex s) const;

  /// (1 - q) / (1 - q J-hat(s)), the transform of the preempted attempts
  /// before the successful one.
  Complex geometric_factor(Complex s) const;

  const KernelTransforms& kernels() const noexcept { return kernels_; }
  QueuedAgeForm form() const noexcept { return form_; }

 private:
  Complex successful_service(Occupancy next, Complex s) const;

  KernelTransforms kernels_;
  PolicyConstants constants_;
  QueuedAgeForm form_;
};

ConditionalTransforms conditional_transforms(const KernelTransforms& k, const PolicyConstants& c,
                                             QueuedAgeForm form = QueuedAgeForm::kServiceOnly);

}  // namespace aoi
