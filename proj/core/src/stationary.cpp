#include "aoi/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aoi/error.hpp"
#include "numeric_detail.hpp"

namespace aoi {

namespace {

constexpr double kMaxRelativeChange = 1e-5;

// Differences are taken at s = 1e-3 / T for a time scale T of the transform.
double difference_step(const ModelParams& m, double time_scale) {
  double h = 1e-3 / time_scale;
  for (const auto& e : m.service.exp_components()) h = std::min(h, 1e-2 * e.rate);
  return h;
}

Moments checked(const detail::Derivatives& d, const char* what) {
  Moments out{-d.first, d.second};
  if (!std::isfinite(out.first) || !std::isfinite(out.second) || out.first <= 0.0 ||
      out.second <= 0.0) {
    throw MomentError(std::string("non-finite or non-positive moment of ") + what);
  }
  if (d.first_change > kMaxRelativeChange || d.second_change > kMaxRelativeChange) {
    throw MomentError(std::string("numerical derivative of ") + what + " did not converge");
  }
  return out;
}

// Heavy preemption can stretch a transform far beyond the input time scale
// and put a pole close to the origin, so the step is re-derived from the
// transform's own mean until it stops growing.
Moments adaptive_moments(const ModelParams& m, const std::function<double(double)>& f,
                         const char* what) {
  constexpr int kPasses = 6;
  double scale = 1.0 / m.lambda + m.service.mean();
  for (int pass = 0;; ++pass) {
    const auto d = detail::richardson_at_zero(f, difference_step(m, scale));
    const double mean = -d.first;
    if (mean <= 1.5 * scale || pass + 1 == kPasses) return checked(d, what);
    scale = std::isfinite(mean) ? mean : 10.0 * scale;
  }
}

}  // namespace

AoiTransform::AoiTransform(ConditionalTransforms transforms, const PolicyConstants& constants)
    : transforms_(std::move(transforms)), constants_(constants) {
  const auto& m = transforms_.kernels().model();
  for (Occupancy k : kOccupancies) {
    if (!branch_active(k)) continue;
    const Moments cycle = adaptive_moments(
        m, [&](double x) { return cycle_given(k, Complex(x, 0.0)).real(); }, "cycle length");
    const Moments age = adaptive_moments(
        m, [&](double x) { return age_given(k, Complex(x, 0.0)).real(); }, "departure age");
    cycle_moments_[index(k)] = cycle;
    age_moments_[index(k)] = age;
    mean_cycle_ += constants_.p(k) * cycle.first;
    taylor_radius_[index(k)] = kTaylorRadius / std::sqrt(cycle.second);
  }
}

double AoiTransform::taylor_radius() const noexcept {
  double r = taylor_radius_[index(Occupancy::kEmpty)];
  if (branch_active(Occupancy::kQueued)) r = std::min(r, taylor_radius_[index(Occupancy::kQueued)]);
  return r;
}

bool AoiTransform::branch_active(Occupancy k) const noexcept {
  return k == Occupancy::kEmpty || (constants_.p1 > 0.0 && transforms_.defined(k, k));
}

Complex AoiTransform::age_given(Occupancy k0, Complex s) const {
  if (!branch_active(k0)) throw InvalidArgument("age_given: occupancy never observed");
  Complex total = constants_.p0 * transforms_.age(Occupancy::kEmpty, k0, s);
  if (constants_.p1 > 0.0) total += constants_.p1 * transforms_.age(Occupancy::kQueued, k0, s);
  return total;
}

Complex AoiTransform::cycle_given(Occupancy kprev, Complex s) const {
  if (!branch_active(kprev)) throw InvalidArgument("cycle_given: occupancy never observed");
  Complex total = constants_.p0 * transforms_.cycle(kprev, Occupancy::kEmpty, s);
  if (constants_.p1 > 0.0) total += constants_.p1 * transforms_.cycle(kprev, Occupancy::kQueued, s);
  return total;
}

Complex AoiTransform::cycle_tail_over_s(Occupancy k, Complex s) const {
  if (std::abs(s) < taylor_radius_[index(k)]) {
    const auto& mom = cycle_moments_[index(k)];
    return mom.first - 0.5 * mom.second * s;
  }
  return (1.0 - cycle_given(k, s)) / s;
}

Complex AoiTransform::phi(Complex s) const {
  Complex total = 0.0;
  for (Occupancy k : kOccupancies) {
    if (!branch_active(k)) continue;
    total += age_given(k, s) * cycle_tail_over_s(k, s) * constants_.p(k);
  }
  return total / mean_cycle_;
}

AoiTransform assemble(const ConditionalTransforms& ct, const PolicyConstants& c) {
  return AoiTransform(ct, c);
}

AoiTransform analyze(const ModelParams& m, QueuedAgeForm form) {
  const PolicyConstants c = compute_constants(m);
  return assemble(conditional_transforms(build_kernels(m, c), c, form), c);
}

double mean_aoi(const AoiTransform& a) {
  double numerator = 0.0;
  const auto& c = a.constants();
  for (Occupancy k : kOccupancies) {
    if (c.p(k) <= 0.0) continue;
    const auto& cyc = a.cycle_moments(k);
    const auto& age = a.age_moments(k);
    numerator += c.p(k) * (age.first * cyc.first + 0.5 * cyc.second);
  }
  const double mean = numerator / a.mean_cycle();
  if (!std::isfinite(mean)) throw MomentError("mean AoI is not finite");
  return mean;
}

double mean_aoi(const ModelParams& m, QueuedAgeForm form) { return mean_aoi(analyze(m, form)); }

}  // namespace aoi
