#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aoi {

using Complex = std::complex<double>;

/// Point mass of the service-time law.
struct Atom {
  double location;
  double weight;
  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Exponential density piece `weight * rate * exp(-rate x)`.
struct ExpComponent {
  double rate;
  double weight;
  friend bool operator==(const ExpComponent&, const ExpComponent&) = default;
};

/// Service-time law G as a finite mixture of atoms and exponential pieces.
///
/// Every Stieltjes integral needed by the analytic model reduces to
/// elementary functions for this family, so all evaluations below are closed
/// form. Zero-weight components are dropped at construction. Instances are
/// immutable.
class ServiceDistribution {
 public:
  ServiceDistribution(std::vector<Atom> atoms, std::vector<ExpComponent> exps);

  static ServiceDistribution deterministic(double d);
  static ServiceDistribution exponential(double rate);
  /// `det_weight * delta_d + (1 - det_weight) * Exp(rate)`.
  static ServiceDistribution mixture_det_exp(double det_weight, double d, double rate);

  /// Parses `exp:MU`, `det:D` or `mix:W,det=D,exp=MU`.
  static ServiceDistribution parse(std::string_view literal);
  /// Inverse of parse(). Throws InvalidArgument for shapes with no literal form.
  std::string to_literal() const;

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<ExpComponent>& exp_components() const noexcept { return exps_; }

  double mean() const noexcept;
  double second_moment() const noexcept;
  /// Right-continuous distribution function G(x) = P(sigma <= x).
  double cdf(double x) const noexcept;
  /// 1 - G(x) = P(sigma > x).
  double survivor(double x) const noexcept;

  /// E exp(-s sigma), valid for Re(s) >= 0 (and small negative reals below
  /// the smallest exponential rate).
  Complex laplace(Complex s) const;

  friend bool operator==(const ServiceDistribution&, const ServiceDistribution&) = default;

 private:
  std::vector<Atom> atoms_;
  std::vector<ExpComponent> exps_;
};

/// Preemption threshold in [0, inf]; infinity is a distinguished value.
class Threshold {
 public:
  constexpr Threshold() = default;
  explicit Threshold(double value);

  static constexpr Threshold infinite() {
    Threshold t;
    t.infinite_ = true;
    return t;
  }
  /// Accepts a non-negative decimal or `inf`.
  static Threshold parse(std::string_view text);

  constexpr bool is_infinite() const noexcept { return infinite_; }
  /// Finite value, or +infinity for the distinguished value.
  constexpr double value() const noexcept {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }
  /// Shortest round-trip decimal, or `inf`.
  std::string to_string() const;

  friend constexpr bool operator==(const Threshold&, const Threshold&) = default;

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

/// Poisson arrival rate, preemption threshold and service law.
struct ModelParams {
  ModelParams(double lambda, Threshold theta, ServiceDistribution service);

  double lambda;
  Threshold theta;
  ServiceDistribution service;

  /// Traffic load lambda * E sigma.
  double rho() const noexcept { return lambda * service.mean(); }
};

/// Split of E exp(-lambda (theta ^ sigma)) into the part with sigma <= theta and
/// the survivor part; their sum is the success probability of one attempt.
struct ExpSplit {
  /// Integral of exp(-lambda s) dG(s) over [0, theta], an atom at theta included.
  double below;
  /// (1 - G(theta)) exp(-lambda theta).
  double tail;
};

ExpSplit partial_exp_integral(const ServiceDistribution& d, double lambda, Threshold theta);

/// The two normalizers of the post-threshold laws.
struct TailIntegrals {
  /// Integral over (theta, inf) of (exp(-lambda theta) - exp(-lambda z)) dG(z).
  double queued;
  /// Integral over (theta, inf) of (1 - exp(-lambda (x - theta))) dG(x);
  /// always exp(lambda theta) * queued.
  double backward;
};

/// Returns nullopt when G(theta) = 1 (no mass above theta), in which case the
/// post-threshold laws are undefined and carry zero weight.
std::optional<TailIntegrals> tail_weighted_integrals(const ServiceDistribution& d, double lambda,
                                                     Threshold theta);

// Segment integrals used by the transform kernels. `a` may be complex.

/// Integral over [0, theta) of exp(-a y) (1 - G(y)) dy.
Complex truncated_survivor_transform(const ServiceDistribution& d, Complex a, Threshold theta);

/// Integral over [0, inf) of exp(-a v) (1 - G(v + theta)) dv, theta finite.
Complex shifted_survivor_transform(const ServiceDistribution& d, Complex a, double theta);

/// Integral over (theta, inf) of exp(-s x) (1 - exp(-lambda (x - theta))) dG(x), theta finite.
Complex tail_weighted_transform(const ServiceDistribution& d, double lambda, double theta,
                                Complex s);

}  // namespace aoi
