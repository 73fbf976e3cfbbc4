#include "aoi/service_distribution.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

#include "aoi/error.hpp"
#include "numeric_detail.hpp"

namespace aoi {

namespace {

constexpr double kWeightTolerance = 1e-12;

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw InvalidArgument("cannot format number");
  return std::string(buf, end);
}

double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last) {
    throw InvalidArgument("malformed number for " + std::string(what) + ": '" +
                          std::string(text) + "'");
  }
  return value;
}

std::string_view strip_prefix(std::string_view text, std::string_view prefix) {
  if (text.substr(0, prefix.size()) != prefix) {
    throw InvalidArgument("expected '" + std::string(prefix) + "' in '" + std::string(text) + "'");
  }
  return text.substr(prefix.size());
}

}  // namespace

ServiceDistribution::ServiceDistribution(std::vector<Atom> atoms, std::vector<ExpComponent> exps) {
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
      throw InvalidArgument("atom weight must be a finite non-negative number");
    }
    if (!(a.location > 0.0) || !std::isfinite(a.location)) {
      throw InvalidArgument("atom location must be finite and strictly positive");
    }
    total += a.weight;
    if (a.weight > 0.0) atoms_.push_back(a);
  }
  for (const auto& e : exps) {
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw InvalidArgument("exponential weight must be a finite non-negative number");
    }
    if (!(e.rate > 0.0) || !std::isfinite(e.rate)) {
      throw InvalidArgument("exponential rate must be finite and strictly positive");
    }
    total += e.weight;
    if (e.weight > 0.0) exps_.push_back(e);
  }
  if (std::abs(total - 1.0) > kWeightTolerance) {
    throw InvalidArgument("service distribution weights sum to " + format_double(total) +
                          ", expected 1");
  }
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& l, const Atom& r) { return l.location < r.location; });
}

ServiceDistribution ServiceDistribution::deterministic(double d) {
  return ServiceDistribution({{d, 1.0}}, {});
}

ServiceDistribution ServiceDistribution::exponential(double rate) {
  return ServiceDistribution({}, {{rate, 1.0}});
}

ServiceDistribution ServiceDistribution::mixture_det_exp(double det_weight, double d, double rate) {
  if (!(det_weight >= 0.0 && det_weight <= 1.0)) {
    throw InvalidArgument("mixture weight must lie in [0, 1]");
  }
  return ServiceDistribution({{d, det_weight}}, {{rate, 1.0 - det_weight}});
}

ServiceDistribution ServiceDistribution::parse(std::string_view literal) {
  const auto colon = literal.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidArgument("distribution literal needs a family prefix: '" + std::string(literal) +
                          "'");
  }
  const auto family = literal.substr(0, colon);
  const auto body = literal.substr(colon + 1);
  if (family == "exp") return exponential(parse_double(body, "exp rate"));
  if (family == "det") return deterministic(parse_double(body, "det location"));
  if (family == "mix") {
    const auto c1 = body.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : body.find(',', c1 + 1);
    if (c2 == std::string_view::npos) {
      throw InvalidArgument("mix literal must read mix:W,det=D,exp=MU");
    }
    const double w = parse_double(body.substr(0, c1), "mix weight");
    const double d = parse_double(strip_prefix(body.substr(c1 + 1, c2 - c1 - 1), "det="), "det");
    const double mu = parse_double(strip_prefix(body.substr(c2 + 1), "exp="), "exp");
    return mixture_det_exp(w, d, mu);
  }
  throw InvalidArgument("unknown distribution family '" + std::string(family) + "'");
}

std::string ServiceDistribution::to_literal() const {
  if (atoms_.size() == 1 && exps_.empty()) return "det:" + format_double(atoms_[0].location);
  if (atoms_.empty() && exps_.size() == 1) return "exp:" + format_double(exps_[0].rate);
  if (atoms_.size() == 1 && exps_.size() == 1) {
    return "mix:" + format_double(atoms_[0].weight) + ",det=" + format_double(atoms_[0].location) +
           ",exp=" + format_double(exps_[0].rate);
  }
  throw InvalidArgument("distribution has no literal form");
}

double ServiceDistribution::mean() const noexcept {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.weight * a.location;
  for (const auto& e : exps_) m += e.weight / e.rate;
  return m;
}

double ServiceDistribution::second_moment() const noexcept {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.weight * a.location * a.location;
  for (const auto& e : exps_) m += 2.0 * e.weight / (e.rate * e.rate);
  return m;
}

double ServiceDistribution::cdf(double x) const noexcept { return 1.0 - survivor(x); }

double ServiceDistribution::survivor(double x) const noexcept {
  if (x < 0.0) return 1.0;
  double s = 0.0;
  for (const auto& a : atoms_) {
    if (a.location > x) s += a.weight;
  }
  for (const auto& e : exps_) s += e.weight * std::exp(-e.rate * x);
  return s;
}

Complex ServiceDistribution::laplace(Complex s) const {
  Complex g = 0.0;
  for (const auto& a : atoms_) g += a.weight * std::exp(-s * a.location);
  for (const auto& e : exps_) g += e.weight * e.rate / (e.rate + s);
  return g;
}

Threshold::Threshold(double value) {
  if (std::isnan(value) || value < 0.0) throw InvalidArgument("threshold must be >= 0");
  if (std::isinf(value)) {
    infinite_ = true;
  } else {
    value_ = value;
  }
}

Threshold Threshold::parse(std::string_view text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return infinite();
  return Threshold(parse_double(text, "threshold"));
}

std::string Threshold::to_string() const { return infinite_ ? "inf" : format_double(value_); }

ModelParams::ModelParams(double lambda_, Threshold theta_, ServiceDistribution service_)
    : lambda(lambda_), theta(theta_), service(std::move(service_)) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("arrival rate must be finite and strictly positive");
  }
}

ExpSplit partial_exp_integral(const ServiceDistribution& d, double lambda, Threshold theta) {
  if (theta.is_infinite()) return {d.laplace(lambda).real(), 0.0};
  const double th = theta.value();
  double below = 0.0;
  for (const auto& a : d.atoms()) {
    if (a.location <= th) below += a.weight * std::exp(-lambda * a.location);
  }
  for (const auto& e : d.exp_components()) {
    below += e.weight * e.rate / (lambda + e.rate) * -std::expm1(-(lambda + e.rate) * th);
  }
  return {below, d.survivor(th) * std::exp(-lambda * th)};
}

std::optional<TailIntegrals> tail_weighted_integrals(const ServiceDistribution& d, double lambda,
                                                     Threshold theta) {
  if (theta.is_infinite()) return std::nullopt;
  const double th = theta.value();
  const double shift = std::exp(-lambda * th);
  TailIntegrals out{0.0, 0.0};
  for (const auto& a : d.atoms()) {
    if (a.location > th) {
      out.queued += a.weight * (shift - std::exp(-lambda * a.location));
      out.backward += a.weight * -std::expm1(-lambda * (a.location - th));
    }
  }
  for (const auto& e : d.exp_components()) {
    const double frac = lambda / (lambda + e.rate);
    out.queued += e.weight * std::exp(-(lambda + e.rate) * th) * frac;
    out.backward += e.weight * std::exp(-e.rate * th) * frac;
  }
  if (!(out.queued > 0.0) || !(out.backward > 0.0)) return std::nullopt;
  return out;
}

Complex truncated_survivor_transform(const ServiceDistribution& d, Complex a, Threshold theta) {
  Complex total = 0.0;
  for (const auto& atom : d.atoms()) {
    const double m = theta.is_infinite() ? atom.location : std::min(theta.value(), atom.location);
    total += atom.weight * detail::one_minus_exp_neg(a * m) / a;
  }
  for (const auto& e : d.exp_components()) {
    const Complex rate = a + e.rate;
    const Complex mass =
        theta.is_infinite() ? Complex(1.0) : detail::one_minus_exp_neg(rate * theta.value());
    total += e.weight * mass / rate;
  }
  return total;
}

Complex shifted_survivor_transform(const ServiceDistribution& d, Complex a, double theta) {
  Complex total = 0.0;
  for (const auto& atom : d.atoms()) {
    if (atom.location > theta) {
      total += atom.weight * detail::one_minus_exp_neg(a * (atom.location - theta)) / a;
    }
  }
  for (const auto& e : d.exp_components()) {
    total += e.weight * std::exp(-e.rate * theta) / (a + e.rate);
  }
  return total;
}

Complex tail_weighted_transform(const ServiceDistribution& d, double lambda, double theta,
                                Complex s) {
  Complex total = 0.0;
  for (const auto& atom : d.atoms()) {
    if (atom.location > theta) {
      total += atom.weight * std::exp(-s * atom.location) *
               -std::expm1(-lambda * (atom.location - theta));
    }
  }
  for (const auto& e : d.exp_components()) {
    const Complex sr = s + e.rate;
    total += e.weight * e.rate * std::exp(-sr * theta) * lambda / (sr * (sr + lambda));
  }
  return total;
}

}  // namespace aoi
