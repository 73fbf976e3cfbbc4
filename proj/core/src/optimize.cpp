#include "aoi/optimize.hpp"

#include <algorithm>
#include <cmath>

#include "aoi/error.hpp"
#include "aoi/stationary.hpp"

namespace aoi {

namespace {

bool threshold_less(const Threshold& a, const Threshold& b) {
  if (a.is_infinite()) return false;
  if (b.is_infinite()) return true;
  return a.value() < b.value();
}

}  // namespace

SweepResult sweep(const BaseModel& m, std::span<const Threshold> thetas, QueuedAgeForm form) {
  if (thetas.empty()) throw InvalidArgument("sweep needs at least one threshold");
  std::vector<Threshold> points(thetas.begin(), thetas.end());
  points.push_back(Threshold(0.0));
  points.push_back(Threshold::infinite());
  std::sort(points.begin(), points.end(), threshold_less);
  points.erase(std::unique(points.begin(), points.end()), points.end());

  SweepResult out;
  bool have_best = false;
  for (const Threshold& theta : points) {
    SweepPoint p{theta, std::nullopt, {}};
    try {
      p.mean_aoi = mean_aoi(m.with_threshold(theta), form);
    } catch (const Error& e) {
      p.error = e.what();
    }
    if (p.mean_aoi) {
      if (!have_best || *p.mean_aoi < out.best_mean) {
        out.best_mean = *p.mean_aoi;
        out.best_theta = theta;
        have_best = true;
      }
      if (theta == Threshold(0.0)) out.mean_at_zero = p.mean_aoi;
      if (theta.is_infinite()) out.mean_at_infinity = p.mean_aoi;
    }
    out.grid.push_back(std::move(p));
  }
  if (!have_best) throw MomentError("mean AoI failed at every threshold of the sweep");
  return out;
}

std::vector<Threshold> default_theta_grid(const ServiceDistribution& service) {
  std::vector<Threshold> grid;
  const double scale = service.mean();
  for (int k = 0; k <= 50; ++k) grid.emplace_back(k * 0.1 * scale);
  grid.push_back(Threshold::infinite());
  return grid;
}

RefineResult refine(const BaseModel& m, double lo, double hi, std::optional<double> interior,
                    QueuedAgeForm form) {
  if (!(lo >= 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw InvalidArgument("refine needs a finite bracket 0 <= lo <= hi");
  }
  int evaluations = 0;
  auto f = [&](double theta) {
    ++evaluations;
    return mean_aoi(m.with_threshold(Threshold(theta)), form);
  };
  if (lo == hi) {
    const double v = f(lo);
    return {lo, v, evaluations};
  }

  const double mid = interior.value_or(0.5 * (lo + hi));
  if (!(mid > lo && mid < hi)) throw BracketError("interior point must lie strictly inside");
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  const double f_mid = f(mid);
  if (!(f_mid < f_lo && f_mid < f_hi)) {
    throw BracketError("interior point does not beat both bracket ends");
  }

  const double tolerance = 1e-4 * m.service.mean();
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double best_theta = mid;
  double best = f_mid;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  auto consider = [&](double theta, double value) {
    if (value < best) {
      best = value;
      best_theta = theta;
    }
  };
  consider(c, fc);
  consider(d, fd);
  while (b - a > tolerance) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    consider(c, fc);
    consider(d, fd);
  }
  return {best_theta, best, evaluations};
}

}  // namespace aoi
