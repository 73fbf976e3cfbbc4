#include "aoi/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "aoi/error.hpp"
#include "json.hpp"

namespace aoi {

namespace {

using nlohmann::ordered_json;

ordered_json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

std::string literal_or_custom(const ServiceDistribution& d) {
  try {
    return d.to_literal();
  } catch (const InvalidArgument&) {
    return "custom";
  }
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::string to_json(const SimResult& r, const SimConfig& cfg) {
  ordered_json j;
  j["model"] = {{"lambda", cfg.model.lambda},
                {"theta", cfg.model.theta.to_string()},
                {"dist", literal_or_custom(cfg.model.service)},
                {"rho", cfg.model.rho()}};
  j["config"] = {{"policy", std::string(to_string(cfg.policy))},
                 {"events", cfg.horizon_events},
                 {"warmup", cfg.warmup_fraction},
                 {"replications", cfg.replications},
                 {"seed", cfg.seed}};
  j["mean_aoi"] = number(r.mean_aoi);
  j["mean_aoi_ci_halfwidth"] = number(r.mean_aoi_ci_halfwidth);
  j["p0_empirical"] = number(r.p0_empirical);
  j["p0_standard_error"] = number(r.p0_standard_error);
  j["mean_cycle_empirical"] = number(r.mean_cycle_empirical);
  auto& reps = j["replication_means"] = ordered_json::array();
  for (double m : r.replication_means) reps.push_back(number(m));
  auto& ccdf = j["ccdf_samples"] = ordered_json::array();
  for (const auto& s : r.ccdf_samples) ccdf.push_back({{"nu", s.nu}, {"prob", s.probability}});
  j["counters"] = {{"arrivals", r.counters.arrivals},
                   {"departures", r.counters.departures},
                   {"preemptions", r.counters.preemptions},
                   {"queued", r.counters.queued},
                   {"pushouts", r.counters.pushouts},
                   {"drops", r.counters.drops},
                   {"max_preempted_elapsed", r.counters.max_preempted_elapsed}};
  return j.dump(2) + "\n";
}

std::string ccdf_csv(std::span<const CcdfSample> samples) {
  std::ostringstream out;
  out << "nu,prob\n";
  for (const auto& s : samples) out << format_number(s.nu) << ',' << format_number(s.probability) << '\n';
  return out.str();
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream out;
  out << "theta,mean_aoi\n";
  for (const auto& p : r.grid) {
    out << p.theta.to_string() << ',';
    if (p.mean_aoi) out << format_number(*p.mean_aoi);
    out << '\n';
  }
  return out.str();
}

std::string to_json(const SweepResult& r) {
  ordered_json j;
  auto& grid = j["grid"] = ordered_json::array();
  for (const auto& p : r.grid) {
    ordered_json row = {{"theta", p.theta.to_string()},
                        {"mean_aoi", p.mean_aoi ? number(*p.mean_aoi) : ordered_json(nullptr)}};
    if (!p.error.empty()) row["error"] = p.error;
    grid.push_back(std::move(row));
  }
  j["best_theta"] = r.best_theta.to_string();
  j["best_mean"] = r.best_mean;
  j["mean_at_zero"] = r.mean_at_zero ? number(*r.mean_at_zero) : ordered_json(nullptr);
  j["mean_at_infinity"] = r.mean_at_infinity ? number(*r.mean_at_infinity) : ordered_json(nullptr);
  return j.dump(2) + "\n";
}

}  // namespace aoi
