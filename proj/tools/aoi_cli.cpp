// aoi: command-line front end for the analytic model and the simulator.
//
// Exit status: 0 success, 1 validation failure, 2 malformed input,
// 3 numerical or I/O failure. Errors are reported as JSON on stderr.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aoi/aoi.hpp"
#include "json.hpp"

namespace {

using nlohmann::ordered_json;

enum ExitCode { kOk = 0, kValidationFailed = 1, kMalformed = 2, kFailure = 3 };

struct Malformed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationFailed {
  ordered_json report;
};

int report_error(const char* kind, const std::string& message, int code) {
  ordered_json j{{"error", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << j.dump() << '\n';
  return code;
}

// Raw flag values; everything is parsed and validated after CLI11 is done.
struct Flags {
  std::string lambda;
  std::string theta;
  std::string dist;
  std::string s_grid;
  std::string nu_grid;
  std::string epsilon;
  std::string theta_grid;
  std::string events = "1e6";
  std::string reps = "10";
  std::string seed = "1";
  std::string warmup = "0.1";
  std::string out;
  std::string format;
  std::string threads = "1";
  std::string policy = "threshold";
  std::string age_form = "service-only";
};

double parse_double(const std::string& flag, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw Malformed("--" + flag + ": not a finite number: '" + text + "'");
  }
  return v;
}

std::int64_t parse_count(const std::string& flag, const std::string& text, std::int64_t min) {
  const double v = parse_double(flag, text);
  if (v != std::floor(v) || v < static_cast<double>(min) || v > 9.0e15) {
    throw Malformed("--" + flag + ": expected an integer >= " + std::to_string(min) + ", got '" +
                    text + "'");
  }
  return static_cast<std::int64_t>(v);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

// "a,b,c" or "start:stop:step" (stop included up to rounding).
std::vector<double> parse_grid(const std::string& flag, const std::string& text) {
  std::vector<double> out;
  const auto range = split(text, ':');
  if (range.size() == 3) {
    const double start = parse_double(flag, range[0]);
    const double stop = parse_double(flag, range[1]);
    const double step = parse_double(flag, range[2]);
    if (!(step > 0.0) || stop < start) throw Malformed("--" + flag + ": bad range '" + text + "'");
    const auto n = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9));
    if (n > 1'000'000) throw Malformed("--" + flag + ": range has too many points");
    for (std::int64_t k = 0; k <= n; ++k) out.push_back(start + static_cast<double>(k) * step);
    return out;
  }
  if (range.size() != 1) throw Malformed("--" + flag + ": expected a list or start:stop:step");
  for (const auto& item : split(text, ',')) out.push_back(parse_double(flag, item));
  if (out.empty()) throw Malformed("--" + flag + ": empty grid");
  return out;
}

std::vector<aoi::Threshold> parse_theta_grid(const std::string& text) {
  std::vector<aoi::Threshold> out;
  if (split(text, ':').size() == 3) {
    for (double v : parse_grid("theta-grid", text)) out.emplace_back(v);
    return out;
  }
  for (const auto& item : split(text, ',')) out.push_back(aoi::Threshold::parse(item));
  if (out.empty()) throw Malformed("--theta-grid: empty grid");
  return out;
}

aoi::QueuedAgeForm parse_age_form(const std::string& text) {
  if (text == "service-only") return aoi::QueuedAgeForm::kServiceOnly;
  if (text == "full-cycle") return aoi::QueuedAgeForm::kFullCycle;
  throw Malformed("--age-form: expected service-only or full-cycle, got '" + text + "'");
}

std::string require(const std::string& value, const char* flag) {
  if (value.empty()) throw Malformed(std::string("--") + flag + " is required");
  return value;
}

double parse_lambda(const Flags& f) { return parse_double("lambda", require(f.lambda, "lambda")); }

aoi::ServiceDistribution parse_dist(const Flags& f) {
  return aoi::ServiceDistribution::parse(require(f.dist, "dist"));
}

aoi::ModelParams parse_model(const Flags& f) {
  return aoi::ModelParams(parse_lambda(f), aoi::Threshold::parse(require(f.theta, "theta")),
                          parse_dist(f));
}

std::string format_or(const Flags& f, const std::string& fallback,
                      std::initializer_list<const char*> allowed) {
  const std::string fmt = f.format.empty() ? fallback : f.format;
  for (const char* a : allowed) {
    if (fmt == a) return fmt;
  }
  throw Malformed("--format: '" + fmt + "' not supported by this command");
}

void emit(const Flags& f, const std::string& text) {
  if (f.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(f.out, std::ios::binary | std::ios::trunc);
  if (!file) throw Failure("cannot open output file '" + f.out + "'");
  file << text;
  if (!file) throw Failure("failed writing '" + f.out + "'");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Failure("cannot open output file '" + path + "'");
  file << text;
}

ordered_json model_json(const aoi::ModelParams& m) {
  std::string dist;
  try {
    dist = m.service.to_literal();
  } catch (const aoi::InvalidArgument&) {
    dist = "custom";
  }
  return {{"lambda", m.lambda}, {"theta", m.theta.to_string()}, {"dist", dist}, {"rho", m.rho()}};
}

ordered_json finite_or_null(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

void run_mean(const Flags& f) {
  const auto m = parse_model(f);
  const auto fmt = format_or(f, "text", {"text", "json"});
  const auto a = aoi::analyze(m, parse_age_form(f.age_form));
  const double mean = aoi::mean_aoi(a);
  const auto& c = a.constants();
  if (fmt == "json") {
    ordered_json j{{"model", model_json(m)},
                   {"mean_aoi", mean},
                   {"q", c.q},
                   {"p0", c.p0},
                   {"p1", c.p1},
                   {"mean_cycle", a.mean_cycle()}};
    emit(f, j.dump(2) + "\n");
    return;
  }
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-11s%.6f\n%-11s%.6f\n%-11s%.6f\n%-11s%.6f\n%-11s%.6f\n",
                "mean_aoi", mean, "q", c.q, "p0", c.p0, "p1", c.p1, "mean_cycle", a.mean_cycle());
  emit(f, buf);
}

void run_transform(const Flags& f) {
  const auto m = parse_model(f);
  format_or(f, "csv", {"csv"});
  const auto grid = parse_grid("s-grid", f.s_grid.empty() ? "0.1:10:0.1" : f.s_grid);
  for (double s : grid) {
    if (s < 0.0) throw Malformed("--s-grid: values must be nonnegative");
  }
  const auto a = aoi::analyze(m, parse_age_form(f.age_form));
  std::string out = "s,phi\n";
  for (double s : grid) {
    out += aoi::format_number(s) + ',' + aoi::format_number(s == 0.0 ? 1.0 : a.phi(s).real()) + '\n';
  }
  emit(f, out);
}

void run_tail(const Flags& f) {
  const auto m = parse_model(f);
  format_or(f, "csv", {"csv"});
  const auto a = aoi::analyze(m, parse_age_form(f.age_form));
  if (!f.epsilon.empty()) {
    const double eps = parse_double("epsilon", f.epsilon);
    if (!(eps > 0.0 && eps < 1.0)) throw Malformed("--epsilon must lie in (0, 1)");
    const double nu = aoi::find_threshold(a, eps);
    emit(f, "epsilon,nu\n" + aoi::format_number(eps) + ',' + aoi::format_number(nu) + '\n');
    return;
  }
  std::vector<double> grid;
  if (f.nu_grid.empty()) {
    const double mean = aoi::mean_aoi(a);
    for (int k = 1; k <= 100; ++k) grid.push_back(0.1 * k * mean);
  } else {
    grid = parse_grid("nu-grid", f.nu_grid);
  }
  std::string out = "nu,prob\n";
  for (double nu : grid) {
    if (!(nu > 0.0)) throw Malformed("--nu-grid: values must be positive");
    const auto e = aoi::ccdf_estimate(a, nu);
    if (!e.accurate()) {
      std::cerr << "warning: ccdf at nu=" << aoi::format_number(nu) << " has error estimate "
                << aoi::format_number(e.error_estimate) << '\n';
    }
    out += aoi::format_number(nu) + ',' + aoi::format_number(e.probability) + '\n';
  }
  emit(f, out);
}

void run_sweep(const Flags& f) {
  const aoi::BaseModel base{parse_lambda(f), parse_dist(f)};
  if (!(base.lambda > 0.0)) throw Malformed("--lambda must be positive");
  const auto fmt = format_or(f, "csv", {"csv", "json"});
  const auto grid = f.theta_grid.empty() ? aoi::default_theta_grid(base.service)
                                         : parse_theta_grid(f.theta_grid);
  const auto r = aoi::sweep(base, grid, parse_age_form(f.age_form));
  emit(f, fmt == "json" ? aoi::to_json(r) : aoi::sweep_csv(r));
}

aoi::SimConfig sim_config(const Flags& f) {
  aoi::SimConfig cfg{
      .model = parse_model(f),
      .policy = aoi::parse_policy(f.policy),
      .horizon_events = parse_count("events", f.events, 10'000),
      .warmup_fraction = parse_double("warmup", f.warmup),
      .replications = static_cast<int>(parse_count("reps", f.reps, 1)),
      .seed = static_cast<std::uint64_t>(parse_count("seed", f.seed, 0)),
      .ccdf_grid = f.nu_grid.empty() ? std::vector<double>{} : parse_grid("nu-grid", f.nu_grid),
      .threads = static_cast<int>(parse_count("threads", f.threads, 1)),
  };
  cfg.validate();
  return cfg;
}

void run_simulate(const Flags& f) {
  const auto cfg = sim_config(f);
  const auto fmt = format_or(f, "json", {"json", "csv"});
  const auto r = aoi::simulate(cfg);
  if (fmt == "csv") {
    emit(f, aoi::ccdf_csv(r.ccdf_samples));
    return;
  }
  emit(f, aoi::to_json(r, cfg));
  if (!f.out.empty() && !cfg.ccdf_grid.empty()) {
    write_file(f.out + ".ccdf.csv", aoi::ccdf_csv(r.ccdf_samples));
  }
}

void run_validate(const Flags& f) {
  const auto cfg = sim_config(f);
  if (cfg.policy != aoi::Policy::kThreshold) {
    throw Malformed("validate compares against the analytic model: --policy must be threshold");
  }
  if (cfg.replications < 2) throw Malformed("validate needs --reps >= 2 for a confidence interval");
  format_or(f, "json", {"json"});
  const double analytic = aoi::mean_aoi(cfg.model, parse_age_form(f.age_form));
  const double p0 = aoi::compute_constants(cfg.model).p0;
  const auto r = aoi::simulate(cfg);
  const bool mean_ok = std::abs(r.mean_aoi - analytic) <= 3.0 * r.mean_aoi_ci_halfwidth;
  const bool p0_ok = std::abs(r.p0_empirical - p0) <= 3.0 * r.p0_standard_error;
  ordered_json j{{"model", model_json(cfg.model)},
                 {"events", cfg.horizon_events},
                 {"replications", cfg.replications},
                 {"seed", cfg.seed},
                 {"analytic_mean", analytic},
                 {"simulated_mean", r.mean_aoi},
                 {"ci_halfwidth", finite_or_null(r.mean_aoi_ci_halfwidth)},
                 {"mean_within_3ci", mean_ok},
                 {"analytic_p0", p0},
                 {"simulated_p0", r.p0_empirical},
                 {"p0_standard_error", finite_or_null(r.p0_standard_error)},
                 {"p0_within_3se", p0_ok},
                 {"pass", mean_ok && p0_ok}};
  emit(f, j.dump(2) + "\n");
  if (!(mean_ok && p0_ok)) throw ValidationFailed{j};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age of Information for the two-cell queue with threshold preemption"};
  app.set_config("--config", "", "TOML/INI file with flag values; command-line flags win");
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--lambda", f.lambda, "arrival rate");
  app.add_option("--theta", f.theta, "preemption threshold (number or inf)");
  app.add_option("--dist", f.dist, "service law: exp:MU, det:D or mix:W,det=D,exp=MU");
  app.add_option("--s-grid", f.s_grid, "transform arguments: list or start:stop:step");
  app.add_option("--nu-grid", f.nu_grid, "CCDF arguments: list or start:stop:step");
  app.add_option("--epsilon", f.epsilon, "tail target for the threshold search");
  app.add_option("--theta-grid", f.theta_grid, "thresholds to sweep (list may contain inf)");
  app.add_option("--events", f.events, "arrivals per replication")->capture_default_str();
  app.add_option("--reps", f.reps, "replications")->capture_default_str();
  app.add_option("--seed", f.seed, "random seed")->capture_default_str();
  app.add_option("--warmup", f.warmup, "discarded leading fraction of arrivals")->capture_default_str();
  app.add_option("--out", f.out, "output file (default stdout)");
  app.add_option("--format", f.format, "text, csv or json depending on the command");
  app.add_option("--threads", f.threads, "worker threads for replications")->capture_default_str();
  app.add_option("--policy", f.policy, "threshold, threshold-variant, blocking1, blocking2")
      ->capture_default_str();
  app.add_option("--age-form", f.age_form, "service-only or full-cycle")->capture_default_str();

  struct Command {
    const char* name;
    const char* help;
    void (*run)(const Flags&);
  };
  const Command commands[] = {
      {"mean", "mean AoI and embedded-chain constants", run_mean},
      {"transform", "AoI Laplace transform on an s-grid (CSV)", run_transform},
      {"tail", "P(AoI > nu) on a grid, or the nu meeting --epsilon (CSV)", run_tail},
      {"sweep", "mean AoI over thresholds (CSV or JSON)", run_sweep},
      {"simulate", "discrete-event simulation (JSON, CCDF CSV)", run_simulate},
      {"validate", "simulation against the analytic mean and p0", run_validate},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) subs.emplace_back(app.add_subcommand(c.name, c.help), &c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("malformed_input", e.what(), kMalformed);
  }

  try {
    for (const auto& [sub, cmd] : subs) {
      if (sub->parsed()) cmd->run(f);
    }
  } catch (const ValidationFailed& v) {
    std::cerr << ordered_json{{"error", "validation_failed"}, {"report", v.report}, {"exit_code", 1}}
                     .dump()
              << '\n';
    return kValidationFailed;
  } catch (const Malformed& e) {
    return report_error("malformed_input", e.what(), kMalformed);
  } catch (const aoi::InvalidArgument& e) {
    return report_error("malformed_input", e.what(), kMalformed);
  } catch (const aoi::Error& e) {
    return report_error("numerical_failure", e.what(), kFailure);
  } catch (const Failure& e) {
    return report_error("io_failure", e.what(), kFailure);
  }
  return kOk;
}
