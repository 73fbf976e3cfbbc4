#include "aoi/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <thread>

#include "aoi/error.hpp"

namespace aoi {

namespace {

constexpr double kZ95 = 1.959963984540054;

enum class Stream : std::uint32_t { kArrivals = 0, kServices = 1 };

/// One reproducible stream per (seed, replication, purpose).
class Rng {
 public:
  Rng(std::uint64_t seed, int replication, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(replication), static_cast<std::uint32_t>(stream),
                      0x5eedu};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

 private:
  std::mt19937_64 engine_;
};

/// Draws service times. Every draw consumes exactly two uniforms so that
/// policies sharing a seed see identical service sequences.
class ServiceSampler {
 public:
  explicit ServiceSampler(const ServiceDistribution& d) {
    double acc = 0.0;
    for (const auto& a : d.atoms()) {
      acc += a.weight;
      pieces_.push_back({acc, a.location, 0.0});
    }
    for (const auto& e : d.exp_components()) {
      acc += e.weight;
      pieces_.push_back({acc, 0.0, e.rate});
    }
    pieces_.back().cumulative = std::numeric_limits<double>::infinity();
  }

  double draw(Rng& rng) const {
    const double pick = rng.uniform();
    const double u = rng.uniform();
    const auto it = std::upper_bound(pieces_.begin(), pieces_.end(), pick,
                                     [](double v, const Piece& p) { return v < p.cumulative; });
    if (it->rate == 0.0) return it->location;
    return -std::log1p(-u) / it->rate;
  }

 private:
  struct Piece {
    double cumulative;
    double location;
    double rate;
  };
  std::vector<Piece> pieces_;
};

struct InService {
  double arrival;
  double start;
  double end;
};

/// Event-driven two-cell system. The observer sees every constant-slope
/// stretch of the AoI path and every departure.
template <class Observer>
class Engine {
 public:
  Engine(const SimConfig& cfg, int replication, Observer& obs)
      : cfg_(cfg),
        theta_(cfg.model.theta.value()),
        arrivals_(cfg.seed, replication, Stream::kArrivals),
        services_(cfg.seed, replication, Stream::kServices),
        sampler_(cfg.model.service),
        obs_(obs) {}

  void run() {
    const double lambda = cfg_.model.lambda;
    const auto warmup =
        static_cast<std::int64_t>(std::floor(cfg_.warmup_fraction * cfg_.horizon_events));
    double next_arrival = arrivals_.exponential(lambda);
    for (std::int64_t n = 0; n < cfg_.horizon_events; ++n) {
      while (cell1_ && cell1_->end <= next_arrival) {
        advance(cell1_->end);
        depart();
      }
      advance(next_arrival);
      if (n == warmup) obs_.start_measuring(now_);
      arrive();
      if (obs_.done()) return;
      next_arrival += arrivals_.exponential(lambda);
    }
    obs_.finish(now_);
  }

  const PolicyCounters& counters() const noexcept { return counters_; }

 private:
  void advance(double t) {
    obs_.segment(now_, t, age_);
    age_ += t - now_;
    now_ = t;
  }

  void start_service(double arrival) {
    cell1_ = InService{arrival, now_, now_ + sampler_.draw(services_)};
  }

  void preempt() {
    ++counters_.preemptions;
    counters_.max_preempted_elapsed =
        std::max(counters_.max_preempted_elapsed, now_ - cell1_->start);
    start_service(now_);
  }

  void enqueue() {
    if (cell2_) ++counters_.pushouts;
    ++counters_.queued;
    cell2_ = now_;
  }

  void arrive() {
    ++counters_.arrivals;
    const double before = age_;
    if (!cell1_) {
      start_service(now_);
    } else {
      const double elapsed = now_ - cell1_->start;
      switch (cfg_.policy) {
        case Policy::kThreshold:
          if (elapsed <= theta_) {
            preempt();
          } else {
            enqueue();
          }
          break;
        case Policy::kThresholdVariant:
          if (elapsed > 0.0 && elapsed < theta_) {
            enqueue();
          } else {
            preempt();
          }
          break;
        case Policy::kBlocking1:
          ++counters_.drops;
          break;
        case Policy::kBlocking2:
          if (cell2_) {
            ++counters_.drops;
          } else {
            enqueue();
          }
          break;
      }
    }
    obs_.event(PathEvent::Kind::kArrival, now_, before, age_);
  }

  void depart() {
    ++counters_.departures;
    const double before = age_;
    const double delivered_age = now_ - cell1_->arrival;
    // A stale delivery (older than the freshest delivered) leaves the age unchanged.
    if (delivered_age < age_) age_ = delivered_age;
    const int occupancy = cell2_ ? 1 : 0;
    if (cell2_) {
      const double waiting = *cell2_;
      cell2_.reset();
      start_service(waiting);
    } else {
      cell1_.reset();
    }
    obs_.departure(now_, occupancy, age_);
    obs_.event(PathEvent::Kind::kDeparture, now_, before, age_);
  }

  const SimConfig& cfg_;
  double theta_;
  Rng arrivals_;
  Rng services_;
  ServiceSampler sampler_;
  Observer& obs_;

  double now_ = 0.0;
  double age_ = 0.0;
  std::optional<InService> cell1_;
  std::optional<double> cell2_;
  PolicyCounters counters_;
};

/// No-op hooks; observers override what they need.
struct ObserverBase {
  bool measuring = false;
  void start_measuring(double) { measuring = true; }
  void segment(double, double, double) {}
  void departure(double, int, double) {}
  void event(PathEvent::Kind, double, double, double) {}
  void finish(double) {}
  bool done() const { return false; }
};

/// Time-average AoI, empirical CCDF and departure statistics of one replication.
struct AverageObserver : ObserverBase {
  explicit AverageObserver(const std::vector<double>& grid)
      : grid(grid), constant(grid.size() + 1, 0.0), linear(grid.size() + 1, 0.0) {}

  void start_measuring(double t) {
    measuring = true;
    start = t;
  }

  void segment(double t0, double t1, double age0) {
    if (!measuring || t1 <= t0) return;
    const double dt = t1 - t0;
    area += age0 * dt + 0.5 * dt * dt;
    if (grid.empty()) return;
    // Time with age above nu_k: dt for nu_k < age0, age1 - nu_k inside the segment.
    const double age1 = age0 + dt;
    const auto ia = static_cast<std::size_t>(
        std::lower_bound(grid.begin(), grid.end(), age0) - grid.begin());
    const auto ib = static_cast<std::size_t>(
        std::lower_bound(grid.begin(), grid.end(), age1) - grid.begin());
    constant[0] += dt;
    constant[ia] += age1 - dt;
    constant[ib] -= age1;
    linear[ia] += 1.0;
    linear[ib] -= 1.0;
  }

  void departure(double t, int occupancy, double) {
    if (!measuring) return;
    if (departures == 0) first_departure = t;
    last_departure = t;
    ++departures;
    if (occupancy == 0) ++empty_departures;
  }

  void finish(double t) { end = t; }

  std::vector<double> tail_times() const {
    std::vector<double> out(grid.size());
    double c = 0.0;
    double l = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      c += constant[k];
      l += linear[k];
      out[k] = std::max(0.0, c - l * grid[k]);
    }
    return out;
  }

  const std::vector<double>& grid;
  std::vector<double> constant;
  std::vector<double> linear;
  double start = 0.0;
  double end = 0.0;
  double area = 0.0;
  double first_departure = 0.0;
  double last_departure = 0.0;
  std::int64_t departures = 0;
  std::int64_t empty_departures = 0;
};

template <class Observer>
PolicyCounters run_one(const SimConfig& cfg, int replication, Observer& obs) {
  Engine<Observer> engine(cfg, replication, obs);
  engine.run();
  return engine.counters();
}

/// Runs body(r) for r in [0, count) on up to `threads` workers.
template <class Body>
void for_each_replication(int count, int threads, Body&& body) {
  const int workers = std::clamp(threads, 1, count);
  if (workers == 1) {
    for (int r = 0; r < count; ++r) body(r);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int r = next++; r < count; r = next++) body(r);
    });
  }
}

void merge(PolicyCounters& into, const PolicyCounters& from) {
  into.arrivals += from.arrivals;
  into.departures += from.departures;
  into.preemptions += from.preemptions;
  into.queued += from.queued;
  into.pushouts += from.pushouts;
  into.drops += from.drops;
  into.max_preempted_elapsed = std::max(into.max_preempted_elapsed, from.max_preempted_elapsed);
}

struct MeanAndSpread {
  double mean;
  double standard_error;
};

MeanAndSpread across(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return {mean, std::numeric_limits<double>::quiet_NaN()};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

/// Streaming sums for empirical transforms and correlations.
struct KernelObserver : ObserverBase {
  explicit KernelObserver(std::span<const double> s) : s_values(s.begin(), s.end()) {
    for (auto& row : sums) {
      for (auto& cell : row) {
        cell.cycle.assign(s_values.size(), {});
        cell.age.assign(s_values.size(), {});
      }
    }
  }

  struct Moment2 {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  struct Cell {
    std::int64_t count = 0;
    std::vector<Moment2> cycle;
    std::vector<Moment2> age;
  };
  struct Pair {
    double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  };

  void departure(double t, int occupancy, double age) {
    if (measuring && has_previous) {
      const double cycle = t - previous_time;
      auto& cell = sums[static_cast<std::size_t>(previous_occupancy)]
                       [static_cast<std::size_t>(occupancy)];
      ++cell.count;
      for (std::size_t k = 0; k < s_values.size(); ++k) {
        const double ec = std::exp(-s_values[k] * cycle);
        const double ea = std::exp(-s_values[k] * age);
        cell.cycle[k].sum += ec;
        cell.cycle[k].sum_sq += ec * ec;
        cell.age[k].sum += ea;
        cell.age[k].sum_sq += ea * ea;
      }
      auto& p = pairs[static_cast<std::size_t>(previous_occupancy)];
      p.n += 1.0;
      p.sx += previous_age;
      p.sy += cycle;
      p.sxx += previous_age * previous_age;
      p.syy += cycle * cycle;
      p.sxy += previous_age * cycle;
    }
    has_previous = true;
    previous_time = t;
    previous_occupancy = occupancy;
    previous_age = age;
  }

  void absorb(const KernelObserver& o) {
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        auto& a = sums[i][j];
        const auto& b = o.sums[i][j];
        a.count += b.count;
        for (std::size_t k = 0; k < s_values.size(); ++k) {
          a.cycle[k].sum += b.cycle[k].sum;
          a.cycle[k].sum_sq += b.cycle[k].sum_sq;
          a.age[k].sum += b.age[k].sum;
          a.age[k].sum_sq += b.age[k].sum_sq;
        }
      }
      auto& p = pairs[i];
      const auto& q = o.pairs[i];
      p.n += q.n;
      p.sx += q.sx;
      p.sy += q.sy;
      p.sxx += q.sxx;
      p.syy += q.syy;
      p.sxy += q.sxy;
    }
  }

  std::vector<double> s_values;
  std::array<std::array<Cell, 2>, 2> sums;
  std::array<Pair, 2> pairs;
  bool has_previous = false;
  double previous_time = 0.0;
  int previous_occupancy = 0;
  double previous_age = 0.0;
};

LstSamples summarize(const std::vector<KernelObserver::Moment2>& m, std::int64_t count) {
  LstSamples out;
  const double n = static_cast<double>(count);
  for (const auto& x : m) {
    if (count < 2) {
      out.mean.push_back(count == 1 ? x.sum : std::numeric_limits<double>::quiet_NaN());
      out.standard_error.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const double mean = x.sum / n;
    const double var = std::max(0.0, (x.sum_sq - n * mean * mean) / (n - 1.0));
    out.mean.push_back(mean);
    out.standard_error.push_back(std::sqrt(var / n));
  }
  return out;
}

}  // namespace

std::string_view to_string(Policy p) noexcept {
  switch (p) {
    case Policy::kThreshold: return "threshold";
    case Policy::kThresholdVariant: return "threshold-variant";
    case Policy::kBlocking1: return "blocking1";
    case Policy::kBlocking2: return "blocking2";
  }
  return "unknown";
}

Policy parse_policy(std::string_view text) {
  for (Policy p : {Policy::kThreshold, Policy::kThresholdVariant, Policy::kBlocking1,
                   Policy::kBlocking2}) {
    if (text == to_string(p)) return p;
  }
  throw InvalidArgument("unknown policy '" + std::string(text) + "'");
}

void SimConfig::validate() const {
  if (horizon_events < 10'000) throw InvalidArgument("horizon_events must be at least 1e4");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 0.5)) {
    throw InvalidArgument("warmup_fraction must lie in [0, 0.5)");
  }
  if (replications < 1) throw InvalidArgument("replications must be at least 1");
  if (threads < 1) throw InvalidArgument("threads must be at least 1");
  if (!std::is_sorted(ccdf_grid.begin(), ccdf_grid.end())) {
    throw InvalidArgument("ccdf grid must be ascending");
  }
  for (double nu : ccdf_grid) {
    if (!std::isfinite(nu)) throw InvalidArgument("ccdf grid values must be finite");
  }
}

SimResult simulate(const SimConfig& cfg) {
  cfg.validate();
  const auto reps = static_cast<std::size_t>(cfg.replications);
  std::vector<double> means(reps);
  std::vector<double> p0s(reps);
  std::vector<double> cycles(reps);
  std::vector<std::vector<double>> tails(reps);
  std::vector<PolicyCounters> counters(reps);

  for_each_replication(cfg.replications, cfg.threads, [&](int r) {
    AverageObserver obs(cfg.ccdf_grid);
    const auto idx = static_cast<std::size_t>(r);
    counters[idx] = run_one(cfg, r, obs);
    const double span = obs.end - obs.start;
    means[idx] = obs.area / span;
    p0s[idx] = obs.departures > 0
                   ? static_cast<double>(obs.empty_departures) / static_cast<double>(obs.departures)
                   : std::numeric_limits<double>::quiet_NaN();
    cycles[idx] = obs.departures > 1 ? (obs.last_departure - obs.first_departure) /
                                           static_cast<double>(obs.departures - 1)
                                     : std::numeric_limits<double>::quiet_NaN();
    tails[idx] = obs.tail_times();
    for (double& x : tails[idx]) x /= span;
  });

  SimResult out;
  const auto m = across(means);
  out.mean_aoi = m.mean;
  out.mean_aoi_ci_halfwidth = kZ95 * m.standard_error;
  const auto p = across(p0s);
  out.p0_empirical = p.mean;
  out.p0_standard_error = p.standard_error;
  out.mean_cycle_empirical = across(cycles).mean;
  out.replication_means = means;
  std::vector<double> column(reps);
  for (std::size_t k = 0; k < cfg.ccdf_grid.size(); ++k) {
    for (std::size_t r = 0; r < reps; ++r) column[r] = tails[r][k];
    const auto c = across(column);
    out.ccdf_samples.push_back({cfg.ccdf_grid[k], c.mean, c.standard_error});
  }
  for (const auto& c : counters) merge(out.counters, c);
  return out;
}

EmpiricalKernels empirical_kernels(const SimConfig& cfg, std::span<const double> s_values) {
  cfg.validate();
  if (cfg.policy != Policy::kThreshold) {
    throw InvalidArgument("empirical_kernels requires the threshold policy");
  }
  const auto reps = static_cast<std::size_t>(cfg.replications);
  std::vector<KernelObserver> observers(reps, KernelObserver(s_values));
  for_each_replication(cfg.replications, cfg.threads, [&](int r) {
    run_one(cfg, r, observers[static_cast<std::size_t>(r)]);
  });
  KernelObserver total(s_values);
  for (const auto& o : observers) total.absorb(o);

  EmpiricalKernels out;
  out.s_values.assign(s_values.begin(), s_values.end());
  double n = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const auto& cell = total.sums[i][j];
      out.transitions[i][j] = cell.count;
      out.cells[i][j].count = cell.count;
      out.cells[i][j].cycle = summarize(cell.cycle, cell.count);
      out.cells[i][j].age = summarize(cell.age, cell.count);
      n += static_cast<double>(cell.count);
      if (cell.count < 1000) {
        out.warnings.push_back("cell (" + std::to_string(i) + "," + std::to_string(j) + ") has " +
                               std::to_string(cell.count) + " observations (< 1000)");
      }
    }
  }

  const auto& t = out.transitions;
  const double empty = static_cast<double>(t[0][0] + t[1][0]);
  out.p0 = empty / n;
  out.p0_standard_error = std::sqrt(out.p0 * (1.0 - out.p0) / n);

  const double rows[2] = {static_cast<double>(t[0][0] + t[0][1]),
                          static_cast<double>(t[1][0] + t[1][1])};
  const double cols[2] = {empty, static_cast<double>(t[0][1] + t[1][1])};
  double chi = 0.0;
  bool testable = true;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const double expected = rows[i] * cols[j] / n;
      if (expected <= 0.0) {
        testable = false;
        continue;
      }
      const double d = static_cast<double>(t[i][j]) - expected;
      chi += d * d / expected;
    }
  }
  out.chi_square = testable ? chi : 0.0;
  out.chi_square_p_value = testable ? std::erfc(std::sqrt(chi / 2.0)) : 1.0;

  for (std::size_t i = 0; i < 2; ++i) {
    const auto& p = total.pairs[i];
    if (p.n < 3.0) {
      out.age_cycle_correlation[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double cov = p.sxy / p.n - (p.sx / p.n) * (p.sy / p.n);
    const double vx = p.sxx / p.n - (p.sx / p.n) * (p.sx / p.n);
    const double vy = p.syy / p.n - (p.sy / p.n) * (p.sy / p.n);
    out.age_cycle_correlation[i] = vx > 0.0 && vy > 0.0 ? cov / std::sqrt(vx * vy) : 0.0;
  }
  return out;
}

std::vector<double> sample_age_path(const SimConfig& cfg, std::span<const double> instants) {
  cfg.validate();
  if (!std::is_sorted(instants.begin(), instants.end())) {
    throw InvalidArgument("sample instants must be ascending");
  }
  struct SampleObserver : ObserverBase {
    std::span<const double> at;
    std::vector<double> out;
    std::size_t next = 0;
    void segment(double t0, double t1, double age0) {
      while (next < at.size() && at[next] < t1) {
        out[next] = at[next] >= t0 ? age0 + (at[next] - t0) : out[next];
        ++next;
      }
    }
    bool done() const { return next >= at.size(); }
  } obs;
  obs.at = instants;
  obs.out.assign(instants.size(), std::numeric_limits<double>::quiet_NaN());
  run_one(cfg, 0, obs);
  return obs.out;
}

std::vector<PathEvent> trace_path(const SimConfig& cfg, std::size_t max_events) {
  cfg.validate();
  struct TraceObserver : ObserverBase {
    std::size_t limit = 0;
    std::vector<PathEvent> events;
    void event(PathEvent::Kind kind, double t, double before, double after) {
      if (events.size() < limit) events.push_back({kind, t, before, after});
    }
    bool done() const { return events.size() >= limit; }
  } obs;
  obs.limit = max_events;
  run_one(cfg, 0, obs);
  return obs.events;
}

}  // namespace aoi
