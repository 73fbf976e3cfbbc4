#include <cmath>
#include <random>

#include "aoi/error.hpp"
#include "aoi/inversion.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace aoi;

namespace {

const auto kExp1 = ServiceDistribution::exponential(1.0);
const auto kDet1 = ServiceDistribution::deterministic(1.0);
const auto kMix = ServiceDistribution::mixture_det_exp(0.5, 1.0, 1.0);

// Trapezoid rule for the CCDF integral on [0, upper].
double ccdf_integral(const AoiTransform& a, double upper, int points) {
  const double h = upper / points;
  double total = 0.5 * (1.0 + ccdf(a, upper));
  for (int i = 1; i < points; ++i) total += ccdf(a, i * h);
  return total * h;
}

}  // namespace

TEST_CASE("ccdf boundary values") {
  const auto a = analyze(ModelParams(1.0, Threshold(0.5), kDet1));
  CHECK(ccdf(a, 0.0) == 1.0);
  CHECK(ccdf(a, -1.0) == 1.0);
  CHECK(ccdf(a, 1e-3) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(ccdf(a, 40.0) <= 1e-3);
}

TEST_CASE("exponential always-preempt: the AoI is a sum of two exponentials") {
  for (auto [lambda, mu] : {std::pair{1.0, 1.0}, std::pair{0.5, 2.0}, std::pair{3.0, 1.0}}) {
    const auto a = analyze(ModelParams(lambda, Threshold::infinite(), ServiceDistribution::exponential(mu)));
    for (double nu : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
      const double exact = lambda == mu ? (1.0 + lambda * nu) * std::exp(-lambda * nu)
                                        : (mu * std::exp(-lambda * nu) - lambda * std::exp(-mu * nu)) /
                                              (mu - lambda);
      const auto e = ccdf_estimate(a, nu);
      CAPTURE(nu);
      CHECK(e.probability == doctest::Approx(exact).epsilon(1e-7));
      CHECK(e.accurate());
    }
  }
}

TEST_CASE("property: ccdf is monotone and integrates to the mean") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = aoi::testing::random_model(rng);
    const auto a = analyze(m);
    const double mean = mean_aoi(a);
    double previous = 1.0;
    for (double nu = 0.05 * mean; nu <= 6.0 * mean; nu += 0.05 * mean) {
      const double p = ccdf(a, nu);
      CHECK(p <= previous + 1e-6);
      previous = p;
    }
    // Tail beyond 40 means is negligible for these loads.
    const double integral = ccdf_integral(a, 40.0 * mean, 400);
    CAPTURE(m.lambda);
    CAPTURE(m.theta.to_string());
    CHECK(integral == doctest::Approx(mean).epsilon(5e-3));
  }
}

TEST_CASE("ccdf integral matches the mean on the reference models") {
  for (const auto& m : {ModelParams(1.0, Threshold(0.5), kDet1), ModelParams(0.6, Threshold(1.0), kMix),
                        ModelParams(1.0, Threshold(0.0), kExp1)}) {
    const auto a = analyze(m);
    const double mean = mean_aoi(a);
    CHECK(std::abs(ccdf_integral(a, 40.0 * mean, 2000) - mean) < 1e-3);
  }
}

TEST_CASE("find_threshold inverts the ccdf") {
  const auto a = analyze(ModelParams(0.6, Threshold(0.5), kMix));
  const double mean = mean_aoi(a);
  for (double eps : {0.5, 0.1, 1e-2, 1e-3}) {
    const double nu = find_threshold(a, eps);
    CAPTURE(eps);
    CHECK(ccdf(a, nu) <= eps);
    CHECK(ccdf(a, nu - 1e-3 * mean) > eps);
  }
  CHECK_THROWS_AS(find_threshold(a, 0.0), InvalidArgument);
  CHECK_THROWS_AS(find_threshold(a, 1.0), InvalidArgument);
}

TEST_CASE("default parameters follow the smoothness of the service law") {
  const auto smooth = analyze(ModelParams(1.0, Threshold(0.5), kExp1));
  CHECK(default_euler_params(smooth).half_terms == EulerParams{}.half_terms);
  const auto kinked = analyze(ModelParams(1.0, Threshold(0.5), kDet1));
  CHECK(default_euler_params(kinked).half_terms > EulerParams{}.half_terms);
  // The plain defaults leave visible ripples next to the kink at nu = 1.
  double worst_default = 0.0;
  double worst_tuned = 0.0;
  double prev_default = 1.0;
  double prev_tuned = 1.0;
  for (double nu = 0.9; nu <= 1.1; nu += 0.002) {
    const double d = ccdf_estimate(kinked, nu, EulerParams{}).raw;
    const double t = ccdf_estimate(kinked, nu).raw;
    worst_default = std::max(worst_default, d - prev_default);
    worst_tuned = std::max(worst_tuned, t - prev_tuned);
    prev_default = d;
    prev_tuned = t;
  }
  CHECK(worst_tuned <= 1e-6);
  CHECK(worst_default > worst_tuned);
}

TEST_CASE("ccdf of the deterministic push-out queue starts at the service time") {
  // The age right after any delivery is at least one unit of service.
  const auto a = analyze(ModelParams(1.0, Threshold(0.0), kDet1));
  CHECK(ccdf(a, 0.5) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(ccdf(a, 0.95) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(ccdf(a, 3.0) < 0.5);
}
