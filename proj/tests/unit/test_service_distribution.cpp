#include <cmath>
#include <random>

#include "aoi/error.hpp"
#include "aoi/service_distribution.hpp"
#include "doctest.h"
#include "generators.hpp"
#include "quadrature.hpp"

using namespace aoi;
using aoi::testing::integrate_piecewise;

namespace {

const auto kExp1 = ServiceDistribution::exponential(1.0);
const auto kDet1 = ServiceDistribution::deterministic(1.0);
const auto kMix = ServiceDistribution::mixture_det_exp(0.5, 1.0, 1.0);

std::vector<double> atom_locations(const ServiceDistribution& d) {
  std::vector<double> out;
  for (const auto& a : d.atoms()) out.push_back(a.location);
  return out;
}

// Oracle for the exponential pieces: the density of the absolutely continuous part.
double ac_density(const ServiceDistribution& d, double x) {
  double f = 0.0;
  for (const auto& e : d.exp_components()) f += e.weight * e.rate * std::exp(-e.rate * x);
  return f;
}

}  // namespace

TEST_CASE("laplace transform examples") {
  CHECK(kExp1.laplace(1.0).real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(kMix.laplace(0.0) - 1.0) < 1e-15);
  // 0.5 e^{-1} + 0.5 * 1/(1+1)
  CHECK(kMix.laplace(1.0).real() == doctest::Approx(0.43393972058572117).epsilon(1e-14));
  CHECK(kDet1.laplace(Complex(0.0, M_PI)).real() == doctest::Approx(-1.0));
}

TEST_CASE("moments and survivor") {
  CHECK(kMix.mean() == doctest::Approx(1.0));
  CHECK(kMix.second_moment() == doctest::Approx(0.5 * 1.0 + 0.5 * 2.0));
  CHECK(kDet1.survivor(1.0) == 0.0);  // right-continuous G
  CHECK(kDet1.survivor(0.999) == 1.0);
  CHECK(kMix.cdf(1.0) == doctest::Approx(0.5 + 0.5 * (1.0 - std::exp(-1.0))));
}

TEST_CASE("partial exponential integral examples") {
  SUBCASE("theta = 0 gives the empty integral") {
    const auto split = partial_exp_integral(kMix, 0.7, Threshold(0.0));
    CHECK(split.below == 0.0);
    CHECK(split.tail == 1.0);
  }
  SUBCASE("theta = inf gives G-hat(lambda)") {
    const auto split = partial_exp_integral(kExp1, 1.0, Threshold::infinite());
    CHECK(split.below == doctest::Approx(0.5));
    CHECK(split.tail == 0.0);
  }
  SUBCASE("atom above theta contributes only to the tail") {
    const auto split = partial_exp_integral(kDet1, 1.0, Threshold(0.5));
    CHECK(split.below == 0.0);
    CHECK(split.tail == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  }
  SUBCASE("atom exactly at theta is counted below") {
    const auto split = partial_exp_integral(kDet1, 1.0, Threshold(1.0));
    CHECK(split.below == doctest::Approx(std::exp(-1.0)));
    CHECK(split.tail == 0.0);
  }
}

TEST_CASE("tail weighted integrals examples") {
  SUBCASE("exponential at theta = 0: both equal 1 - G-hat(lambda)") {
    const auto t = tail_weighted_integrals(kExp1, 1.0, Threshold(0.0));
    REQUIRE(t);
    CHECK(t->queued == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(t->backward == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("no mass above theta is degenerate") {
    CHECK_FALSE(tail_weighted_integrals(kDet1, 1.0, Threshold(2.0)));
    CHECK_FALSE(tail_weighted_integrals(kDet1, 1.0, Threshold(1.0)));
    CHECK_FALSE(tail_weighted_integrals(kExp1, 1.0, Threshold::infinite()));
  }
  SUBCASE("mixture at theta = 0") {
    const auto t = tail_weighted_integrals(kMix, 1.0, Threshold(0.0));
    REQUIRE(t);
    CHECK(t->queued == doctest::Approx(1.0 - 0.43393972058572117).epsilon(1e-14));
    CHECK(t->backward == doctest::Approx(t->queued).epsilon(1e-15));
  }
}

TEST_CASE("property: transform normalization and complete monotonicity") {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = aoi::testing::random_distribution(rng);
    CHECK(std::abs(d.laplace(0.0) - 1.0) < 1e-12);
    double previous = 1.0;
    for (double s = 0.05; s <= 20.0; s *= 1.3) {
      const double g = d.laplace(s).real();
      CHECK(g > 0.0);
      CHECK(g <= previous + 1e-15);
      previous = g;
    }
  }
}

TEST_CASE("property: exponential split sums and tail identity") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = aoi::testing::random_model(rng);
    const auto inf = partial_exp_integral(m.service, m.lambda, Threshold::infinite());
    CHECK(inf.below + inf.tail == doctest::Approx(m.service.laplace(m.lambda).real()));

    // below + tail = E exp(-lambda (theta ^ sigma)), checked by quadrature of the survivor:
    // E exp(-lambda (theta ^ sigma)) = 1 - lambda * int_0^theta exp(-lambda y) (1 - G(y)) dy.
    const auto split = partial_exp_integral(m.service, m.lambda, m.theta);
    const double upper = m.theta.is_infinite() ? 80.0 / m.lambda : m.theta.value();
    const double q = m.lambda * integrate_piecewise(
                                    [&](double y) {
                                      return std::exp(-m.lambda * y) * m.service.survivor(y);
                                    },
                                    0.0, upper, atom_locations(m.service))
                                    .real();
    CHECK(split.below + split.tail == doctest::Approx(1.0 - q).epsilon(1e-10));

    if (!m.theta.is_infinite()) {
      const auto t = tail_weighted_integrals(m.service, m.lambda, m.theta);
      if (t) {
        CHECK(std::abs(t->backward - std::exp(m.lambda * m.theta.value()) * t->queued) <=
              1e-12 * std::max(1.0, t->backward));
        CHECK(t->queued >= 0.0);
      }
    }
  }
}

TEST_CASE("segment integrals agree with quadrature at complex arguments") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 40; ++trial) {
    const auto d = aoi::testing::random_distribution(rng);
    const double lambda = 0.5 + trial * 0.05;
    const double theta = 0.2 + 0.07 * trial;
    const auto breaks = atom_locations(d);
    for (Complex s : {Complex(0.0, 0.0), Complex(0.7, 0.0), Complex(1.5, 4.0)}) {
      const Complex a = lambda + s;
      const Complex trunc = integrate_piecewise(
          [&](double y) { return std::exp(-a * y) * d.survivor(y); }, 0.0, theta, breaks);
      CHECK(std::abs(truncated_survivor_transform(d, a, Threshold(theta)) - trunc) < 1e-11);

      std::vector<double> shifted_breaks;
      for (double b : breaks) shifted_breaks.push_back(b - theta);
      const Complex shifted = integrate_piecewise(
          [&](double v) { return std::exp(-a * v) * d.survivor(v + theta); }, 0.0, 60.0,
          shifted_breaks, 2000);
      CHECK(std::abs(shifted_survivor_transform(d, a, theta) - shifted) < 1e-10);

      // Atoms above theta plus the exponential density over (theta, inf).
      Complex tail = 0.0;
      for (const auto& atom : d.atoms()) {
        if (atom.location > theta) {
          tail += atom.weight * std::exp(-s * atom.location) *
                  (1.0 - std::exp(-lambda * (atom.location - theta)));
        }
      }
      tail += aoi::testing::integrate(
          [&](double x) {
            return std::exp(-s * x) * (1.0 - std::exp(-lambda * (x - theta))) * ac_density(d, x);
          },
          theta, theta + 60.0, 2000);
      CHECK(std::abs(tail_weighted_transform(d, lambda, theta, s) - tail) < 1e-9);
    }
  }
}

TEST_CASE("truncated survivor transform: theta = 0 and theta = inf") {
  CHECK(std::abs(truncated_survivor_transform(kMix, 1.3, Threshold(0.0))) == 0.0);
  // int_0^inf exp(-a y) (1 - G(y)) dy = (1 - G-hat(a)) / a
  const Complex a(1.3, 0.4);
  CHECK(std::abs(truncated_survivor_transform(kMix, a, Threshold::infinite()) -
                 (1.0 - kMix.laplace(a)) / a) < 1e-14);
}

TEST_CASE("literal parsing") {
  CHECK(ServiceDistribution::parse("exp:1") == kExp1);
  CHECK(ServiceDistribution::parse("det:1") == kDet1);
  CHECK(ServiceDistribution::parse("mix:0.5,det=1,exp=1") == kMix);
  CHECK(ServiceDistribution::parse("mix:1,det=2,exp=3") == ServiceDistribution::deterministic(2));

  for (const char* bad : {"", "exp", "exp:", "exp:-1", "exp:abc", "det:0", "gamma:2",
                          "mix:0.5,det=1", "mix:0.5,exp=1,det=1", "mix:1.5,det=1,exp=1",
                          "exp:1 "}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(ServiceDistribution::parse(bad), InvalidArgument);
  }
}

TEST_CASE("property: literal round trip") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const ServiceDistribution d = trial % 3 == 0   ? ServiceDistribution::exponential(u(rng))
                                  : trial % 3 == 1 ? ServiceDistribution::deterministic(u(rng))
                                                   : ServiceDistribution::mixture_det_exp(
                                                         w(rng), u(rng), u(rng));
    CHECK(ServiceDistribution::parse(d.to_literal()) == d);
  }
}

TEST_CASE("invalid distributions are rejected") {
  CHECK_THROWS_AS(ServiceDistribution({{1.0, 0.5}}, {}), InvalidArgument);
  CHECK_THROWS_AS(ServiceDistribution({{0.0, 1.0}}, {}), InvalidArgument);
  CHECK_THROWS_AS(ServiceDistribution({}, {{-1.0, 1.0}}), InvalidArgument);
  CHECK_THROWS_AS(ServiceDistribution({}, {}), InvalidArgument);
  CHECK_NOTHROW(ServiceDistribution({{1.0, 0.3}}, {{2.0, 0.7 + 5e-13}}));
  CHECK_THROWS_AS(ServiceDistribution({{1.0, 0.3}, {2.0, 0.7}}, {}).to_literal(), InvalidArgument);
}

TEST_CASE("threshold and model validation") {
  CHECK(Threshold::parse("inf").is_infinite());
  CHECK(Threshold::parse("0.25").value() == 0.25);
  CHECK(Threshold(std::numeric_limits<double>::infinity()).is_infinite());
  CHECK(Threshold::infinite().to_string() == "inf");
  CHECK(Threshold(0.5).to_string() == "0.5");
  CHECK_THROWS_AS(Threshold(-0.1), InvalidArgument);
  CHECK_THROWS_AS(Threshold(std::nan("")), InvalidArgument);
  CHECK_THROWS_AS(Threshold::parse("x"), InvalidArgument);
  CHECK_THROWS_AS(ModelParams(0.0, Threshold(0.0), kExp1), InvalidArgument);
  CHECK(ModelParams(0.5, Threshold(1.0), kMix).rho() == doctest::Approx(0.5));
}
