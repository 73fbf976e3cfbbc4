#pragma once

// Hand-rolled generators for property tests over service laws and models.

#include <random>
#include <vector>

#include "aoi/service_distribution.hpp"

namespace aoi::testing {

/// Random mixture of 0-2 atoms and 0-2 exponential pieces (at least one piece).
inline ServiceDistribution random_distribution(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(0, 2);
  std::uniform_real_distribution<double> loc(0.1, 3.0);
  std::uniform_real_distribution<double> rate(0.3, 4.0);
  std::uniform_real_distribution<double> mass(0.1, 1.0);
  int na = count(rng);
  int ne = count(rng);
  if (na + ne == 0) ne = 1;
  std::vector<double> w;
  for (int i = 0; i < na + ne; ++i) w.push_back(mass(rng));
  double total = 0.0;
  for (double x : w) total += x;
  std::vector<Atom> atoms;
  std::vector<ExpComponent> exps;
  double used = 0.0;
  for (int i = 0; i < na + ne; ++i) {
    const bool last = i + 1 == na + ne;
    const double weight = last ? 1.0 - used : w[static_cast<std::size_t>(i)] / total;
    used += weight;
    if (i < na) {
      atoms.push_back({loc(rng), weight});
    } else {
      exps.push_back({rate(rng), weight});
    }
  }
  return ServiceDistribution(atoms, exps);
}

inline Threshold random_threshold(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng);
  if (x < 0.15) return Threshold(0.0);
  if (x < 0.3) return Threshold::infinite();
  return Threshold(3.0 * u(rng));
}

inline ModelParams random_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lam(0.2, 3.0);
  const double lambda = lam(rng);
  return ModelParams(lambda, random_threshold(rng), random_distribution(rng));
}

}  // namespace aoi::testing

namespace aoi::testing {

/// Draw from a service law by picking a component by weight.
inline double sample_service(const ServiceDistribution& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = u(rng);
  for (const auto& a : d.atoms()) {
    if (x < a.weight) return a.location;
    x -= a.weight;
  }
  const auto& exps = d.exp_components();
  for (std::size_t i = 0; i < exps.size(); ++i) {
    if (x < exps[i].weight || i + 1 == exps.size()) {
      return std::exponential_distribution<double>(exps[i].rate)(rng);
    }
    x -= exps[i].weight;
  }
  return d.atoms().back().location;
}

}  // namespace aoi::testing
