#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "varw/model.hpp"

namespace varw::testing {

inline ModelParams make_params(std::vector<std::vector<double>> rows, Vector lambda, Vector sigma,
                               Vector nu) {
  ModelParams p;
  p.kernel = Kernel::from_rows(rows);
  p.sleep_rates = std::move(lambda);
  p.init_sleepers = std::move(sigma);
  p.init_actives = std::move(nu);
  return p;
}

/// Two villages, P = [[0, 0.5], [0.4, 0]], lambda = (1, 1), sigma = (0.2, 0.3), nu = (0.5, 0.3).
inline ModelParams two_village() {
  return make_params({{0.0, 0.5}, {0.4, 0.0}}, {1.0, 1.0}, {0.2, 0.3}, {0.5, 0.3});
}

/// One village, P = (0.5).
inline ModelParams one_village(double lambda, double sigma, double nu) {
  return make_params({{0.5}}, {lambda}, {sigma}, {nu});
}

/// Random valid instance with 1..max_villages villages. The kernel always
/// contains a cycle through every village (irreducible) and every row sum is
/// drawn from [0.3, 0.95] (strictly sub-stochastic).
inline ModelParams random_instance(std::mt19937_64& rng, std::size_t max_villages = 4,
                                   bool subcritical = true, double max_nu = 1.5) {
  std::uniform_int_distribution<std::size_t> size_dist(1, max_villages);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t v = size_dist(rng);
  std::vector<std::vector<double>> rows(v, std::vector<double>(v, 0.0));
  for (std::size_t x = 0; x < v; ++x) {
    for (std::size_t y = 0; y < v; ++y) {
      if (unit(rng) < 0.5) rows[x][y] = unit(rng);
    }
    if (v > 1) rows[x][(x + 1) % v] += 0.2 + unit(rng);
    else rows[x][x] += 0.2 + unit(rng);
    double sum = 0.0;
    for (double p : rows[x]) sum += p;
    const double target = 0.3 + 0.65 * unit(rng);
    for (double& p : rows[x]) p *= target / sum;
  }
  Vector lambda(v), sigma(v), nu(v);
  for (std::size_t x = 0; x < v; ++x) {
    lambda[x] = 0.1 + 2.9 * unit(rng);
    const double cap = subcritical ? critical_density(lambda[x]) : 1.0;
    sigma[x] = cap * unit(rng);
    nu[x] = max_nu * unit(rng);
  }
  return make_params(rows, lambda, sigma, nu);
}

inline Vector random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  Vector v(n);
  for (double& e : v) e = d(rng);
  return v;
}

}  // namespace varw::testing
