#pragma once

// Instance families shared by the unit and acceptance tests.

#include <random>
#include <vector>

#include "macc/system.hpp"

namespace macc::testing {

/// K = 100, N = 100, M = 5, mu_l = l, rho = 65.
inline SystemConfig sweep_config(int level) {
  SystemConfig c;
  c.k = 100;
  c.level = level;
  c.n_files = 100;
  c.m = 5;
  c.rho = 65;
  for (int l = 1; l <= level; ++l) c.mu.emplace_back(l);
  return c;
}

/// K in [4, 50], L in [2, min(10, K)], N = K, M/N on a 1/(100K) grid inside
/// [1/K, floor(K/L)/K], mu_l in {0, 0.1, ..., 10} in any order, rho in
/// [0.1, 100].
inline std::vector<SystemConfig> random_instances(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<SystemConfig> out;
  for (int n = 0; n < count; ++n) {
    const int k = std::uniform_int_distribution<int>(4, 50)(rng);
    const int level = std::uniform_int_distribution<int>(2, std::min(10, k))(rng);
    SystemConfig c;
    c.k = k;
    c.level = level;
    c.n_files = k;
    c.m = Rational(std::uniform_int_distribution<int>(100, (k / level) * 100)(rng), 100);
    for (int l = 1; l <= level; ++l) c.mu.emplace_back(std::uniform_int_distribution<int>(0, 100)(rng), 10);
    c.rho = Rational(std::uniform_int_distribution<int>(1, 1000)(rng), 10);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace macc::testing
