#pragma once

// Brute force for the LP over alpha with fixed ratios: every alpha on the
// simplex grid with step 1/steps that meets the memory budget. Two
// coordinates (p, q) are solved from the equalities, the rest walk the grid,
// so grid points with all free coordinates zero are the two-level bases.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace macc::testing {

inline double simplex_grid_minimum(const std::vector<double>& gamma, const std::vector<double>& cost, double m, int steps) {
  const int n = static_cast<int>(gamma.size());
  double best = std::numeric_limits<double>::infinity();
  for (int l = 0; l < n; ++l)
    if (std::abs(gamma[static_cast<std::size_t>(l)] - m) < 1e-15) best = std::min(best, cost[static_cast<std::size_t>(l)]);

  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      const double gp = gamma[static_cast<std::size_t>(p)], gq = gamma[static_cast<std::size_t>(q)];
      if (gp == gq) continue;
      std::vector<int> free;
      for (int l = 0; l < n; ++l)
        if (l != p && l != q) free.push_back(l);
      std::vector<int> units(free.size(), 0);
      std::function<void(std::size_t, int)> walk = [&](std::size_t at, int left) {
        if (at == free.size()) {
          double rest = 0, rest_mem = 0, rest_cost = 0;
          for (std::size_t f = 0; f < free.size(); ++f) {
            const double a = static_cast<double>(units[f]) / steps;
            rest += a;
            rest_mem += a * gamma[static_cast<std::size_t>(free[f])];
            rest_cost += a * cost[static_cast<std::size_t>(free[f])];
          }
          // a_p + a_q = 1 - rest, a_p g_p + a_q g_q = m - rest_mem
          const double s = 1 - rest, r = m - rest_mem;
          const double aq = (r - s * gp) / (gq - gp);
          const double ap = s - aq;
          if (ap < -1e-12 || aq < -1e-12) return;
          best = std::min(best, rest_cost + ap * cost[static_cast<std::size_t>(p)] + aq * cost[static_cast<std::size_t>(q)]);
          return;
        }
        for (int u = 0; u <= left; ++u) {
          units[at] = u;
          walk(at + 1, left - u);
        }
        units[at] = 0;
      };
      walk(0, steps);
    }
  return best;
}

}  // namespace macc::testing
