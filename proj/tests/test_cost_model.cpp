#include <cmath>
#include <random>

#include "doctest.h"
#include "macc/cost_model.hpp"
#include "macc/delivery.hpp"
#include "macc/errors.hpp"
#include "support/cost_oracle.hpp"
#include "support/instances.hpp"

using namespace macc;

namespace {

SystemConfig small(int k, int level, Rational m_over_n, std::vector<Rational> mu, Rational rho) {
  SystemConfig c;
  c.k = k;
  c.level = level;
  c.n_files = k;
  c.m = m_over_n * k;
  c.mu = std::move(mu);
  c.rho = rho;
  return c;
}

}  // namespace

TEST_CASE("level cost terms") {
  const SystemConfig c = small(8, 3, Rational(1, 4), {1, 1, 1}, 1);
  const LevelCost lc = level_cost(3, Rational(1, 4), c);
  CHECK(lc.r_b == Rational(2, 3));
  CHECK(lc.r_c1 == 6);
  CHECK(lc.r_c2 == Rational(8, 3));
  CHECK(lc.total == Rational(28, 3));
  CHECK(lc.total == lc.r_b + lc.r_c1 + lc.r_c2);

  // l g = 1 removes both broadcast-driven terms
  const SystemConfig d = small(12, 4, Rational(1, 4), {2, 3, 5, 7}, 9);
  for (int l : {1, 2, 3, 4}) {
    const LevelCost full = level_cost(l, Rational(1, l), d);
    CHECK(full.r_b == 0);
    CHECK(full.r_c2 == 0);
    Rational sum = 0;
    for (int i = 0; i < l; ++i) sum += d.mu[static_cast<std::size_t>(i)];
    CHECK(full.total == Rational(12, l) * sum);
  }

  const SystemConfig z = small(10, 2, Rational(1, 5), {0, 0}, 1);
  for (int t = 1; t <= 5; ++t) {
    const Rational g(t, 10);
    CHECK(level_cost(2, g, z).total == 10 * (1 - 2 * g) / (10 * g + 1));
  }
}

TEST_CASE("level cost bounds") {
  const SystemConfig c = small(10, 3, Rational(1, 5), {1, 2, 3}, 4);
  CHECK_THROWS_AS(level_cost(3, Rational(1, 20), c), InvalidArgument);
  CHECK_THROWS_AS(level_cost(3, Rational(4, 10), c), InvalidArgument);  // floor(10/3)/10 = 3/10
  CHECK_NOTHROW(level_cost(3, Rational(3, 10), c));
  CHECK_THROWS_AS(level_cost(4, Rational(1, 10), c), InvalidArgument);
  CHECK(gamma_upper(3, c) == Rational(3, 10));
  CHECK(gamma_lower(c) == Rational(1, 10));
}

TEST_CASE("closed form equals the simulated cost on the grid") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> num(1, 30), den(1, 5);
  for (int k = 2; k <= 12; ++k)
    for (int level = 1; level <= std::min(k, 4); ++level) {
      std::vector<Rational> mu;
      for (int l = 0; l < level; ++l) mu.emplace_back(num(rng), den(rng));
      const Rational rho(num(rng), den(rng));
      for (int t = 1; t * level <= k; ++t) {
        const Rational g(t, k);
        SystemConfig c = small(k, level, g, mu, rho);
        const LevelParams p = LevelParams::from_ratio(k, level, g);
        if (p.f() > 20000) continue;
        const Rational closed = level_cost(level, g, c).total;
        CHECK(closed == simulate(p, c, worst_case_demand(k, k)).total_cost);
        CHECK(closed == testing::counted_level_cost(k, t, level, mu, rho));
      }
    }
}

TEST_CASE("final form of the decode term") {
  for (int k = 2; k <= 40; ++k)
    for (int level = 1; level <= k; ++level)
      for (int t = 1; t * level <= k; ++t) {
        const Rational g(t, k);
        const int kp = k - t * (level - 1);
        CHECK(Rational(k * k) * g * (1 - level * g) / (k * g + 1) == Rational(t * (kp - t), t + 1));
      }
}

TEST_CASE("baseline cost") {
  CHECK(baseline_cost(testing::sweep_config(20)) == 1050);
  const Rational g(1, 20);
  const Rational l2 = Rational(100) * (1 - 2 * g) / (100 * g + 1) * 65 + 100 * g * 3 + Rational(10000) * g * (1 - 2 * g) / (100 * g + 1) * 3;
  CHECK(baseline_cost(testing::sweep_config(2)) == l2);
  CHECK(baseline_cost(testing::sweep_config(2)) == 1215);
  CHECK(baseline_cost(testing::sweep_config(8)) == 1280);

  SystemConfig z = testing::sweep_config(4);
  z.mu.assign(4, Rational(0));
  z.rho = 1;
  CHECK(baseline_cost(z) == Rational(100 - 4 * 5, 5 + 1));

  SystemConfig off = testing::sweep_config(4);
  off.m = Rational(1, 2);  // M/N below 1/K
  CHECK_THROWS_AS(baseline_cost(off), InvalidArgument);
}

TEST_CASE("superposition objective") {
  const SystemConfig c = small(8, 3, Rational(3, 16), {1, 1, 1}, 1);
  SuperpositionDesign d;
  d.supports = {{1, Rational(1, 2), Rational(1, 8)}, {3, Rational(1, 2), Rational(2, 8)}};
  const Rational obj = superposition_objective(d, c);
  CHECK(obj == simulate_superposition(d, c, worst_case_demand(8, 8)).total_cost);
  CHECK(obj == Rational(1, 2) * level_cost(1, Rational(1, 8), c).total + Rational(1, 2) * level_cost(3, Rational(1, 4), c).total);

  SystemConfig plain = c;
  plain.m = 2;
  SuperpositionDesign single;
  single.supports = {{3, Rational(1), Rational(1, 4)}};
  CHECK(superposition_objective(single, plain) == baseline_cost(plain));

  SystemConfig z = c;
  z.mu.assign(3, Rational(0));
  CHECK(superposition_objective(d, z) == Rational(1, 2) * Rational(8 * 7, 8) / 2 + Rational(1, 2) * Rational(8, 4) / 3);

  SuperpositionDesign bad = d;
  bad.supports[1].alpha = Rational(1, 3);
  CHECK_THROWS_AS(superposition_objective(bad, c), InvalidArgument);
  bad = d;
  bad.supports[1].gamma = Rational(3, 8);
  CHECK_THROWS_AS(superposition_objective(bad, c), InvalidArgument);
}

TEST_CASE("weights from ratios") {
  auto w = alpha_from_gammas(0.02, 0.08, 0.05);
  CHECK(w.alpha_i == doctest::Approx(0.5));
  CHECK(w.alpha_j == doctest::Approx(0.5));
  CHECK(w.feasible);
  w = alpha_from_gammas(0.05, 0.08, 0.05);
  CHECK(w.alpha_i == 1);
  CHECK(w.alpha_j == 0);
  CHECK(w.feasible);
  w = alpha_from_gammas(0.06, 0.08, 0.05);
  CHECK_FALSE(w.feasible);
  CHECK(w.alpha_i > 1);
  CHECK_THROWS_AS(alpha_from_gammas(0.05, 0.05, 0.05), Singularity);

  const auto e = alpha_from_gammas(Rational(1, 8), Rational(3, 8), Rational(1, 4));
  CHECK(e.alpha_i == Rational(1, 2));
  CHECK(e.alpha_j == Rational(1, 2));
  CHECK(e.feasible);
}

TEST_CASE("reduced objective equals the two-level objective") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0, 1);
  int checked = 0;
  for (const SystemConfig& c : testing::random_instances(77, 200)) {
    const double m = to_double(c.memory_ratio());
    const int i = std::uniform_int_distribution<int>(1, c.level)(rng);
    int j = std::uniform_int_distribution<int>(1, c.level - 1)(rng);
    if (j >= i) ++j;
    for (int rep = 0; rep < 5; ++rep) {
      const double lo = 1.0 / c.k;
      const double ui = static_cast<double>(c.k / i) / c.k, uj = static_cast<double>(c.k / j) / c.k;
      const bool i_low = unit(rng) < 0.5;
      double gi, gj;
      if (i_low) {
        if (m > uj) continue;
        gi = lo + (std::min(m, ui) - lo) * unit(rng);
        gj = m + (uj - m) * unit(rng);
      } else {
        if (m > ui) continue;
        gj = lo + (std::min(m, uj) - lo) * unit(rng);
        gi = m + (ui - m) * unit(rng);
      }
      if (gi == gj) continue;
      // exact two-level objective at the same (rational) point
      const Rational ri(static_cast<long long>(std::llround(gi * 1e9)), 1000000000LL);
      const Rational rj(static_cast<long long>(std::llround(gj * 1e9)), 1000000000LL);
      const double di = to_double(ri), dj = to_double(rj);
      const auto w = alpha_from_gammas(ri, rj, c.memory_ratio());
      if (!w.feasible || ri < gamma_lower(c) || rj < gamma_lower(c) || ri > gamma_upper(i, c) || rj > gamma_upper(j, c)) continue;
      const Rational exact = w.alpha_i * level_cost(i, ri, c).total + w.alpha_j * level_cost(j, rj, c).total;
      const double reduced = reduced_objective(i, j, di, dj, c);
      CHECK(std::abs(reduced - to_double(exact)) <= 1e-10 * std::abs(to_double(exact)));
      ++checked;
    }
  }
  CHECK(checked >= 500);

  const SystemConfig c = testing::sweep_config(10);
  CHECK_THROWS_AS(reduced_objective(1, 10, 0.05, 0.05, c), Singularity);
  CHECK_THROWS_AS(reduced_objective(1, 10, 0.06, 0.08, c), InvalidArgument);
  CHECK(reduced_objective(1, 10, 0.03, 0.05, c) == doctest::Approx(to_double(level_cost(10, Rational(1, 20), c).total)).epsilon(1e-12));
}

TEST_CASE("gradient matches finite differences") {
  const CostModel model(testing::sweep_config(14));
  for (auto [i, j, gi, gj] : {std::tuple{1, 14, 0.046, 0.065}, std::tuple{3, 7, 0.02, 0.11}, std::tuple{9, 2, 0.09, 0.03}}) {
    double di = 0, dj = 0;
    model.pair_gradient(i, j, gi, gj, di, dj);
    const double h = 1e-7;
    const double ni = (model.pair(i, j, gi + h, gj) - model.pair(i, j, gi - h, gj)) / (2 * h);
    const double nj = (model.pair(i, j, gi, gj + h) - model.pair(i, j, gi, gj - h)) / (2 * h);
    CHECK(di == doctest::Approx(ni).epsilon(1e-5));
    CHECK(dj == doctest::Approx(nj).epsilon(1e-5));
    const double s = (model.level(i, gi + h) - model.level(i, gi - h)) / (2 * h);
    CHECK(model.level_slope(i, gi) == doctest::Approx(s).epsilon(1e-5));
  }
}

TEST_CASE("broadcast-only cost falls as the cache grows") {
  for (int k : {10, 24, 60})
    for (int level = 1; level <= 5; ++level) {
      const SystemConfig z = small(k, level, Rational(1, k), std::vector<Rational>(static_cast<std::size_t>(level), Rational(0)), 1);
      Rational previous = -1;
      for (int t = k / level; t >= 1; --t) {
        const Rational v = level_cost(level, Rational(t, k), z).total;
        if (previous >= 0) CHECK(v > previous);
        previous = v;
      }
    }
}

TEST_CASE("double evaluator agrees with exact costs") {
  const SystemConfig c = testing::sweep_config(12);
  const CostModel model(c);
  for (int l = 1; l <= 12; ++l)
    for (int t = 1; t <= 100 / l; t += 3) CHECK(model.level(l, t / 100.0) == doctest::Approx(to_double(level_cost(l, Rational(t, 100), c).total)).epsilon(1e-13));
  const auto co = reduced_coefficients(3, c);
  CHECK(co.a == doctest::Approx(10000.0 * 6 - 10000.0 * 3 * 4));
  CHECK(co.b == doctest::Approx(100.0 * 6 - 100.0 * 3 * 65 + 10000.0 * 4));
}
