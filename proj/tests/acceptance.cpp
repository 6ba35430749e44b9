// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "macc/combinatorics.hpp"
#include "macc/cost_model.hpp"
#include "macc/delivery.hpp"
#include "macc/optimizer.hpp"
#include "macc/scheme.hpp"
#include "support/instances.hpp"
#include "support/simplex_grid.hpp"

using namespace macc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
  std::string failure;  // first failing check

  void require(bool ok, const std::string& what) {
    if (!ok && pass) failure = what;
    pass = pass && ok;
  }
};

// every optimizer output produced anywhere in the run
std::vector<OptimizationResult> g_outputs;
// decode locality across every simulation of the run
std::uint64_t g_runs = 0;
std::uint64_t g_local_runs = 0;

void record_locality(const CostBreakdown& b, int level, const std::vector<Fetch>* trace) {
  bool ok = true;
  for (std::size_t l = 0; l < b.decode_per_level.size(); ++l)
    if (b.decode_per_level[l] != 0 && l != 0 && static_cast<int>(l) != level - 1) ok = false;
  if (trace)
    for (const Fetch& f : *trace)
      if (f.kind == FetchKind::Decode && f.level != 1 && f.level != level) ok = false;
  ++g_runs;
  g_local_runs += ok;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// ---------------------------------------------------------------------------

Outcome golden_example() {
  Outcome o;
  const auto start = Clock::now();
  const LevelParams p(4, 2, 3);
  const SchemeArrays a = build_arrays(p);
  const std::vector<int> tee{1, 2};
  const std::uint64_t row = row_index({tee, 1}, p);
  std::vector<int> nodes, users;
  for (int k = 1; k <= p.k(); ++k) {
    if (a.node_placement.star(row, k)) nodes.push_back(k);
    if (a.user_retrieve.star(row, k)) users.push_back(k);
  }
  o.require(nodes == std::vector<int>{3, 6}, "C_{{1,2},1} = {3,6}");
  o.require(users == std::vector<int>{1, 2, 3, 4, 5, 6}, "U_{{1,2},1} = {1..6}");
  o.require(psi(tee, 1, 7, p) == 3, "psi_{{1,2},1}(7) = 3");
  o.require(a.delivery.at(row, 7) == message_id({{1, 2, 3}, 1}, p), "Q(({1,2},1),7) = ({1,2,3},1)");
  o.require(p.f() == 48 && a.rows() == 48, "F = 48");
  o.require(p.s() == 32 && validate_pda(a.delivery, p).distinct_labels == 32, "S = 32");
  o.require(check_shift_structure(a), "g-blocks are cyclic shifts of g=1");
  const double t = seconds_since(start);
  o.require(t < 1.0, "runtime < 1 s");
  o.detail = "build_arrays(4,2,3) golden cells, F=48, S=32, shift structure; " + std::to_string(t) + " s";
  return o;
}

Outcome pda_validity() {
  Outcome o;
  const auto start = Clock::now();
  int cases = 0;
  for (int level = 1; level <= 4; ++level)
    for (int t = 1; t <= 3; ++t)
      for (int kp = t; kp + t * (level - 1) <= 14; ++kp) {
        const LevelParams p(kp, t, level);
        const SchemeArrays a = build_arrays(p);
        const PdaReport r = validate_pda(a.delivery, p);
        const std::string name = "(" + std::to_string(kp) + "," + std::to_string(t) + "," + std::to_string(level) + ")";
        o.require(r.c1 && r.c2, "C1/C2 at " + name + ": " + r.witness);
        o.require(r.multiplicity, "label multiplicity t+1 at " + name);
        o.require(r.distinct_labels == static_cast<std::uint64_t>(p.k()) * binomial(kp, t + 1), "S = K*C(K',t+1) at " + name);
        o.require(r.ok(), "validate_pda at " + name);
        ++cases;
      }
  const double t = seconds_since(start);
  o.require(t < 30.0, "runtime < 30 s");
  o.detail = std::to_string(cases) + " instances (K<=14, t<=3, L<=4); " + std::to_string(t) + " s";
  return o;
}

struct SmallCase {
  LevelParams p;
  std::vector<Rational> mu;
  Rational rho;
};

std::vector<SmallCase> small_family() {
  std::mt19937_64 rng(2718);
  std::uniform_int_distribution<int> num(1, 40), den(1, 9);
  std::vector<SmallCase> out;
  for (int level = 1; level <= 4; ++level)
    for (int t = 1; t <= 3; ++t)
      for (int kp = t; kp + t * (level - 1) <= 12; ++kp) {
        const LevelParams p(kp, t, level);
        if (p.f() > 20000) continue;
        std::vector<Rational> mu;
        for (int l = 0; l < level; ++l) mu.emplace_back(num(rng), den(rng));
        out.push_back({p, mu, Rational(num(rng), den(rng))});
      }
  return out;
}

SystemConfig config_of(const LevelParams& p, std::vector<Rational> mu, Rational rho) {
  SystemConfig c;
  c.k = p.k();
  c.level = p.level();
  c.n_files = p.k();
  c.m = p.gamma() * c.n_files;
  c.mu = std::move(mu);
  c.rho = std::move(rho);
  return c;
}

// R = K(1 - L g)/(K g + 1) rho + K g sum(mu) + K^2 g (1 - L g)/(K g + 1) (mu_1 + mu_L)
Rational gamma_form(const SystemConfig& c) {
  const Rational g = c.memory_ratio();
  const Rational k(c.k);
  Rational sum = 0;
  for (const Rational& m : c.mu) sum += m;
  const Rational shared = (1 - c.level * g) / (k * g + 1);
  return k * shared * c.rho + k * g * sum + k * k * g * shared * (c.mu.front() + c.mu.back());
}

Outcome simulation_formula(const std::vector<SmallCase>& family) {
  Outcome o;
  int n = 0;
  for (const SmallCase& s : family) {
    const SystemConfig c = config_of(s.p, s.mu, s.rho);
    std::vector<Fetch> trace;
    SimulationOptions opt;
    opt.trace = &trace;
    const SchemeArrays a = build_arrays(s.p);
    const CostBreakdown b = simulate(a, c, worst_case_demand(c.k, c.n_files), opt);
    record_locality(b, c.level, &trace);
    o.require(b.total_cost == gamma_form(c), "exact equality at (" + std::to_string(s.p.k_prime()) + "," + std::to_string(s.p.t()) + "," +
                                                 std::to_string(s.p.level()) + "): " + to_string(b.total_cost) + " vs " + to_string(gamma_form(c)));
    ++n;
  }
  o.require(n >= 20, "at least 20 configurations");
  o.detail = std::to_string(n) + " configurations, random rational mu > 0 and rho > 0, tolerance 0";
  return o;
}

Outcome classical_reduction(const std::vector<SmallCase>& family) {
  Outcome o;
  int n = 0;
  for (const SmallCase& s : family) {
    const SystemConfig c = config_of(s.p, std::vector<Rational>(s.mu.size(), Rational(0)), 1);
    std::vector<Fetch> trace;
    SimulationOptions opt;
    opt.trace = &trace;
    const CostBreakdown b = simulate(build_arrays(s.p), c, worst_case_demand(c.k, c.n_files), opt);
    record_locality(b, c.level, &trace);
    const Rational classical(s.p.k() - s.p.t() * s.p.level(), s.p.t() + 1);
    o.require(b.total_cost == classical, "(K-tL)/(t+1) at (" + std::to_string(s.p.k_prime()) + "," + std::to_string(s.p.t()) + "," + std::to_string(s.p.level()) + ")");
    ++n;
  }
  o.detail = std::to_string(n) + " configurations with mu = 0, rho = 1";
  return o;
}

struct SweepCase {
  int level = 0;
  OptimizationResult greedy;
  OptimizationResult oracle;
  double baseline = 0;
};

Outcome optimizer_vs_oracle(std::vector<SweepCase>& k100_sweep) {
  Outcome o;
  double worst = 0, slowest = 0;
  int instances = 0;
  auto check = [&](const SystemConfig& c, const std::string& name, OptimizationResult* g_out, OptimizationResult* o_out) {
    const auto start = Clock::now();
    const OptimizationResult g = greedy_search(c);
    const OptimizationResult b = brute_force_oracle(c);
    const double t = seconds_since(start);
    g_outputs.push_back(g);
    g_outputs.push_back(b);
    const double gap = rel(g.objective, b.objective);
    worst = std::max(worst, gap);
    slowest = std::max(slowest, t);
    o.require(std::abs(g.objective - b.objective) <= 1e-6 * std::abs(b.objective), name + ": greedy " + std::to_string(g.objective) + " vs oracle " + std::to_string(b.objective));
    o.require(t <= 5.0, name + ": runtime " + std::to_string(t) + " s");
    if (g_out) *g_out = g;
    if (o_out) *o_out = b;
    ++instances;
  };
  for (int level = 2; level <= 20; ++level) {
    SweepCase row;
    row.level = level;
    const SystemConfig c = testing::sweep_config(level);
    row.baseline = to_double(baseline_cost(c));
    check(c, "sweep L=" + std::to_string(level), &row.greedy, &row.oracle);
    k100_sweep.push_back(row);
  }
  int n = 0;
  for (const SystemConfig& c : testing::random_instances(1, 50)) check(c, "random instance " + std::to_string(n++), nullptr, nullptr);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d instances (K=100 sweep family L=2..20 and 50 random), worst relative gap %.3g, slowest %.3f s", instances, worst, slowest);
  o.detail = buf;
  return o;
}

Outcome sweep_shape(const std::vector<SweepCase>& k100_sweep) {
  Outcome o;
  int argmax = 0;
  double peak = -1;
  for (const SweepCase& r : k100_sweep) {
    o.require(r.greedy.objective <= r.baseline + 1e-9 * r.baseline, "superposition <= baseline at L=" + std::to_string(r.level));
    if (r.baseline > peak) peak = r.baseline, argmax = r.level;
  }
  o.require(argmax >= 7 && argmax <= 9, "baseline argmax in {7,8,9}, got " + std::to_string(argmax));
  const SweepCase& last = k100_sweep.back();
  o.require(last.level == 20 && last.baseline == 1050, "baseline 1050 at L=20");
  const double gap20 = std::abs(last.baseline - last.greedy.objective) / last.baseline;
  o.require(gap20 <= 1e-3, "relative gap at L=20 <= 1e-3");
  auto variation = [&](bool superposition) {
    double lo = 1e300, hi = -1e300;
    for (const SweepCase& r : k100_sweep) {
      if (r.level > 13) continue;
      const double v = superposition ? r.greedy.objective : r.baseline;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return (hi - lo) / lo;
  };
  const double vs = variation(true), vb = variation(false);
  o.require(vs < vb, "superposition flatter than baseline on L=2..13");
  char buf[200];
  std::snprintf(buf, sizeof buf, "dominance on L=2..20, baseline argmax L=%d, gap at L=20 %.3g, variation on L=2..13 %.3g vs baseline %.3g", argmax, gap20, vs, vb);
  o.detail = buf;
  return o;
}

Outcome sparsity() {
  Outcome o;
  for (const OptimizationResult& r : g_outputs) {
    int nonzero = (r.alpha_i != 0) + (r.j_star != 0 && r.alpha_j != 0);
    o.require(r.support_size() <= 2 && nonzero <= 2 && nonzero >= 1, "optimizer support <= 2");
  }
  std::mt19937_64 rng(6);
  int lp_cases = 0;
  for (int level = 2; level <= 6; ++level) {
    const int k = 4 * level;
    const int steps = level <= 5 ? 200 : 50;
    for (int n = 0; n < (level <= 4 ? 10 : 3); ++n) {
      SystemConfig c;
      c.k = k;
      c.level = level;
      c.n_files = k;
      c.m = Rational(std::uniform_int_distribution<int>(1, k / level)(rng));
      for (int l = 0; l < level; ++l) c.mu.emplace_back(std::uniform_int_distribution<int>(0, 50)(rng), 10);
      c.rho = Rational(std::uniform_int_distribution<int>(1, 500)(rng), 10);
      std::vector<Rational> gammas;
      std::vector<double> gd, cd;
      for (int l = 1; l <= level; ++l) gammas.emplace_back(std::uniform_int_distribution<int>(1, k / l)(rng), k);
      // keep the LP feasible: some ratio on each side of M/N
      const Rational m = c.memory_ratio();
      if (std::none_of(gammas.begin(), gammas.end(), [&](const Rational& g) { return g >= m; })) gammas[0] = 1;
      if (std::none_of(gammas.begin(), gammas.end(), [&](const Rational& g) { return g <= m; })) gammas[0] = Rational(1, k);
      for (int l = 1; l <= level; ++l) {
        const Rational& g = gammas[static_cast<std::size_t>(l - 1)];
        gd.push_back(to_double(g));
        cd.push_back(to_double(level_cost(l, g, c).total));
      }
      const AlphaSolution lp = lp_alpha(gammas, c);
      int nonzero = 0;
      for (const Rational& a : lp.alpha) nonzero += a != 0;
      o.require(nonzero <= 2, "lp_alpha support <= 2");
      const double grid = testing::simplex_grid_minimum(gd, cd, to_double(c.memory_ratio()), steps);
      o.require(rel(grid, to_double(lp.objective)) <= 1e-9, "lp_alpha vs simplex grid at L=" + std::to_string(level));
      ++lp_cases;
    }
  }
  o.detail = std::to_string(g_outputs.size()) + " optimizer outputs with support <= 2; lp_alpha matches the simplex grid on " + std::to_string(lp_cases) +
             " instances with L <= 6";
  return o;
}

Outcome realizability(const std::vector<SweepCase>& k100_sweep) {
  Outcome o;
  LevelRunCache cache;
  std::ostringstream deltas;
  const auto start = Clock::now();
  for (const SweepCase& r : k100_sweep) {
    const SystemConfig c = testing::sweep_config(r.level);
    const QuantizedDesign q = quantize_design(r.greedy, c);
    for (const auto& s : q.design.supports) o.require(is_integer(s.gamma * c.k), "on-grid ratio at L=" + std::to_string(r.level));
    o.require(q.design.supports.size() <= 2, "quantized support <= 2 at L=" + std::to_string(r.level));
    const SuperpositionRun run = simulate_superposition(q.design, c, worst_case_demand(c.k, c.n_files), 1ULL << 22, ExecPolicy::Parallel, &cache);
    for (const LevelRun& lr : run.levels) record_locality(lr.breakdown, lr.level, nullptr);
    o.require(run.total_cost == q.design.objective, "simulated cost equals the rational cost at L=" + std::to_string(r.level));
    o.require(std::abs(to_double(q.design.objective) - r.greedy.objective - q.delta) <= 1e-9 * r.greedy.objective, "reported delta at L=" + std::to_string(r.level));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%sL=%d:%.3g", r.level == 2 ? "" : " ", r.level, q.delta);
    deltas << buf;
  }
  o.detail = "19 quantized designs simulate exactly (" + std::to_string(cache.size()) + " distinct level runs, " + std::to_string(seconds_since(start)) +
             " s); delta " + deltas.str();
  return o;
}

}  // namespace

int main() {
  std::vector<std::pair<int, Outcome>> results;
  auto run = [&](int id, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.failure = std::string("exception: ") + e.what();
    }
    results.emplace_back(id, o);
  };

  const std::vector<SmallCase> family = small_family();
  std::vector<SweepCase> k100_sweep;
  run(1, golden_example);
  run(2, pda_validity);
  run(3, [&] { return simulation_formula(family); });
  run(4, [&] { return classical_reduction(family); });
  run(6, [&] { return optimizer_vs_oracle(k100_sweep); });
  run(7, [&] { return sweep_shape(k100_sweep); });
  run(9, [&] { return realizability(k100_sweep); });
  run(8, sparsity);
  run(5, [] {
    Outcome o;
    o.require(g_runs > 0 && g_local_runs == g_runs, "decode fetches outside levels 1 and L");
    o.detail = std::to_string(g_local_runs) + "/" + std::to_string(g_runs) + " simulation runs decode only from levels 1 and L";
    return o;
  });

  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  int failed = 0;
  for (const auto& [id, o] : results) {
    std::printf("criterion %d: %s - %s%s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), o.pass ? "" : (" [" + o.failure + "]").c_str());
    failed += !o.pass;
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
