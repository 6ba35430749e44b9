// Serial reference vs OpenMP timings for the parallel kernels.
//
//   macc_bench [--quick]

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>

#if defined(MACC_HAVE_OPENMP)
#include <omp.h>
#endif

#include "macc/cost_model.hpp"
#include "macc/delivery.hpp"
#include "macc/experiments.hpp"
#include "macc/optimizer.hpp"

using namespace macc;

namespace {

double best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return best;
}

SystemConfig level_config(const LevelParams& p) {
  SystemConfig c;
  c.k = p.k();
  c.level = p.level();
  c.n_files = p.k();
  c.m = p.gamma() * c.n_files;
  for (int l = 1; l <= p.level(); ++l) c.mu.emplace_back(l);
  c.rho = 65;
  return c;
}

SystemConfig k100_sweep(int level) {
  SystemConfig c;
  c.k = 100;
  c.level = level;
  c.n_files = 100;
  c.m = 5;
  c.rho = 65;
  for (int l = 1; l <= level; ++l) c.mu.emplace_back(l);
  return c;
}

void row(const char* kernel, const std::string& size, double serial, double parallel, bool same) {
  std::printf("%-10s %-26s %10.4f %10.4f %7.2fx  %s\n", kernel, size.c_str(), serial, parallel, serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  const int reps = quick ? 1 : 3;
  int threads = 1;
#if defined(MACC_HAVE_OPENMP)
  threads = omp_get_max_threads();
#endif
  std::printf("threads: %d\n", threads);
  std::printf("%-10s %-26s %10s %10s %8s\n", "kernel", "instance", "serial s", "omp s", "speedup");

  {
    const LevelParams p(quick ? 10 : 20, 3, 3);
    const SystemConfig c = level_config(p);
    const SchemeArrays a = build_arrays(p);
    const DemandVector d = worst_case_demand(c.k, c.n_files);
    CostBreakdown s, q;
    SimulationOptions so, po;
    so.policy = ExecPolicy::Serial;
    const double ts = best_of(reps, [&] { s = simulate(a, c, d, so); });
    const double tp = best_of(reps, [&] { q = simulate(a, c, d, po); });
    row("simulate", "(K',t,L)=" + std::to_string(p.k_prime()) + ",3,3 F=" + std::to_string(p.f()), ts, tp, s == q);
  }
  {
    const LevelParams p(quick ? 30 : 80, 3, quick ? 2 : 3);
    const SystemConfig c = level_config(p);
    CostBreakdown s, q;
    const double ts = best_of(reps, [&] { s = simulate_orbit(p, c, ExecPolicy::Serial); });
    const double tp = best_of(reps, [&] { q = simulate_orbit(p, c, ExecPolicy::Parallel); });
    row("orbit", "F=" + std::to_string(p.f()), ts, tp, s == q);
  }
  {
    const SystemConfig c = k100_sweep(quick ? 10 : 20);
    SolverSettings ss, ps;
    ss.policy = ExecPolicy::Serial;
    ss.grid_step = ps.grid_step = Rational(1, quick ? 200 : 2000);
    OptimizationResult s, q;
    const double ts = best_of(reps, [&] { s = brute_force_oracle(c, ss); });
    const double tp = best_of(reps, [&] { q = brute_force_oracle(c, ps); });
    row("oracle", "sweep L=" + std::to_string(c.level) + " step " + to_string(ss.grid_step), ts, tp, s.objective == q.objective && s.i_star == q.i_star);
  }
  {
    ExperimentConfig cfg;
    cfg.system = k100_sweep(20);
    cfg.mu_table = cfg.system.mu;
    cfg.sweep_max = 20;
    ExperimentConfig serial = cfg;
    serial.solver.policy = ExecPolicy::Serial;
    std::vector<SweepRow> s, q;
    const double ts = best_of(reps, [&] { s = run_sweep(serial, true); });
    const double tp = best_of(reps, [&] { q = run_sweep(cfg, true); });
    bool same = s.size() == q.size();
    for (std::size_t n = 0; same && n < s.size(); ++n) same = s[n].superposition == q[n].superposition && s[n].oracle == q[n].oracle;
    row("sweep", "K=100 L=2..20 + oracle", ts, tp, same);
  }
  return 0;
}
