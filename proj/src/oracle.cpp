#include <algorithm>
#include <cstdlib>
#include <exception>

#include "macc/errors.hpp"
#include "macc/optimizer.hpp"
#include "optimizer_internal.hpp"

namespace macc {

std::uint64_t max_oracle_points() {
  if (const char* env = std::getenv("MACC_MAX_GRID")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return 200'000'000ULL;
}

namespace {

// Grid points 1/K + n * step inside [lo, hi], plus M/N itself when inside.
std::vector<double> grid(const Rational& first, const Rational& step, double lo, double hi, double m) {
  std::vector<double> out;
  for (Rational g = first;; g += step) {
    const double v = to_double(g);
    if (v > hi + 1e-15) break;
    if (v >= lo - 1e-15) out.push_back(v);
  }
  if (m >= lo && m <= hi && std::find(out.begin(), out.end(), m) == out.end()) {
    out.push_back(m);
    std::sort(out.begin(), out.end());
  }
  return out;
}

}  // namespace

OptimizationResult brute_force_oracle(const SystemConfig& cfg, const SolverSettings& settings) {
  const CostModel model(cfg);
  const int levels = model.levels();
  const Rational step = settings.grid_step > 0 ? settings.grid_step : Rational(1, cfg.k);
  if (step > Rational(1, cfg.k)) throw InvalidArgument("oracle grid step must not exceed 1/K");
  const Rational first(1, cfg.k);
  const double m = model.memory_ratio();

  struct Job {
    detail::PairBox box;
    std::vector<double> ps, qs;
  };
  std::vector<Job> jobs;
  std::uint64_t points = 0;
  for (int lo = 1; lo <= levels; ++lo)
    for (int hi = 1; hi <= levels; ++hi) {
      const auto box = detail::pair_box(model, lo, hi);
      if (!box.feasible) continue;
      Job job{box, grid(first, step, box.p_min, box.p_max, m), grid(first, step, box.q_min, box.q_max, m)};
      points += job.ps.size() * job.qs.size();
      if (points > max_oracle_points()) throw ResourceLimit("oracle grid exceeds " + std::to_string(max_oracle_points()) + " points");
      jobs.push_back(std::move(job));
    }

  std::vector<std::optional<OptimizationResult>> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  [[maybe_unused]] const bool parallel = settings.policy == ExecPolicy::Parallel;
#if defined(MACC_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (std::size_t n = 0; n < jobs.size(); ++n) {
    try {
      const Job& job = jobs[n];
      double best = 0, bp = 0, bq = 0;
      bool found = false;
      for (double p : job.ps)
        for (double q : job.qs) {
          if (q - p < job.box.guard) continue;
          const double v = model.pair(job.box.lo, job.box.hi, p, q);
          if (!found || v < best) {
            best = v;
            bp = p;
            bq = q;
            found = true;
          }
        }
      if (!found) continue;
      const LocalResult r = detail::solve_box(model, job.box, bp, bq, settings);
      OptimizationResult cand;
      cand.i_star = job.box.lo;
      cand.j_star = job.box.hi;
      cand.gamma_i = r.gamma_i;
      cand.gamma_j = r.gamma_j;
      cand.objective = r.objective;
      cand.solver_iterations_total = static_cast<std::uint64_t>(r.iterations);
      results[n] = cand;
    } catch (...) {
      errors[n] = std::current_exception();
    }
  }

  std::optional<OptimizationResult> best_pair;
  std::uint64_t iterations = 0;
  std::vector<TraceRecord> trace;
  for (std::size_t n = 0; n < jobs.size(); ++n) {
    if (errors[n]) std::rethrow_exception(errors[n]);
    if (!results[n]) continue;
    const auto& r = *results[n];
    iterations += r.solver_iterations_total;
    trace.push_back({0, r.i_star, r.j_star, r.gamma_i, r.gamma_j, r.objective, false});
    if (!best_pair || r.objective < best_pair->objective) best_pair = r;
  }
  const auto single = detail::best_single(model, &trace);
  OptimizationResult best = detail::pick(best_pair, single, model);
  best.solver_iterations_total = iterations;
  best.trace = std::move(trace);
  return best;
}

}  // namespace macc
