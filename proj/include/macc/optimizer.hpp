#pragma once

// Minimizing the superposition cost over (alpha, gamma). By the LP argument
// an optimal design uses at most two levels, so the search runs over level
// pairs with the two-level objective plus every single-level design.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "macc/cost_model.hpp"
#include "macc/delivery.hpp"
#include "macc/rational.hpp"
#include "macc/system.hpp"

namespace macc {

enum class CandidateMode { Nearest, Random };

struct SolverSettings {
  int budget_b = 0;  // 0 picks max(1, floor(L/2)) capped at L - 2
  double tol = 1e-9;
  int max_iter = 200;
  std::uint64_t seed = 1;
  Rational grid_step = 0;  // 0 picks 1/K
  CandidateMode candidates = CandidateMode::Nearest;
  ExecPolicy policy = ExecPolicy::Parallel;

  int effective_budget(int levels) const;
};

struct TraceRecord {
  int outer = 0;  // outer iteration of the greedy search
  int i = 0;
  int j = 0;      // 0 for a single-level candidate
  double gamma_i = 0;
  double gamma_j = 0;
  double objective = 0;
  bool accepted = false;
};

struct OptimizationResult {
  int i_star = 0;
  int j_star = 0;  // 0 when the support is a single level
  double gamma_i = 0;
  double gamma_j = 0;
  double alpha_i = 1;
  double alpha_j = 0;
  double objective = 0;
  int outer_iterations = 0;
  int budget_b = 0;
  std::uint64_t solver_iterations_total = 0;
  std::vector<TraceRecord> trace;

  int support_size() const { return j_star == 0 ? 1 : 2; }
};

/// Exact LP over alpha for fixed per-level ratios: the best basic solution,
/// i.e. one level with gamma_l == M/N or a pair strictly bracketing M/N.
/// Throws Infeasible when no basis exists.
struct AlphaSolution {
  std::vector<Rational> alpha;  // indexed by level - 1
  Rational objective;
};
AlphaSolution lp_alpha(const std::vector<Rational>& gammas, const SystemConfig& cfg);

struct LocalResult {
  double gamma_i = 0;
  double gamma_j = 0;
  double objective = 0;
  int iterations = 0;
  bool converged = false;
};

/// Box-constrained descent on the two-level objective for levels (i, j). The
/// initial point fixes which level holds the smaller ratio; iterates keep
/// |gamma_i - gamma_j| >= 1/(100K). Throws InvalidArgument for an infeasible
/// start.
LocalResult local_solve(int i, int j, double init_i, double init_j, const SystemConfig& cfg, const SolverSettings& settings = {});
LocalResult local_solve(int i, int j, double init_i, double init_j, const CostModel& model, const SolverSettings& settings = {});

/// Greedy index search over level pairs with a restricted neighbourhood.
OptimizationResult greedy_search(const SystemConfig& cfg, const SolverSettings& settings = {});

/// Exhaustive grid over every level pair in both orders, each pair refined
/// from its best cell, plus every single-level design.
OptimizationResult brute_force_oracle(const SystemConfig& cfg, const SolverSettings& settings = {});

/// Grid-point guardrail for brute_force_oracle: MACC_MAX_GRID or 2e8.
std::uint64_t max_oracle_points();

struct QuantizedDesign {
  SuperpositionDesign design;  // on the {t/K} grid, objective exact
  double continuous_objective = 0;
  double delta = 0;            // exact cost minus continuous objective
  bool neighbour_search = false;  // a floor/ceil neighbour beat the nearest rounding
};

/// Rounds an optimizer result to the grid {t/K}: nearest ratio (ties toward
/// M/N) and the four floor/ceil combinations, alphas recomputed exactly, the
/// cheapest bracketing candidate kept. A single level with M/N off the grid
/// is split between the two grid ratios around M/N at that level. Throws
/// Infeasible if no candidate brackets M/N.
QuantizedDesign quantize_design(const OptimizationResult& result, const SystemConfig& cfg);

}  // namespace macc
