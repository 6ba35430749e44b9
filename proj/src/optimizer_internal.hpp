#pragma once

#include <array>
#include <optional>
#include <vector>

#include "macc/optimizer.hpp"

namespace macc::detail {

// Ratios for a pair with level `lo` below M/N and level `hi` above it.
struct PairBox {
  int lo = 0, hi = 0;
  double p_min = 0, p_max = 0;  // gamma_lo
  double q_min = 0, q_max = 0;  // gamma_hi
  double guard = 0;             // minimum gamma_hi - gamma_lo
  bool feasible = false;
};

PairBox pair_box(const CostModel& model, int lo, int hi);
std::array<double, 2> project(const PairBox& box, double p, double q);
LocalResult solve_box(const CostModel& model, const PairBox& box, double p0, double q0, const SolverSettings& settings);
std::optional<OptimizationResult> best_single(const CostModel& model, std::vector<TraceRecord>* trace);
bool improves(double candidate, double incumbent);
OptimizationResult pick(std::optional<OptimizationResult> pair, std::optional<OptimizationResult> single, const CostModel& model);

}  // namespace macc::detail
