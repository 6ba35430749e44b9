#pragma once

// Closed-form costs. Exact versions take Rational caching ratios; the double
// versions back the optimizer.

#include <vector>

#include "macc/design.hpp"
#include "macc/rational.hpp"
#include "macc/system.hpp"

namespace macc {

struct LevelCost {
  Rational r_b;   // broadcast
  Rational r_c1;  // direct reads
  Rational r_c2;  // side information for decoding
  Rational total;
};

/// Caching ratios a level-l scheme can use: [1/K, floor(K/l)/K].
Rational gamma_lower(const SystemConfig& cfg);
Rational gamma_upper(int l, const SystemConfig& cfg);

/// r_b = K(1 - l g)/(K g + 1) rho, r_c1 = K g sum_{i<=l} mu_i,
/// r_c2 = K^2 g (1 - l g)/(K g + 1) (mu_1 + mu_l). Throws InvalidArgument
/// for l outside [1, L] or gamma outside its range.
LevelCost level_cost(int l, const Rational& gamma, const SystemConfig& cfg);

/// sum_l alpha_l * level_cost(l, gamma_l). Throws InvalidArgument unless
/// the weights sum to 1 and meet the memory budget exactly.
Rational superposition_objective(const SuperpositionDesign& design, const SystemConfig& cfg);

/// The plain level-L scheme at gamma = M/N.
Rational baseline_cost(const SystemConfig& cfg);

/// Level cost as (A g^2 + B g + K rho)/(K g + 1).
struct ReducedCoefficients {
  double a = 0;
  double b = 0;
};
ReducedCoefficients reduced_coefficients(int i, const SystemConfig& cfg);

struct AlphaPair {
  double alpha_i = 0;
  double alpha_j = 0;
  bool feasible = false;  // both weights in [0, 1]
};
/// Weights forced by alpha_i + alpha_j = 1 and alpha_i g_i + alpha_j g_j = m.
/// Throws Singularity when g_i == g_j.
AlphaPair alpha_from_gammas(double gamma_i, double gamma_j, double memory_ratio);

struct ExactAlphaPair {
  Rational alpha_i;
  Rational alpha_j;
  bool feasible = false;
};
ExactAlphaPair alpha_from_gammas(const Rational& gamma_i, const Rational& gamma_j, const Rational& memory_ratio);

/// Two-level objective in closed form. Throws Singularity when g_i == g_j
/// and InvalidArgument when M/N is not between g_i and g_j.
double reduced_objective(int i, int j, double gamma_i, double gamma_j, const SystemConfig& cfg);

/// Floating-point evaluator with the per-level coefficients cached.
class CostModel {
 public:
  explicit CostModel(const SystemConfig& cfg);

  int k() const { return k_; }
  int levels() const { return static_cast<int>(a_.size()); }
  double memory_ratio() const { return m_; }
  double gamma_lower() const { return 1.0 / k_; }
  double gamma_upper(int l) const { return static_cast<double>(k_ / l) / k_; }

  /// Level-l cost and its derivative in gamma.
  double level(int l, double gamma) const;
  double level_slope(int l, double gamma) const;

  /// Two-level objective and gradient; no feasibility checks.
  double pair(int i, int j, double gamma_i, double gamma_j) const;
  void pair_gradient(int i, int j, double gamma_i, double gamma_j, double& d_i, double& d_j) const;

  ReducedCoefficients coefficients(int l) const { return {a_[static_cast<std::size_t>(l - 1)], b_[static_cast<std::size_t>(l - 1)]}; }

 private:
  int k_;
  double m_;
  double rho_;
  std::vector<double> a_, b_;
};

}  // namespace macc
