#include "macc/cost_model.hpp"

#include <cmath>
#include <set>

#include "macc/errors.hpp"

namespace macc {

namespace {

void check_level(int l, const SystemConfig& cfg) {
  if (l < 1 || l > cfg.level) throw InvalidArgument("level " + std::to_string(l) + " outside [1, " + std::to_string(cfg.level) + "]");
}

}  // namespace

Rational gamma_lower(const SystemConfig& cfg) { return Rational(1, cfg.k); }

Rational gamma_upper(int l, const SystemConfig& cfg) {
  check_level(l, cfg);
  return Rational(cfg.k / l, cfg.k);
}

LevelCost level_cost(int l, const Rational& gamma, const SystemConfig& cfg) {
  cfg.validate();
  check_level(l, cfg);
  if (gamma < gamma_lower(cfg) || gamma > gamma_upper(l, cfg))
    throw InvalidArgument("caching ratio " + to_string(gamma) + " outside [" + to_string(gamma_lower(cfg)) + ", " +
                          to_string(gamma_upper(l, cfg)) + "] for level " + std::to_string(l));
  const Rational k(cfg.k);
  Rational sum_mu = 0;
  for (int i = 0; i < l; ++i) sum_mu += cfg.mu[static_cast<std::size_t>(i)];
  const Rational spread = k * (1 - l * gamma) / (k * gamma + 1);
  LevelCost out;
  out.r_b = spread * cfg.rho;
  out.r_c1 = k * gamma * sum_mu;
  out.r_c2 = k * gamma * spread * (cfg.mu.front() + cfg.mu[static_cast<std::size_t>(l - 1)]);
  out.total = out.r_b + out.r_c1 + out.r_c2;
  return out;
}

Rational superposition_objective(const SuperpositionDesign& design, const SystemConfig& cfg) {
  cfg.validate();
  Rational alpha_sum = 0, memory = 0, total = 0;
  std::set<std::pair<int, Rational>> seen;
  for (const auto& s : design.supports) {
    check_level(s.level, cfg);
    if (!seen.insert({s.level, s.gamma}).second)
      throw InvalidArgument("support (level " + std::to_string(s.level) + ", gamma " + to_string(s.gamma) + ") appears twice in the design");
    if (s.alpha < 0 || s.alpha > 1) throw InvalidArgument("subfile fraction " + to_string(s.alpha) + " outside [0, 1]");
    alpha_sum += s.alpha;
    memory += s.alpha * s.gamma;
    if (s.alpha != 0) total += s.alpha * level_cost(s.level, s.gamma, cfg).total;
  }
  if (alpha_sum != 1) throw InvalidArgument("subfile fractions sum to " + to_string(alpha_sum) + ", not 1");
  if (memory != cfg.memory_ratio())
    throw InvalidArgument("design uses memory " + to_string(memory) + " but M/N=" + to_string(cfg.memory_ratio()));
  return total;
}

Rational baseline_cost(const SystemConfig& cfg) { return level_cost(cfg.level, cfg.memory_ratio(), cfg).total; }

ReducedCoefficients reduced_coefficients(int i, const SystemConfig& cfg) {
  check_level(i, cfg);
  const double k = cfg.k;
  double sum_mu = 0;
  for (int l = 0; l < i; ++l) sum_mu += to_double(cfg.mu[static_cast<std::size_t>(l)]);
  const double ends = to_double(cfg.mu.front()) + to_double(cfg.mu[static_cast<std::size_t>(i - 1)]);
  return {k * k * sum_mu - k * k * i * ends, k * sum_mu - k * i * to_double(cfg.rho) + k * k * ends};
}

AlphaPair alpha_from_gammas(double gamma_i, double gamma_j, double memory_ratio) {
  if (gamma_i == gamma_j) throw Singularity("alpha is undefined when gamma_i == gamma_j");
  AlphaPair out;
  out.alpha_i = (gamma_j - memory_ratio) / (gamma_j - gamma_i);
  out.alpha_j = (memory_ratio - gamma_i) / (gamma_j - gamma_i);
  out.feasible = out.alpha_i >= 0 && out.alpha_i <= 1 && out.alpha_j >= 0 && out.alpha_j <= 1;
  return out;
}

ExactAlphaPair alpha_from_gammas(const Rational& gamma_i, const Rational& gamma_j, const Rational& memory_ratio) {
  if (gamma_i == gamma_j) throw Singularity("alpha is undefined when gamma_i == gamma_j");
  ExactAlphaPair out;
  out.alpha_i = (gamma_j - memory_ratio) / (gamma_j - gamma_i);
  out.alpha_j = (memory_ratio - gamma_i) / (gamma_j - gamma_i);
  out.feasible = out.alpha_i >= 0 && out.alpha_i <= 1 && out.alpha_j >= 0 && out.alpha_j <= 1;
  return out;
}

double reduced_objective(int i, int j, double gamma_i, double gamma_j, const SystemConfig& cfg) {
  cfg.validate();
  check_level(i, cfg);
  check_level(j, cfg);
  if (i == j) throw InvalidArgument("reduced objective needs two distinct levels");
  const double m = to_double(cfg.memory_ratio());
  if (gamma_i == gamma_j) throw Singularity("reduced objective is singular at gamma_i == gamma_j");
  if (!alpha_from_gammas(gamma_i, gamma_j, m).feasible)
    throw InvalidArgument("M/N is not between gamma_" + std::to_string(i) + " and gamma_" + std::to_string(j));
  const double k = cfg.k;
  const double rho = to_double(cfg.rho);
  const auto ci = reduced_coefficients(i, cfg);
  const auto cj = reduced_coefficients(j, cfg);
  const double d = gamma_j - gamma_i;
  return (gamma_j - m) * (ci.a * gamma_i * gamma_i + ci.b * gamma_i + k * rho) / (d * (k * gamma_i + 1)) +
         (m - gamma_i) * (cj.a * gamma_j * gamma_j + cj.b * gamma_j + k * rho) / (d * (k * gamma_j + 1));
}

CostModel::CostModel(const SystemConfig& cfg) : k_(cfg.k), m_(to_double(cfg.memory_ratio())), rho_(to_double(cfg.rho)) {
  cfg.validate();
  for (int l = 1; l <= cfg.level; ++l) {
    const auto c = reduced_coefficients(l, cfg);
    a_.push_back(c.a);
    b_.push_back(c.b);
  }
}

double CostModel::level(int l, double gamma) const {
  const double a = a_[static_cast<std::size_t>(l - 1)];
  const double b = b_[static_cast<std::size_t>(l - 1)];
  return (a * gamma * gamma + b * gamma + k_ * rho_) / (k_ * gamma + 1);
}

double CostModel::level_slope(int l, double gamma) const {
  const double a = a_[static_cast<std::size_t>(l - 1)];
  const double b = b_[static_cast<std::size_t>(l - 1)];
  const double den = k_ * gamma + 1;
  return ((2 * a * gamma + b) * den - k_ * (a * gamma * gamma + b * gamma + k_ * rho_)) / (den * den);
}

double CostModel::pair(int i, int j, double gamma_i, double gamma_j) const {
  const double d = gamma_j - gamma_i;
  return ((gamma_j - m_) * level(i, gamma_i) + (m_ - gamma_i) * level(j, gamma_j)) / d;
}

void CostModel::pair_gradient(int i, int j, double gamma_i, double gamma_j, double& d_i, double& d_j) const {
  const double d = gamma_j - gamma_i;
  const double alpha_i = (gamma_j - m_) / d;
  const double alpha_j = (m_ - gamma_i) / d;
  const double diff = (level(i, gamma_i) - level(j, gamma_j)) / d;
  d_i = alpha_i * diff + alpha_i * level_slope(i, gamma_i);
  d_j = alpha_j * diff + alpha_j * level_slope(j, gamma_j);
}

}  // namespace macc
