#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "macc/errors.hpp"
#include "macc/optimizer.hpp"

namespace macc {

namespace {

// t in [1, floor(K/l)] nearest to K * gamma; exact halves go toward M/N.
int nearest_t(double gamma, int l, const SystemConfig& cfg) {
  const double x = gamma * cfg.k;
  const double fl = std::floor(x);
  int t;
  if (x - fl == 0.5) {
    t = static_cast<int>(gamma < to_double(cfg.memory_ratio()) ? fl + 1 : fl);
  } else {
    t = static_cast<int>(std::lround(x));
  }
  return std::clamp(t, 1, cfg.k / l);
}

// floor and ceiling of K * gamma in [1, floor(K/l)]; equal on the grid
std::pair<int, int> bracket_t(double gamma, int l, const SystemConfig& cfg) {
  const double x = gamma * cfg.k;
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, r)) {
    const int t = std::clamp(static_cast<int>(r), 1, cfg.k / l);
    return {t, t};
  }
  return {std::clamp(static_cast<int>(std::floor(x)), 1, cfg.k / l), std::clamp(static_cast<int>(std::ceil(x)), 1, cfg.k / l)};
}

std::optional<SuperpositionDesign> two_level(int i, int ti, int j, int tj, const SystemConfig& cfg, bool strict) {
  const Rational gi(ti, cfg.k), gj(tj, cfg.k), m = cfg.memory_ratio();
  if (strict && !((gi < m && m < gj) || (gj < m && m < gi))) return std::nullopt;
  SuperpositionDesign d;
  if (gi == gj) {
    if (gi != m) return std::nullopt;
    // both collapse onto M/N: keep the cheaper level alone
    const int level = level_cost(i, m, cfg).total <= level_cost(j, m, cfg).total ? i : j;
    d.supports = {{level, Rational(1), m}};
  } else {
    const auto w = alpha_from_gammas(gi, gj, m);
    if (!w.feasible) return std::nullopt;
    if (w.alpha_i != 0) d.supports.push_back({i, w.alpha_i, gi});
    if (w.alpha_j != 0) d.supports.push_back({j, w.alpha_j, gj});
  }
  d.objective = superposition_objective(d, cfg);
  return d;
}

}  // namespace

QuantizedDesign quantize_design(const OptimizationResult& result, const SystemConfig& cfg) {
  cfg.validate();
  QuantizedDesign out;
  out.continuous_objective = result.objective;
  const Rational m = cfg.memory_ratio();

  if (result.j_star == 0) {
    const int l = result.i_star;
    const Rational t = m * cfg.k;
    if (is_integer(t)) {
      out.design.supports = {{l, Rational(1), m}};
    } else {
      // memory sharing between the two grid ratios around M/N, same level
      const Rational lo = floor_div(t, 1) / cfg.k, hi = lo + Rational(1, cfg.k);
      if (lo < gamma_lower(cfg) || hi > gamma_upper(l, cfg))
        throw Infeasible("M/N=" + to_string(m) + " has no grid neighbours on both sides for level " + std::to_string(l));
      const auto w = alpha_from_gammas(lo, hi, m);
      out.design.supports = {{l, w.alpha_i, lo}, {l, w.alpha_j, hi}};
      out.neighbour_search = true;
    }
    out.design.objective = superposition_objective(out.design, cfg);
  } else {
    const int i = result.i_star, j = result.j_star;
    const int ti = nearest_t(result.gamma_i, i, cfg), tj = nearest_t(result.gamma_j, j, cfg);
    // a cheaper floor/ceil combination that strictly brackets M/N replaces
    // the nearest rounding
    std::optional<SuperpositionDesign> best = two_level(i, ti, j, tj, cfg, false);
    const auto [fi, ci] = bracket_t(result.gamma_i, i, cfg);
    const auto [fj, cj] = bracket_t(result.gamma_j, j, cfg);
    for (int a : {fi, ci})
      for (int b : {fj, cj}) {
        auto d = two_level(i, a, j, b, cfg, true);
        if (d && (!best || d->objective < best->objective)) {
          best = d;
          out.neighbour_search = true;
        }
      }
    if (!best)
      throw Infeasible("no grid neighbour of (" + std::to_string(result.gamma_i) + ", " + std::to_string(result.gamma_j) + ") brackets M/N=" +
                       to_string(m));
    out.design = *best;
  }
  out.delta = to_double(out.design.objective) - out.continuous_objective;
  return out;
}

}  // namespace macc
