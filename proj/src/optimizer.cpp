#include "macc/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "macc/errors.hpp"
#include "optimizer_internal.hpp"

namespace macc {

int SolverSettings::effective_budget(int levels) const {
  const int cap = std::max(levels - 2, 0);
  const int b = budget_b > 0 ? budget_b : std::max(1, levels / 2);
  return std::min(b, cap);
}

namespace detail {

PairBox pair_box(const CostModel& model, int lo, int hi) {
  PairBox box;
  box.lo = lo;
  box.hi = hi;
  const double m = model.memory_ratio();
  box.p_min = model.gamma_lower();
  box.p_max = std::min(m, model.gamma_upper(lo));
  box.q_min = std::max(m, model.gamma_lower());
  box.q_max = model.gamma_upper(hi);
  box.guard = 1.0 / (100.0 * model.k());
  box.feasible = lo != hi && box.p_min <= box.p_max && box.q_min <= box.q_max && box.q_max - box.p_min >= box.guard;
  return box;
}

std::array<double, 2> project(const PairBox& box, double p, double q) {
  p = std::clamp(p, box.p_min, box.p_max);
  q = std::clamp(q, box.q_min, box.q_max);
  if (q - p >= box.guard) return {p, q};
  // closest point on q - p = guard inside the box
  const double lo = std::max(box.p_min, box.q_min - box.guard);
  const double hi = std::min(box.p_max, box.q_max - box.guard);
  const double x = std::clamp((p + q - box.guard) / 2, lo, hi);
  return {x, x + box.guard};
}

}  // namespace detail

namespace {

using detail::PairBox;

bool single_feasible(const CostModel& model, int l) {
  const double m = model.memory_ratio();
  return m >= model.gamma_lower() && m <= model.gamma_upper(l);
}

// Inward normals of the constraints active at (p, q).
std::vector<std::array<double, 2>> active_normals(const PairBox& box, double p, double q) {
  std::vector<std::array<double, 2>> out;
  const double eps = 1e-14;
  if (p <= box.p_min + eps) out.push_back({1, 0});
  if (p >= box.p_max - eps) out.push_back({-1, 0});
  if (q <= box.q_min + eps) out.push_back({0, 1});
  if (q >= box.q_max - eps) out.push_back({0, -1});
  if (q - p <= box.guard * (1 + 1e-9)) out.push_back({-1, 1});
  return out;
}

// Projection of v onto the cone of feasible directions {d : n . d >= 0}.
std::array<double, 2> cone_project(const std::vector<std::array<double, 2>>& normals, std::array<double, 2> v) {
  auto feasible = [&](const std::array<double, 2>& d) {
    for (const auto& n : normals)
      if (n[0] * d[0] + n[1] * d[1] < -1e-15 * (std::abs(d[0]) + std::abs(d[1]))) return false;
    return true;
  };
  if (feasible(v)) return v;
  std::array<double, 2> best{0, 0};
  double best_dist = v[0] * v[0] + v[1] * v[1];
  for (const auto& n : normals) {
    const double s = (n[0] * v[0] + n[1] * v[1]) / (n[0] * n[0] + n[1] * n[1]);
    const std::array<double, 2> d{v[0] - s * n[0], v[1] - s * n[1]};
    const double dist = (d[0] - v[0]) * (d[0] - v[0]) + (d[1] - v[1]) * (d[1] - v[1]);
    if (feasible(d) && dist < best_dist) {
      best = d;
      best_dist = dist;
    }
  }
  return best;
}

}  // namespace

namespace detail {

LocalResult descend(const CostModel& model, const PairBox& box, double p0, double q0, const SolverSettings& settings) {
  auto value = [&](double p, double q) { return model.pair(box.lo, box.hi, p, q); };
  auto gradient = [&](double p, double q) {
    std::array<double, 2> g{};
    model.pair_gradient(box.lo, box.hi, p, q, g[0], g[1]);
    return g;
  };

  auto [p, q] = project(box, p0, q0);
  double f = value(p, q);
  LocalResult out;
  for (int it = 0; it < settings.max_iter; ++it) {
    const auto g = gradient(p, q);
    const auto normals = active_normals(box, p, q);
    const auto steepest = cone_project(normals, {-g[0], -g[1]});
    const double stationarity = std::hypot(steepest[0], steepest[1]);
    if (stationarity <= settings.tol * std::max(1.0, std::abs(f))) {
      out.converged = true;
      break;
    }
    ++out.iterations;

    // Newton direction on the face picked out by the steepest feasible direction.
    std::array<double, 2> dir = steepest;
    const double h = 1e-6 * std::max(box.guard, 1e-12);
    const auto gp = gradient(p + h, q), gm = gradient(p - h, q);
    const auto gq = gradient(p, q + h), gn = gradient(p, q - h);
    const double hpp = (gp[0] - gm[0]) / (2 * h);
    const double hqq = (gq[1] - gn[1]) / (2 * h);
    const double hpq = ((gp[1] - gm[1]) + (gq[0] - gn[0])) / (4 * h);
    const bool free_face = steepest[0] == -g[0] && steepest[1] == -g[1];
    if (free_face) {
      const double det = hpp * hqq - hpq * hpq;
      if (hpp > 0 && det > 0) {
        const std::array<double, 2> newton{-(hqq * g[0] - hpq * g[1]) / det, -(hpp * g[1] - hpq * g[0]) / det};
        if (newton[0] * g[0] + newton[1] * g[1] < 0) dir = newton;
      }
    } else if (stationarity > 0) {
      const std::array<double, 2> e{steepest[0] / stationarity, steepest[1] / stationarity};
      const double curv = e[0] * (hpp * e[0] + hpq * e[1]) + e[1] * (hpq * e[0] + hqq * e[1]);
      if (curv > 0) {
        const double s = stationarity / curv;  // -(g . e) / curv
        dir = {s * e[0], s * e[1]};
      }
    }

    auto line_search = [&](const std::array<double, 2>& d, double& np, double& nq, double& nf) {
      double step = 1;
      for (int k = 0; k < 80; ++k, step *= 0.5) {
        const auto x = project(box, p + step * d[0], q + step * d[1]);
        const double fx = value(x[0], x[1]);
        const double decrease = g[0] * (x[0] - p) + g[1] * (x[1] - q);
        if (fx <= f + 1e-4 * decrease && fx < f) {
          np = x[0];
          nq = x[1];
          nf = fx;
          return true;
        }
      }
      return false;
    };
    double np = p, nq = q, nf = f;
    if (!line_search(dir, np, nq, nf) && !(dir != steepest && line_search(steepest, np, nq, nf))) break;
    const double moved = std::abs(np - p) + std::abs(nq - q);
    p = np;
    q = nq;
    f = nf;
    if (moved <= 1e-16) break;
  }
  out.gamma_i = p;
  out.gamma_j = q;
  out.objective = f;
  return out;
}


// On the faces gamma_lo == M/N (alpha_hi = 0) or gamma_hi == M/N
// (alpha_lo = 0) the objective ignores the other ratio, so descent can stall
// there at an arbitrary value of it. Scan that ratio for a point from which
// leaving the face decreases the objective.
std::optional<std::array<double, 2>> leave_face(const CostModel& model, const PairBox& box, double p, double q, double tol) {
  const double m = model.memory_ratio();
  const int samples = 64;
  auto g = [&](double x, double y) {
    std::array<double, 2> out{};
    model.pair_gradient(box.lo, box.hi, x, y, out[0], out[1]);
    return out;
  };
  std::optional<std::array<double, 2>> best;
  double best_rate = tol;
  if (box.p_max == m && p >= m - 1e-14) {
    const double from = std::max(box.q_min, m + box.guard);
    for (int n = 0; n <= samples && from <= box.q_max; ++n) {
      const double y = from + (box.q_max - from) * n / samples;
      const double rate = g(m, y)[0];  // > 0: lowering gamma_lo helps
      if (rate > best_rate) {
        best_rate = rate;
        best = std::array<double, 2>{m, y};
      }
    }
  } else if (box.q_min == m && q <= m + 1e-14) {
    const double to = std::min(box.p_max, m - box.guard);
    for (int n = 0; n <= samples && box.p_min <= to; ++n) {
      const double x = box.p_min + (to - box.p_min) * n / samples;
      const double rate = -g(x, m)[1];  // > 0: raising gamma_hi helps
      if (rate > best_rate) {
        best_rate = rate;
        best = std::array<double, 2>{x, m};
      }
    }
  }
  return best;
}

LocalResult solve_box(const CostModel& model, const PairBox& box, double p0, double q0, const SolverSettings& settings) {
  LocalResult out = descend(model, box, p0, q0, settings);
  for (int escape = 0; escape < 4; ++escape) {
    const auto start = leave_face(model, box, out.gamma_i, out.gamma_j, settings.tol * std::max(1.0, std::abs(out.objective)));
    if (!start) break;
    LocalResult next = descend(model, box, (*start)[0], (*start)[1], settings);
    next.iterations += out.iterations;
    if (!(next.objective < out.objective)) {
      out.iterations = next.iterations;
      break;
    }
    out = next;
  }
  return out;
}

}  // namespace detail

LocalResult local_solve(int i, int j, double init_i, double init_j, const SystemConfig& cfg, const SolverSettings& settings) {
  return local_solve(i, j, init_i, init_j, CostModel(cfg), settings);
}

LocalResult local_solve(int i, int j, double init_i, double init_j, const CostModel& model, const SolverSettings& settings) {
  if (i < 1 || j < 1 || i > model.levels() || j > model.levels() || i == j)
    throw InvalidArgument("local solve needs two distinct levels in [1, L]");
  const double m = model.memory_ratio();
  bool i_low;
  if (init_i < init_j && init_i <= m && m <= init_j) {
    i_low = true;
  } else if (init_j < init_i && init_j <= m && m <= init_i) {
    i_low = false;
  } else {
    throw InvalidArgument("initial ratios do not bracket M/N");
  }
  const PairBox box = i_low ? detail::pair_box(model, i, j) : detail::pair_box(model, j, i);
  if (!box.feasible) throw InvalidArgument("levels " + std::to_string(i) + " and " + std::to_string(j) + " admit no feasible ratios");
  const double p0 = i_low ? init_i : init_j;
  const double q0 = i_low ? init_j : init_i;
  const double slack = 1e-12;
  if (p0 < box.p_min - slack || p0 > box.p_max + slack || q0 < box.q_min - slack || q0 > box.q_max + slack)
    throw InvalidArgument("initial ratios outside their ranges");
  LocalResult r = detail::solve_box(model, box, p0, q0, settings);
  if (!i_low) std::swap(r.gamma_i, r.gamma_j);
  return r;
}

AlphaSolution lp_alpha(const std::vector<Rational>& gammas, const SystemConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(gammas.size()) != cfg.level)
    throw InvalidArgument("expected " + std::to_string(cfg.level) + " caching ratios, got " + std::to_string(gammas.size()));
  std::vector<Rational> cost;
  for (int l = 1; l <= cfg.level; ++l) cost.push_back(level_cost(l, gammas[static_cast<std::size_t>(l - 1)], cfg).total);

  const Rational m = cfg.memory_ratio();
  std::optional<AlphaSolution> best;
  auto offer = [&](std::vector<Rational> alpha, const Rational& objective) {
    if (!best || objective < best->objective) best = AlphaSolution{std::move(alpha), objective};
  };
  const auto size = gammas.size();
  for (std::size_t l = 0; l < size; ++l) {
    if (gammas[l] != m) continue;
    std::vector<Rational> alpha(size, Rational(0));
    alpha[l] = 1;
    offer(std::move(alpha), cost[l]);
  }
  for (std::size_t a = 0; a < size; ++a) {
    for (std::size_t b = a + 1; b < size; ++b) {
      const Rational lo = std::min(gammas[a], gammas[b]);
      const Rational hi = std::max(gammas[a], gammas[b]);
      if (!(lo < m && m < hi)) continue;
      const auto w = alpha_from_gammas(gammas[a], gammas[b], m);
      std::vector<Rational> alpha(size, Rational(0));
      alpha[a] = w.alpha_i;
      alpha[b] = w.alpha_j;
      offer(std::move(alpha), w.alpha_i * cost[a] + w.alpha_j * cost[b]);
    }
  }
  if (!best) throw Infeasible("no level or pair of levels brackets M/N=" + to_string(m));
  return *best;
}

namespace {

struct Searcher {
  const CostModel& model;
  const SolverSettings& settings;
  OptimizationResult& out;

  // Best of both orders for levels {a, b}, warm-started at (wa, wb).
  std::optional<OptimizationResult> solve_pair(int a, int b, double wa, double wb) {
    std::optional<OptimizationResult> best;
    for (const auto& [lo, hi, wp, wq] : {std::tuple{a, b, wa, wb}, std::tuple{b, a, wb, wa}}) {
      const PairBox box = detail::pair_box(model, lo, hi);
      if (!box.feasible) continue;
      // warm start first, then the box corners: the objective is not convex
      LocalResult r = detail::solve_box(model, box, wp, wq, settings);
      out.solver_iterations_total += static_cast<std::uint64_t>(r.iterations);
      for (const auto& [cp, cq] : {std::pair{box.p_min, box.q_min}, std::pair{box.p_min, box.q_max}, std::pair{box.p_max, box.q_min},
                                   std::pair{box.p_max, box.q_max}}) {
        const LocalResult c = detail::solve_box(model, box, cp, cq, settings);
        out.solver_iterations_total += static_cast<std::uint64_t>(c.iterations);
        if (detail::improves(c.objective, r.objective)) r = c;
      }
      if (!best || r.objective < best->objective) {
        OptimizationResult cand;
        cand.i_star = lo;
        cand.j_star = hi;
        cand.gamma_i = r.gamma_i;
        cand.gamma_j = r.gamma_j;
        cand.objective = r.objective;
        best = cand;
      }
    }
    return best;
  }
};

void finish(OptimizationResult& best, const CostModel& model) {
  if (best.j_star == 0) {
    best.alpha_i = 1;
    best.alpha_j = 0;
    best.gamma_j = 0;
    return;
  }
  const auto w = alpha_from_gammas(best.gamma_i, best.gamma_j, model.memory_ratio());
  best.alpha_i = w.alpha_i;
  best.alpha_j = w.alpha_j;
}

}  // namespace

namespace detail {

std::optional<OptimizationResult> best_single(const CostModel& model, std::vector<TraceRecord>* trace) {
  std::optional<OptimizationResult> best;
  for (int l = 1; l <= model.levels(); ++l) {
    if (!single_feasible(model, l)) continue;
    const double v = model.level(l, model.memory_ratio());
    if (trace) trace->push_back({0, l, 0, model.memory_ratio(), 0, v, false});
    if (!best || v < best->objective) {
      OptimizationResult r;
      r.i_star = l;
      r.gamma_i = model.memory_ratio();
      r.objective = v;
      best = r;
    }
  }
  return best;
}

bool improves(double candidate, double incumbent) { return candidate < incumbent - 1e-12 * std::max(1.0, std::abs(incumbent)); }

OptimizationResult pick(std::optional<OptimizationResult> pair, std::optional<OptimizationResult> single, const CostModel& model) {
  if (!pair && !single) throw Infeasible("no design meets the memory budget");
  OptimizationResult best;
  if (pair && (!single || improves(pair->objective, single->objective))) {
    best = *pair;
  } else {
    best = *single;
  }
  finish(best, model);
  return best;
}

}  // namespace detail

OptimizationResult greedy_search(const SystemConfig& cfg, const SolverSettings& settings) {
  const CostModel model(cfg);
  const int levels = model.levels();
  OptimizationResult out;
  out.budget_b = settings.effective_budget(levels);
  Searcher search{model, settings, out};

  // initial pair: (1, L), else the widest bracket around M/N
  std::optional<std::pair<int, int>> start;
  if (levels >= 2 && detail::pair_box(model, 1, levels).feasible) {
    start = {1, levels};
  } else {
    double widest = -1;
    for (int hi = 1; hi <= levels; ++hi)
      for (int lo = 1; lo <= levels; ++lo) {
        const PairBox box = detail::pair_box(model, lo, hi);
        if (box.feasible && box.q_max - box.p_min > widest) {
          widest = box.q_max - box.p_min;
          start = {lo, hi};
        }
      }
  }

  std::optional<OptimizationResult> incumbent;
  if (start) {
    const PairBox box = detail::pair_box(model, start->first, start->second);
    incumbent = search.solve_pair(start->first, start->second, (box.p_min + box.p_max) / 2, (box.q_min + box.q_max) / 2);
    if (incumbent)
      out.trace.push_back({0, incumbent->i_star, incumbent->j_star, incumbent->gamma_i, incumbent->gamma_j, incumbent->objective, true});
  }

  std::mt19937_64 rng(settings.seed);
  int outer = 0;
  while (incumbent && out.budget_b > 0 && outer < levels * levels) {
    ++outer;
    const int i_star = incumbent->i_star, j_star = incumbent->j_star;
    std::vector<int> pool;
    for (int k = 1; k <= levels; ++k)
      if (k != i_star && k != j_star) pool.push_back(k);
    if (settings.candidates == CandidateMode::Nearest) {
      auto dist = [&](int k) { return std::min(std::abs(k - i_star), std::abs(k - j_star)); };
      std::stable_sort(pool.begin(), pool.end(), [&](int x, int y) { return dist(x) < dist(y) || (dist(x) == dist(y) && x < y); });
    } else {
      for (std::size_t n = pool.size(); n > 1; --n) std::swap(pool[n - 1], pool[static_cast<std::size_t>(rng() % n)]);
    }
    pool.resize(std::min(pool.size(), static_cast<std::size_t>(out.budget_b)));

    bool improved = false;
    for (int k : pool) {
      for (const auto& [a, b, wa, wb] : {std::tuple{k, j_star, incumbent->gamma_i, incumbent->gamma_j},
                                         std::tuple{i_star, k, incumbent->gamma_i, incumbent->gamma_j}}) {
        const auto cand = search.solve_pair(a, b, wa, wb);
        if (!cand) continue;
        const bool accept = detail::improves(cand->objective, incumbent->objective);
        out.trace.push_back({outer, cand->i_star, cand->j_star, cand->gamma_i, cand->gamma_j, cand->objective, accept});
        if (accept) {
          incumbent = cand;
          improved = true;
          break;
        }
      }
      if (improved) break;
    }
    if (!improved) break;
  }

  const auto single = detail::best_single(model, &out.trace);
  OptimizationResult best = detail::pick(incumbent, single, model);
  best.outer_iterations = outer;
  best.budget_b = out.budget_b;
  best.solver_iterations_total = out.solver_iterations_total;
  best.trace = std::move(out.trace);
  return best;
}

}  // namespace macc
