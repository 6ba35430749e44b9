#pragma once

// Experiment configuration files, the level sweep and its CSV/SVG output.
//
// Config schema (JSON), every key optional unless noted:
//
//   system: K (required), N (required), M (required), L = 1,
//           mu = [..L values..] | "linear" (mu_l = l) | "zero" (default),
//           rho = 1
//   sweep:  L_min = 2, L_max = system.L
//   solver: budget = 0 (auto), tol = 1e-9, max_iter = 200, seed = 1,
//           grid_step = 1/K, candidates = "nearest" | "random",
//           parallel = true
//   output: csv, svg, out (paths), trace = false, oracle = false
//
// Rational fields accept JSON numbers or strings such as "3/2" or "0.25".

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "macc/optimizer.hpp"
#include "macc/system.hpp"

namespace macc {

struct OutputSettings {
  std::string csv;
  std::string svg;
  std::string out;
  bool trace = false;
  bool oracle = false;
};

struct ExperimentConfig {
  SystemConfig system;               // mu holds the first L costs
  std::vector<Rational> mu_table;    // every configured access cost
  int sweep_min = 2;
  int sweep_max = 0;  // 0 means system.level
  SolverSettings solver;
  OutputSettings output;
};

/// Throws ConfigError naming the line/column (syntax) or the field (schema).
/// `level` replaces system.L before mu is expanded.
ExperimentConfig parse_config(const std::string& text, std::optional<int> level = std::nullopt);
ExperimentConfig load_config(const std::string& path, std::optional<int> level = std::nullopt);

struct SweepRow {
  int level = 0;
  Rational baseline;
  bool has_baseline = false;
  double superposition = 0;
  int i_star = 0;
  int j_star = 0;
  double gamma_i = 0;
  double gamma_j = 0;
  double alpha_i = 0;
  double alpha_j = 0;
  std::optional<double> oracle;
  double gap = 0;  // (baseline - superposition) / baseline
  std::string error;
};

/// One row per L in [sweep_min, sweep_max]; rows run in parallel but come
/// back in L order. A failing L fills `error` and the sweep continues.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, bool with_oracle);

constexpr const char* kSweepHeader = "L,baseline,superposition,i,j,gamma_i,gamma_j,alpha_i,alpha_j,oracle,gap,error";

/// 12 significant digits, empty cells for absent values.
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
/// Baseline and superposition against L as two polylines.
void write_svg(std::ostream& out, const std::vector<SweepRow>& rows);

/// "%.12g"
std::string format_decimal(double value);

}  // namespace macc
