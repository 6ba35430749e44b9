// macc: construct, check, simulate and optimize cost-aware multiaccess
// coded caching schemes.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "macc/cost_model.hpp"
#include "macc/delivery.hpp"
#include "macc/errors.hpp"
#include "macc/experiments.hpp"
#include "macc/optimizer.hpp"
#include "macc/scheme.hpp"
#include "macc/serialize.hpp"

using namespace macc;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitResource = 3;

// Thrown for a failed validation or decode check after its report is printed.
struct ValidationFailed {};

std::string approx(const Rational& v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5g", to_double(v));
  return buf;
}

std::string exact(const Rational& v) { return is_integer(v) ? to_string(v) : to_string(v) + " ≈ " + approx(v); }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

LevelParams params_from_flags(int kprime, int t, int level) { return LevelParams(kprime, t, level); }

// --- construct ---------------------------------------------------------------

struct ConstructArgs {
  int kprime = 0, t = 0, level = 0;
  std::string out;
};

int cmd_construct(const ConstructArgs& a) {
  const LevelParams p = params_from_flags(a.kprime, a.t, a.level);
  std::cout << "K'=" << p.k_prime() << " t=" << p.t() << " L=" << p.level() << " K=" << p.k() << '\n';
  std::cout << "F=" << p.f() << " S=" << p.s() << " load=" << to_string(p.load()) << '\n';
  if (p.s() == 0) std::cout << "note: S=0 since K'=t, every packet is reachable locally and nothing is broadcast\n";
  const SchemeArrays arrays = build_arrays(p);
  if (a.out.empty()) {
    write_arrays(std::cout, arrays);
  } else {
    write_file(a.out, write_arrays(arrays));
    std::cout << "arrays written to " << a.out << '\n';
  }
  return 0;
}

// --- validate ----------------------------------------------------------------

struct ValidateArgs {
  int kprime = 0, t = 0, level = 0;
  std::string in;
};

int cmd_validate(const ValidateArgs& a) {
  auto obtain = [&]() {
    if (!a.in.empty()) {
      std::ifstream in(a.in);
      if (!in) throw ConfigError("cannot open '" + a.in + "'");
      return read_arrays(in);
    }
    if (a.kprime == 0) throw ConfigError("validate needs --in or --kprime/--t/--L");
    return build_arrays(params_from_flags(a.kprime, a.t, a.level));
  };
  const SchemeArrays arrays = obtain();
  const PdaReport r = validate_pda(arrays.delivery, arrays.params);
  const bool shift = check_shift_structure(arrays);
  auto line = [](const char* name, bool ok) { std::cout << name << ": " << (ok ? "ok" : "FAILED") << '\n'; };
  std::cout << header_line(arrays.params) << '\n';
  line("C1", r.c1);
  line("C2", r.c2);
  line("multiplicity t+1", r.multiplicity);
  line("label count", r.label_count);
  line("canonical subarrays", r.canonical);
  line("cyclic shift structure", shift);
  std::cout << "distinct labels: " << r.distinct_labels << '\n';
  if (!r.witness.empty()) std::cout << "witness: " << r.witness << '\n';
  if (!r.ok() || !shift) throw ValidationFailed{};
  return 0;
}

// --- simulate ----------------------------------------------------------------

struct ConfigArgs {
  std::string config;
  std::optional<int> level;
  std::optional<std::uint64_t> seed;
  bool oracle = false, trace = false;
  std::string csv, svg, demands;
};

ExperimentConfig load(const ConfigArgs& a) {
  ExperimentConfig cfg = load_config(a.config, a.level);
  if (a.seed) cfg.solver.seed = *a.seed;
  if (a.oracle) cfg.output.oracle = true;
  if (a.trace) cfg.output.trace = true;
  if (!a.csv.empty()) cfg.output.csv = a.csv;
  if (!a.svg.empty()) cfg.output.svg = a.svg;
  return cfg;
}

DemandVector parse_demands(const std::string& text, const SystemConfig& c) {
  DemandVector d;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      d.d.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("--demands: '" + item + "' is not an integer");
    }
  }
  if (static_cast<int>(d.d.size()) != c.k) throw ConfigError("--demands needs K=" + std::to_string(c.k) + " entries, got " + std::to_string(d.d.size()));
  for (int f : d.d)
    if (f < 1 || f > c.n_files) throw ConfigError("--demands: file " + std::to_string(f) + " outside [1, " + std::to_string(c.n_files) + "]");
  return d;
}

int cmd_simulate(const ConfigArgs& a) {
  const ExperimentConfig cfg = load(a);
  const SystemConfig& c = cfg.system;
  const Rational gamma = c.memory_ratio();
  const Rational t = gamma * c.k;
  if (!is_integer(t)) {
    const Rational lo = floor_div(t, 1), hi = lo + 1;
    std::string hint = "M/N = " + to_string(gamma) + " is not on the grid {t/K}, K=" + std::to_string(c.k) + "; nearest realizable memories are ";
    if (lo >= 1) hint += "M = " + to_string(lo * c.n_files / c.k) + " and ";
    hint += "M = " + to_string(hi * c.n_files / c.k) + ". Use 'optimize' for a memory-shared design on the grid.";
    throw ConfigError(hint);
  }
  const LevelParams p = LevelParams::from_ratio(c.k, c.level, gamma);
  std::cout << "K=" << c.k << " N=" << c.n_files << " M=" << to_string(c.m) << " L=" << c.level << " gamma=" << to_string(gamma) << " (K'="
            << p.k_prime() << " t=" << p.t() << ")\n";

  const bool custom = !a.demands.empty();
  const DemandVector demand = custom ? parse_demands(a.demands, c) : worst_case_demand(c.k, c.n_files);
  const bool dense = p.f() <= max_subpacketization() && p.f() * static_cast<std::uint64_t>(p.k()) <= max_dense_cells();
  CostBreakdown b;
  std::vector<Fetch> trace;
  if (dense) {
    SimulationOptions opt;
    opt.policy = cfg.solver.policy;
    if (cfg.output.trace) opt.trace = &trace;
    const SchemeArrays arrays = build_arrays(p);
    b = simulate(arrays, c, demand, opt);
    for (const Fetch& f : trace) std::cout << format_fetch(f, arrays) << '\n';
  } else {
    if (custom || cfg.output.trace)
      throw ResourceLimit("F=" + std::to_string(p.f()) + " is above the dense-array guard; only the worst-case demand without --trace is supported here");
    std::cout << "note: F=" << p.f() << " above the dense-array guard, using the shift-orbit simulator\n";
    b = simulate_orbit(p, c, cfg.solver.policy);
  }
  std::cout << "F=" << b.f << " S=" << p.s() << " S_d=" << b.broadcast_packets << (b.repeated_demands ? " (repeated demands)" : "") << '\n';
  std::cout << "R_b  = " << exact(b.broadcast_cost) << '\n';
  std::cout << "R_c1 = " << exact(b.direct_cost) << '\n';
  std::cout << "R_c2 = " << exact(b.decode_cost) << '\n';
  std::cout << "total = " << exact(b.total_cost) << '\n';
  const auto delta = b.access_packets_per_level();
  std::cout << "Delta per level:";
  for (std::size_t l = 0; l < delta.size(); ++l) std::cout << ' ' << l + 1 << ':' << delta[l];
  std::cout << '\n';
  return 0;
}

// --- cost --------------------------------------------------------------------

int cmd_cost(const ConfigArgs& a) {
  const ExperimentConfig cfg = load(a);
  const SystemConfig& c = cfg.system;
  const Rational gamma = c.memory_ratio();
  std::cout << "gamma = M/N = " << to_string(gamma) << '\n';
  std::cout << "level  R_b  R_c1  R_c2  total (single level at gamma)\n";
  for (int l = 1; l <= c.level; ++l) {
    if (gamma > gamma_upper(l, c)) {
      std::cout << l << "  . . . .  (gamma above floor(K/" << l << ")/K)\n";
      continue;
    }
    const LevelCost lc = level_cost(l, gamma, c);
    std::cout << l << "  " << to_string(lc.r_b) << "  " << to_string(lc.r_c1) << "  " << to_string(lc.r_c2) << "  " << exact(lc.total) << '\n';
  }
  std::cout << "baseline (level L) = " << exact(baseline_cost(c)) << '\n';
  return 0;
}

// --- optimize ----------------------------------------------------------------

void print_result(const char* name, const OptimizationResult& r) {
  std::cout << name << ": ";
  if (r.j_star == 0) {
    std::cout << "single level " << r.i_star << " gamma=" << format_decimal(r.gamma_i);
  } else {
    std::cout << "levels (" << r.i_star << ", " << r.j_star << ") gamma=(" << format_decimal(r.gamma_i) << ", " << format_decimal(r.gamma_j)
              << ") alpha=(" << format_decimal(r.alpha_i) << ", " << format_decimal(r.alpha_j) << ")";
  }
  std::cout << " objective=" << format_decimal(r.objective) << '\n';
}

int cmd_optimize(const ConfigArgs& a) {
  const ExperimentConfig cfg = load(a);
  const SystemConfig& c = cfg.system;
  const Rational base = baseline_cost(c);
  std::cout << "baseline = " << exact(base) << '\n';
  const OptimizationResult r = greedy_search(c, cfg.solver);
  print_result("greedy", r);
  std::cout << "outer iterations I=" << r.outer_iterations << " budget B=" << r.budget_b << " solver iterations T=" << r.solver_iterations_total << '\n';
  if (cfg.output.trace) {
    for (const TraceRecord& t : r.trace) {
      std::cout << "trace outer=" << t.outer << " i=" << t.i << " j=" << t.j << " gamma=(" << format_decimal(t.gamma_i) << ", " << format_decimal(t.gamma_j)
                << ") objective=" << format_decimal(t.objective) << (t.accepted ? " accepted" : "") << '\n';
    }
  }
  if (cfg.output.oracle) {
    const OptimizationResult o = brute_force_oracle(c, cfg.solver);
    print_result("oracle", o);
    std::cout << "gap = " << format_decimal((r.objective - o.objective) / std::max(1.0, std::abs(o.objective))) << '\n';
  }
  try {
    const QuantizedDesign q = quantize_design(r, c);
    std::cout << "quantized:";
    for (const auto& s : q.design.supports) std::cout << " (level " << s.level << ", alpha " << to_string(s.alpha) << ", gamma " << to_string(s.gamma) << ")";
    std::cout << "\nquantized cost = " << exact(q.design.objective) << " delta = " << format_decimal(q.delta) << '\n';
  } catch (const Infeasible& e) {
    std::cout << "quantized: none (" << e.what() << ")\n";
  }
  return 0;
}

// --- sweep -------------------------------------------------------------------

int cmd_sweep(const ConfigArgs& a) {
  const ExperimentConfig cfg = load(a);
  const std::vector<SweepRow> rows = run_sweep(cfg, cfg.output.oracle);
  std::ostringstream csv;
  write_csv(csv, rows);
  if (cfg.output.csv.empty()) {
    std::cout << csv.str();
  } else {
    write_file(cfg.output.csv, csv.str());
    std::cout << "csv written to " << cfg.output.csv << '\n';
  }
  if (!cfg.output.svg.empty()) {
    std::ostringstream svg;
    write_svg(svg, rows);
    write_file(cfg.output.svg, svg.str());
    std::cout << "svg written to " << cfg.output.svg << '\n';
  }
  int failed = 0;
  for (const SweepRow& r : rows) failed += !r.error.empty();
  if (failed) std::cerr << failed << " of " << rows.size() << " rows failed, see the error column\n";
  return 0;
}

void config_flags(CLI::App* sub, ConfigArgs& a) {
  sub->add_option("--config", a.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--L", a.level, "override system.L");
  sub->add_option("--seed", a.seed, "override solver.seed");
  sub->add_flag("--trace", a.trace, "print fetch log or solver trace");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost-aware multiaccess coded caching"};
  app.require_subcommand(1);

  ConstructArgs construct;
  auto* c = app.add_subcommand("construct", "build the placement and delivery arrays");
  c->add_option("--kprime", construct.kprime, "K'")->required();
  c->add_option("--t", construct.t, "t")->required();
  c->add_option("--L", construct.level, "access level")->required();
  c->add_option("--out", construct.out, "write the arrays here instead of stdout");

  ValidateArgs validate;
  auto* v = app.add_subcommand("validate", "check PDA conditions and shift structure");
  v->add_option("--in", validate.in, "arrays file written by construct");
  v->add_option("--kprime", validate.kprime, "K'");
  v->add_option("--t", validate.t, "t");
  v->add_option("--L", validate.level, "access level");

  ConfigArgs sim, cost, opt, sweep;
  auto* s = app.add_subcommand("simulate", "run the delivery and count costs");
  config_flags(s, sim);
  s->add_option("--demands", sim.demands, "comma-separated file index per user (default: distinct files)");
  auto* co = app.add_subcommand("cost", "closed-form per-level costs");
  config_flags(co, cost);
  auto* o = app.add_subcommand("optimize", "greedy superposition search");
  config_flags(o, opt);
  o->add_flag("--oracle", opt.oracle, "compare with the brute-force oracle");
  auto* sw = app.add_subcommand("sweep", "sweep the access level");
  config_flags(sw, sweep);
  sw->add_flag("--oracle", sweep.oracle, "add the oracle column");
  sw->add_option("--csv", sweep.csv, "CSV output path");
  sw->add_option("--svg", sweep.svg, "SVG plot path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*c) return cmd_construct(construct);
    if (*v) return cmd_validate(validate);
    if (*s) return cmd_simulate(sim);
    if (*co) return cmd_cost(cost);
    if (*o) return cmd_optimize(opt);
    if (*sw) return cmd_sweep(sweep);
  } catch (const ValidationFailed&) {
    return kExitInvalid;
  } catch (const DecodeFailure& e) {
    std::cerr << "decode failure: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ResourceLimit& e) {
    std::cerr << "resource guard: " << e.what() << '\n';
    return kExitResource;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
