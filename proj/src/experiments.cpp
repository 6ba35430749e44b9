#include "macc/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

#include "macc/cost_model.hpp"
#include "macc/errors.hpp"

namespace macc {

using nlohmann::json;

namespace {

void only_keys(const json& section, const std::string& name, std::initializer_list<const char*> keys) {
  if (!section.is_object()) throw ConfigError("'" + name + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) == keys.end())
      throw ConfigError("unknown field '" + name + "." + key + "'");
  }
}

Rational rational_field(const json& v, const std::string& field) {
  try {
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number_float()) {
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof buf, v.get<double>(), std::chars_format::fixed);
      return parse_rational(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
    }
    if (v.is_string()) return parse_rational(v.get<std::string>());
  } catch (const InvalidArgument& e) {
    throw ConfigError("field '" + field + "': " + e.what());
  }
  throw ConfigError("field '" + field + "' must be a number or a string like \"3/2\"");
}

int int_field(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError("field '" + field + "' must be an integer");
  return v.get<int>();
}

double real_field(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError("field '" + field + "' must be a number");
  return v.get<double>();
}

bool bool_field(const json& v, const std::string& field) {
  if (!v.is_boolean()) throw ConfigError("field '" + field + "' must be true or false");
  return v.get<bool>();
}

std::string string_field(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError("field '" + field + "' must be a string");
  return v.get<std::string>();
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t n = 0; n < std::min(byte, text.size()); ++n) {
    if (text[n] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, std::optional<int> level) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError("syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
  only_keys(doc, "config", {"system", "sweep", "solver", "output"});
  if (!doc.contains("system")) throw ConfigError("missing section 'system'");

  ExperimentConfig cfg;
  const json& sys = doc["system"];
  only_keys(sys, "system", {"K", "N", "M", "L", "mu", "rho"});
  for (const char* key : {"K", "N", "M"})
    if (!sys.contains(key)) throw ConfigError(std::string("missing required field 'system.") + key + "'");
  SystemConfig& s = cfg.system;
  s.k = int_field(sys["K"], "system.K");
  s.n_files = int_field(sys["N"], "system.N");
  s.m = rational_field(sys["M"], "system.M");
  s.level = level ? *level : sys.contains("L") ? int_field(sys["L"], "system.L") : 1;
  s.rho = sys.contains("rho") ? rational_field(sys["rho"], "system.rho") : Rational(1);
  if (s.k < 1) throw ConfigError("field 'system.K' must be positive");
  if (s.n_files < 1) throw ConfigError("field 'system.N' must be positive");
  if (s.level < 1 || s.level > s.k) throw ConfigError("field 'system.L' must be in [1, K]");

  if (doc.contains("sweep")) {
    const json& sw = doc["sweep"];
    only_keys(sw, "sweep", {"L_min", "L_max"});
    if (sw.contains("L_min")) cfg.sweep_min = int_field(sw["L_min"], "sweep.L_min");
    if (sw.contains("L_max")) cfg.sweep_max = int_field(sw["L_max"], "sweep.L_max");
  }

  // "linear" and "zero" cover the sweep range too
  const int levels = std::max(s.level, cfg.sweep_max);
  const json mu = sys.contains("mu") ? sys["mu"] : json("zero");
  if (mu.is_string()) {
    const std::string form = mu.get<std::string>();
    if (form == "linear") {
      for (int l = 1; l <= levels; ++l) cfg.mu_table.emplace_back(l);
    } else if (form == "zero") {
      cfg.mu_table.assign(static_cast<std::size_t>(levels), Rational(0));
    } else {
      throw ConfigError("field 'system.mu' must be an array, \"linear\" or \"zero\"");
    }
  } else if (mu.is_array()) {
    for (std::size_t n = 0; n < mu.size(); ++n) cfg.mu_table.push_back(rational_field(mu[n], "system.mu[" + std::to_string(n) + "]"));
    if (static_cast<int>(cfg.mu_table.size()) < s.level)
      throw ConfigError("field 'system.mu' has " + std::to_string(cfg.mu_table.size()) + " entries, L = " + std::to_string(s.level));
  } else {
    throw ConfigError("field 'system.mu' must be an array, \"linear\" or \"zero\"");
  }

  s.mu.assign(cfg.mu_table.begin(), cfg.mu_table.begin() + s.level);

  if (doc.contains("solver")) {
    const json& so = doc["solver"];
    only_keys(so, "solver", {"budget", "tol", "max_iter", "seed", "grid_step", "candidates", "parallel"});
    SolverSettings& st = cfg.solver;
    if (so.contains("budget")) st.budget_b = int_field(so["budget"], "solver.budget");
    if (so.contains("tol")) st.tol = real_field(so["tol"], "solver.tol");
    if (so.contains("max_iter")) st.max_iter = int_field(so["max_iter"], "solver.max_iter");
    if (so.contains("seed")) {
      if (!so["seed"].is_number_unsigned()) throw ConfigError("field 'solver.seed' must be a nonnegative integer");
      st.seed = so["seed"].get<std::uint64_t>();
    }
    if (so.contains("grid_step")) st.grid_step = rational_field(so["grid_step"], "solver.grid_step");
    if (so.contains("candidates")) {
      const std::string mode = string_field(so["candidates"], "solver.candidates");
      if (mode == "nearest") st.candidates = CandidateMode::Nearest;
      else if (mode == "random") st.candidates = CandidateMode::Random;
      else throw ConfigError("field 'solver.candidates' must be \"nearest\" or \"random\"");
    }
    if (so.contains("parallel")) st.policy = bool_field(so["parallel"], "solver.parallel") ? ExecPolicy::Parallel : ExecPolicy::Serial;
    if (st.budget_b < 0) throw ConfigError("field 'solver.budget' must be nonnegative");
    if (!(st.tol > 0)) throw ConfigError("field 'solver.tol' must be positive");
    if (st.max_iter < 1) throw ConfigError("field 'solver.max_iter' must be positive");
    if (st.grid_step < 0) throw ConfigError("field 'solver.grid_step' must be positive");
  }

  if (doc.contains("output")) {
    const json& out = doc["output"];
    only_keys(out, "output", {"csv", "svg", "out", "trace", "oracle"});
    OutputSettings& o = cfg.output;
    if (out.contains("csv")) o.csv = string_field(out["csv"], "output.csv");
    if (out.contains("svg")) o.svg = string_field(out["svg"], "output.svg");
    if (out.contains("out")) o.out = string_field(out["out"], "output.out");
    if (out.contains("trace")) o.trace = bool_field(out["trace"], "output.trace");
    if (out.contains("oracle")) o.oracle = bool_field(out["oracle"], "output.oracle");
  }

  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("system: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, std::optional<int> level) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), level);
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, bool with_oracle) {
  const int lo = cfg.sweep_min;
  const int hi = cfg.sweep_max > 0 ? cfg.sweep_max : cfg.system.level;
  if (lo < 1 || hi < lo || hi > cfg.system.k) throw ConfigError("sweep range [" + std::to_string(lo) + ", " + std::to_string(hi) + "] must lie in [1, K]");
  if (static_cast<int>(cfg.mu_table.size()) < hi) throw ConfigError("system.mu needs at least " + std::to_string(hi) + " entries for the sweep");

  SystemConfig wide = cfg.system;
  wide.level = hi;
  wide.mu.assign(cfg.mu_table.begin(), cfg.mu_table.begin() + hi);
  std::vector<SweepRow> rows(static_cast<std::size_t>(hi - lo + 1));
  // rows are independent; the per-row solvers stay serial inside
  SolverSettings inner = cfg.solver;
  [[maybe_unused]] const bool parallel = inner.policy == ExecPolicy::Parallel;
  inner.policy = ExecPolicy::Serial;
#if defined(MACC_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int level = lo; level <= hi; ++level) {
    SweepRow& row = rows[static_cast<std::size_t>(level - lo)];
    row.level = level;
    try {
      const SystemConfig c = wide.with_level(level);
      c.validate();
      row.baseline = baseline_cost(c);
      row.has_baseline = true;
      const OptimizationResult r = greedy_search(c, inner);
      row.superposition = r.objective;
      row.i_star = r.i_star;
      row.j_star = r.j_star;
      row.gamma_i = r.gamma_i;
      row.gamma_j = r.gamma_j;
      row.alpha_i = r.alpha_i;
      row.alpha_j = r.alpha_j;
      const double base = to_double(row.baseline);
      row.gap = (base - row.superposition) / base;
      if (with_oracle) row.oracle = brute_force_oracle(c, inner).objective;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }
  return rows;
}

std::string format_decimal(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

namespace {

std::string csv_cell(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const SweepRow& r : rows) {
    out << r.level << ',';
    if (!r.has_baseline) {
      out << ",,,,,,,,,," << csv_cell(r.error) << '\n';
      continue;
    }
    out << format_decimal(to_double(r.baseline)) << ',';
    if (!r.error.empty()) {
      out << ",,,,,,,,," << csv_cell(r.error) << '\n';
      continue;
    }
    out << format_decimal(r.superposition) << ',' << r.i_star << ',';
    if (r.j_star != 0) out << r.j_star;
    out << ',' << format_decimal(r.gamma_i) << ',';
    if (r.j_star != 0) out << format_decimal(r.gamma_j);
    out << ',' << format_decimal(r.alpha_i) << ',';
    if (r.j_star != 0) out << format_decimal(r.alpha_j);
    out << ',';
    if (r.oracle) out << format_decimal(*r.oracle);
    out << ',' << format_decimal(r.gap) << ",\n";
  }
}

void write_svg(std::ostream& out, const std::vector<SweepRow>& rows) {
  const double w = 640, h = 400, left = 70, right = 20, top = 20, bottom = 50;
  std::vector<std::pair<double, double>> base, sup;
  for (const SweepRow& r : rows) {
    if (r.has_baseline) base.emplace_back(r.level, to_double(r.baseline));
    if (r.error.empty()) sup.emplace_back(r.level, r.superposition);
  }
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool any = false;
  for (const auto* series : {&base, &sup})
    for (auto [x, y] : *series) {
      if (!any) x0 = x1 = x, y0 = y1 = y, any = true;
      x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pad = (y1 - y0) * 0.05;
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (w - left - right); };
  auto py = [&](double y) { return h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom); };
  auto polyline = [&](const std::vector<std::pair<double, double>>& pts, const char* colour, const char* dash) {
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\"" << dash << " points=\"";
    for (std::size_t n = 0; n < pts.size(); ++n) out << (n ? " " : "") << format_decimal(px(pts[n].first)) << ',' << format_decimal(py(pts[n].second));
    out << "\"/>\n";
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom << "\" stroke=\"black\"/>\n";
  for (const SweepRow& r : rows) {
    const double x = px(r.level);
    out << "<line x1=\"" << format_decimal(x) << "\" y1=\"" << h - bottom << "\" x2=\"" << format_decimal(x) << "\" y2=\"" << h - bottom + 4
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << format_decimal(x) << "\" y=\"" << h - bottom + 17 << "\" text-anchor=\"middle\">" << r.level << "</text>\n";
  }
  for (int n = 0; n <= 4; ++n) {
    const double y = y0 + (y1 - y0) * n / 4;
    out << "<text x=\"" << left - 6 << "\" y=\"" << format_decimal(py(y) + 4) << "\" text-anchor=\"end\">" << format_decimal(std::round(y * 10) / 10) << "</text>\n";
  }
  out << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">access level L</text>\n";
  out << "<text x=\"16\" y=\"" << (top + h - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (top + h - bottom) / 2
      << ")\">total cost</text>\n";
  polyline(base, "#d62728", " stroke-dasharray=\"6 4\"");
  polyline(sup, "#1f77b4", "");
  out << "<g transform=\"translate(" << w - right - 170 << ',' << top + 10 << ")\">\n";
  out << "<line x1=\"0\" y1=\"0\" x2=\"24\" y2=\"0\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/>"
      << "<text x=\"30\" y=\"4\">baseline</text>\n";
  out << "<line x1=\"0\" y1=\"18\" x2=\"24\" y2=\"18\" stroke=\"#1f77b4\" stroke-width=\"2\"/>"
      << "<text x=\"30\" y=\"22\">superposition</text>\n";
  out << "</g>\n</svg>\n";
}

}  // namespace macc
