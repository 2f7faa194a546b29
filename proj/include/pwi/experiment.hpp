#pragma once

// Experiment orchestration: INI-style configuration, alpha sweeps, window
// studies, rate fitting, and CSV / JSON emission.

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pwi/detail/format.hpp"
#include "pwi/errors.hpp"
#include "pwi/interp.hpp"
#include "pwi/nodes.hpp"
#include "pwi/spaces.hpp"
#include "pwi/spectral.hpp"

namespace pwi {

inline constexpr const char* kVersion = "1.0.0";

struct ExperimentConfig {
  // [domain]
  double delta = kPi;
  // [band]
  double beta = 0.25;
  std::string profile = "jinc";  ///< jinc | radial-polynomial
  double c0 = 1.0;
  double c1 = 0.0;
  // [nodes]
  std::string node_kind = "lattice";  ///< lattice | perturbed
  int window = 8;
  double L = 0.0;
  std::uint64_t seed = 0;
  bool allow_relaxed = false;
  // [kernel]
  std::string kernel = "poisson";  ///< poisson | generalized
  double omega = 1.0;
  // [sweep]
  std::vector<double> alphas{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  /// Rows with alpha below this are excluded from the slope fit; NaN means A_delta.
  double fit_alpha_min = std::numeric_limits<double>::quiet_NaN();
  std::vector<int> windows{2, 4, 6};
  double study_alpha = 1.0;
  // [grid]
  GridSpec grid;
  // [tolerances]
  double rel_tol = 1e-10;
  double residual_tol = 1e-12;
  int quadrature_order = 16;
  int max_level = 7;
  // [output]
  std::string csv = "sweep.csv";
  std::string json = "summary.json";

  double effective_fit_alpha_min() const { return std::isnan(fit_alpha_min) ? a_delta(delta) : fit_alpha_min; }
  bool recovery_hypothesis() const { return recovery_hypothesis_holds(beta, delta); }
  double bound_slope() const { return beta + delta * (std::sqrt(8.0) - 3.0); }
  SpectralOptions spectral_options() const {
    SpectralOptions o;
    o.rel_tol = rel_tol;
    o.order = quadrature_order;
    o.max_level = max_level;
    return o;
  }
};

namespace detail {

struct ConfigKey {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
  int column = 0;  ///< column of the value
};

inline std::string located(int line, int column, const std::string& msg) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg;
}

inline std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

inline std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s;
}

inline std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s;
}

}  // namespace detail

/// Checks every semantic constraint and returns the violated ones (empty when valid).
inline std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> errs;
  auto need = [&](bool ok, std::string msg) {
    if (!ok) errs.push_back(std::move(msg));
  };
  need(c.delta > 0.0, "domain.delta must be > 0");
  need(c.beta > 0.0, "band.beta must be > 0");
  need(!(c.beta > 0.0 && c.delta > 0.0) || c.beta < c.delta, "band.beta must be < domain.delta");
  need(c.profile == "jinc" || c.profile == "radial-polynomial", "band.profile must be jinc or radial-polynomial");
  if (c.profile == "radial-polynomial") need(c.c0 != 0.0 || c.c1 != 0.0, "band.c0 and band.c1 must not both be 0");
  need(c.node_kind == "lattice" || c.node_kind == "perturbed", "nodes.kind must be lattice or perturbed");
  need(c.window >= 0, "nodes.window must be >= 0");
  if (c.node_kind == "perturbed") {
    need(c.L >= 0.0, "nodes.L must be >= 0");
    if (c.allow_relaxed)
      need(c.L <= kRelaxedPerturbationBound, "nodes.L must be <= 1/20 even with allow_relaxed");
    else
      need(c.L < kadec_bound(2), "nodes.L must be < " + detail::format_double(kadec_bound(2)) +
                                     " (set allow_relaxed = true to admit L <= 1/20)");
  }
  need(c.kernel == "poisson" || c.kernel == "generalized", "kernel.type must be poisson or generalized");
  if (c.kernel == "generalized") need(c.omega > 0.0 && c.omega <= 2.0, "kernel.omega must lie in (0, 2]");
  need(!c.alphas.empty(), "sweep.alphas must not be empty");
  for (std::size_t i = 0; i < c.alphas.size(); ++i) {
    if (!(c.alphas[i] > 0.0)) {
      errs.push_back("sweep.alphas must all be > 0");
      break;
    }
  }
  for (std::size_t i = 1; i < c.alphas.size(); ++i) {
    if (!(c.alphas[i] > c.alphas[i - 1])) {
      errs.push_back("sweep.alphas must be strictly ascending");
      break;
    }
  }
  need(std::isnan(c.fit_alpha_min) || c.fit_alpha_min >= 0.0, "sweep.fit_alpha_min must be >= 0");
  need(!c.windows.empty(), "sweep.windows must not be empty");
  for (std::size_t i = 0; i < c.windows.size(); ++i) {
    if (c.windows[i] < 0 || (i > 0 && c.windows[i] <= c.windows[i - 1])) {
      errs.push_back("sweep.windows must be nonnegative and strictly ascending");
      break;
    }
  }
  need(c.study_alpha > 0.0, "sweep.study_alpha must be > 0");
  need(c.grid.extent >= 0.0, "grid.extent must be >= 0");
  need(c.grid.points >= 1, "grid.points must be >= 1");
  need(c.rel_tol > 0.0 && c.rel_tol < 1.0, "tolerances.rel_tol must lie in (0, 1)");
  need(c.residual_tol > 0.0 && c.residual_tol < 1.0, "tolerances.residual must lie in (0, 1)");
  need(c.quadrature_order >= 2 && c.quadrature_order <= 64, "tolerances.quadrature_order must lie in [2, 64]");
  need(c.max_level >= 0 && c.max_level <= 12, "tolerances.max_level must lie in [0, 12]");
  need(!c.csv.empty(), "output.csv must not be empty");
  need(!c.json.empty(), "output.json must not be empty");
  return errs;
}

/// Parses `[section]` / `key = value` text. `#` and `;` start comments. Unknown sections or keys,
/// malformed numbers and duplicate keys are reported with line and column; semantic violations
/// are listed together. A beta above the recovery threshold is accepted with a warning.
inline ExperimentConfig parse_config(std::string_view text) {
  using detail::located;
  std::vector<std::string> errs;
  std::vector<detail::ConfigKey> entries;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto cut = raw.find_first_of("#;");
    std::string_view line = raw.substr(0, cut);
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const int indent = static_cast<int>(line.find_first_not_of(" \t")) + 1;
    if (body.front() == '[') {
      if (body.back() != ']') {
        errs.push_back(located(line_no, indent, "unterminated section header"));
        continue;
      }
      section = std::string(detail::trim(body.substr(1, body.size() - 2)));
      static const std::vector<std::string> known{"domain", "band", "nodes", "kernel", "sweep", "grid", "tolerances",
                                                  "output"};
      if (std::find(known.begin(), known.end(), section) == known.end())
        errs.push_back(located(line_no, indent + 1, "unknown section [" + section + "]"));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errs.push_back(located(line_no, indent, "expected key = value"));
      continue;
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key.empty()) {
      errs.push_back(located(line_no, indent, "missing key before '='"));
      continue;
    }
    if (section.empty()) {
      errs.push_back(located(line_no, indent, "key '" + std::string(key) + "' appears before any [section]"));
      continue;
    }
    const auto vstart = line.find_first_not_of(" \t", eq + 1);
    const int vcol = static_cast<int>(vstart == std::string_view::npos ? eq + 2 : vstart + 1);
    entries.push_back({section, std::string(key), std::string(value), line_no, vcol});
  }

  ExperimentConfig c;
  std::map<std::string, int> seen;
  auto number = [&](const detail::ConfigKey& e, double& out) {
    const auto v = detail::parse_double(e.value);
    if (!v || !std::isfinite(*v))
      errs.push_back(located(e.line, e.column, e.section + "." + e.key + ": expected a decimal number, got '" +
                                                   e.value + "'"));
    else
      out = *v;
  };
  auto integer = [&](const detail::ConfigKey& e, int& out) {
    const auto v = detail::parse_int<int>(e.value);
    if (!v)
      errs.push_back(located(e.line, e.column, e.section + "." + e.key + ": expected an integer, got '" + e.value + "'"));
    else
      out = *v;
  };
  auto boolean = [&](const detail::ConfigKey& e, bool& out) {
    if (e.value == "true") out = true;
    else if (e.value == "false") out = false;
    else errs.push_back(located(e.line, e.column, e.section + "." + e.key + ": expected true or false"));
  };
  auto text_value = [&](const detail::ConfigKey& e, std::string& out) {
    if (e.value.empty())
      errs.push_back(located(e.line, e.column, e.section + "." + e.key + ": empty value"));
    else
      out = e.value;
  };
  auto doubles = [&](const detail::ConfigKey& e, std::vector<double>& out) {
    out.clear();
    for (auto item : detail::split_list(e.value)) {
      const auto v = detail::parse_double(item);
      if (!v || !std::isfinite(*v)) {
        errs.push_back(located(e.line, e.column, e.section + "." + e.key + ": bad list entry '" + std::string(item) + "'"));
        return;
      }
      out.push_back(*v);
    }
  };
  auto ints = [&](const detail::ConfigKey& e, std::vector<int>& out) {
    out.clear();
    for (auto item : detail::split_list(e.value)) {
      const auto v = detail::parse_int<int>(item);
      if (!v) {
        errs.push_back(located(e.line, e.column, e.section + "." + e.key + ": bad list entry '" + std::string(item) + "'"));
        return;
      }
      out.push_back(*v);
    }
  };

  for (const auto& e : entries) {
    const std::string full = e.section + "." + e.key;
    if (seen.count(full)) {
      errs.push_back(located(e.line, 1, "duplicate key " + full + " (first set on line " + std::to_string(seen[full]) + ")"));
      continue;
    }
    seen[full] = e.line;
    if (full == "domain.delta") number(e, c.delta);
    else if (full == "band.beta") number(e, c.beta);
    else if (full == "band.profile") text_value(e, c.profile);
    else if (full == "band.c0") number(e, c.c0);
    else if (full == "band.c1") number(e, c.c1);
    else if (full == "nodes.kind") text_value(e, c.node_kind);
    else if (full == "nodes.window") integer(e, c.window);
    else if (full == "nodes.L") number(e, c.L);
    else if (full == "nodes.seed") {
      const auto v = detail::parse_int<std::uint64_t>(e.value);
      if (!v) errs.push_back(located(e.line, e.column, "nodes.seed: expected a nonnegative integer"));
      else c.seed = *v;
    } else if (full == "nodes.allow_relaxed") boolean(e, c.allow_relaxed);
    else if (full == "kernel.type") text_value(e, c.kernel);
    else if (full == "kernel.omega") number(e, c.omega);
    else if (full == "sweep.alphas") doubles(e, c.alphas);
    else if (full == "sweep.fit_alpha_min") number(e, c.fit_alpha_min);
    else if (full == "sweep.windows") ints(e, c.windows);
    else if (full == "sweep.study_alpha") number(e, c.study_alpha);
    else if (full == "grid.extent") number(e, c.grid.extent);
    else if (full == "grid.points") integer(e, c.grid.points);
    else if (full == "tolerances.rel_tol") number(e, c.rel_tol);
    else if (full == "tolerances.residual") number(e, c.residual_tol);
    else if (full == "tolerances.quadrature_order") integer(e, c.quadrature_order);
    else if (full == "tolerances.max_level") integer(e, c.max_level);
    else if (full == "output.csv") text_value(e, c.csv);
    else if (full == "output.json") text_value(e, c.json);
    else {
      const auto known_section = e.section == "domain" || e.section == "band" || e.section == "nodes" ||
                                 e.section == "kernel" || e.section == "sweep" || e.section == "grid" ||
                                 e.section == "tolerances" || e.section == "output";
      if (known_section) errs.push_back(located(e.line, 1, "unknown key '" + e.key + "' in [" + e.section + "]"));
    }
  }
  if (!errs.empty()) {
    std::string msg = "configuration parse failed:";
    for (const auto& s : errs) msg += "\n  " + s;
    throw ConfigError(msg);
  }
  const auto violations = validate(c);
  if (!violations.empty()) {
    std::string msg = "configuration is invalid:";
    for (const auto& s : violations) msg += "\n  " + s;
    throw ConfigError(msg);
  }
  if (!c.recovery_hypothesis())
    warn("band.beta = " + detail::format_double(c.beta) + " is not below (3 - sqrt 8) delta = " +
         detail::format_double(recovery_threshold(c.delta)) +
         "; the error-decay hypothesis fails (interpolation itself remains well-posed)");
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Normalized INI echo with every default filled in; parse_config(config_text(c)) reproduces c.
inline std::string config_text(const ExperimentConfig& c) {
  using detail::format_double;
  std::ostringstream o;
  o << "[domain]\ndelta = " << format_double(c.delta) << "\n\n";
  o << "[band]\nbeta = " << format_double(c.beta) << "\nprofile = " << c.profile << "\nc0 = " << format_double(c.c0)
    << "\nc1 = " << format_double(c.c1) << "\n\n";
  o << "[nodes]\nkind = " << c.node_kind << "\nwindow = " << c.window << "\nL = " << format_double(c.L)
    << "\nseed = " << c.seed << "\nallow_relaxed = " << (c.allow_relaxed ? "true" : "false") << "\n\n";
  o << "[kernel]\ntype = " << c.kernel << "\nomega = " << format_double(c.omega) << "\n\n";
  o << "[sweep]\nalphas = " << detail::join_doubles(c.alphas)
    << "\nfit_alpha_min = " << format_double(c.effective_fit_alpha_min()) << "\nwindows = " << detail::join_ints(c.windows)
    << "\nstudy_alpha = " << format_double(c.study_alpha) << "\n\n";
  o << "[grid]\nextent = " << format_double(c.grid.extent) << "\npoints = " << c.grid.points << "\n\n";
  o << "[tolerances]\nrel_tol = " << format_double(c.rel_tol) << "\nresidual = " << format_double(c.residual_tol)
    << "\nquadrature_order = " << c.quadrature_order << "\nmax_level = " << c.max_level << "\n\n";
  o << "[output]\ncsv = " << c.csv << "\njson = " << c.json << "\n";
  return o.str();
}

inline nlohmann::ordered_json config_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["domain"] = {{"delta", c.delta}};
  j["band"] = {{"beta", c.beta}, {"profile", c.profile}, {"c0", c.c0}, {"c1", c.c1}};
  j["nodes"] = {{"kind", c.node_kind}, {"window", c.window}, {"L", c.L}, {"seed", c.seed},
                {"allow_relaxed", c.allow_relaxed}};
  j["kernel"] = {{"type", c.kernel}, {"omega", c.omega}};
  j["sweep"] = {{"alphas", c.alphas},
                {"fit_alpha_min", c.effective_fit_alpha_min()},
                {"windows", c.windows},
                {"study_alpha", c.study_alpha}};
  j["grid"] = {{"extent", c.grid.extent}, {"points", c.grid.points}};
  j["tolerances"] = {{"rel_tol", c.rel_tol},
                     {"residual", c.residual_tol},
                     {"quadrature_order", c.quadrature_order},
                     {"max_level", c.max_level}};
  j["output"] = {{"csv", c.csv}, {"json", c.json}};
  j["derived"] = {{"recovery_threshold", recovery_threshold(c.delta)},
                  {"recovery_hypothesis", c.recovery_hypothesis()},
                  {"a_delta", a_delta(c.delta)},
                  {"kadec_bound", kadec_bound(2)}};
  return j;
}

// ---------------------------------------------------------------------------
// Presets

/// delta = pi, jinc with beta = 0.25, exact lattice W = 8, alpha in {0.5, ..., 3}.
inline ExperimentConfig acceptance_preset() { return ExperimentConfig{}; }

/// delta = pi, beta = pi / 6, perturbed nodes with L = 0.04 under the 1/20 relaxation.
inline ExperimentConfig example3_preset() {
  ExperimentConfig c;
  c.beta = kPi / 6.0;
  c.node_kind = "perturbed";
  c.L = 0.04;
  c.seed = 3;
  c.allow_relaxed = true;
  c.alphas = {0.5, 1.0, 1.5, 2.0};
  return c;
}

// ---------------------------------------------------------------------------
// Builders

inline BandlimitedFunction make_function(const ExperimentConfig& c) {
  if (c.profile == "jinc") return BandlimitedFunction::jinc(c.beta);
  return BandlimitedFunction::radial_polynomial(c.beta, c.c0, c.c1);
}

inline NodeSet make_nodes(const ExperimentConfig& c, int window) {
  if (c.node_kind == "lattice") return generate_lattice(c.delta, window);
  return generate_perturbed(c.delta, window, c.L, c.seed, PerturbationPolicy{c.allow_relaxed});
}
inline NodeSet make_nodes(const ExperimentConfig& c) { return make_nodes(c, c.window); }

inline Kernel make_kernel(const ExperimentConfig& c, double alpha) {
  if (c.kernel == "poisson") return PoissonKernel(alpha);
  return GeneralizedKernel(alpha, c.omega);
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  double alpha = 0.0;
  double l2_total = std::numeric_limits<double>::quiet_NaN();
  double l2_in_band = std::numeric_limits<double>::quiet_NaN();
  double l2_tail = std::numeric_limits<double>::quiet_NaN();
  double sup_error = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  double cond_est = std::numeric_limits<double>::quiet_NaN();
  double quadrature_error = std::numeric_limits<double>::quiet_NaN();
  int truncation_M = 0;
  std::string method;
  bool ok = false;
  std::string message;
  /// l2_total did not decrease versus the previous successful row.
  bool floor = false;
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<SweepRow> rows;
  std::optional<double> fitted_slope;  ///< empty when fewer than 2 rows qualify
  int fit_rows = 0;
  double bound_slope = 0.0;
  bool recovery_hypothesis = false;
  std::size_t node_count = 0;
};

/// Least-squares slope of ln(value) against alpha over rows with alpha >= alpha_min,
/// a successful solve and a positive value.
inline std::optional<double> fit_log_slope(const std::vector<SweepRow>& rows, double alpha_min, int* used = nullptr) {
  std::vector<double> x, y;
  for (const auto& r : rows)
    if (r.ok && r.alpha >= alpha_min && r.l2_total > 0.0 && std::isfinite(r.l2_total)) {
      x.push_back(r.alpha);
      y.push_back(std::log(r.l2_total));
    }
  if (used) *used = static_cast<int>(x.size());
  if (x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

namespace detail {

inline SweepRow measure_row(const ExperimentConfig& c, const BandlimitedFunction& f, const NodeSet& nodes,
                            const std::vector<double>& samples, double alpha) {
  SweepRow row;
  row.alpha = alpha;
  try {
    SolveOptions so;
    so.residual_tol = c.residual_tol;
    const auto interp = solve(assemble(nodes, make_kernel(c, alpha)), samples, so);
    row.residual = interp.report().relative_residual;
    row.cond_est = interp.report().condition_estimate;
    row.method = interp.report().method;
    const auto e = error_l2(f, interp, c.spectral_options());
    row.l2_total = e.l2_total;
    row.l2_in_band = e.l2_in_band;
    row.l2_tail = e.l2_tail;
    row.quadrature_error = e.quadrature_error_estimate;
    row.truncation_M = e.truncation_M;
    row.sup_error = error_sup(f, interp, c.grid);
    row.ok = true;
  } catch (const std::exception& ex) {
    row.ok = false;
    row.message = ex.what();
  }
  return row;
}

inline void flag_floors(std::vector<SweepRow>& rows) {
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (auto& r : rows) {
    if (!r.ok) continue;
    r.floor = !std::isnan(prev) && !(r.l2_total < prev);
    prev = r.l2_total;
  }
}

}  // namespace detail

/// One solve and error measurement per alpha; failed alphas are recorded and the sweep continues.
inline SweepResult run_sweep(const ExperimentConfig& c) {
  if (const auto v = validate(c); !v.empty()) throw ConfigError("run_sweep: invalid configuration: " + v.front());
  SweepResult out;
  out.config = c;
  out.bound_slope = c.bound_slope();
  out.recovery_hypothesis = c.recovery_hypothesis();
  const auto f = make_function(c);
  const auto nodes = make_nodes(c);
  out.node_count = nodes.size();
  const auto samples = samples_on(f, nodes);
  for (double alpha : c.alphas) out.rows.push_back(detail::measure_row(c, f, nodes, samples, alpha));
  detail::flag_floors(out.rows);
  out.fitted_slope = fit_log_slope(out.rows, c.effective_fit_alpha_min(), &out.fit_rows);
  return out;
}

inline constexpr const char* kSweepCsvHeader = "alpha,l2_total,l2_in_band,l2_tail,sup_error,residual,cond_est";

inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  using detail::format_double;
  os << kSweepCsvHeader << '\n';
  for (const auto& row : r.rows)
    os << format_double(row.alpha) << ',' << format_double(row.l2_total) << ',' << format_double(row.l2_in_band) << ','
       << format_double(row.l2_tail) << ',' << format_double(row.sup_error) << ',' << format_double(row.residual) << ','
       << format_double(row.cond_est) << '\n';
}

inline std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  write_sweep_csv(os, r);
  return os.str();
}

namespace detail {
/// JSON number, or null for NaN / infinity.
inline nlohmann::ordered_json num(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}
}  // namespace detail

inline nlohmann::ordered_json sweep_json(const SweepResult& r) {
  using detail::num;
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["seed"] = r.config.seed;
  j["config"] = config_json(r.config);
  j["node_count"] = r.node_count;
  j["rows"] = nlohmann::ordered_json::array();
  std::vector<double> floors;
  for (const auto& row : r.rows) {
    nlohmann::ordered_json o;
    o["alpha"] = row.alpha;
    o["status"] = row.ok ? "ok" : "failed";
    if (!row.ok) o["message"] = row.message;
    o["l2_total"] = num(row.l2_total);
    o["l2_in_band"] = num(row.l2_in_band);
    o["l2_tail"] = num(row.l2_tail);
    o["sup_error"] = num(row.sup_error);
    o["residual"] = num(row.residual);
    o["cond_est"] = num(row.cond_est);
    o["quadrature_error_estimate"] = num(row.quadrature_error);
    o["truncation_M"] = row.truncation_M;
    o["solve_method"] = row.method;
    o["floor"] = row.floor;
    if (row.floor) floors.push_back(row.alpha);
    j["rows"].push_back(o);
  }
  j["fitted_slope"] = r.fitted_slope ? nlohmann::ordered_json(*r.fitted_slope) : nlohmann::ordered_json(nullptr);
  j["fit_alpha_min"] = r.config.effective_fit_alpha_min();
  j["fit_rows"] = r.fit_rows;
  j["bound_slope"] = r.bound_slope;
  j["recovery_hypothesis"] = r.recovery_hypothesis;
  j["floor_alphas"] = floors;
  return j;
}

// ---------------------------------------------------------------------------
// Window study

struct WindowRow {
  int window = 0;
  std::size_t nodes = 0;
  SweepRow measure;
  /// l2_total exceeded the previous window's value.
  bool increase = false;
};

struct WindowStudy {
  ExperimentConfig config;
  double alpha = 0.0;
  std::vector<WindowRow> rows;
};

/// l2_total at a fixed alpha for each window in `windows` (strictly ascending).
inline WindowStudy run_window_study(const ExperimentConfig& c, const std::vector<int>& windows, double alpha) {
  if (windows.empty()) throw InvalidArgument("run_window_study: no windows given");
  for (std::size_t i = 0; i < windows.size(); ++i)
    if (windows[i] < 0 || (i > 0 && windows[i] <= windows[i - 1]))
      throw InvalidArgument("run_window_study: windows must be nonnegative and strictly ascending");
  if (!(alpha > 0.0)) throw InvalidArgument("run_window_study: alpha must be > 0");
  WindowStudy out{c, alpha, {}};
  const auto f = make_function(c);
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int w : windows) {
    const auto nodes = make_nodes(c, w);
    WindowRow row;
    row.window = w;
    row.nodes = nodes.size();
    row.measure = detail::measure_row(c, f, nodes, samples_on(f, nodes), alpha);
    if (row.measure.ok) {
      row.increase = !std::isnan(prev) && row.measure.l2_total > prev;
      prev = row.measure.l2_total;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline WindowStudy run_window_study(const ExperimentConfig& c) { return run_window_study(c, c.windows, c.study_alpha); }

inline constexpr const char* kWindowCsvHeader = "window,nodes,l2_total,l2_in_band,l2_tail,sup_error,residual,cond_est";

inline void write_window_csv(std::ostream& os, const WindowStudy& s) {
  using detail::format_double;
  os << kWindowCsvHeader << '\n';
  for (const auto& r : s.rows) {
    const auto& m = r.measure;
    os << r.window << ',' << r.nodes << ',' << format_double(m.l2_total) << ',' << format_double(m.l2_in_band) << ','
       << format_double(m.l2_tail) << ',' << format_double(m.sup_error) << ',' << format_double(m.residual) << ','
       << format_double(m.cond_est) << '\n';
  }
}

inline nlohmann::ordered_json window_json(const WindowStudy& s) {
  using detail::num;
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["seed"] = s.config.seed;
  j["config"] = config_json(s.config);
  j["alpha"] = s.alpha;
  j["rows"] = nlohmann::ordered_json::array();
  std::vector<int> increases;
  for (const auto& r : s.rows) {
    nlohmann::ordered_json o;
    o["window"] = r.window;
    o["nodes"] = r.nodes;
    o["status"] = r.measure.ok ? "ok" : "failed";
    if (!r.measure.ok) o["message"] = r.measure.message;
    o["l2_total"] = num(r.measure.l2_total);
    o["l2_in_band"] = num(r.measure.l2_in_band);
    o["l2_tail"] = num(r.measure.l2_tail);
    o["sup_error"] = num(r.measure.sup_error);
    o["residual"] = num(r.measure.residual);
    o["increase"] = r.increase;
    if (r.increase) increases.push_back(r.window);
    j["rows"].push_back(o);
  }
  j["increases"] = increases;
  return j;
}

// ---------------------------------------------------------------------------
// JSON views of the library reports

inline nlohmann::ordered_json to_json(const SolveReport& r) {
  return {{"relative_residual", detail::num(r.relative_residual)},
          {"method", r.method},
          {"condition_estimate", detail::num(r.condition_estimate)},
          {"iterations", r.iterations},
          {"seconds", r.seconds}};
}

inline nlohmann::ordered_json to_json(const RieszEstimate& r) {
  return {{"lambda_min", r.lambda_min}, {"lambda_max", r.lambda_max}, {"b_hat", r.b_hat}};
}

inline nlohmann::ordered_json to_json(const ErrorReport& r) {
  return {{"l2_in_band", r.l2_in_band},
          {"l2_tail", r.l2_tail},
          {"l2_total", r.l2_total},
          {"sup_error", r.sup_error},
          {"quadrature_error_estimate", r.quadrature_error_estimate},
          {"tail_remainder_bound", r.tail_remainder_bound},
          {"truncation_M", r.truncation_M}};
}

}  // namespace pwi
