// pwi: command-line front end for node generation, kernel and function tables,
// interpolation solves, bound checks, alpha sweeps and window studies.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "pwi/detail/parallel.hpp"
#include "pwi/experiment.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using pwi::detail::format_double;

namespace {

struct Globals {
  std::string config_path;
  std::string out_dir;
  unsigned threads = 0;
  std::optional<double> tol;
};

pwi::ExperimentConfig load(const Globals& g) {
  auto c = g.config_path.empty() ? pwi::ExperimentConfig{} : pwi::load_config(g.config_path);
  if (g.tol) {
    c.rel_tol = *g.tol;
    if (const auto v = pwi::validate(c); !v.empty()) throw pwi::ConfigError("--tol: " + v.front());
  }
  return c;
}

/// Writes to <out>/<name> when --out is set, otherwise to stdout.
template <class Fn>
void emit(const Globals& g, const std::string& name, Fn&& write) {
  if (g.out_dir.empty()) {
    write(std::cout);
    return;
  }
  fs::create_directories(g.out_dir);
  const auto path = fs::path(g.out_dir) / name;
  std::ofstream os(path);
  if (!os) throw pwi::Error("cannot write " + path.string());
  write(os);
  std::cerr << "wrote " << path.string() << '\n';
}

void emit_json(const Globals& g, const std::string& name, const json& j) {
  emit(g, name, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

std::vector<double> radii(double rmax, int points) {
  if (points < 1 || !(rmax >= 0.0)) throw pwi::InvalidArgument("need --points >= 1 and --rmax >= 0");
  std::vector<double> r(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) r[static_cast<std::size_t>(i)] = points > 1 ? rmax * i / (points - 1) : 0.0;
  return r;
}

json check_json(const std::string& name, const json& inputs, double measured, double bound, double ratio, bool pass,
                const json& extra = json::object()) {
  json j;
  j["check"] = name;
  j["inputs"] = inputs;
  j["measured"] = pwi::detail::num(measured);
  j["bound"] = pwi::detail::num(bound);
  j["ratio"] = pwi::detail::num(ratio);
  j["pass"] = pass;
  if (!extra.empty()) j["details"] = extra;
  j["version"] = pwi::kVersion;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson-kernel interpolation of band-limited functions on perturbed lattices"};
  app.set_version_flag("--version", pwi::kVersion);
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "experiment configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_dir, "output directory (default: stdout)");
  app.add_option("--threads", g.threads, "worker threads (default: hardware concurrency)");
  app.add_option("--tol", g.tol, "relative quadrature tolerance (overrides tolerances.rel_tol)");

  // nodes
  auto* nodes_cmd = app.add_subcommand("nodes", "generate a lattice or perturbed node set");
  std::optional<int> n_window;
  bool n_riesz = false;
  nodes_cmd->add_option("--window", n_window, "index window W (default: nodes.window)");
  nodes_cmd->add_flag("--riesz", n_riesz, "also write the exponential-Gram Riesz estimate as JSON");

  // kernel
  auto* kernel_cmd = app.add_subcommand("kernel", "radial table r,value,abs_err_estimate");
  double k_alpha = 1.0, k_rmax = 5.0, k_tol = 1e-12;
  int k_points = 51;
  std::optional<std::string> k_type;
  std::optional<double> k_omega;
  kernel_cmd->add_option("--alpha", k_alpha, "scale parameter")->check(CLI::PositiveNumber);
  kernel_cmd->add_option("--type", k_type, "poisson or generalized (default: kernel.type)")
      ->check(CLI::IsMember({"poisson", "generalized"}));
  kernel_cmd->add_option("--omega", k_omega, "exponent in (0, 2] for the generalized kernel");
  kernel_cmd->add_option("--rmax", k_rmax, "largest radius");
  kernel_cmd->add_option("--points", k_points, "number of radii");
  kernel_cmd->add_option("--abs-tol", k_tol, "absolute tolerance for the generalized kernel quadrature");

  // function
  auto* function_cmd = app.add_subcommand("function", "spatial or spectral radial table of the test function");
  std::string f_table = "spatial";
  double f_rmax = 20.0;
  int f_points = 101;
  function_cmd->add_option("--table", f_table, "spatial or spectral")->check(CLI::IsMember({"spatial", "spectral"}));
  function_cmd->add_option("--rmax", f_rmax, "largest radius (spectral tables default to beta)");
  function_cmd->add_option("--points", f_points, "number of radii");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "solve the interpolation system; writes coefficients and a report");
  std::string s_nodes;
  double s_alpha = 1.0;
  solve_cmd->add_option("--nodes", s_nodes, "node file (default: generate from the configuration)")
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--alpha", s_alpha, "scale parameter")->check(CLI::PositiveNumber);

  // check
  auto* check_cmd = app.add_subcommand("check", "run a named numerical check and emit a JSON report");
  std::string c_name;
  double c_alpha = 1.0, c_slack = 1.2, c_id_tol = 1e-6;
  int c_j1 = 0, c_j2 = 0, c_vectors = 10;
  std::uint64_t c_seed = 1;
  std::vector<double> c_x{1.0, 0.0};
  check_cmd
      ->add_option("name", c_name,
                   "fourier-pair | interpolation-identity | tail-bound | operator-norm | quadratic-form | riesz")
      ->required()
      ->check(CLI::IsMember(
          {"fourier-pair", "interpolation-identity", "tail-bound", "operator-norm", "quadratic-form", "riesz"}));
  check_cmd->add_option("--alpha", c_alpha, "scale parameter")->check(CLI::PositiveNumber);
  check_cmd->add_option("--slack", c_slack, "multiplier on b_hat in the Riesz-constant bounds");
  check_cmd->add_option("--node", c_j1, "first lattice index of the node (interpolation-identity)");
  check_cmd->add_option("--node2", c_j2, "second lattice index of the node (interpolation-identity)");
  check_cmd->add_option("--identity-tol", c_id_tol, "relative tolerance for interpolation-identity");
  check_cmd->add_option("--x", c_x, "spatial point for fourier-pair")->expected(2);
  check_cmd->add_option("--vectors", c_vectors, "random coefficient vectors for quadratic-form");
  check_cmd->add_option("--seed", c_seed, "seed for the quadratic-form coefficient vectors");

  auto* sweep_cmd = app.add_subcommand("sweep", "alpha sweep: CSV table and JSON summary");
  auto* window_cmd = app.add_subcommand("window-study", "fixed-alpha window growth study");

  CLI11_PARSE(app, argc, argv);

  try {
    if (g.threads > 0) pwi::set_thread_count(g.threads);
    const auto cfg = load(g);

    if (nodes_cmd->parsed()) {
      const auto nodes = pwi::make_nodes(cfg, n_window.value_or(cfg.window));
      emit(g, "nodes.txt", [&](std::ostream& os) { pwi::write_node_file(os, nodes); });
      if (n_riesz) {
        json j{{"nodes", nodes.size()}, {"riesz", pwi::to_json(pwi::riesz_estimate(pwi::exponential_gram(nodes)))}};
        if (g.out_dir.empty()) std::cerr << j.dump(2) << '\n';
        else emit_json(g, "riesz.json", j);
      }
    } else if (kernel_cmd->parsed()) {
      const std::string type = k_type.value_or(cfg.kernel);
      const double omega = k_omega.value_or(cfg.omega);
      const auto rs = radii(k_rmax, k_points);
      emit(g, "kernel.csv", [&](std::ostream& os) {
        os << "r,value,abs_err_estimate\n";
        if (type == "poisson") {
          const pwi::PoissonKernel k(k_alpha);
          for (double r : rs) os << format_double(r) << ',' << format_double(k.radial(r)) << ",0\n";
        } else {
          const pwi::GeneralizedKernel k(k_alpha, omega);
          for (double r : rs) {
            const auto v = pwi::generalized_eval(k, r, k_tol);
            os << format_double(r) << ',' << format_double(v.value) << ',' << format_double(v.abs_error) << '\n';
          }
        }
      });
    } else if (function_cmd->parsed()) {
      const auto f = pwi::make_function(cfg);
      const bool spectral = f_table == "spectral";
      const double rmax = spectral && !function_cmd->count("--rmax") ? f.beta() : f_rmax;
      const auto rs = radii(rmax, f_points);
      emit(g, spectral ? "function_spectral.csv" : "function_spatial.csv", [&](std::ostream& os) {
        os << (spectral ? "rho,value\n" : "r,value\n");
        for (double r : rs)
          os << format_double(r) << ',' << format_double(spectral ? f.spectral_radial(r) : f.spatial_radial(r)) << '\n';
      });
    } else if (solve_cmd->parsed()) {
      const pwi::NodeSet nodes = [&] {
        if (s_nodes.empty()) return pwi::make_nodes(cfg);
        std::ifstream in(s_nodes);
        return pwi::read_node_file(in);
      }();
      const auto f = pwi::make_function(cfg);
      const auto samples = pwi::samples_on(f, nodes);
      pwi::SolveOptions so;
      so.residual_tol = cfg.residual_tol;
      const auto interp = pwi::solve(pwi::assemble(nodes, pwi::make_kernel(cfg, s_alpha)), samples, so);
      emit(g, "coefficients.txt", [&](std::ostream& os) {
        os << "# alpha = " << format_double(s_alpha) << "\n# kernel = " << pwi::kernel_name(interp.kernel())
           << "\n# function = " << f.description() << '\n';
        for (std::size_t i = 0; i < nodes.size(); ++i)
          os << nodes.index(i).j1 << ' ' << nodes.index(i).j2 << ' ' << format_double(interp.coefficients()[i]) << '\n';
      });
      json rep = pwi::to_json(interp.report());
      rep["alpha"] = s_alpha;
      rep["kernel"] = pwi::kernel_name(interp.kernel());
      rep["function"] = f.description();
      rep["nodes"] = nodes.size();
      rep["version"] = pwi::kVersion;
      rep["seed"] = cfg.seed;
      if (g.out_dir.empty()) std::cerr << rep.dump(2) << '\n';
      else emit_json(g, "solve_report.json", rep);
    } else if (check_cmd->parsed()) {
      const auto nodes = pwi::make_nodes(cfg);
      json inputs{{"alpha", c_alpha},
                  {"delta", cfg.delta},
                  {"beta", cfg.beta},
                  {"nodes", cfg.node_kind},
                  {"window", cfg.window},
                  {"L", cfg.L},
                  {"seed", cfg.seed},
                  {"kernel", cfg.kernel},
                  {"slack", c_slack}};
      json out;
      if (c_name == "fourier-pair") {
        const pwi::Point2 x{c_x[0], c_x[1]};
        const auto k = pwi::make_kernel(cfg, c_alpha);
        const double c = pwi::measured_convention_constant(k, x, cfg.rel_tol);
        const double expected = pwi::convention_constant(k);
        const double rel = std::abs(c / expected - 1.0);
        inputs["x"] = c_x;
        out = check_json(c_name, inputs, c, expected, c / expected, rel <= 1e-6,
                         {{"relative_deviation", rel}, {"tolerance", 1e-6}});
      } else if (c_name == "riesz") {
        const auto r = pwi::riesz_estimate(pwi::exponential_gram(nodes));
        const double ideal = 2.0 * cfg.delta;
        out = check_json(c_name, inputs, r.b_hat, ideal, r.b_hat / ideal, std::isfinite(r.b_hat), pwi::to_json(r));
      } else if (c_name == "quadratic-form") {
        const auto riesz = pwi::riesz_estimate(pwi::exponential_gram(nodes));
        const auto k = pwi::make_kernel(cfg, c_alpha);
        std::uint64_t counter = 0;
        json vecs = json::array();
        bool all = true;
        double worst = 0.0;
        for (int t = 0; t < c_vectors; ++t) {
          std::vector<double> a(nodes.size());
          for (auto& v : a) v = 2.0 * pwi::detail::counter_uniform(c_seed, pwi::LatticeIndex{t, 0}, counter++) - 1.0;
          const auto r = pwi::quadratic_form_bounds(nodes, k, a, riesz, c_slack, cfg.spectral_options());
          all = all && r.pass();
          worst = std::max({worst, r.lower_ratio, r.upper_ratio});
          vecs.push_back({{"q", r.q},
                          {"lower_bound", r.lower_bound},
                          {"upper_bound", r.upper_bound},
                          {"lower_ratio", r.lower_ratio},
                          {"upper_ratio", r.upper_ratio},
                          {"quadrature_error", r.quadrature_error},
                          {"inconclusive", r.inconclusive},
                          {"pass", r.pass()}});
        }
        inputs["vectors"] = c_vectors;
        inputs["vector_seed"] = c_seed;
        out = check_json(c_name, inputs, worst, 1.0, worst, all, {{"riesz", pwi::to_json(riesz)}, {"vectors", vecs}});
      } else {
        const auto f = pwi::make_function(cfg);
        pwi::SolveOptions so;
        so.residual_tol = cfg.residual_tol;
        const auto interp = pwi::solve(pwi::assemble(nodes, pwi::make_kernel(cfg, c_alpha)), pwi::samples_on(f, nodes), so);
        inputs["function"] = f.description();
        if (c_name == "interpolation-identity") {
          const auto r = pwi::check_interpolation_identity(f, interp, {c_j1, c_j2}, c_id_tol, cfg.spectral_options());
          inputs["node"] = {c_j1, c_j2};
          const double ref = std::max(std::abs(r.left), std::abs(r.right));
          out = check_json(c_name, inputs, r.difference, c_id_tol * ref, ref > 0 ? r.difference / (c_id_tol * ref) : 0.0,
                           r.pass,
                           {{"left", {r.left.real(), r.left.imag()}},
                            {"right", {r.right.real(), r.right.imag()}},
                            {"sample_value", r.sample_value},
                            {"interpolant_value", r.interpolant_value},
                            {"left_matches_sample", r.left_matches_sample},
                            {"right_matches_interpolant", r.right_matches_interpolant}});
        } else {
          const auto riesz = pwi::riesz_estimate(pwi::exponential_gram(nodes));
          pwi::BoundOptions bo;
          bo.slack = c_slack;
          bo.spectral = cfg.spectral_options();
          const auto r = c_name == "tail-bound" ? pwi::check_tail_bound(f, interp, riesz, bo)
                                                : pwi::check_operator_norm(f, interp, riesz, bo);
          out = check_json(c_name, inputs, r.measured, r.bound, r.ratio, r.pass,
                           {{"b_hat", r.b_hat}, {"alpha_threshold", pwi::a_delta(cfg.delta)},
                            {"hypothesis_holds", r.hypothesis_holds}});
        }
      }
      emit_json(g, c_name + ".json", out);
      return out["pass"].get<bool>() ? 0 : 3;
    } else if (sweep_cmd->parsed()) {
      const auto r = pwi::run_sweep(cfg);
      if (g.out_dir.empty()) {
        pwi::write_sweep_csv(std::cout, r);
        std::cerr << pwi::sweep_json(r).dump(2) << '\n';
      } else {
        emit(g, cfg.csv, [&](std::ostream& os) { pwi::write_sweep_csv(os, r); });
        emit_json(g, cfg.json, pwi::sweep_json(r));
      }
    } else if (window_cmd->parsed()) {
      const auto s = pwi::run_window_study(cfg);
      if (g.out_dir.empty()) {
        pwi::write_window_csv(std::cout, s);
        std::cerr << pwi::window_json(s).dump(2) << '\n';
      } else {
        emit(g, "window_study.csv", [&](std::ostream& os) { pwi::write_window_csv(os, s); });
        emit_json(g, "window_study.json", pwi::window_json(s));
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
