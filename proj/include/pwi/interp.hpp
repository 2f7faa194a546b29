#pragma once

// Kernel interpolation on a node set: Gram assembly, coefficient solve,
// spatial evaluation and the Fourier-side representation of the interpolant.

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pwi/detail/format.hpp"
#include "pwi/detail/parallel.hpp"
#include "pwi/errors.hpp"
#include "pwi/geometry.hpp"
#include "pwi/kernels.hpp"
#include "pwi/nodes.hpp"

namespace pwi {

/// Dense Gram G(k, j) = kernel(x_k - x_j).
struct GramSystem {
  NodeSet nodes;
  Kernel kernel;
  Eigen::MatrixXd matrix;
};

namespace detail {

/// Kernel values at a batch of radii; generalized kernels are evaluated once per distinct radius.
inline std::vector<double> radial_values(const Kernel& k, std::span<const double> r2) {
  std::vector<double> out(r2.size());
  if (const auto* p = std::get_if<PoissonKernel>(&k)) {
    for (std::size_t i = 0; i < r2.size(); ++i) out[i] = p->radial(std::sqrt(r2[i]));
    return out;
  }
  const auto& g = std::get<GeneralizedKernel>(k);
  std::vector<double> uniq(r2.begin(), r2.end());
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<double> vals(uniq.size());
  parallel_for(uniq.size(), [&](std::size_t i) { vals[i] = generalized_eval(g, std::sqrt(uniq[i])).value; });
  for (std::size_t i = 0; i < r2.size(); ++i) {
    const auto it = std::lower_bound(uniq.begin(), uniq.end(), r2[i]);
    out[i] = vals[static_cast<std::size_t>(it - uniq.begin())];
  }
  return out;
}

}  // namespace detail

inline GramSystem assemble(const NodeSet& nodes, const Kernel& kernel) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  std::vector<double> r2;
  r2.reserve(static_cast<std::size_t>(n * (n + 1) / 2));
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index j = k; j < n; ++j) r2.push_back(norm2(nodes.point(k) - nodes.point(j)));
  const auto vals = detail::radial_values(kernel, r2);
  Eigen::MatrixXd g(n, n);
  std::size_t idx = 0;
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index j = k; j < n; ++j) {
      g(k, j) = vals[idx];
      g(j, k) = vals[idx];
      ++idx;
    }
  return {nodes, kernel, std::move(g)};
}

struct SolveReport {
  double relative_residual = 0.0;
  std::string method;
  double condition_estimate = 0.0;
  int iterations = 0;
  double seconds = 0.0;
};

/// Finite exponential sum u(xi) = sum_j a_j e^{-i<xi, x_j>}.
class SpectralSymbol {
 public:
  SpectralSymbol(std::vector<Point2> points, std::vector<double> coefficients)
      : points_(std::move(points)), coef_(std::move(coefficients)) {
    if (points_.size() != coef_.size()) throw InvalidArgument("SpectralSymbol: size mismatch");
    build_grid_tables();
  }

  std::complex<double> operator()(Point2 xi) const {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < points_.size(); ++j) {
      const double ph = dot(xi, points_[j]);
      re += coef_[j] * std::cos(ph);
      im -= coef_[j] * std::sin(ph);
    }
    return {re, im};
  }

  /// out(i, k) = u(xs[i], ys[k]).
  void eval_grid(std::span<const double> xs, std::span<const double> ys, Eigen::MatrixXcd& out) const {
    const auto p = static_cast<Eigen::Index>(xs.size()), q = static_cast<Eigen::Index>(ys.size());
    const auto ux = static_cast<Eigen::Index>(ux_.size()), uy = static_cast<Eigen::Index>(uy_.size());
    Eigen::MatrixXcd ex(p, ux), ey(uy, q);
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index u = 0; u < ux; ++u) ex(i, u) = std::polar(1.0, -xs[i] * ux_[u]);
    for (Eigen::Index k = 0; k < q; ++k)
      for (Eigen::Index v = 0; v < uy; ++v) ey(v, k) = std::polar(1.0, -ys[k] * uy_[v]);
    if (dense_grid_) {
      out.noalias() = ex * (dense_coef_ * ey);
      return;
    }
    const auto n = static_cast<Eigen::Index>(points_.size());
    Eigen::MatrixXcd a(p, n), b(n, q);
    for (Eigen::Index j = 0; j < n; ++j) {
      a.col(j) = coef_[j] * ex.col(ix_[j]);
      b.row(j) = ey.row(iy_[j]);
    }
    out.noalias() = a * b;
  }

  /// sum |a_j|, a bound on |u| everywhere.
  double abs_sum() const {
    double s = 0.0;
    for (double c : coef_) s += std::abs(c);
    return s;
  }

  /// Largest coordinate difference between nodes along either axis.
  double max_axis_extent() const {
    if (points_.empty()) return 0.0;
    auto [xmin, xmax] = std::minmax_element(ux_.begin(), ux_.end());
    auto [ymin, ymax] = std::minmax_element(uy_.begin(), uy_.end());
    return std::max(*xmax - *xmin, *ymax - *ymin);
  }
  /// Largest |x_j| along either axis.
  double max_abs_coordinate() const {
    double m = 0.0;
    for (auto p : points_) m = std::max({m, std::abs(p.x), std::abs(p.y)});
    return m;
  }

  const std::vector<Point2>& points() const { return points_; }
  const std::vector<double>& coefficients() const { return coef_; }

 private:
  void build_grid_tables() {
    for (auto p : points_) {
      ux_.push_back(p.x);
      uy_.push_back(p.y);
    }
    auto uniq = [](std::vector<double>& v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    uniq(ux_);
    uniq(uy_);
    for (auto p : points_) {
      ix_.push_back(static_cast<Eigen::Index>(std::lower_bound(ux_.begin(), ux_.end(), p.x) - ux_.begin()));
      iy_.push_back(static_cast<Eigen::Index>(std::lower_bound(uy_.begin(), uy_.end(), p.y) - uy_.begin()));
    }
    dense_grid_ = ux_.size() * uy_.size() <= 2 * points_.size();
    if (dense_grid_) {
      dense_coef_ = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(ux_.size()), static_cast<Eigen::Index>(uy_.size()));
      for (std::size_t j = 0; j < points_.size(); ++j) dense_coef_(ix_[j], iy_[j]) += coef_[j];
    }
  }

  std::vector<Point2> points_;
  std::vector<double> coef_;
  std::vector<double> ux_, uy_;
  std::vector<Eigen::Index> ix_, iy_;
  bool dense_grid_ = false;
  Eigen::MatrixXcd dense_coef_;
};

/// Fourier transform of an interpolant in the symmetric convention:
/// T(xi) = (2 pi / c) symbol(|xi|) u(xi), with c the kernel's convention constant.
class SpectralEvaluator {
 public:
  SpectralEvaluator(Kernel kernel, SpectralSymbol symbol)
      : kernel_(kernel), symbol_(std::move(symbol)), prefactor_(kTwoPi / convention_constant(kernel)) {}

  std::complex<double> operator()(Point2 xi) const {
    return prefactor_ * kernel_symbol(kernel_, norm(xi)) * symbol_(xi);
  }
  double prefactor() const { return prefactor_; }
  const Kernel& kernel() const { return kernel_; }
  const SpectralSymbol& symbol() const { return symbol_; }

 private:
  Kernel kernel_;
  SpectralSymbol symbol_;
  double prefactor_;
};

/// Solved interpolant I(x) = sum_j a_j kernel(x - x_j). Immutable.
class Interpolant {
 public:
  Interpolant(NodeSet nodes, Kernel kernel, std::vector<double> coefficients, std::vector<double> samples,
              SolveReport report)
      : nodes_(std::move(nodes)), kernel_(kernel), coef_(std::move(coefficients)), samples_(std::move(samples)),
        report_(std::move(report)) {}

  const NodeSet& nodes() const { return nodes_; }
  const Kernel& kernel() const { return kernel_; }
  const std::vector<double>& coefficients() const { return coef_; }
  const std::vector<double>& samples() const { return samples_; }
  const SolveReport& report() const { return report_; }
  double alpha() const { return kernel_alpha(kernel_); }

  bool is_zero() const {
    return std::all_of(coef_.begin(), coef_.end(), [](double c) { return c == 0.0; });
  }

  /// Finite sum in index order.
  double evaluate(Point2 x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < coef_.size(); ++j) s += coef_[j] * kernel_radial(kernel_, norm(x - nodes_.point(j)));
    return s;
  }

  /// Batch evaluation; generalized-kernel values are shared across equal radii.
  std::vector<double> evaluate_many(std::span<const Point2> xs) const {
    std::vector<double> out(xs.size(), 0.0);
    if (std::holds_alternative<PoissonKernel>(kernel_)) {
      parallel_for(xs.size(), [&](std::size_t i) { out[i] = evaluate(xs[i]); }, 16);
      return out;
    }
    const std::size_t n = coef_.size();
    std::vector<double> r2;
    r2.reserve(xs.size() * n);
    for (auto x : xs)
      for (std::size_t j = 0; j < n; ++j) r2.push_back(norm2(x - nodes_.point(j)));
    const auto vals = detail::radial_values(kernel_, r2);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += coef_[j] * vals[i * n + j];
      out[i] = s;
    }
    return out;
  }

  SpectralSymbol symbol() const { return SpectralSymbol(nodes_.points(), coef_); }

  /// sum_j a_j y_j = a^T G a, the kernel quadratic form of the coefficients.
  double energy() const {
    double s = 0.0;
    for (std::size_t j = 0; j < coef_.size(); ++j) s += coef_[j] * samples_[j];
    return s;
  }

 private:
  NodeSet nodes_;
  Kernel kernel_;
  std::vector<double> coef_;
  std::vector<double> samples_;
  SolveReport report_;
};

inline SpectralEvaluator spectral_transform(const Interpolant& interp) {
  return SpectralEvaluator(interp.kernel(), interp.symbol());
}

struct SolveOptions {
  double residual_tol = 1e-12;
  int refinement_steps = 3;
  /// Condition estimates use a full symmetric eigensolve up to this size.
  Eigen::Index eigen_limit = 4096;
};

namespace detail {

inline double relative_residual(const Eigen::MatrixXd& g, const Eigen::VectorXd& a, const Eigen::VectorXd& y) {
  const double ny = y.norm();
  if (ny == 0.0) return (g * a).norm();
  return (g * a - y).norm() / ny;
}

inline double condition_estimate(const Eigen::MatrixXd& g, Eigen::Index limit) {
  if (g.rows() > limit) return std::numeric_limits<double>::quiet_NaN();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Solve G a = y. Cholesky with iterative refinement first; diagonally preconditioned
/// conjugate gradients if the factorization breaks down or misses the residual target.
inline Interpolant solve(const GramSystem& system, std::span<const double> samples, SolveOptions opts = {}) {
  const auto n = system.matrix.rows();
  if (static_cast<Eigen::Index>(samples.size()) != n)
    throw InvalidArgument("solve: sample count does not match node count");
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(samples.data(), n);
  SolveReport report;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);

  bool ok = false;
  if (y.norm() == 0.0) {
    report.method = "trivial";
    ok = true;
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(system.matrix);
    if (llt.info() == Eigen::Success) {
      a = llt.solve(y);
      report.method = "cholesky";
      double res = detail::relative_residual(system.matrix, a, y);
      for (int step = 0; step < opts.refinement_steps && res > opts.residual_tol; ++step) {
        a += llt.solve(y - system.matrix * a);
        res = detail::relative_residual(system.matrix, a, y);
        report.method = "cholesky+refinement";
        report.iterations = step + 1;
      }
      ok = res <= opts.residual_tol;
    }
    if (!ok) {
      Eigen::ConjugateGradient<Eigen::MatrixXd, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
      cg.setTolerance(opts.residual_tol);
      cg.setMaxIterations(static_cast<Eigen::Index>(10 * n));
      cg.compute(system.matrix);
      const Eigen::VectorXd x = cg.solveWithGuess(y, a);
      const double res = detail::relative_residual(system.matrix, x, y);
      if (res > opts.residual_tol)
        throw NotPositiveDefinite("solve: Cholesky and conjugate-gradient fallback both failed (residual " +
                                  detail::format_double(res) +
                                  "); alpha is too large for working precision at this node density");
      a = x;
      report.method = "conjugate-gradient";
      report.iterations = static_cast<int>(cg.iterations());
    }
  }
  report.relative_residual = detail::relative_residual(system.matrix, a, y);
  report.condition_estimate = detail::condition_estimate(system.matrix, opts.eigen_limit);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return Interpolant(system.nodes, system.kernel, std::vector<double>(a.data(), a.data() + n),
                     std::vector<double>(samples.begin(), samples.end()), std::move(report));
}

}  // namespace pwi
