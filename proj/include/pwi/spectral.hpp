#pragma once

// Fourier-side diagnostics of kernel interpolants: L2 and sup error norms,
// the interpolation identity at a node, tail and operator-norm bounds, and the
// kernel quadratic form
//
//   Q(a) = int_{R^2} symbol(|xi|) |H(xi)|^2 dxi,   H(xi) = sum_j a_j e^{-i<xi, x_j>},
//
// all computed by the deterministic panel quadrature over S_delta and the
// square annuli m S_delta \ (m-1) S_delta, m = 2..M. Beyond M S_delta the
// remainder is bounded analytically using |H| <= sum |a_j|.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pwi/detail/format.hpp"
#include "pwi/errors.hpp"
#include "pwi/geometry.hpp"
#include "pwi/interp.hpp"
#include "pwi/kernels.hpp"
#include "pwi/nodes.hpp"
#include "pwi/quadrature.hpp"
#include "pwi/spaces.hpp"

namespace pwi {

/// Smallest alpha with (1 - e^{-alpha delta})^-2 <= 2, i.e. ln(2 + sqrt 2) / delta.
inline double a_delta(double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("a_delta: delta must be positive");
  return std::log(2.0 + std::sqrt(2.0)) / delta;
}

/// area(m S \ (m-1) S) / area(S).
inline double annulus_area_ratio(int m) { return 2.0 * m - 1.0; }

namespace detail {

inline double symbol_pow(const Kernel& k, double r, double power) {
  const double s = kernel_symbol(k, r);
  return power == 1.0 ? s : (power == 2.0 ? s * s : std::pow(s, power));
}

/// xi -> scale * symbol(|xi|)^power * |u(xi)|^2
class SymbolEnergy {
 public:
  SymbolEnergy(const SpectralSymbol& u, const Kernel& k, double power, double scale)
      : u_(u), k_(k), power_(power), scale_(scale), bound_(u.abs_sum() * u.abs_sum()) {}

  void eval_grid(std::span<const double> xs, std::span<const double> ys, Eigen::MatrixXd& out) const {
    Eigen::MatrixXcd grid;
    u_.eval_grid(xs, ys, grid);
    out.resize(grid.rows(), grid.cols());
    for (Eigen::Index i = 0; i < grid.rows(); ++i)
      for (Eigen::Index j = 0; j < grid.cols(); ++j)
        out(i, j) = scale_ * symbol_pow(k_, std::hypot(xs[i], ys[j]), power_) * std::norm(grid(i, j));
  }
  double eval_point(Point2 p) const { return scale_ * symbol_pow(k_, norm(p), power_) * std::norm(u_(p)); }
  double sup_bound(const Rect& r) const { return scale_ * symbol_pow(k_, r.min_radius(), power_) * bound_; }
  double frequency() const { return u_.max_axis_extent(); }

 private:
  const SpectralSymbol& u_;
  Kernel k_;
  double power_, scale_, bound_;
};

/// xi -> scale * symbol(|xi|)^power * Re u(xi)  (or Im)
class SymbolMode {
 public:
  SymbolMode(const SpectralSymbol& u, const Kernel& k, double power, double scale, bool imaginary)
      : u_(u), k_(k), power_(power), scale_(scale), imag_(imaginary), bound_(u.abs_sum()) {}

  void eval_grid(std::span<const double> xs, std::span<const double> ys, Eigen::MatrixXd& out) const {
    Eigen::MatrixXcd grid;
    u_.eval_grid(xs, ys, grid);
    out.resize(grid.rows(), grid.cols());
    for (Eigen::Index i = 0; i < grid.rows(); ++i)
      for (Eigen::Index j = 0; j < grid.cols(); ++j) {
        const auto v = grid(i, j);
        out(i, j) = scale_ * symbol_pow(k_, std::hypot(xs[i], ys[j]), power_) * (imag_ ? v.imag() : v.real());
      }
  }
  double eval_point(Point2 p) const {
    const auto v = u_(p);
    return scale_ * symbol_pow(k_, norm(p), power_) * (imag_ ? v.imag() : v.real());
  }
  double sup_bound(const Rect& r) const { return std::abs(scale_) * symbol_pow(k_, r.min_radius(), power_) * bound_; }
  double frequency() const { return u_.max_abs_coordinate(); }

 private:
  const SpectralSymbol& u_;
  Kernel k_;
  double power_, scale_;
  bool imag_;
  double bound_;
};

/// Bound on int_{|xi| > M delta} scale * symbol^power * (sum|a|)^p  for p = 2 (energy) or 1 (mode).
inline double plane_remainder(const Kernel& k, double power, double magnitude, double delta, int M) {
  if (magnitude == 0.0) return 0.0;
  return magnitude * symbol_tail_mass(k, power, M * delta);
}

/// Smallest M >= 2 whose remainder falls below target.
inline int choose_truncation(const Kernel& k, double power, double magnitude, double delta, double target,
                             int max_M) {
  for (int M = 2; M <= max_M; ++M)
    if (plane_remainder(k, power, magnitude, delta, M) <= target) return M;
  return max_M;
}

inline void require_converged(const QuadResult& r, const char* what) {
  if (!r.converged)
    throw QuadratureError(std::string(what) + ": quadrature reached the refinement cap (difference " +
                          format_double(r.error) + ")");
}

}  // namespace detail

struct SpectralOptions {
  /// 0 selects M automatically from the analytic remainder.
  int truncation_M = 0;
  double rel_tol = 1e-10;
  /// Remainder target relative to the in-band energy.
  double remainder_rel = 1e-14;
  int max_M = 400;
  int order = 16;
  int max_level = 7;
};

/// Energy int |T|^2 of the interpolant's transform over the square, each annulus, and the remainder.
struct SpectralEnergy {
  double in_square = 0.0;
  double tail = 0.0;
  double remainder = 0.0;
  double quadrature_error = 0.0;
  int truncation_M = 2;
};

inline SpectralEnergy interpolant_energy(const Interpolant& interp, double abs_tol, double reference,
                                         const SpectralOptions& opts = {}) {
  SpectralEnergy out;
  const double delta = interp.nodes().delta();
  const auto u = interp.symbol();
  const auto& k = interp.kernel();
  const double pref = kTwoPi / convention_constant(k);
  const double mag = pref * pref * u.abs_sum() * u.abs_sum();
  if (mag == 0.0) return out;

  detail::SymbolEnergy energy(u, k, 2.0, pref * pref);
  QuadOptions q{abs_tol, opts.order, opts.max_level, energy.frequency()};
  const auto sq = integrate(SquareRegion{delta}, energy, q);
  detail::require_converged(sq, "interpolant_energy (square)");
  out.in_square = sq.value;
  out.quadrature_error = sq.error;

  if (opts.truncation_M > 0) {
    if (opts.truncation_M < 2) throw InvalidArgument("interpolant_energy: M must be >= 2");
    out.truncation_M = opts.truncation_M;
  } else {
    const double ref = reference > 0.0 ? reference : std::max(sq.value, 1e-300);
    out.truncation_M = detail::choose_truncation(k, 2.0, mag, delta, opts.remainder_rel * ref, opts.max_M);
  }
  QuadOptions qa = q;
  qa.abs_tol = abs_tol / std::max(1, out.truncation_M - 1);
  std::vector<double> ring(static_cast<std::size_t>(out.truncation_M - 1), 0.0);
  for (int m = 2; m <= out.truncation_M; ++m) {
    const auto r = integrate(SquareAnnulus{delta, m}, energy, qa);
    detail::require_converged(r, "interpolant_energy (annulus)");
    ring[static_cast<std::size_t>(m - 2)] = r.value;
    out.quadrature_error += r.error;
  }
  out.tail = pairwise_sum(ring);
  out.remainder = detail::plane_remainder(k, 2.0, mag, delta, out.truncation_M);
  return out;
}

struct ErrorReport {
  double l2_in_band = 0.0;
  double l2_tail = 0.0;
  double l2_total = 0.0;
  /// Filled by error_sup; 0 here.
  double sup_error = 0.0;
  double quadrature_error_estimate = 0.0;
  double tail_remainder_bound = 0.0;
  int truncation_M = 2;
};

/// ||f^ - T||_{L2(S_delta)}, ||T||_{L2(R^2 \ S_delta)} and their Pythagorean total.
///
/// The in-band square is expanded as  int_S |T|^2 + int_{B_beta} (F^2 - 2 F Re T),
/// which keeps every integrand smooth on its panels.
inline ErrorReport error_l2(const BandlimitedFunction& f, const Interpolant& interp, const SpectralOptions& opts = {}) {
  if (opts.truncation_M != 0 && opts.truncation_M < 2) throw InvalidArgument("error_l2: M must be >= 2");
  if (!f.fits_square(interp.nodes().square()))
    warn("error_l2: band ball is not contained in S_delta; in-band splitting assumes it is");
  const double f_energy = f.l2_norm() * f.l2_norm();
  const auto& k = interp.kernel();
  const double pref = kTwoPi / convention_constant(k);
  const double t_scale = pref * pref * convention_constant(k) * std::max(interp.energy(), 0.0);
  const double scale = f_energy + t_scale;
  ErrorReport rep;
  if (scale == 0.0) return rep;
  const double abs_tol = opts.rel_tol * scale;

  const auto e = interpolant_energy(interp, 0.5 * abs_tol, f_energy, opts);

  double cross = 0.0, cross_err = 0.0;
  if (!f.is_zero()) {
    const auto u = interp.symbol();
    const double freq = u.max_abs_coordinate();
    auto integrand = [&](Point2 xi) {
      const double F = f.spectral(xi);
      const double t = pref * kernel_symbol(k, norm(xi)) * u(xi).real();
      return F * F - 2.0 * F * t;
    };
    const auto r = integrate(DiskRegion{f.beta()}, integrand,
                             QuadOptions{0.5 * abs_tol, opts.order, opts.max_level, freq});
    detail::require_converged(r, "error_l2 (band disk)");
    cross = r.value;
    cross_err = r.error;
  }
  const double in_band_sq = std::max(0.0, e.in_square + cross);
  rep.l2_in_band = std::sqrt(in_band_sq);
  rep.l2_tail = std::sqrt(e.tail);
  rep.l2_total = std::sqrt(in_band_sq + e.tail);
  rep.quadrature_error_estimate = e.quadrature_error + cross_err + e.remainder;
  rep.tail_remainder_bound = e.remainder;
  rep.truncation_M = e.truncation_M;
  return rep;
}

/// Centred square grid [-extent, extent]^2 with points x points.
struct GridSpec {
  double extent = 5.0;
  int points = 41;

  std::vector<Point2> nodes() const {
    if (points < 1 || !(extent >= 0.0)) throw InvalidArgument("GridSpec: need points >= 1 and extent >= 0");
    std::vector<Point2> out;
    out.reserve(static_cast<std::size_t>(points) * points);
    const double h = points > 1 ? 2.0 * extent / (points - 1) : 0.0;
    for (int i = 0; i < points; ++i)
      for (int k = 0; k < points; ++k)
        out.push_back({points > 1 ? -extent + i * h : 0.0, points > 1 ? -extent + k * h : 0.0});
    return out;
  }
};

/// max |f(x) - I(x)| over explicit points.
inline double error_sup(const BandlimitedFunction& f, const Interpolant& interp, std::span<const Point2> points) {
  const auto vals = interp.evaluate_many(points);
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) worst = std::max(worst, std::abs(f.spatial(points[i]) - vals[i]));
  return worst;
}

inline double error_sup(const BandlimitedFunction& f, const Interpolant& interp, const GridSpec& grid) {
  const auto pts = grid.nodes();
  return error_sup(f, interp, std::span<const Point2>(pts));
}

// ---------------------------------------------------------------------------

struct IdentityReport {
  LatticeIndex node;
  std::complex<double> left;   ///< int_{B_beta} F(xi) e^{i<xi,x_k>} dxi
  std::complex<double> right;  ///< int_{R^2} T(xi) e^{i<xi,x_k>} dxi
  double sample_value = 0.0;        ///< 2 pi f(x_k)
  double interpolant_value = 0.0;   ///< 2 pi I(x_k)
  double difference = 0.0;
  double tolerance = 0.0;
  bool left_matches_sample = false;
  bool right_matches_interpolant = false;
  bool pass = false;
};

/// Checks that the band-side and whole-plane Fourier integrals agree at node k.
inline IdentityReport check_interpolation_identity(const BandlimitedFunction& f, const Interpolant& interp,
                                                   LatticeIndex node, double tol, const SpectralOptions& opts = {}) {
  const auto pos = interp.nodes().find(node);
  if (!pos) throw InvalidArgument("check_interpolation_identity: node index not in the set");
  const Point2 xk = interp.nodes().point(*pos);
  const auto& k = interp.kernel();
  const double pref = kTwoPi / convention_constant(k);
  IdentityReport rep;
  rep.node = node;
  rep.tolerance = tol;
  rep.sample_value = kTwoPi * f.spatial(xk);
  rep.interpolant_value = kTwoPi * interp.evaluate(xk);
  const double scale = std::max({std::abs(rep.sample_value), std::abs(rep.interpolant_value), 1e-300});
  const double abs_tol = 1e-3 * tol * scale;

  if (!f.is_zero()) {
    const double freq = norm(xk);
    auto re = [&](Point2 xi) { return f.spectral(xi) * std::cos(dot(xi, xk)); };
    auto im = [&](Point2 xi) { return f.spectral(xi) * std::sin(dot(xi, xk)); };
    QuadOptions q{0.5 * abs_tol, opts.order, opts.max_level, freq};
    const auto a = integrate(DiskRegion{f.beta()}, re, q);
    const auto b = integrate(DiskRegion{f.beta()}, im, q);
    detail::require_converged(a, "check_interpolation_identity (left)");
    detail::require_converged(b, "check_interpolation_identity (left)");
    rep.left = {a.value, b.value};
  }
  if (!interp.is_zero()) {
    // T(xi) e^{i<xi,x_k>} = pref symbol(|xi|) sum_j a_j e^{-i<xi, x_j - x_k>}
    const SpectralSymbol shifted(interp.nodes().shifted_points(-1.0 * xk), interp.coefficients());
    const double delta = interp.nodes().delta();
    const double mag = pref * shifted.abs_sum();
    const int M = opts.truncation_M > 0
                      ? opts.truncation_M
                      : detail::choose_truncation(k, 1.0, mag, delta, 0.1 * abs_tol, opts.max_M);
    detail::SymbolMode re(shifted, k, 1.0, pref, false), im(shifted, k, 1.0, pref, true);
    QuadOptions q{0.25 * abs_tol, opts.order, opts.max_level, re.frequency()};
    const auto a = integrate(TruncatedPlane{delta, M}, re, q);
    const auto b = integrate(TruncatedPlane{delta, M}, im, q);
    detail::require_converged(a, "check_interpolation_identity (right)");
    detail::require_converged(b, "check_interpolation_identity (right)");
    rep.right = {a.value, b.value};
  }
  rep.difference = std::abs(rep.left - rep.right);
  const double ref = std::max(std::abs(rep.left), std::abs(rep.right));
  rep.pass = rep.difference <= tol * ref;
  rep.left_matches_sample = std::abs(rep.left - rep.sample_value) <= tol * scale;
  rep.right_matches_interpolant = std::abs(rep.right - rep.interpolant_value) <= tol * scale;
  return rep;
}

/// measured <= bound check with the ratio always reported.
struct BoundReport {
  std::string check;
  double measured = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  bool pass = false;
  double slack = 1.2;
  double b_hat = 1.0;
  double alpha = 0.0;
  double delta = 0.0;
  bool hypothesis_holds = true;  ///< alpha >= A_delta
};

namespace detail {
inline BoundReport finish_bound(std::string name, double measured, double bound, double slack, double b_hat,
                                double alpha, double delta) {
  BoundReport r;
  r.check = std::move(name);
  r.measured = measured;
  r.bound = bound;
  r.ratio = bound > 0.0 ? measured / bound : (measured == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  r.pass = measured <= bound;
  r.slack = slack;
  r.b_hat = b_hat;
  r.alpha = alpha;
  r.delta = delta;
  r.hypothesis_holds = alpha >= a_delta(delta);
  if (!r.hypothesis_holds)
    warn(r.check + ": alpha = " + format_double(alpha) + " is below A_delta = " + format_double(a_delta(delta)));
  return r;
}
}  // namespace detail

struct BoundOptions {
  double slack = 1.2;
  SpectralOptions spectral;
};

/// ||T||_{L2(R^2 \ S_delta)} <= 4 B^2 e^{alpha delta (sqrt2 - 1)} ||f^||_{L2(S_delta)},  B = b_hat * slack.
inline BoundReport check_tail_bound(const BandlimitedFunction& f, const Interpolant& interp, const RieszEstimate& riesz,
                                    const BoundOptions& opts = {}) {
  const double delta = interp.nodes().delta(), alpha = interp.alpha();
  const double fnorm = f.l2_norm() * (f.is_zero() ? 0.0 : 1.0);
  const double b = riesz.b_hat * opts.slack;
  const double bound = 4.0 * b * b * std::exp(alpha * delta * (std::sqrt(2.0) - 1.0)) * fnorm;
  const auto rep = error_l2(f, interp, opts.spectral);
  return detail::finish_bound("tail-bound", rep.l2_tail, bound, opts.slack, riesz.b_hat, alpha, delta);
}

/// ||I||_{L2(R^2)} <= 13 B^4 e^{alpha delta (sqrt2 - 1)} ||f||_{L2(R^2)},  B = b_hat * slack.
inline BoundReport check_operator_norm(const BandlimitedFunction& f, const Interpolant& interp,
                                       const RieszEstimate& riesz, const BoundOptions& opts = {}) {
  const double delta = interp.nodes().delta(), alpha = interp.alpha();
  const double fnorm = f.is_zero() ? 0.0 : f.l2_norm();
  const double b = riesz.b_hat * opts.slack;
  const double bound = 13.0 * std::pow(b, 4) * std::exp(alpha * delta * (std::sqrt(2.0) - 1.0)) * fnorm;
  const double pref = kTwoPi / convention_constant(interp.kernel());
  const double scale = pref * pref * convention_constant(interp.kernel()) * std::max(interp.energy(), 0.0);
  double measured = 0.0;
  if (scale > 0.0) {
    const auto e = interpolant_energy(interp, opts.spectral.rel_tol * scale, 0.0, opts.spectral);
    measured = std::sqrt(e.in_square + e.tail);
  }
  return detail::finish_bound("operator-norm", measured, bound, opts.slack, riesz.b_hat, alpha, delta);
}

inline BoundReport check_operator_norm(const BandlimitedFunction& f, const Interpolant& interp,
                                       const BoundOptions& opts = {}) {
  return check_operator_norm(f, interp, riesz_estimate(exponential_gram(interp.nodes())), opts);
}

// ---------------------------------------------------------------------------

struct QuadraticFormReport {
  double q = 0.0;                ///< int symbol |H|^2
  double quadrature_error = 0.0;
  double coefficient_norm_sq = 0.0;
  double lower_bound = 0.0;      ///< e^{-sqrt2 alpha delta} lambda_min(E) ||a||^2
  double upper_bound = 0.0;      ///< (B^2 + 4 B^6 e^{-alpha delta} / (1 - e^{-alpha delta})^2) ||a||^2
  double lower_ratio = 0.0;      ///< lower_bound / q
  double upper_ratio = 0.0;      ///< q / upper_bound
  double slack = 1.2;
  bool lower_pass = false;
  bool upper_pass = false;
  bool inconclusive = false;
  int truncation_M = 2;

  bool pass() const { return lower_pass && upper_pass && !inconclusive; }
};

/// Q(a) = int symbol(|xi|) |H(xi)|^2 dxi by quadrature, checked against the finite-section
/// lower bound and the Riesz-constant upper bound.
inline QuadraticFormReport quadratic_form_bounds(const NodeSet& nodes, const Kernel& kernel, std::span<const double> a,
                                                 const RieszEstimate& riesz, double slack = 1.2,
                                                 const SpectralOptions& opts = {}) {
  if (a.size() != nodes.size()) throw InvalidArgument("quadratic_form_bounds: coefficient count mismatch");
  double norm_sq = 0.0;
  for (double v : a) norm_sq += v * v;
  if (!(norm_sq > 0.0)) throw InvalidArgument("quadratic_form_bounds: coefficient vector must be nonzero");
  const double alpha = kernel_alpha(kernel), delta = nodes.delta();
  const SpectralSymbol u(nodes.points(), std::vector<double>(a.begin(), a.end()));
  detail::SymbolEnergy energy(u, kernel, 1.0, 1.0);
  const double mag = u.abs_sum() * u.abs_sum();

  auto run = [&](double abs_tol) {
    const int M = opts.truncation_M > 0 ? opts.truncation_M
                                        : detail::choose_truncation(kernel, 1.0, mag, delta, 0.1 * abs_tol, opts.max_M);
    QuadOptions q{0.9 * abs_tol, opts.order, opts.max_level, energy.frequency()};
    auto r = integrate(TruncatedPlane{delta, M}, energy, q);
    r.error += detail::plane_remainder(kernel, 1.0, mag, delta, M);
    return std::pair{r, M};
  };
  // coarse pass sets the scale of the final tolerance
  const double crude = mag * symbol_tail_mass(kernel, 1.0, 0.0);
  const auto first = run(1e-6 * crude).first;
  const double target = 1e-9 * std::max(first.value, 1e-300);
  auto [res, M] = run(target);

  QuadraticFormReport rep;
  rep.q = res.value;
  rep.quadrature_error = res.error;
  rep.truncation_M = M;
  rep.coefficient_norm_sq = norm_sq;
  rep.slack = slack;
  rep.lower_bound = std::exp(-std::sqrt(2.0) * alpha * delta) * riesz.lambda_min * norm_sq;
  const double b = riesz.b_hat * slack;
  const double e = std::exp(-alpha * delta);
  rep.upper_bound = (b * b + 4.0 * std::pow(b, 6) * e / ((1.0 - e) * (1.0 - e))) * norm_sq;
  rep.lower_ratio = rep.lower_bound / rep.q;
  rep.upper_ratio = rep.q / rep.upper_bound;
  rep.inconclusive = !res.converged || res.error > 1e-6 * rep.q;
  rep.lower_pass = rep.q >= rep.lower_bound;
  rep.upper_pass = rep.q <= rep.upper_bound;
  return rep;
}

inline QuadraticFormReport quadratic_form_bounds(const NodeSet& nodes, double alpha, std::span<const double> a,
                                                 const RieszEstimate& riesz, double slack = 1.2,
                                                 const SpectralOptions& opts = {}) {
  return quadratic_form_bounds(nodes, Kernel{PoissonKernel(alpha)}, a, riesz, slack, opts);
}

// ---------------------------------------------------------------------------

/// int_{R^2} symbol(|xi|) e^{i<xi,x>} dxi by plane quadrature (real part; the imaginary part
/// vanishes by symmetry). The error includes the analytic remainder.
inline QuadResult fourier_pair_quadrature(const Kernel& kernel, Point2 x, double abs_tol, double delta = kPi,
                                          const SpectralOptions& opts = {}) {
  const SpectralSymbol u(std::vector<Point2>{-1.0 * x}, std::vector<double>{1.0});
  detail::SymbolMode mode(u, kernel, 1.0, 1.0, false);
  const int M = opts.truncation_M > 0 ? opts.truncation_M
                                      : detail::choose_truncation(kernel, 1.0, 1.0, delta, 0.1 * abs_tol, opts.max_M);
  auto r = integrate(TruncatedPlane{delta, M}, mode, QuadOptions{0.9 * abs_tol, opts.order, opts.max_level, mode.frequency()});
  r.error += detail::plane_remainder(kernel, 1.0, 1.0, delta, M);
  return r;
}

/// Ratio of the Fourier-pair quadrature to the spatial kernel value: the convention constant.
inline double measured_convention_constant(const Kernel& kernel, Point2 x, double rel_tol = 1e-9) {
  const double g = kernel_radial(kernel, norm(x));
  // |integral| <= int symbol = its value at x = 0
  const double scale = symbol_tail_mass(kernel, 1.0, 0.0);
  const auto r = fourier_pair_quadrature(kernel, x, rel_tol * scale);
  detail::require_converged(r, "measured_convention_constant");
  return r.value / g;
}

}  // namespace pwi
