#pragma once

// Deterministic tensor Gauss-Legendre quadrature over axis-aligned rectangles,
// square annuli m S_delta \ (m-1) S_delta, the band square, and disks.
//
// Each base rectangle is split into n0x x n0y panels (level 0); level l uses
// 2^l times as many per axis. Refinement stops when two consecutive levels
// differ by less than the rectangle's share of the tolerance. Panels with a
// corner at the origin use a Duffy map with a quadratic radial stretch so that
// |xi|-type kinks and |xi|^omega cusps become smooth.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <span>
#include <variant>
#include <vector>

#include "pwi/detail/parallel.hpp"
#include "pwi/errors.hpp"
#include "pwi/gauss_legendre.hpp"
#include "pwi/geometry.hpp"

namespace pwi {

struct QuadOptions {
  double abs_tol = 1e-10;
  int order = 16;
  int max_level = 7;
  /// Largest angular frequency of the integrand along either axis; sizes level-0 panels.
  double frequency = 0.0;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    error += o.error;
    converged = converged && o.converged;
    return *this;
  }
};

/// Integrand evaluated on tensor grids: out(i, k) = f(xs[i], ys[k]).
template <class F>
concept GridIntegrand = requires(const F& f, std::span<const double> xs, std::span<const double> ys,
                                 Eigen::MatrixXd& out, Point2 p) {
  f.eval_grid(xs, ys, out);
  { f.eval_point(p) } -> std::convertible_to<double>;
};

/// Optional a-priori bound: sup |f| over a rectangle.
template <class F>
concept BoundedIntegrand = GridIntegrand<F> && requires(const F& f, const Rect& r) {
  { f.sup_bound(r) } -> std::convertible_to<double>;
};

/// Adapts a plain callable double(Point2) to the grid interface.
template <class Fn>
struct Pointwise {
  Fn fn;
  void eval_grid(std::span<const double> xs, std::span<const double> ys, Eigen::MatrixXd& out) const {
    out.resize(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t k = 0; k < ys.size(); ++k) out(i, k) = fn(Point2{xs[i], ys[k]});
  }
  double eval_point(Point2 p) const { return fn(p); }
};
template <class Fn>
Pointwise(Fn) -> Pointwise<Fn>;

// ---------------------------------------------------------------------------
// Regions

struct RectRegion {
  Rect rect;
};
/// S_delta = [-delta, delta]^2, split into its four quadrants.
struct SquareRegion {
  double delta = 0.0;
};
/// m S_delta \ (m-1) S_delta for m >= 2, split into 4 corner squares and 4 edge strips.
struct SquareAnnulus {
  double delta = 0.0;
  int m = 2;
};
/// S_delta together with annuli 2..M, i.e. M S_delta.
struct TruncatedPlane {
  double delta = 0.0;
  int M = 2;
};
struct DiskRegion {
  double radius = 0.0;
};
using Region = std::variant<RectRegion, SquareRegion, SquareAnnulus, TruncatedPlane, DiskRegion>;

inline std::vector<Rect> square_rects(double d) {
  return {{0.0, d, 0.0, d}, {-d, 0.0, 0.0, d}, {-d, 0.0, -d, 0.0}, {0.0, d, -d, 0.0}};
}

inline std::vector<Rect> annulus_rects(double d, int m) {
  if (m < 2) throw InvalidArgument("annulus_rects: m must be >= 2");
  const double o = m * d, i = (m - 1) * d;
  return {{i, o, i, o},   {-o, -i, i, o},  {-o, -i, -o, -i}, {i, o, -o, -i},
          {-i, i, i, o},  {-i, i, -o, -i}, {i, o, -i, i},    {-o, -i, -i, i}};
}

inline std::vector<Rect> region_rects(const Region& region) {
  if (const auto* r = std::get_if<RectRegion>(&region)) return {r->rect};
  if (const auto* s = std::get_if<SquareRegion>(&region)) return square_rects(s->delta);
  if (const auto* a = std::get_if<SquareAnnulus>(&region)) return annulus_rects(a->delta, a->m);
  if (const auto* p = std::get_if<TruncatedPlane>(&region)) {
    auto out = square_rects(p->delta);
    for (int m = 2; m <= p->M; ++m) {
      auto ring = annulus_rects(p->delta, m);
      out.insert(out.end(), ring.begin(), ring.end());
    }
    return out;
  }
  throw InvalidArgument("region_rects: disk regions are not rectangle unions");
}

inline double region_area(const Region& region) {
  if (const auto* d = std::get_if<DiskRegion>(&region)) return kPi * d->radius * d->radius;
  double a = 0.0;
  for (const auto& r : region_rects(region)) a += r.area();
  return a;
}

namespace detail {

inline bool touches_origin(const Rect& r) {
  return (r.x0 == 0.0 || r.x1 == 0.0) && (r.y0 == 0.0 || r.y1 == 0.0);
}

template <GridIntegrand F>
double tensor_panel(const Rect& p, const F& f, const GaussRule& rule) {
  const std::size_t n = rule.nodes.size();
  std::vector<double> xs(n), ys(n);
  const double hx = 0.5 * p.width(), mx = 0.5 * (p.x0 + p.x1);
  const double hy = 0.5 * p.height(), my = 0.5 * (p.y0 + p.y1);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = mx + hx * rule.nodes[i];
    ys[i] = my + hy * rule.nodes[i];
  }
  Eigen::MatrixXd vals;
  f.eval_grid(xs, ys, vals);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t k = 0; k < n; ++k) row += rule.weights[k] * vals(i, k);
    s += rule.weights[i] * row;
  }
  return s * hx * hy;
}

/// Duffy map of a panel with one corner at the origin: two triangles, s = sigma^2.
template <GridIntegrand F>
double duffy_panel(const Rect& p, const F& f, const GaussRule& rule) {
  const double a = (p.x0 == 0.0) ? p.x1 : p.x0;
  const double b = (p.y0 == 0.0) ? p.y1 : p.y0;
  const std::size_t n = rule.nodes.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sigma = 0.5 * (1.0 + rule.nodes[i]);
    const double s2 = sigma * sigma;
    double inner = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = 0.5 * (1.0 + rule.nodes[k]);
      inner += rule.weights[k] * (f.eval_point({s2 * a, s2 * b * t}) + f.eval_point({s2 * a * t, s2 * b}));
    }
    s += rule.weights[i] * 2.0 * sigma * s2 * inner;
  }
  return s * 0.25 * std::abs(a * b);
}

template <GridIntegrand F>
double level_sum(const Rect& rect, const F& f, const GaussRule& rule, int nx, int ny, double skip_tol) {
  const std::size_t count = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  std::vector<double> vals(count, 0.0);
  const double dx = rect.width() / nx, dy = rect.height() / ny;
  parallel_for(count, [&](std::size_t idx) {
    const int ix = static_cast<int>(idx / ny), iy = static_cast<int>(idx % ny);
    Rect p{rect.x0 + ix * dx, ix + 1 == nx ? rect.x1 : rect.x0 + (ix + 1) * dx,
           rect.y0 + iy * dy, iy + 1 == ny ? rect.y1 : rect.y0 + (iy + 1) * dy};
    if constexpr (BoundedIntegrand<F>) {
      if (f.sup_bound(p) * p.area() <= skip_tol) return;
    }
    vals[idx] = touches_origin(p) ? duffy_panel(p, f, rule) : tensor_panel(p, f, rule);
  });
  return pairwise_sum(vals);
}

}  // namespace detail

/// Integrate over one rectangle to absolute tolerance opts.abs_tol.
template <GridIntegrand F>
QuadResult integrate_rect(const Rect& rect, const F& f, const QuadOptions& opts) {
  if (!(opts.abs_tol > 0.0)) throw InvalidArgument("integrate: tolerance must be positive");
  if (rect.area() <= 0.0) return {};
  if constexpr (BoundedIntegrand<F>) {
    const double b = f.sup_bound(rect) * rect.area();
    if (b <= opts.abs_tol) return {0.0, b, true};
  }
  const auto& rule = gauss_legendre(opts.order);
  double h0 = std::min(rect.width(), rect.height());
  if (opts.frequency > 0.0) h0 = std::min(h0, opts.order / opts.frequency);
  const int nx0 = std::max(1, static_cast<int>(std::ceil(rect.width() / h0 - 1e-9)));
  const int ny0 = std::max(1, static_cast<int>(std::ceil(rect.height() / h0 - 1e-9)));
  // panels skipped on a-priori bounds contribute at most this much in total
  auto skip = [&](int nx, int ny) { return 1e-3 * opts.abs_tol / (static_cast<double>(nx) * ny); };

  double prev = detail::level_sum(rect, f, rule, nx0, ny0, skip(nx0, ny0));
  double diff = 0.0;
  for (int level = 1; level <= opts.max_level; ++level) {
    const int nx = nx0 << level, ny = ny0 << level;
    const double cur = detail::level_sum(rect, f, rule, nx, ny, skip(nx, ny));
    diff = std::abs(cur - prev);
    if (diff < opts.abs_tol) return {cur, diff, true};
    prev = cur;
  }
  return {prev, diff, false};
}

/// Integrate over a disk of the given radius centred at the origin, in polar panels.
template <GridIntegrand F>
QuadResult integrate_disk(double radius, const F& f, const QuadOptions& opts) {
  if (!(radius > 0.0)) throw InvalidArgument("integrate_disk: radius must be positive");
  const auto& rule = gauss_legendre(opts.order);
  const std::size_t n = rule.nodes.size();
  const double scale = opts.frequency > 0.0 ? radius * opts.frequency / opts.order : 0.0;
  const int nr0 = std::max(1, static_cast<int>(std::ceil(scale)));
  const int nt0 = std::max(4, static_cast<int>(std::ceil(kTwoPi * scale)));
  auto level = [&](int nr, int nt) {
    std::vector<double> vals(static_cast<std::size_t>(nr) * nt, 0.0);
    const double dr = radius / nr, dt = kTwoPi / nt;
    parallel_for(vals.size(), [&](std::size_t idx) {
      const int ir = static_cast<int>(idx / nt), it = static_cast<int>(idx % nt);
      const double r0 = ir * dr, t0 = it * dt;
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = r0 + 0.5 * dr * (1.0 + rule.nodes[i]);
        double row = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double t = t0 + 0.5 * dt * (1.0 + rule.nodes[k]);
          row += rule.weights[k] * f.eval_point({r * std::cos(t), r * std::sin(t)});
        }
        s += rule.weights[i] * r * row;
      }
      vals[idx] = s * 0.25 * dr * dt;
    });
    return pairwise_sum(vals);
  };
  double prev = level(nr0, nt0), diff = 0.0;
  for (int l = 1; l <= opts.max_level; ++l) {
    const double cur = level(nr0 << l, nt0 << l);
    diff = std::abs(cur - prev);
    if (diff < opts.abs_tol) return {cur, diff, true};
    prev = cur;
  }
  return {prev, diff, false};
}

/// Integrate over any region; the tolerance is split evenly over its rectangles.
template <GridIntegrand F>
QuadResult integrate(const Region& region, const F& f, const QuadOptions& opts = {}) {
  if (!(opts.abs_tol > 0.0)) throw InvalidArgument("integrate: tolerance must be positive");
  if (const auto* d = std::get_if<DiskRegion>(&region)) return integrate_disk(d->radius, f, opts);
  const auto rects = region_rects(region);
  QuadOptions per = opts;
  per.abs_tol = opts.abs_tol / static_cast<double>(rects.size());
  QuadResult total;
  for (const auto& r : rects) total += integrate_rect(r, f, per);
  return total;
}

/// Convenience overload for plain callables.
template <class Fn>
  requires std::invocable<const Fn&, Point2> && (!GridIntegrand<Fn>)
QuadResult integrate(const Region& region, const Fn& fn, const QuadOptions& opts = {}) {
  return integrate(region, Pointwise<Fn>{fn}, opts);
}

}  // namespace pwi
