#pragma once

// Paley-Wiener test functions with radial spectra on the ball B_beta.
//
// Transform convention: f(x) = (2 pi)^-1 int F(xi) e^{i<xi,x>} dxi, so that
// ||f||_{L2(R^2)} = ||F||_{L2} and radial profiles give f(r) = int_0^beta F(rho) J0(rho r) rho d rho.

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "pwi/bessel.hpp"
#include "pwi/detail/format.hpp"
#include "pwi/errors.hpp"
#include "pwi/gauss_legendre.hpp"
#include "pwi/geometry.hpp"
#include "pwi/nodes.hpp"

namespace pwi {

struct Ball {
  double beta = 0.0;
};
struct Square {
  double delta = 0.0;
};
using BandRegion = std::variant<Ball, Square>;

inline bool region_contains(const BandRegion& region, Point2 xi) {
  if (const auto* b = std::get_if<Ball>(&region)) return norm2(xi) <= b->beta * b->beta;
  const double d = std::get<Square>(region).delta;
  return std::abs(xi.x) <= d && std::abs(xi.y) <= d;
}

inline double region_area(const BandRegion& region) {
  if (const auto* b = std::get_if<Ball>(&region)) return kPi * b->beta * b->beta;
  const double d = std::get<Square>(region).delta;
  return 4.0 * d * d;
}

/// (3 - sqrt 8) delta: the largest ball radius for which recovery is asserted.
inline double recovery_threshold(double delta) { return (3.0 - std::sqrt(8.0)) * delta; }

inline bool recovery_hypothesis_holds(double beta, double delta) {
  return beta > 0.0 && beta < recovery_threshold(delta);
}

struct IndicatorProfile {};
/// F(xi) = c0 + c1 (1 - |xi|^2 / beta^2) on the ball.
struct RadialPolynomialProfile {
  double c0 = 1.0;
  double c1 = 0.0;
};
using SpectralProfile = std::variant<IndicatorProfile, RadialPolynomialProfile>;

class BandlimitedFunction {
 public:
  /// Spectrum = indicator of B_beta; f(x) = beta J1(beta |x|) / |x|.
  static BandlimitedFunction jinc(double beta) { return BandlimitedFunction(beta, IndicatorProfile{}); }

  static BandlimitedFunction radial_polynomial(double beta, double c0, double c1) {
    if (c0 == 0.0 && c1 == 0.0) throw InvalidArgument("radial_polynomial: c0 and c1 are both zero");
    return BandlimitedFunction(beta, RadialPolynomialProfile{c0, c1});
  }

  /// The zero element of PW_{B_beta}.
  static BandlimitedFunction zero(double beta) {
    return BandlimitedFunction(beta, RadialPolynomialProfile{0.0, 0.0});
  }

  double beta() const { return beta_; }
  BandRegion region() const { return Ball{beta_}; }
  const SpectralProfile& profile() const { return profile_; }

  bool is_zero() const {
    const auto* p = std::get_if<RadialPolynomialProfile>(&profile_);
    return p && p->c0 == 0.0 && p->c1 == 0.0;
  }

  std::string description() const {
    using detail::format_double;
    if (std::holds_alternative<IndicatorProfile>(profile_)) return "jinc(beta=" + format_double(beta_) + ")";
    const auto& p = std::get<RadialPolynomialProfile>(profile_);
    return "radial-poly(beta=" + format_double(beta_) + ", c0=" + format_double(p.c0) +
           ", c1=" + format_double(p.c1) + ")";
  }

  double spectral_radial(double rho) const {
    if (rho > beta_) return 0.0;
    if (std::holds_alternative<IndicatorProfile>(profile_)) return 1.0;
    const auto& p = std::get<RadialPolynomialProfile>(profile_);
    return p.c0 + p.c1 * (1.0 - rho * rho / (beta_ * beta_));
  }
  double spectral(Point2 xi) const { return spectral_radial(norm(xi)); }

  double spatial_radial(double r) const {
    if (std::holds_alternative<IndicatorProfile>(profile_)) {
      if (r < kSmallRadius) return 0.5 * beta_ * beta_;
      return beta_ * bessel_j1(beta_ * r) / r;
    }
    const auto& p = std::get<RadialPolynomialProfile>(profile_);
    if (r < kSmallRadius) return (0.5 * p.c0 + 0.25 * p.c1) * beta_ * beta_;
    return hankel_quadrature(r);
  }
  double spatial(Point2 x) const { return spatial_radial(norm(x)); }

  /// Exact ||f||_{L2(R^2)} = ||F||_{L2(B_beta)}.
  double l2_norm() const {
    if (std::holds_alternative<IndicatorProfile>(profile_)) return beta_ * std::sqrt(kPi);
    const auto& p = std::get<RadialPolynomialProfile>(profile_);
    const double sq = kPi * beta_ * beta_ * (p.c0 * p.c0 + p.c0 * p.c1 + p.c1 * p.c1 / 3.0);
    return std::sqrt(sq);
  }

  /// Whether the ball lies in S_delta and satisfies beta < (3 - sqrt 8) delta.
  bool fits_square(const BandSquare& sq) const { return beta_ <= sq.delta(); }
  bool recovery_hypothesis(const BandSquare& sq) const { return recovery_hypothesis_holds(beta_, sq.delta()); }

 private:
  static constexpr double kSmallRadius = 1e-8;

  BandlimitedFunction(double beta, SpectralProfile profile) : beta_(beta), profile_(profile) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("BandlimitedFunction: beta must be positive");
  }

  double hankel_quadrature(double r) const {
    const int panels = 1 + static_cast<int>(std::ceil(beta_ * r / kPi));
    const auto& lo = gauss_legendre(16);
    const auto& hi = gauss_legendre(24);
    double value = 0.0, err = 0.0, scale = 0.0;
    const double h = beta_ / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = (p + 0.5) * h, half = 0.5 * h;
      double ql = 0.0, qh = 0.0;
      for (std::size_t i = 0; i < lo.nodes.size(); ++i) {
        const double rho = mid + half * lo.nodes[i];
        ql += lo.weights[i] * spectral_radial(rho) * bessel_j0(rho * r) * rho;
      }
      for (std::size_t i = 0; i < hi.nodes.size(); ++i) {
        const double rho = mid + half * hi.nodes[i];
        const double v = hi.weights[i] * spectral_radial(rho) * bessel_j0(rho * r) * rho;
        qh += v;
        scale += std::abs(v);
      }
      value += qh * half;
      err += std::abs(qh - ql) * half;
    }
    if (err > 1e-12 * std::max(scale * h * 0.5, 1e-300))
      throw QuadratureError("radial_polynomial: Hankel quadrature did not converge at r = " +
                            detail::format_double(r));
    return value;
  }

  double beta_;
  SpectralProfile profile_;
};

/// f(x_j) in the node set's index order. Warns when B_beta is not inside S_delta.
inline std::vector<double> samples_on(const BandlimitedFunction& f, const NodeSet& nodes) {
  if (!f.fits_square(nodes.square()))
    warn("samples_on: band ball radius " + detail::format_double(f.beta()) + " exceeds the node square half-width " +
         detail::format_double(nodes.delta()));
  std::vector<double> out;
  out.reserve(nodes.size());
  for (const auto& x : nodes.points()) out.push_back(f.spatial(x));
  return out;
}

}  // namespace pwi
