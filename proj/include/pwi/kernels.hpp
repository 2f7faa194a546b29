#pragma once

// Radial kernels with exponential spectral symbols.
//
// Both kernels satisfy  int_{R^2} symbol(|xi|) e^{i<xi,x>} dxi = c * kernel(x)
// where c = convention_constant(kernel): (2 pi)^2 for the Poisson kernel
// (2 pi)^-1 alpha (alpha^2 + |x|^2)^-3/2 and 1 for the generalized kernel,
// which is defined directly as that integral.

#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include "pwi/bessel.hpp"
#include "pwi/detail/format.hpp"
#include "pwi/errors.hpp"
#include "pwi/gauss_legendre.hpp"
#include "pwi/geometry.hpp"

namespace pwi {

struct PoissonKernel {
  double alpha = 1.0;

  explicit PoissonKernel(double a) : alpha(a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("PoissonKernel: alpha must be positive");
  }
  double radial(double r) const {
    const double s = alpha * alpha + r * r;
    return alpha / (kTwoPi * s * std::sqrt(s));
  }
  double symbol(double rho) const { return std::exp(-alpha * rho); }
};

/// Kernel whose spectral symbol is e^{-alpha |xi|^omega}, 0 < omega <= 2.
struct GeneralizedKernel {
  double alpha = 1.0;
  double omega = 1.0;

  GeneralizedKernel(double a, double w) : alpha(a), omega(w) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("GeneralizedKernel: alpha must be positive");
    if (!(w > 0.0 && w <= 2.0)) throw InvalidArgument("GeneralizedKernel: omega must lie in (0, 2]");
  }
  double symbol(double rho) const { return std::exp(-alpha * std::pow(rho, omega)); }
};

using Kernel = std::variant<PoissonKernel, GeneralizedKernel>;

/// (2 pi)^-1 alpha (alpha^2 + <x,x>)^-3/2
inline double poisson_eval(const PoissonKernel& k, Point2 x) { return k.radial(norm(x)); }

/// e^{-alpha |xi|}
inline double poisson_symbol(const PoissonKernel& k, Point2 xi) { return k.symbol(norm(xi)); }

inline constexpr double kPoissonConventionConstant = kTwoPi * kTwoPi;

namespace detail {

/// Upper bound on Gamma(s, T) for s >= 1.
inline double upper_gamma_bound(double s, double t) {
  if (t <= s - 1.0 + 1e-12) return std::tgamma(s);
  return std::exp((s - 1.0) * std::log(t) - t) * t / (t - (s - 1.0));
}

inline bool is_integer(double w) { return w == std::floor(w); }

}  // namespace detail

/// 2 pi int_R^inf e^{-c rho^omega} rho d rho; exact for omega in {1, 2}, an upper bound otherwise.
inline double radial_exp_tail(double c, double omega, double R) {
  R = std::max(R, 0.0);
  if (omega == 1.0) return kTwoPi * (R / c + 1.0 / (c * c)) * std::exp(-c * R);
  if (omega == 2.0) return kPi * std::exp(-c * R * R) / c;
  const double s = 2.0 / omega;
  return kTwoPi / omega * std::pow(c, -s) * detail::upper_gamma_bound(s, c * std::pow(R, omega));
}

struct RadialValue {
  double value = 0.0;
  double abs_error = 0.0;
};

/// 2 pi int_0^inf e^{-alpha rho^omega} J0(rho r) rho d rho by Gauss-Legendre panels between
/// J0 oscillation nodes, plus an exponential tail bound. Throws QuadratureError when the
/// error estimate exceeds abs_tol.
inline RadialValue generalized_eval(const GeneralizedKernel& k, double r, double abs_tol = 1e-12) {
  if (!(r >= 0.0)) throw InvalidArgument("generalized_eval: r must be nonnegative");
  if (!(abs_tol > 0.0)) throw InvalidArgument("generalized_eval: tolerance must be positive");
  const double a = k.alpha, w = k.omega;
  const double decay = std::pow(a, -1.0 / w);

  // truncation radius: tail <= abs_tol / 4 (|J0| <= 1)
  double R = decay;
  double tail = radial_exp_tail(a, w, R);
  while (tail > 0.25 * abs_tol) {
    R *= 1.25;
    tail = radial_exp_tail(a, w, R);
  }

  std::vector<double> bp{0.0};
  const double period = r > 0.0 ? kPi / r : std::numeric_limits<double>::infinity();
  const double width = std::min(period, decay);
  double first = r > 0.0 ? std::min(0.75 * period, decay) : decay;
  first = std::min(first, R);
  if (!detail::is_integer(w)) {
    // geometric grading toward the rho^omega singularity at the origin
    for (int g = 40; g >= 1; --g) bp.push_back(first * std::ldexp(1.0, -g));
  }
  bp.push_back(first);
  // remaining breakpoints at the approximate J0 zeros (k - 1/4) pi / r, split to the decay scale
  double x = first;
  int zero = 2;
  while (x < R) {
    double next = r > 0.0 ? (zero++ - 0.25) * period : x + width;
    if (next <= x) next = x + width;
    next = std::min(next, R);
    const int pieces = std::max(1, static_cast<int>(std::ceil((next - x) / decay)));
    for (int p = 1; p <= pieces; ++p) bp.push_back(x + (next - x) * p / pieces);
    x = next;
  }

  const auto& lo = gauss_legendre(20);
  const auto& hi = gauss_legendre(30);
  auto integrand = [&](double rho) { return std::exp(-a * std::pow(rho, w)) * bessel_j0(rho * r) * rho; };
  auto panel = [&](const GaussRule& rule, double p0, double p1) {
    const double half = 0.5 * (p1 - p0), mid = 0.5 * (p1 + p0);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * integrand(mid + half * rule.nodes[i]);
    return s * half;
  };
  double value = 0.0, err = 0.0;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    if (bp[i + 1] <= bp[i]) continue;
    const double qh = panel(hi, bp[i], bp[i + 1]);
    const double ql = panel(lo, bp[i], bp[i + 1]);
    value += qh;
    err += std::abs(qh - ql);
  }
  RadialValue out{kTwoPi * value, kTwoPi * err + tail};
  if (out.abs_error > abs_tol)
    throw QuadratureError("generalized_eval: error estimate " + detail::format_double(out.abs_error) +
                          " exceeds tolerance " + detail::format_double(abs_tol) + " at r = " +
                          detail::format_double(r));
  return out;
}

inline double generalized_symbol(const GeneralizedKernel& k, double rho) { return k.symbol(rho); }

// ---------------------------------------------------------------------------
// Uniform access over the kernel variant.

inline double kernel_alpha(const Kernel& k) {
  return std::visit([](const auto& v) { return v.alpha; }, k);
}

inline double kernel_omega(const Kernel& k) {
  if (const auto* g = std::get_if<GeneralizedKernel>(&k)) return g->omega;
  return 1.0;
}

/// Spatial value at radius r.
inline double kernel_radial(const Kernel& k, double r) {
  if (const auto* p = std::get_if<PoissonKernel>(&k)) return p->radial(r);
  return generalized_eval(std::get<GeneralizedKernel>(k), r).value;
}

inline double kernel_symbol(const Kernel& k, double rho) {
  return std::visit([rho](const auto& v) { return v.symbol(rho); }, k);
}

inline double convention_constant(const Kernel& k) {
  return std::holds_alternative<PoissonKernel>(k) ? kPoissonConventionConstant : 1.0;
}

/// 2 pi int_R^inf symbol(rho)^power rho d rho (an upper bound when omega is not 1 or 2).
inline double symbol_tail_mass(const Kernel& k, double power, double R) {
  return radial_exp_tail(power * kernel_alpha(k), kernel_omega(k), R);
}

inline std::string kernel_name(const Kernel& k) {
  if (std::holds_alternative<PoissonKernel>(k)) return "poisson";
  return "generalized";
}

}  // namespace pwi
