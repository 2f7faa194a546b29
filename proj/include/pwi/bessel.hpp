#pragma once

// Bessel functions of the first kind, orders 0 and 1, for real z >= 0.
//
//   z < 8        power series
//   8 <= z < 25  Miller backward recurrence normalized by J0 + 2 sum J_2k = 1
//   z >= 25      Hankel asymptotic expansion
//
// Absolute accuracy is better than 1e-13 over [0, 1e4].

#include <array>
#include <cmath>
#include <numbers>

#include "pwi/errors.hpp"

namespace pwi {

namespace detail {

inline constexpr double kBesselSeriesLimit = 8.0;
inline constexpr double kBesselAsymptoticLimit = 25.0;

inline double bessel_series(int order, double z) {
  const double q = -0.25 * z * z;
  double term = (order == 0) ? 1.0 : 0.5 * z;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * (k + order));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

inline std::array<double, 2> bessel_miller(double z) {
  const int start = 2 * (static_cast<int>(z + 40.0 + 4.0 * std::cbrt(z)) / 2);
  double next = 0.0;  // J_{k+1}
  double cur = 1e-30; // J_k, k = start
  double even_sum = 0.0;
  double j1 = 0.0;
  for (int k = start; k >= 1; --k) {
    const double prev = (2.0 * k / z) * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    const int idx = k - 1;
    if (idx == 1) j1 = cur;
    if (idx >= 2 && idx % 2 == 0) even_sum += cur;
    if (std::abs(cur) > 1e200) {
      cur *= 1e-200;
      next *= 1e-200;
      even_sum *= 1e-200;
      j1 *= 1e-200;
    }
  }
  const double norm = cur + 2.0 * even_sum;
  return {cur / norm, j1 / norm};
}

inline double bessel_asymptotic(int order, double z) {
  const double mu = 4.0 * order * order;
  // P = sum (-1)^k a_{2k} / z^{2k},  Q = sum (-1)^k a_{2k+1} / z^{2k+1}
  double p = 1.0, q = 0.0;
  double term = 1.0;  // a_k / z^k
  double last = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * z);
    if (std::abs(term) > last) break;
    last = std::abs(term);
    const int r = k % 4;
    if (r == 1) q += term;
    else if (r == 2) p -= term;
    else if (r == 3) q -= term;
    else p += term;
    if (std::abs(term) < 1e-17) break;
  }
  const double s = std::sin(z), c = std::cos(z);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  double cos_chi, sin_chi;
  if (order == 0) {  // chi = z - pi/4
    cos_chi = (c + s) * inv_sqrt2;
    sin_chi = (s - c) * inv_sqrt2;
  } else {  // chi = z - 3pi/4
    cos_chi = (s - c) * inv_sqrt2;
    sin_chi = -(s + c) * inv_sqrt2;
  }
  return std::sqrt(2.0 / (std::numbers::pi * z)) * (p * cos_chi - q * sin_chi);
}

}  // namespace detail

/// J_order(z) for order 0 or 1 and z >= 0.
inline double bessel_j(int order, double z) {
  if (order != 0 && order != 1) throw InvalidArgument("bessel_j: order must be 0 or 1");
  if (!(z >= 0.0)) throw InvalidArgument("bessel_j: argument must be nonnegative");
  if (z < detail::kBesselSeriesLimit) return detail::bessel_series(order, z);
  if (z < detail::kBesselAsymptoticLimit) return detail::bessel_miller(z)[order];
  return detail::bessel_asymptotic(order, z);
}

inline double bessel_j0(double z) { return bessel_j(0, z); }
inline double bessel_j1(double z) { return bessel_j(1, z); }

}  // namespace pwi
