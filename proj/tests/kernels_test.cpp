#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pwi/kernels.hpp"
#include "pwi/spectral.hpp"

using pwi::kPi;
using pwi::kTwoPi;

TEST(PoissonKernel, PointValues) {
  const pwi::PoissonKernel k1(1.0), k2(2.0);
  EXPECT_NEAR(pwi::poisson_eval(k1, {0, 0}), 1.0 / (2 * kPi), 1e-16);
  EXPECT_NEAR(pwi::poisson_eval(k1, {1.0, std::sqrt(2.0)}), 1.0 / (16 * kPi), 1e-16);
  EXPECT_NEAR(pwi::poisson_eval(k2, {0, 0}), 1.0 / (8 * kPi), 1e-16);
  EXPECT_THROW(pwi::PoissonKernel(0.0), pwi::InvalidArgument);
}

TEST(PoissonKernel, SymbolValues) {
  EXPECT_EQ(pwi::poisson_symbol(pwi::PoissonKernel(1.0), {0, 0}), 1.0);
  EXPECT_NEAR(pwi::poisson_symbol(pwi::PoissonKernel(2.0), {0.6, 0.8}), std::exp(-2.0), 1e-16);
}

TEST(PoissonKernel, StrictlyDecreasingAndPositive) {
  const pwi::PoissonKernel k(0.7);
  double prev = k.radial(0.0);
  for (double r = 0.01; r < 100.0; r *= 1.1) {
    const double v = k.radial(r);
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(GeneralizedKernel, ClosedFormCases) {
  EXPECT_NEAR(pwi::generalized_eval({1.0, 1.0}, 1.0).value, kTwoPi * std::pow(2.0, -1.5), 1e-10);
  EXPECT_NEAR(pwi::generalized_eval({1.0, 2.0}, 0.0).value, kPi, 1e-10);
  EXPECT_NEAR(pwi::generalized_eval({1.0, 1.0}, 0.0).value, kTwoPi, 1e-10);
  // Gaussian pair: 2 pi int e^{-a rho^2} J0(rho r) rho = (pi / a) e^{-r^2 / (4a)}
  for (double r : {0.3, 1.0, 2.5, 6.0})
    EXPECT_NEAR(pwi::generalized_eval({0.5, 2.0}, r).value, 2 * kPi * std::exp(-r * r / 2.0), 1e-10) << r;
}

TEST(GeneralizedKernel, OmegaOneMatchesPoisson) {
  for (double alpha : {0.4, 1.0, 3.0}) {
    const pwi::PoissonKernel p(alpha);
    for (double r : {0.0, 0.5, 1.0, 2.0, 5.0}) {
      const double expected = pwi::kPoissonConventionConstant * p.radial(r);
      EXPECT_NEAR(pwi::generalized_eval({alpha, 1.0}, r).value, expected, 1e-7 * expected) << alpha << " " << r;
    }
  }
}

TEST(GeneralizedKernel, FractionalOmegaConvergesWithEstimate) {
  const pwi::GeneralizedKernel k(1.0, 0.5);
  for (double r : {0.0, 0.5, 3.0, 20.0}) {
    const auto v = pwi::generalized_eval(k, r, 1e-9);
    EXPECT_LE(v.abs_error, 1e-9);
    EXPECT_TRUE(std::isfinite(v.value));
  }
  // r = 0: 2 pi int e^{-sqrt rho} rho d rho = 2 pi * 2 Gamma(4) = 24 pi
  EXPECT_NEAR(pwi::generalized_eval(k, 0.0, 1e-9).value, 24 * kPi, 1e-8);
}

TEST(GeneralizedKernel, ReportsNonConvergence) {
  EXPECT_THROW(pwi::generalized_eval({1.0, 1.0}, 1.0, 1e-30), pwi::QuadratureError);
  EXPECT_THROW(pwi::GeneralizedKernel(1.0, 2.5), pwi::InvalidArgument);
  EXPECT_THROW(pwi::GeneralizedKernel(1.0, 0.0), pwi::InvalidArgument);
}

TEST(ConventionConstant, PlaneQuadratureFixesPoissonConstant) {
  // int e^{-|xi|} e^{i<xi,x>} dxi at x = (1,0) equals 2 pi 2^{-3/2}
  const pwi::Kernel k = pwi::PoissonKernel(1.0);
  const auto q = pwi::fourier_pair_quadrature(k, {1.0, 0.0}, 1e-10);
  EXPECT_TRUE(q.converged);
  EXPECT_NEAR(q.value, kTwoPi * std::pow(2.0, -1.5), 1e-8);
  EXPECT_NEAR(pwi::measured_convention_constant(k, {1.0, 0.0}), 4 * kPi * kPi, 1e-6 * 4 * kPi * kPi);
}

TEST(ConventionConstant, RandomPointsBothKernels) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  for (int t = 0; t < 5; ++t) {
    const pwi::Point2 x{c(rng), c(rng)};
    const pwi::Kernel p = pwi::PoissonKernel(0.8);
    EXPECT_NEAR(pwi::measured_convention_constant(p, x) / pwi::convention_constant(p), 1.0, 1e-6);
    const pwi::Kernel g = pwi::GeneralizedKernel(0.8, 1.5);
    EXPECT_NEAR(pwi::measured_convention_constant(g, x) / pwi::convention_constant(g), 1.0, 1e-6);
  }
}

TEST(SymbolTail, ExactForExponentAndGaussian) {
  // 2 pi int_R^inf e^{-rho} rho = 2 pi (R + 1) e^{-R}
  EXPECT_NEAR(pwi::radial_exp_tail(1.0, 1.0, 3.0), kTwoPi * 4.0 * std::exp(-3.0), 1e-14);
  // 2 pi int_R^inf e^{-rho^2} rho = pi e^{-R^2}
  EXPECT_NEAR(pwi::radial_exp_tail(1.0, 2.0, 1.5), kPi * std::exp(-2.25), 1e-14);
  // fractional omega: bound must dominate a direct sum
  const double b = pwi::radial_exp_tail(1.0, 0.5, 4.0);
  double direct = 0.0;
  for (double rho = 4.0; rho < 4000.0; rho += 1e-3) direct += std::exp(-std::sqrt(rho + 5e-4)) * (rho + 5e-4) * 1e-3;
  EXPECT_GE(b, kTwoPi * direct * (1 - 1e-6));
  EXPECT_LE(b, kTwoPi * direct * 2.0);
}
