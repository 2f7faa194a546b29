#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pwi/nodes.hpp"
#include "pwi/quadrature.hpp"
#include "pwi/spaces.hpp"

using pwi::kPi;
using pwi::kTwoPi;

TEST(Jinc, OriginAndNorm) {
  const auto f = pwi::BandlimitedFunction::jinc(0.25);
  EXPECT_NEAR(f.spatial({0, 0}), 0.03125, 1e-17);
  EXPECT_NEAR(f.spatial({1e-9, 0}), 0.03125, 1e-15);
  EXPECT_NEAR(f.l2_norm(), 0.443113462726379, 1e-14);
  EXPECT_THROW(pwi::BandlimitedFunction::jinc(0.0), pwi::InvalidArgument);
}

TEST(Jinc, MatchesPlaneQuadrature) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> c(-20.0, 20.0);
  const double beta = 0.25;
  const auto f = pwi::BandlimitedFunction::jinc(beta);
  for (int t = 0; t < 3; ++t) {
    const pwi::Point2 x{c(rng), c(rng)};
    const auto q = pwi::integrate(pwi::DiskRegion{beta}, [&](pwi::Point2 xi) { return std::cos(pwi::dot(xi, x)); },
                                  {.abs_tol = 1e-14, .order = 20, .frequency = pwi::norm(x)});
    const double oracle = q.value / kTwoPi;
    EXPECT_NEAR(f.spatial(x), oracle, 1e-7 * std::abs(oracle)) << x.x << "," << x.y;
  }
}

TEST(RadialPolynomial, ReducesToJinc) {
  const auto p = pwi::BandlimitedFunction::radial_polynomial(0.7, 1.0, 0.0);
  const auto j = pwi::BandlimitedFunction::jinc(0.7);
  for (double r : {0.0, 0.3, 2.0, 11.0, 40.0}) {
    const double ref = j.spatial_radial(r);
    EXPECT_NEAR(p.spatial_radial(r), ref, 1e-7 * std::abs(ref) + 1e-15) << r;
  }
  EXPECT_NEAR(p.l2_norm(), j.l2_norm(), 1e-14);
}

TEST(RadialPolynomial, ElementaryIntegrals) {
  const auto f = pwi::BandlimitedFunction::radial_polynomial(1.0, 0.0, 1.0);
  EXPECT_NEAR(f.l2_norm() * f.l2_norm(), kPi / 3.0, 1e-14);
  const auto g = pwi::BandlimitedFunction::radial_polynomial(0.6, 0.0, 1.0);
  EXPECT_NEAR(g.spatial({0, 0}), 0.36 / 4.0, 1e-15);
  // mixed profile: ||F||^2 = pi b^2 (c0^2 + c0 c1 + c1^2 / 3)
  const auto h = pwi::BandlimitedFunction::radial_polynomial(0.5, 2.0, -1.0);
  EXPECT_NEAR(h.l2_norm() * h.l2_norm(), kPi * 0.25 * (4.0 - 2.0 + 1.0 / 3.0), 1e-13);
  EXPECT_THROW(pwi::BandlimitedFunction::radial_polynomial(1.0, 0.0, 0.0), pwi::InvalidArgument);
}

TEST(RadialPolynomial, ClosedFormOfQuadraticPart) {
  // int_0^b (1 - rho^2/b^2) J0(rho r) rho d rho = 2 J2(b r) / r^2
  const double b = 0.8;
  const auto f = pwi::BandlimitedFunction::radial_polynomial(b, 0.0, 1.0);
  for (double r : {0.5, 3.0, 17.0}) {
    const double expected = 2.0 * std::cyl_bessel_j(2.0, b * r) / (r * r);
    EXPECT_NEAR(f.spatial_radial(r), expected, 1e-12) << r;
  }
}

TEST(BandConfinement, SpectralVanishesOutsideBall) {
  for (const auto& f : {pwi::BandlimitedFunction::jinc(0.3), pwi::BandlimitedFunction::radial_polynomial(0.3, 1.0, 2.0)}) {
    EXPECT_EQ(f.spectral({0.3 + 1e-12, 0.0}), 0.0);
    EXPECT_EQ(f.spectral({1.0, 1.0}), 0.0);
    EXPECT_GT(f.spectral({0.1, 0.1}), 0.0);
  }
}

TEST(Plancherel, SpatialQuadratureWithinTwoPercent) {
  // radial spatial energy 2 pi int_0^R f(r)^2 r dr over a large disk
  const auto f = pwi::BandlimitedFunction::jinc(1.0);
  const double R = 2000.0;
  const auto& rule = pwi::gauss_legendre(16);
  double sum = 0.0;
  for (double a = 0.0; a < R; a += 0.5) {
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double r = a + 0.25 * (rule.nodes[i] + 1.0);
      const double v = f.spatial_radial(r);
      sum += 0.25 * rule.weights[i] * v * v * r;
    }
  }
  const double spatial = std::sqrt(kTwoPi * sum);
  EXPECT_NEAR(spatial / f.l2_norm(), 1.0, 0.02);
}

TEST(RecoveryHypothesis, Threshold) {
  EXPECT_NEAR(pwi::recovery_threshold(1.0), 0.171572875253810, 1e-15);
  EXPECT_NEAR(pwi::recovery_threshold(kPi), 0.539012084452647, 1e-15);
  const pwi::BandSquare sq(kPi);
  EXPECT_TRUE(pwi::BandlimitedFunction::jinc(0.25).recovery_hypothesis(sq));
  EXPECT_FALSE(pwi::BandlimitedFunction::jinc(0.6).recovery_hypothesis(sq));
  EXPECT_TRUE(pwi::BandlimitedFunction::jinc(0.6).fits_square(sq));
}

TEST(Samples, LatticeAndZero) {
  const auto nodes = pwi::generate_lattice(kPi, 2);
  const auto y = pwi::samples_on(pwi::BandlimitedFunction::jinc(0.25), nodes);
  EXPECT_NEAR(y[*nodes.find({0, 0})], 0.03125, 1e-17);
  for (double v : pwi::samples_on(pwi::BandlimitedFunction::zero(0.25), nodes)) EXPECT_EQ(v, 0.0);
}

TEST(Samples, PartialSumsConvergeToSpectralEnergy) {
  // On the unit lattice the full sample energy equals ||F||^2 = pi beta^2; the jinc
  // tail decays like 1/W, so the window deficit times W settles near a constant.
  const double beta = 0.25;
  const auto f = pwi::BandlimitedFunction::jinc(beta);
  const double total = kPi * beta * beta;
  auto energy = [&](int w) {
    double s = 0.0;
    for (double v : pwi::samples_on(f, pwi::generate_lattice(kPi, w))) s += v * v;
    return s;
  };
  double prev = 0.0;
  for (int w = 0; w <= 12; ++w) {
    const double e = energy(w);
    EXPECT_GE(e, prev);
    EXPECT_LE(e, total);
    prev = e;
  }
  for (int w : {12, 24, 48, 100}) {
    const double scaled = (total - energy(w)) / total * w;
    EXPECT_GT(scaled, 1.9) << w;
    EXPECT_LT(scaled, 2.4) << w;
  }
  EXPECT_LT((total - energy(100)) / total, 0.03);
}

TEST(Samples, WarnsWhenBandExceedsSquare) {
  int warnings = 0;
  auto old = pwi::set_warning_handler([&](std::string_view) { ++warnings; });
  (void)pwi::samples_on(pwi::BandlimitedFunction::jinc(2.0), pwi::generate_lattice(1.0, 1));
  pwi::set_warning_handler(std::move(old));
  EXPECT_EQ(warnings, 1);
}
