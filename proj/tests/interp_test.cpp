#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pwi/interp.hpp"
#include "pwi/quadrature.hpp"
#include "pwi/spaces.hpp"
#include "pwi/spectral.hpp"

using pwi::kPi;
using pwi::kTwoPi;

namespace {

pwi::Interpolant jinc_interpolant(double beta, int window, double alpha) {
  const auto nodes = pwi::generate_lattice(kPi, window);
  const auto y = pwi::samples_on(pwi::BandlimitedFunction::jinc(beta), nodes);
  return pwi::solve(pwi::assemble(nodes, pwi::PoissonKernel(alpha)), y);
}

}  // namespace

TEST(Assemble, SmallCases) {
  const auto one = pwi::assemble(pwi::generate_lattice(kPi, 0), pwi::PoissonKernel(1.0));
  ASSERT_EQ(one.matrix.rows(), 1);
  EXPECT_NEAR(one.matrix(0, 0), 1.0 / kTwoPi, 1e-16);

}

TEST(Assemble, PairAtDistanceSqrtThree) {
  const pwi::NodeSet pair(kPi / 2.0, 1, pwi::Perturbed{1.0, 0}, {{0, 0}, {1, 1}},
                          {{0.0, 0.0}, {1.0, std::sqrt(2.0)}});
  const auto g = pwi::assemble(pair, pwi::PoissonKernel(1.0));
  EXPECT_NEAR(g.matrix(0, 1), 1.0 / (16 * kPi), 1e-16);
}

TEST(Assemble, SymmetricConstantDiagonalDominant) {
  const auto g = pwi::assemble(pwi::generate_lattice(kPi, 1), pwi::PoissonKernel(1.0));
  ASSERT_EQ(g.matrix.rows(), 9);
  EXPECT_TRUE(g.matrix == g.matrix.transpose());
  for (Eigen::Index i = 0; i < 9; ++i) EXPECT_EQ(g.matrix(i, i), 1.0 / kTwoPi);
  // at alpha = 1 the centre row is not dominant (4 g(1) + 4 g(sqrt 2) > g(0)) but the matrix is definite
  const Eigen::Index c = 4;
  EXPECT_LT(g.matrix(c, c), g.matrix.row(c).cwiseAbs().sum() - g.matrix(c, c));
  EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(g.matrix).info(), Eigen::Success);
  const auto s = pwi::assemble(pwi::generate_lattice(kPi, 1), pwi::PoissonKernel(0.3));
  for (Eigen::Index i = 0; i < 9; ++i)
    EXPECT_GT(s.matrix(i, i), s.matrix.row(i).cwiseAbs().sum() - s.matrix(i, i));
  const auto p = pwi::assemble(pwi::generate_perturbed(kPi, 3, 0.03, 4), pwi::PoissonKernel(0.6));
  EXPECT_TRUE(p.matrix == p.matrix.transpose());
}

TEST(Assemble, GeneralizedKernelMatchesPoissonAtOmegaOne) {
  const auto nodes = pwi::generate_perturbed(kPi, 1, 0.03, 3);
  const auto p = pwi::assemble(nodes, pwi::PoissonKernel(1.3));
  const auto g = pwi::assemble(nodes, pwi::GeneralizedKernel(1.3, 1.0));
  EXPECT_LT((g.matrix / pwi::kPoissonConventionConstant - p.matrix).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Assemble, PositiveDefiniteOverAlphaRange) {
  for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
    for (int w : {1, 5, 10}) {
      const auto g = pwi::assemble(pwi::generate_lattice(kPi, w), pwi::PoissonKernel(alpha));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.matrix, Eigen::EigenvaluesOnly);
      EXPECT_GT(es.eigenvalues().minCoeff(), 0.0) << alpha << " " << w;
    }
  }
}

TEST(Solve, SingleNodeAndZeroSamples) {
  const double alpha = 1.7, y = 0.4;
  const auto g = pwi::assemble(pwi::generate_lattice(kPi, 0), pwi::PoissonKernel(alpha));
  const auto I = pwi::solve(g, std::vector<double>{y});
  EXPECT_NEAR(I.coefficients()[0], kTwoPi * alpha * alpha * y, 1e-14);

  const auto lat = pwi::assemble(pwi::generate_lattice(kPi, 2), pwi::PoissonKernel(1.0));
  const auto Z = pwi::solve(lat, std::vector<double>(25, 0.0));
  for (double a : Z.coefficients()) EXPECT_EQ(a, 0.0);
  EXPECT_EQ(Z.report().relative_residual, 0.0);
  EXPECT_EQ(Z.evaluate({0.3, 0.2}), 0.0);
}

TEST(Solve, JincWindowFourReproducesSamples) {
  const auto I = jinc_interpolant(0.25, 4, 1.0);
  EXPECT_LE(I.report().relative_residual, 1e-12);
  EXPECT_FALSE(I.report().method.empty());
  for (std::size_t k = 0; k < I.nodes().size(); ++k) {
    const double y = I.samples()[k];
    EXPECT_NEAR(I.evaluate(I.nodes().point(k)), y, 1e-9 * std::abs(y) + 1e-15) << k;
  }
}

TEST(Solve, RejectsLengthMismatch) {
  const auto g = pwi::assemble(pwi::generate_lattice(kPi, 1), pwi::PoissonKernel(1.0));
  EXPECT_THROW(pwi::solve(g, std::vector<double>(3, 1.0)), pwi::InvalidArgument);
}

TEST(Solve, IllConditionedLargeAlphaSignalsFailure) {
  // at very large alpha the Gram collapses onto rank one in double precision
  const auto g = pwi::assemble(pwi::generate_lattice(kPi, 3), pwi::PoissonKernel(1e6));
  std::vector<double> y(g.matrix.rows());
  std::iota(y.begin(), y.end(), 1.0);
  EXPECT_THROW(pwi::solve(g, y), pwi::NotPositiveDefinite);
}

TEST(Evaluate, SingleNodeClosedForm) {
  const auto nodes = pwi::generate_lattice(kPi, 0);
  const pwi::Interpolant I(nodes, pwi::PoissonKernel(1.0), {kTwoPi}, {1.0}, {});
  EXPECT_NEAR(I.evaluate({1.0, std::sqrt(2.0)}), 0.125, 1e-15);
}

TEST(Evaluate, PermutationEquivariance) {
  const auto nodes = pwi::generate_perturbed(kPi, 2, 0.03, 21);
  const auto f = pwi::BandlimitedFunction::jinc(0.3);
  const pwi::Kernel k = pwi::PoissonKernel(0.9);
  const auto I = pwi::solve(pwi::assemble(nodes, k), pwi::samples_on(f, nodes));

  std::vector<std::size_t> perm(nodes.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(3);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto pn = nodes.permuted(perm);
  const auto J = pwi::solve(pwi::assemble(pn, k), pwi::samples_on(f, pn));
  for (std::size_t i = 0; i < perm.size(); ++i)
    EXPECT_NEAR(J.coefficients()[i], I.coefficients()[perm[i]], 1e-12 * std::abs(I.coefficients()[perm[i]]) + 1e-14);
  for (pwi::Point2 x : {pwi::Point2{0.3, -1.2}, pwi::Point2{4.0, 4.0}, pwi::Point2{-7.0, 0.5}})
    EXPECT_NEAR(I.evaluate(x), J.evaluate(x), 1e-12);
}

TEST(Evaluate, ShiftEquivariance) {
  const auto nodes = pwi::generate_perturbed(kPi, 2, 0.03, 8);
  const pwi::Point2 s{0.37, -1.9};
  const auto shifted_points = nodes.shifted_points(s);
  const pwi::NodeSet moved(kPi, nodes.window(), pwi::Perturbed{1e9, 0}, nodes.indices(), shifted_points);
  std::vector<double> y(nodes.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::sin(static_cast<double>(i));
  const pwi::Kernel k = pwi::PoissonKernel(1.1);
  const auto I = pwi::solve(pwi::assemble(nodes, k), y);
  const auto J = pwi::solve(pwi::assemble(moved, k), y);
  for (pwi::Point2 x : {pwi::Point2{0.0, 0.0}, pwi::Point2{2.5, -0.5}, pwi::Point2{-3.0, 6.0}})
    EXPECT_NEAR(I.evaluate(x), J.evaluate(x + s), 1e-12);
}

TEST(Evaluate, ManyMatchesSingle) {
  const auto I = jinc_interpolant(0.25, 3, 1.0);
  const auto pts = pwi::GridSpec{4.0, 9}.nodes();
  const auto many = I.evaluate_many(pts);
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(many[i], I.evaluate(pts[i]));
}

TEST(SpectralSymbol, GridMatchesPointwiseAndIsBounded) {
  const auto nodes = pwi::generate_perturbed(kPi, 2, 0.03, 2);
  std::vector<double> a(nodes.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::cos(1.0 + static_cast<double>(i));
  const pwi::SpectralSymbol u(nodes.points(), a);
  const pwi::SpectralSymbol lat(pwi::generate_lattice(kPi, 2).points(), a);
  const std::vector<double> xs{-2.0, -0.1, 0.0, 0.7, 3.1}, ys{-1.3, 0.2, 2.9};
  for (const auto* s : {&u, &lat}) {
    Eigen::MatrixXcd out;
    s->eval_grid(xs, ys, out);
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t k = 0; k < ys.size(); ++k) {
        const auto p = (*s)({xs[i], ys[k]});
        EXPECT_LT(std::abs(out(i, k) - p), 1e-12);
        EXPECT_LE(std::abs(p), s->abs_sum() + 1e-12);
      }
  }
}

TEST(SpectralTransform, SingleNodeAndZero) {
  const pwi::Interpolant I(pwi::generate_lattice(kPi, 0), pwi::PoissonKernel(1.5), {1.0}, {0.0}, {});
  const auto T = pwi::spectral_transform(I);
  for (pwi::Point2 xi : {pwi::Point2{0, 0}, pwi::Point2{0.3, 0.4}, pwi::Point2{2.0, -1.0}}) {
    const auto v = T(xi);
    EXPECT_NEAR(v.real(), kTwoPi / pwi::kPoissonConventionConstant * std::exp(-1.5 * pwi::norm(xi)), 1e-16);
    EXPECT_EQ(v.imag(), 0.0);
  }
  const pwi::Interpolant Z(pwi::generate_lattice(kPi, 1), pwi::PoissonKernel(1.5), std::vector<double>(9, 0.0),
                           std::vector<double>(9, 0.0), {});
  EXPECT_EQ(std::abs(pwi::spectral_transform(Z)({0.2, 0.1})), 0.0);
}

TEST(SpectralTransform, InvertsToTheSpatialInterpolant) {
  // (2 pi)^{-1} int T(xi) e^{i<xi,x>} d xi = I(x)
  const auto nodes = pwi::generate_perturbed(kPi, 1, 0.03, 5);
  std::vector<double> a(nodes.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = 1.0 / (1.0 + static_cast<double>(i));
  const pwi::Interpolant I(nodes, pwi::PoissonKernel(1.0), a, std::vector<double>(a.size(), 0.0), {});
  const auto T = pwi::spectral_transform(I);
  const pwi::Point2 x{0.4, -0.7};
  auto re = [&](pwi::Point2 xi) { return (T(xi) * std::polar(1.0, pwi::dot(xi, x))).real(); };
  const auto q = pwi::integrate(pwi::TruncatedPlane{kPi, 14}, re, {.abs_tol = 1e-11, .frequency = 3.0});
  EXPECT_NEAR(q.value / kTwoPi, I.evaluate(x), 1e-9);
}

TEST(SpectralTransform, PlancherelOnTwoNodes) {
  const pwi::NodeSet pair(kPi, 1, pwi::ExactLattice{}, {{0, 0}, {1, 0}}, {{0.0, 0.0}, {1.0, 0.0}});
  const pwi::Interpolant I(pair, pwi::PoissonKernel(1.0), {1.0, -0.5}, {0.0, 0.0}, {});
  const auto T = pwi::spectral_transform(I);
  const double spectral = pwi::integrate(pwi::TruncatedPlane{kPi, 14}, [&](pwi::Point2 xi) { return std::norm(T(xi)); },
                                         {.abs_tol = 1e-13})
                              .value;
  // spatial: polar panels to R = 200 around the midpoint, plus the |x|^{-6} tail of I^2
  const double R = 200.0;
  const pwi::Point2 c{0.5, 0.0};
  const auto& gl = pwi::gauss_legendre(24);
  double spatial = 0.0;
  for (double r0 = 0.0; r0 < R; r0 += (r0 < 10.0 ? 0.25 : 5.0)) {
    const double r1 = std::min(R, r0 + (r0 < 10.0 ? 0.25 : 5.0));
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double r = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * gl.nodes[i];
      double ring = 0.0;
      for (std::size_t t = 0; t < gl.nodes.size(); ++t) {
        const double th = kPi * (gl.nodes[t] + 1.0);
        const double v = I.evaluate(c + r * pwi::Point2{std::cos(th), std::sin(th)});
        ring += gl.weights[t] * kPi * v * v;
      }
      spatial += 0.5 * (r1 - r0) * gl.weights[i] * ring * r;
    }
  }
  const double asym = 0.5 * 1.0 / kTwoPi;  // (sum a_j) alpha / (2 pi) times r^{-3}
  spatial += kTwoPi * asym * asym / (4.0 * std::pow(R, 4));
  EXPECT_NEAR(spectral / spatial, 1.0, 0.02);
}
