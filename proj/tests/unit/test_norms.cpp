#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "wulff/errors.hpp"
#include "wulff/norms.hpp"

using namespace wulff;
using oracle::v2;

namespace {

Mat diag41() {
  Mat a(2, 2);
  a << 4, 0, 0, 1;
  return a;
}

std::vector<NormSpec> planar_families() {
  Mat a(2, 2);
  a << 3, 1, 1, 2;
  return {NormSpec::euclidean(), NormSpec::quadratic(a), NormSpec::pnorm(3), NormSpec::pnorm(1.5),
          NormSpec::fourier2d({{3, 0.05, 0.0}}), NormSpec::fourier2d({{4, 0.03, 0.01}, {6, 0.01, 0.0}})};
}

std::vector<Vec> generic_points(int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi), radius(0.3, 3.0);
  std::vector<Vec> pts;
  while (static_cast<int>(pts.size()) < count) {
    const double t = angle(rng), r = radius(rng);
    Vec x = v2(r * std::cos(t), r * std::sin(t));
    if (x.cwiseAbs().minCoeff() > 0.05 * r) pts.push_back(x);
  }
  return pts;
}

}  // namespace

TEST(Norms, EuclideanClosedForms) {
  const auto s = NormSpec::euclidean();
  const Vec x = v2(3, -4);
  EXPECT_DOUBLE_EQ(eval_norm(s, x), 5.0);
  EXPECT_NEAR(dual_norm(s, x), 5.0, 1e-14);
  EXPECT_TRUE(grad_norm(s, x).isApprox(x / 5.0, 1e-14));
  EXPECT_TRUE(hessian_E(s, x).isApprox(Mat::Identity(2, 2), 1e-14));
  EXPECT_NEAR(phi(s, x), 1.0, 1e-14);
}

TEST(Norms, QuadraticDualIsInverseMatrixForm) {
  const auto s = NormSpec::quadratic(diag41());
  for (const auto& x : generic_points(50, 1)) {
    const double expected = std::sqrt(x[0] * x[0] / 4.0 + x[1] * x[1]);
    EXPECT_NEAR(dual_norm(s, x), expected, 1e-12 * expected);
  }
  EXPECT_NEAR(phi(s, v2(0.3, 0.7)), 4.0, 1e-12);
}

TEST(Norms, PNormDualIsConjugateExponent) {
  const auto s = NormSpec::pnorm(3);
  const double q = 1.5;
  for (const auto& x : generic_points(50, 2)) {
    const double expected = std::pow(std::pow(std::abs(x[0]), q) + std::pow(std::abs(x[1]), q), 1.0 / q);
    EXPECT_NEAR(dual_norm(s, x), expected, 1e-12 * expected);
  }
}

TEST(Norms, DualMatchesBruteForceScan) {
  for (const auto& s : planar_families()) {
    auto gauge = [&](const Vec& d) { return eval_norm(s, d); };
    for (const auto& x : generic_points(10, 3)) {
      const double ref = oracle::brute_dual(gauge, x);
      EXPECT_NEAR(dual_norm(s, x), ref, 1e-8 * ref) << to_string(s.family());
    }
  }
}

TEST(Norms, FourierProfileAndPhiMatchClosedForm) {
  const std::vector<oracle::Harmonic> h{{3, 0.05, 0.0}};
  const auto s = NormSpec::fourier2d({{3, 0.05, 0.0}});
  for (double t = 0.05; t < 6.28; t += 0.37) {
    const Vec xi = v2(2.0 * std::cos(t), 2.0 * std::sin(t));
    EXPECT_NEAR(eval_norm(s, xi), 2.0 * oracle::g(h, t), 1e-13);
    EXPECT_NEAR(phi(s, xi), oracle::fourier_phi(h, t), 1e-6);
  }
}

TEST(Norms, HessianMatchesFiniteDifferenceOfGradient) {
  for (const auto& s : planar_families()) {
    for (const auto& xi : generic_points(10, 4)) {
      const Mat ref = oracle::fd_jacobian([&](const Vec& z) { return grad_E(s, z); }, xi);
      EXPECT_LE((hessian_E(s, xi) - ref).cwiseAbs().maxCoeff(), 1e-5 * (1.0 + ref.norm())) << to_string(s.family());
    }
  }
}

TEST(Norms, GradientMatchesFiniteDifferenceOfNorm) {
  for (const auto& s : planar_families()) {
    for (const auto& xi : generic_points(10, 5)) {
      const Vec ref = oracle::fd_gradient([&](const Vec& z) { return eval_norm(s, z); }, xi);
      EXPECT_LE((grad_norm(s, xi) - ref).norm(), 1e-7) << to_string(s.family());
      const Vec ref0 = oracle::fd_gradient([&](const Vec& z) { return dual_norm(s, z); }, xi);
      EXPECT_LE((grad_dual_norm(s, xi) - ref0).norm(), 1e-6) << to_string(s.family());
    }
  }
}

TEST(Norms, FourierRoundtripAtHundredPoints) {
  const auto s = NormSpec::fourier2d({{3, 0.05, 0.0}});
  for (const auto& x : generic_points(100, 6)) {
    EXPECT_LE((grad_E(s, grad_E0(s, x)) - x).norm(), 1e-8);
  }
}

TEST(Norms, DualityIdentitiesForAllFamilies) {
  for (const auto& s : planar_families()) {
    for (const auto& xi : generic_points(20, 7)) {
      const double h = eval_norm(s, xi);
      EXPECT_NEAR(dual_norm(s, grad_norm(s, xi)), 1.0, 1e-7);
      EXPECT_NEAR(eval_norm(s, grad_dual_norm(s, xi)), 1.0, 1e-7);
      EXPECT_NEAR(xi.dot(grad_E(s, xi)), h * h, 1e-9 * h * h);
      EXPECT_NEAR(dual_energy(s, grad_E(s, xi)), 0.5 * h * h, 1e-7 * h * h);
    }
  }
}

TEST(Norms, YoungInequalityWithEqualityOnTheGradient) {
  const auto s = NormSpec::fourier2d({{3, 0.05, 0.0}});
  const auto pts = generic_points(30, 8);
  for (const auto& x : pts) {
    for (const auto& xi : pts) EXPECT_LE(x.dot(xi), energy(s, xi) + dual_energy(s, x) + 1e-12);
    const Vec xi = grad_E0(s, x);
    EXPECT_NEAR(x.dot(xi), energy(s, xi) + dual_energy(s, x), 1e-8);
  }
}

TEST(Norms, DualPhiIsReciprocal) {
  // det Hess E0(x) = 1 / det Hess E(grad E0(x)) because the gradients are inverse maps.
  const auto s = NormSpec::fourier2d({{3, 0.05, 0.0}});
  for (const auto& x : generic_points(10, 9)) {
    const Mat j = oracle::fd_jacobian([&](const Vec& z) { return grad_E0(s, z); }, x);
    EXPECT_NEAR(j.determinant() * phi(s, grad_E0(s, x)), 1.0, 1e-5);
  }
}

TEST(Norms, OddHarmonicsAreNotSymmetric) {
  EXPECT_FALSE(NormSpec::fourier2d({{3, 0.05, 0.0}}).is_symmetric());
  EXPECT_TRUE(NormSpec::fourier2d({{4, 0.05, 0.0}}).is_symmetric());
  EXPECT_TRUE(NormSpec::pnorm(3).is_symmetric());
}

TEST(Norms, ThreeDimensionalFamilies) {
  Mat a = Mat::Identity(3, 3);
  a(0, 0) = 2.0;
  for (const auto& s : {NormSpec::euclidean(3), NormSpec::quadratic(a), NormSpec::pnorm(4, 3)}) {
    Vec x(3);
    x << 0.4, -0.7, 1.1;
    EXPECT_NEAR(dual_norm(s, grad_norm(s, x)), 1.0, 1e-6);
    EXPECT_LE((grad_E(s, grad_E0(s, x)) - x).norm(), 1e-8);
  }
}

TEST(Norms, HessianBoundsAreOrdered) {
  const auto [lo, hi] = hessian_bounds(NormSpec::quadratic(diag41()));
  EXPECT_NEAR(lo, 1.0, 1e-9);
  EXPECT_NEAR(hi, 4.0, 1e-9);
}

TEST(Norms, RejectsInvalidSpecs) {
  Mat nonsym(2, 2);
  nonsym << 1, 0.5, 0, 1;
  Mat indefinite(2, 2);
  indefinite << 1, 0, 0, -1;
  EXPECT_THROW(NormSpec::quadratic(nonsym), InvalidInput);
  EXPECT_THROW(NormSpec::quadratic(indefinite), InvalidInput);
  EXPECT_THROW(NormSpec::pnorm(1.0), InvalidInput);
  EXPECT_THROW(NormSpec::pnorm(2.0, 4), InvalidInput);
  EXPECT_THROW(NormSpec::fourier2d({{1, 0.1, 0.0}}), InvalidInput);
  // g + g'' = 1 - 8 * 0.2 cos(3 theta) changes sign.
  EXPECT_THROW(NormSpec::fourier2d({{3, 0.2, 0.0}}), InvalidInput);
}

TEST(Norms, DegenerateAndMalformedPoints) {
  const auto s = NormSpec::euclidean();
  EXPECT_THROW(grad_norm(s, v2(0, 0)), DegeneratePoint);
  EXPECT_THROW(hessian_E(s, v2(0, 0)), DegeneratePoint);
  EXPECT_THROW(eval_norm(s, Vec::Zero(3)), InvalidInput);
  EXPECT_THROW(eval_norm(s, v2(NAN, 1)), InvalidInput);
  EXPECT_EQ(eval_norm(s, v2(0, 0)), 0.0);
  EXPECT_TRUE(grad_E(s, v2(0, 0)).isZero());
}
