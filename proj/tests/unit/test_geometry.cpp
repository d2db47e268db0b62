#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wulff/errors.hpp"
#include "wulff/geometry.hpp"

using namespace wulff;
using oracle::v2;
constexpr double kPi = std::numbers::pi;

namespace {

Mat diag41() {
  Mat a(2, 2);
  a << 4, 0, 0, 1;
  return a;
}

Ellipse disk(double r) { return Ellipse{Mat2::Identity() / (r * r), Vec2::Zero()}; }

}  // namespace

TEST(Geometry, DiskAreaConvergesWithBoundaryCorrection) {
  double prev = 0.0;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    const double err = std::abs(build_domain(disk(1.0), h).area() - kPi);
    if (prev > 0.0) {
      EXPECT_GE(prev / err, 3.0) << "h=" << h;
    }
    prev = err;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(Geometry, PolygonAreaCentroidPerimeter) {
  // Triangle with vertices given clockwise: reordering must not change anything.
  Polygon tri{{Vec2(0, 0), Vec2(0, 1), Vec2(2, 0)}};
  const auto d = build_domain(tri, 1.0 / 128);
  EXPECT_NEAR(d.reference_area(), 1.0, 1e-14);
  EXPECT_NEAR(d.area(), 1.0, 1e-4);
  EXPECT_NEAR(d.perimeter(), 3.0 + std::sqrt(5.0), 1e-12);
  EXPECT_TRUE(d.centroid().isApprox(Vec2(2.0 / 3.0, 1.0 / 3.0), 1e-4));
  EXPECT_NEAR(d.diameter(), std::sqrt(5.0), 1e-14);
}

TEST(Geometry, EllipseAndWulffBallAgree) {
  const auto spec = NormSpec::quadratic(diag41());
  const auto ball = build_domain(WulffBall{spec, 1.0, Vec2::Zero()}, 1.0 / 64);
  Mat2 a;
  a << 4, 0, 0, 1;
  const auto ell = build_domain(dual_ellipse(a), 1.0 / 64);
  EXPECT_NEAR(ell.reference_area(), 2.0 * kPi, 1e-12);
  EXPECT_NEAR(ball.reference_area(), 2.0 * kPi, 1e-9);
  EXPECT_NEAR(ball.area(), ell.area(), 1e-6);
  EXPECT_EQ(ball.interior().size(), ell.interior().size());
}

TEST(Geometry, WulffAreaMatchesRasterOracleForFourier) {
  const auto spec = NormSpec::fourier2d({{3, 0.05, 0.0}});
  auto level = [&](double x, double y) { return dual_norm(spec, v2(x, y)) - 1.0; };
  const double raster = oracle::raster_area(level, -1.2, 1.2, 600);
  EXPECT_NEAR(wulff_area(spec), raster, 5e-3 * raster);
  EXPECT_NEAR(build_domain(WulffBall{spec, 1.0, Vec2::Zero()}, 1.0 / 64).area(), wulff_area(spec), 1e-4);
}

TEST(Geometry, BoundaryNodesLieOnTheBoundaryWithUnitNormals) {
  const auto spec = NormSpec::fourier2d({{4, 0.04, 0.0}});
  const auto d = build_domain(WulffBall{spec, 1.5, Vec2(0.2, -0.1)}, 1.0 / 32, 256);
  ASSERT_EQ(d.boundary().size(), 256u);
  double total = 0.0;
  for (const auto& b : d.boundary()) {
    Vec y(2);
    y << b.point.x() - 0.2, b.point.y() + 0.1;
    EXPECT_NEAR(dual_norm(spec, y), 1.5, 1e-9);
    EXPECT_NEAR(b.normal.norm(), 1.0, 1e-12);
    EXPECT_GT(b.normal.dot(Vec2(y[0], y[1])), 0.0);
    total += b.weight;
  }
  EXPECT_NEAR(total, d.perimeter(), 1e-9);
}

TEST(Geometry, QuadratureIntegratesPolynomialsOnSquare) {
  // Cells align with the sides, so the rule is the plain midpoint rule whose
  // value for x^2 on [-1, 1]^2 is 4/3 - h^2/3.
  const double h = 1.0 / 64;
  const auto d = build_domain(square(2.0), h);
  EXPECT_NEAR(d.integrate([](const Vec2& x) { return x.x() * x.x(); }), 4.0 / 3.0 - h * h / 3.0, 1e-12);
  EXPECT_NEAR(d.integrate([](const Vec2& x) { return x.x() * x.y(); }), 0.0, 1e-12);
  EXPECT_NEAR(d.boundary_integrate([](const BoundaryNode&) { return 1.0; }), 8.0, 1e-12);
}

TEST(Geometry, PolarIntegralOfDualEnergyIsQuarterArea) {
  // In the plane, the integral of E0 over B_H0 equals |B_H0| / 4 (coarea).
  for (const auto& spec : {NormSpec::euclidean(), NormSpec::quadratic(diag41()), NormSpec::pnorm(3),
                           NormSpec::fourier2d({{3, 0.05, 0.0}})}) {
    auto rho = [&](double t) { return 1.0 / dual_norm(spec, v2(std::cos(t), std::sin(t))); };
    auto e0 = [&](double x, double y) { return dual_energy(spec, v2(x, y)); };
    const double ref = oracle::polar_integral(rho, e0);
    const double lib = polar_integrate(spec, [&](const Vec2& x) { return dual_energy(spec, v2(x.x(), x.y())); });
    // The oracle's midpoint angular rule is second order on the kinked p-norm boundary.
    EXPECT_NEAR(lib, ref, 1e-7 * ref) << to_string(spec.family());
    EXPECT_NEAR(lib, wulff_area(spec) / 4.0, 1e-9 * lib);
  }
}

TEST(Geometry, VolumeIdentityInTwoAndThreeDimensions) {
  EXPECT_TRUE(wulff_volume_identity(NormSpec::euclidean(), 1.0 / 64).pass);
  const auto r3 = wulff_volume_identity(NormSpec::euclidean(3), 1.0 / 64, 5);
  EXPECT_TRUE(r3.pass) << summary_line(r3);
  EXPECT_EQ(r3.tol, 1e-2);
}

TEST(Geometry, ScaleToAreaPreservesCentroid) {
  Polygon quad{{Vec2(0, 0), Vec2(2, 0), Vec2(2.5, 1), Vec2(0.2, 1.4)}};
  const auto d = build_domain(quad, 1.0 / 64);
  const auto s = scale_to_area(d, kPi);
  EXPECT_NEAR(s.reference_area(), kPi, 1e-12);
  EXPECT_TRUE(s.centroid().isApprox(d.centroid(), 1e-3));
  EXPECT_DOUBLE_EQ(s.grid_h(), d.grid_h());
}

TEST(Geometry, LatticeAlignment) {
  const auto d = build_domain(disk(1.0), 1.0 / 16);
  const auto g = d.lattice(2);
  const auto f = sample_on_lattice(d, [](const Vec2& x) { return x.x() + 10 * x.y(); });
  for (std::size_t k = 0; k < d.interior().size(); k += 17) {
    const std::size_t flat = d.lattice_index(k, 2);
    ASSERT_TRUE(f.masked(flat));
    const Vec node = f.node(flat);
    const auto& n = d.interior()[k];
    EXPECT_LE(std::abs(node[0] - n.point.x()), 0.5 * d.grid_h() + 1e-12);
    EXPECT_LE(std::abs(node[1] - n.point.y()), 0.5 * d.grid_h() + 1e-12);
  }
  EXPECT_EQ(g.size(), f.size());
}

TEST(Geometry, RejectsBadDescriptors) {
  EXPECT_THROW(build_domain(Polygon{{Vec2(0, 0), Vec2(1, 0)}}, 0.1), InvalidInput);
  Polygon collinear{{Vec2(0, 0), Vec2(1, 0), Vec2(2, 0), Vec2(1, 1)}};
  EXPECT_THROW(build_domain(collinear, 0.1), InvalidInput);
  Polygon bowtie{{Vec2(0, 0), Vec2(1, 1), Vec2(1, 0), Vec2(0, 1)}};
  EXPECT_THROW(build_domain(bowtie, 0.1), InvalidInput);
  Mat2 indefinite;
  indefinite << 1, 0, 0, -1;
  EXPECT_THROW(build_domain(Ellipse{indefinite, Vec2::Zero()}, 0.1), InvalidInput);
  EXPECT_THROW(build_domain(disk(1.0), 0.0), InvalidInput);
  EXPECT_THROW(square(-1.0), InvalidInput);
  EXPECT_THROW(wulff_area(NormSpec::euclidean(3)), InvalidInput);
}

TEST(Geometry, GaussLegendreIntegratesPolynomialsExactly) {
  const auto [x, w] = gauss_legendre01(8);
  for (int deg = 0; deg <= 15; ++deg) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], deg);
    EXPECT_NEAR(s, 1.0 / (deg + 1), 1e-14) << deg;
  }
}
