#include "wulff/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "wulff/errors.hpp"
#include "wulff/parallel.hpp"

namespace wulff {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kSubcells = 4;
constexpr int kPolarAngles = 4096;
constexpr int kRadialOrder = 16;
constexpr int kTraceOversample = 16;
constexpr double kCandidateBand = 0.75;

Vec as_vec(const Vec2& v) {
  Vec out(2);
  out << v.x(), v.y();
  return out;
}

Vec2 direction(double phi) { return {std::cos(phi), std::sin(phi)}; }

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Fraction of a square of side `side` lying in {s : n.(s - center) <= d}
// where n is a unit vector. The projection of the uniform square onto n has a
// trapezoidal density, so the covered fraction is its CDF.
double square_coverage(const Vec2& n, double d, double side) {
  double a = std::abs(n.x()) * side;
  double b = std::abs(n.y()) * side;
  if (a > b) std::swap(a, b);
  const double t = d + 0.5 * (a + b);
  if (t <= 0.0) return 0.0;
  if (t >= a + b) return 1.0;
  if (a < 1e-14 * side) return std::clamp(t / b, 0.0, 1.0);
  if (t <= a) return t * t / (2.0 * a * b);
  if (t <= b) return (t - 0.5 * a) / b;
  const double s = a + b - t;
  return 1.0 - s * s / (2.0 * a * b);
}

void check_ellipse(const Mat2& m) {
  if (!m.allFinite() || std::abs(m(0, 1) - m(1, 0)) > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff())) {
    throw InvalidInput("ellipse matrix must be finite and symmetric");
  }
  Eigen::LLT<Mat2> llt(m);
  if (llt.info() != Eigen::Success) throw InvalidInput("ellipse matrix must be positive definite");
}

Polygon normalized_polygon(const Polygon& polygon) {
  auto v = polygon.vertices;
  if (v.size() < 3) throw InvalidInput("a polygon needs at least three vertices");
  for (const auto& p : v) {
    if (!p.allFinite()) throw InvalidInput("non-finite polygon vertex");
  }
  double signed_area = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) signed_area += cross(v[k], v[(k + 1) % v.size()]);
  if (signed_area < 0.0) std::reverse(v.begin(), v.end());
  const double scale = [&] {
    double s = 0.0;
    for (const auto& p : v) s = std::max(s, p.cwiseAbs().maxCoeff());
    return s + 1.0;
  }();
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Vec2& a = v[k];
    const Vec2& b = v[(k + 1) % v.size()];
    const Vec2& c = v[(k + 2) % v.size()];
    if (cross(b - a, c - b) <= 1e-12 * scale * scale) throw InvalidInput("polygon is not strictly convex");
  }
  // A strictly convex turn at every vertex still admits a self-intersecting
  // star; the total turning must be exactly one revolution.
  double turning = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Vec2 e1 = v[(k + 1) % v.size()] - v[k];
    const Vec2 e2 = v[(k + 2) % v.size()] - v[(k + 1) % v.size()];
    turning += std::atan2(cross(e1, e2), e1.dot(e2));
  }
  if (std::abs(turning - kTwoPi) > 1e-6) throw InvalidInput("polygon is not strictly convex");
  return Polygon{v};
}

// Everything build_domain needs from a descriptor, in one place.
struct Shape {
  std::function<double(const Vec2&)> level;
  std::function<double(double)> radial;  // empty for polygons
  std::function<Vec2(const Vec2&)> normal;
  std::function<double(const Vec2&)> density;  // optional, for cell masses
  Vec2 center;
  Vec2 lo;
  Vec2 hi;
  double lipschitz = 1.0;
  double area = 0.0;
  Vec2 centroid;
  std::vector<Vec2> vertices;
};

void polar_moments(Shape& s) {
  double area = 0.0;
  Vec2 first = Vec2::Zero();
  for (int k = 0; k < kPolarAngles; ++k) {
    const double phi = kTwoPi * k / kPolarAngles;
    const double rho = s.radial(phi);
    area += 0.5 * rho * rho;
    first += rho * rho * rho / 3.0 * direction(phi);
  }
  const double dphi = kTwoPi / kPolarAngles;
  s.area = area * dphi;
  s.centroid = s.center + first * dphi / s.area;
}

Shape make_shape(const DomainDescriptor& descriptor) {
  Shape s;
  if (const auto* ball = std::get_if<WulffBall>(&descriptor)) {
    if (ball->norm.dimension() != 2) throw InvalidInput("planar domains need a two-dimensional norm");
    if (!(ball->radius > 0.0) || !std::isfinite(ball->radius)) throw InvalidInput("Wulff radius must be positive");
    if (!ball->center.allFinite()) throw InvalidInput("non-finite domain center");
    const NormSpec spec = ball->norm;
    const double r = ball->radius;
    const Vec2 c = ball->center;
    s.center = c;
    s.level = [spec, r, c](const Vec2& y) { return dual_norm(spec, as_vec(y - c)) - r; };
    s.radial = [spec, r](double phi) { return r / dual_norm(spec, as_vec(direction(phi))); };
    s.normal = [spec, c](const Vec2& y) {
      const Vec g = grad_dual_norm(spec, as_vec(y - c));
      return Vec2(g[0], g[1]).normalized();
    };
    // Support function of B_{H0}(r) along a unit vector e is r H(e); the two
    // sides differ for gauges without central symmetry.
    s.lo = c - r * Vec2(eval_norm(spec, as_vec(Vec2(-1, 0))), eval_norm(spec, as_vec(Vec2(0, -1))));
    s.hi = c + r * Vec2(eval_norm(spec, as_vec(Vec2(1, 0))), eval_norm(spec, as_vec(Vec2(0, 1))));
    // |grad H0| = |xi*| / H(xi*) is bounded by 1 / min over unit d of H(d).
    double hmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 1024; ++k) hmin = std::min(hmin, eval_norm(spec, as_vec(direction(kTwoPi * k / 1024))));
    s.lipschitz = 1.05 / hmin;
    polar_moments(s);
  } else if (const auto* el = std::get_if<Ellipse>(&descriptor)) {
    check_ellipse(el->matrix);
    if (!el->center.allFinite()) throw InvalidInput("non-finite domain center");
    const Mat2 m = 0.5 * (el->matrix + el->matrix.transpose());
    const Vec2 c = el->center;
    s.center = c;
    s.level = [m, c](const Vec2& y) {
      const Vec2 d = y - c;
      return std::sqrt(std::max(0.0, d.dot(m * d))) - 1.0;
    };
    s.radial = [m](double phi) {
      const Vec2 d = direction(phi);
      return 1.0 / std::sqrt(d.dot(m * d));
    };
    s.normal = [m, c](const Vec2& y) { return Vec2(m * (y - c)).normalized(); };
    const Mat2 inv = m.inverse();
    const Vec2 half(std::sqrt(inv(0, 0)), std::sqrt(inv(1, 1)));
    s.lo = c - half;
    s.hi = c + half;
    Eigen::SelfAdjointEigenSolver<Mat2> eig(m);
    s.lipschitz = 1.05 * std::sqrt(eig.eigenvalues().maxCoeff());
    s.area = std::numbers::pi / std::sqrt(m.determinant());
    s.centroid = c;
  } else {
    const Polygon poly = normalized_polygon(std::get<Polygon>(descriptor));
    const auto& v = poly.vertices;
    s.vertices = v;
    std::vector<Vec2> normals;
    std::vector<Vec2> anchors;
    double area = 0.0;
    Vec2 first = Vec2::Zero();
    s.lo = v[0];
    s.hi = v[0];
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Vec2& a = v[k];
      const Vec2& b = v[(k + 1) % v.size()];
      const Vec2 e = b - a;
      normals.emplace_back(Vec2(e.y(), -e.x()).normalized());
      anchors.push_back(a);
      const double w = cross(a, b);
      area += 0.5 * w;
      first += w * (a + b) / 6.0;
      s.lo = s.lo.cwiseMin(a);
      s.hi = s.hi.cwiseMax(a);
    }
    s.area = area;
    s.centroid = first / area;
    s.center = s.centroid;
    s.level = [normals, anchors](const Vec2& y) {
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < normals.size(); ++k) m = std::max(m, normals[k].dot(y - anchors[k]));
      return m;
    };
    s.normal = [normals, anchors](const Vec2& y) {
      std::size_t best = 0;
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < normals.size(); ++k) {
        const double d = normals[k].dot(y - anchors[k]);
        if (d > m) {
          m = d;
          best = k;
        }
      }
      return normals[best];
    };
    s.lipschitz = 1.0;
  }
  return s;
}

struct CellResult {
  double weight = 0.0;
  double mass = 0.0;
  Vec2 point = Vec2::Zero();
};

// Two-point Gauss offsets on a cell of unit width, centered at 0.
constexpr double kGaussOffset = 0.28867513459481287;  // 1 / (2 sqrt 3)

CellResult integrate_cell(const Shape& s, const Vec2& center, double h) {
  const double lc = s.level(center);
  const double band = kCandidateBand * s.lipschitz * h;
  if (lc < -band) {
    double mass = h * h;
    if (s.density) {
      mass = 0.0;
      for (int a = -1; a <= 1; a += 2) {
        for (int b = -1; b <= 1; b += 2) mass += 0.25 * h * h * s.density(center + kGaussOffset * h * Vec2(a, b));
      }
    }
    return {h * h, mass, center};
  }
  if (lc > band) return {};
  const double fd = 1e-3 * h;
  Vec2 grad((s.level(center + Vec2(fd, 0)) - s.level(center - Vec2(fd, 0))) / (2 * fd),
            (s.level(center + Vec2(0, fd)) - s.level(center - Vec2(0, fd))) / (2 * fd));
  const double gnorm = grad.norm();
  const double delta = h / kSubcells;
  CellResult out;
  Vec2 moment = Vec2::Zero();
  for (int a = 0; a < kSubcells; ++a) {
    for (int b = 0; b < kSubcells; ++b) {
      const Vec2 sub = center + Vec2((a + 0.5) * delta - 0.5 * h, (b + 0.5) * delta - 0.5 * h);
      const double ls = s.level(sub);
      double frac;
      if (gnorm > 0.0) {
        frac = square_coverage(grad / gnorm, -ls / gnorm, delta);
      } else {
        frac = ls <= 0.0 ? 1.0 : 0.0;
      }
      const double w = frac * delta * delta;
      out.weight += w;
      if (w > 0.0) out.mass += s.density ? w * s.density(sub) : w;
      moment += w * sub;
    }
  }
  if (out.weight > 0.0) out.point = moment / out.weight;
  return out;
}

struct LatticeCells {
  Vec2 origin;
  int cells_x = 0;
  int cells_y = 0;
  std::vector<InteriorNode> nodes;
};

LatticeCells compute_cells(const Shape& s, double h) {
  LatticeCells out;
  const double reach_x = std::max(s.hi.x() - s.center.x(), s.center.x() - s.lo.x());
  const double reach_y = std::max(s.hi.y() - s.center.y(), s.center.y() - s.lo.y());
  const int kx = static_cast<int>(std::ceil(reach_x / h)) + 1;
  const int ky = static_cast<int>(std::ceil(reach_y / h)) + 1;
  out.cells_x = 2 * kx;
  out.cells_y = 2 * ky;
  out.origin = s.center + Vec2((0.5 - kx) * h, (0.5 - ky) * h);
  const auto nx = static_cast<std::size_t>(out.cells_x);
  const std::size_t ncells = nx * static_cast<std::size_t>(out.cells_y);
  std::vector<CellResult> cells(ncells);
  parallel_for(ncells, [&](std::size_t c) {
    const int i = static_cast<int>(c % nx);
    const int j = static_cast<int>(c / nx);
    cells[c] = integrate_cell(s, out.origin + h * Vec2(i, j), h);
  });
  for (std::size_t c = 0; c < ncells; ++c) {
    if (cells[c].weight <= 0.0) continue;
    InteriorNode node;
    node.point = cells[c].point;
    node.weight = cells[c].weight;
    node.mass = cells[c].mass;
    node.i = static_cast<int>(c % nx);
    node.j = static_cast<int>(c / nx);
    out.nodes.push_back(node);
  }
  return out;
}

std::vector<BoundaryNode> trace_radial(const Shape& s, int count) {
  const int samples = kTraceOversample * count;
  std::vector<double> phis(static_cast<std::size_t>(samples) + 1);
  std::vector<Vec2> pts(phis.size());
  for (int k = 0; k <= samples; ++k) {
    phis[static_cast<std::size_t>(k)] = kTwoPi * k / samples;
  }
  parallel_for(pts.size(), [&](std::size_t k) {
    pts[k] = s.center + s.radial(phis[k]) * direction(phis[k]);
  });
  std::vector<double> cumulative(pts.size(), 0.0);
  for (std::size_t k = 1; k < pts.size(); ++k) cumulative[k] = cumulative[k - 1] + (pts[k] - pts[k - 1]).norm();
  const double total = cumulative.back();
  std::vector<BoundaryNode> nodes(static_cast<std::size_t>(count));
  parallel_for(nodes.size(), [&](std::size_t j) {
    const double target = total * static_cast<double>(j) / count;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), pts.size() - 1);
    const std::size_t k0 = k == 0 ? 0 : k - 1;
    const double seg = cumulative[k] - cumulative[k0];
    const double t = seg > 0.0 ? (target - cumulative[k0]) / seg : 0.0;
    const double phi = phis[k0] + t * (phis[k] - phis[k0]);
    BoundaryNode& node = nodes[j];
    node.point = s.center + s.radial(phi) * direction(phi);
    node.normal = s.normal(node.point);
    node.weight = total / count;
    node.arc = target;
  });
  return nodes;
}

std::vector<BoundaryNode> trace_polygon(const Shape& s, int count) {
  const auto& v = s.vertices;
  std::vector<double> cumulative(v.size() + 1, 0.0);
  for (std::size_t k = 0; k < v.size(); ++k) {
    cumulative[k + 1] = cumulative[k] + (v[(k + 1) % v.size()] - v[k]).norm();
  }
  const double total = cumulative.back();
  std::vector<BoundaryNode> nodes(static_cast<std::size_t>(count));
  std::size_t edge = 0;
  for (int j = 0; j < count; ++j) {
    const double target = total * (j + 0.5) / count;
    while (edge + 1 < v.size() && cumulative[edge + 1] < target) ++edge;
    const Vec2& a = v[edge];
    const Vec2& b = v[(edge + 1) % v.size()];
    const double t = (target - cumulative[edge]) / (cumulative[edge + 1] - cumulative[edge]);
    const Vec2 e = b - a;
    BoundaryNode& node = nodes[static_cast<std::size_t>(j)];
    node.point = a + t * e;
    node.normal = Vec2(e.y(), -e.x()).normalized();
    node.weight = total / count;
    node.arc = target;
  }
  return nodes;
}

}  // namespace

Polygon square(double side, const Vec2& center) {
  if (!(side > 0.0)) throw InvalidInput("square side must be positive");
  const double s = 0.5 * side;
  return Polygon{{center + Vec2(-s, -s), center + Vec2(s, -s), center + Vec2(s, s), center + Vec2(-s, s)}};
}

Ellipse dual_ellipse(const Mat2& a, const Vec2& center) {
  check_ellipse(a);
  return Ellipse{a.inverse(), center};
}

std::string kind_name(const DomainDescriptor& descriptor) {
  if (std::holds_alternative<WulffBall>(descriptor)) return "wulff";
  if (std::holds_alternative<Ellipse>(descriptor)) return "ellipse";
  return "polygon";
}

DiscreteDomain build_domain(const DomainDescriptor& descriptor, double grid_h, int boundary_nodes) {
  if (!(grid_h > 0.0) || !std::isfinite(grid_h)) throw InvalidInput("grid spacing must be positive");
  if (boundary_nodes < 3) throw InvalidInput("at least three boundary nodes are required");
  const Shape s = make_shape(descriptor);

  DiscreteDomain d;
  d.descriptor_ = descriptor;
  if (auto* poly = std::get_if<Polygon>(&d.descriptor_)) poly->vertices = s.vertices;
  d.h_ = grid_h;
  LatticeCells cells = compute_cells(s, grid_h);
  d.cells_x_ = cells.cells_x;
  d.cells_y_ = cells.cells_y;
  d.lattice_origin_ = cells.origin;
  d.interior_ = std::move(cells.nodes);
  for (const auto& node : d.interior_) d.area_ += node.weight;
  if (d.interior_.empty()) throw InvalidInput("domain is smaller than one lattice cell");

  d.boundary_ = s.radial ? trace_radial(s, boundary_nodes) : trace_polygon(s, boundary_nodes);
  for (const auto& b : d.boundary_) d.perimeter_ += b.weight;
  d.reference_area_ = s.area;
  d.centroid_ = s.centroid;
  return d;
}

double DiscreteDomain::diameter() const {
  double best = 0.0;
  // A polygon's diameter is attained at a pair of vertices.
  if (const auto* poly = std::get_if<Polygon>(&descriptor_)) {
    for (const auto& a : poly->vertices)
      for (const auto& b : poly->vertices) best = std::max(best, (a - b).squaredNorm());
    return std::sqrt(best);
  }
  for (std::size_t a = 0; a < boundary_.size(); ++a) {
    for (std::size_t b = a + 1; b < boundary_.size(); ++b) {
      best = std::max(best, (boundary_[a].point - boundary_[b].point).squaredNorm());
    }
  }
  return std::sqrt(best);
}

double DiscreteDomain::level(const Vec2& y) const {
  // Rebuilding the closure per call is cheap next to a Fourier dual-norm
  // evaluation, and keeps the domain trivially copyable.
  if (const auto* ball = std::get_if<WulffBall>(&descriptor_)) {
    return dual_norm(ball->norm, as_vec(y - ball->center)) - ball->radius;
  }
  if (const auto* el = std::get_if<Ellipse>(&descriptor_)) {
    const Vec2 d = y - el->center;
    return std::sqrt(std::max(0.0, d.dot(el->matrix * d))) - 1.0;
  }
  const auto& v = std::get<Polygon>(descriptor_).vertices;
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Vec2 e = v[(k + 1) % v.size()] - v[k];
    m = std::max(m, Vec2(e.y(), -e.x()).normalized().dot(y - v[k]));
  }
  return m;
}

GridDescriptor DiscreteDomain::lattice(int margin) const {
  if (margin < 0) throw InvalidInput("lattice margin must be non-negative");
  GridDescriptor g;
  g.origin = as_vec(lattice_origin_ - margin * h_ * Vec2::Ones());
  g.spacing = Vec::Constant(2, h_);
  g.shape = {cells_x_ + 2 * margin, cells_y_ + 2 * margin};
  return g;
}

std::size_t DiscreteDomain::lattice_index(std::size_t k, int margin) const {
  const auto& node = interior_[k];
  const auto nx = static_cast<std::size_t>(cells_x_ + 2 * margin);
  return static_cast<std::size_t>(node.j + margin) * nx + static_cast<std::size_t>(node.i + margin);
}

double DiscreteDomain::integrate(const std::function<double(const Vec2&)>& f) const {
  std::vector<double> terms(interior_.size());
  parallel_for(terms.size(), [&](std::size_t k) { terms[k] = interior_[k].weight * f(interior_[k].point); });
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum;
}

double DiscreteDomain::boundary_integrate(const std::function<double(const BoundaryNode&)>& f) const {
  double sum = 0.0;
  for (const auto& b : boundary_) sum += b.weight * f(b);
  return sum;
}

std::vector<InteriorNode> lattice_quadrature(const LevelSetRegion& region, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("grid spacing must be positive");
  Shape s;
  s.level = region.level;
  s.lipschitz = region.lipschitz;
  s.center = region.center;
  s.lo = region.lo;
  s.hi = region.hi;
  s.density = region.density;
  return compute_cells(s, h).nodes;
}

GridFunction sample_on_lattice(const DiscreteDomain& domain, const std::function<double(const Vec2&)>& f,
                               int margin) {
  GridFunction out(domain.lattice(margin));
  std::fill(out.mask().begin(), out.mask().end(), 0);
  parallel_for(out.size(), [&](std::size_t k) {
    const Vec x = out.node(k);
    out[k] = f(Vec2(x[0], x[1]));
  });
  for (std::size_t k = 0; k < domain.interior().size(); ++k) out.mask()[domain.lattice_index(k, margin)] = 1;
  return out;
}

DomainDescriptor scale_descriptor(const DiscreteDomain& domain, double target_area) {
  if (!(target_area > 0.0) || !std::isfinite(target_area)) throw InvalidInput("target area must be positive");
  const double s = std::sqrt(target_area / domain.reference_area());
  const Vec2 c = domain.centroid();
  const auto& desc = domain.descriptor();
  if (const auto* ball = std::get_if<WulffBall>(&desc)) {
    return WulffBall{ball->norm, ball->radius * s, c + s * (ball->center - c)};
  }
  if (const auto* el = std::get_if<Ellipse>(&desc)) {
    return Ellipse{el->matrix / (s * s), c + s * (el->center - c)};
  }
  Polygon poly = std::get<Polygon>(desc);
  for (auto& v : poly.vertices) v = c + s * (v - c);
  return poly;
}

DiscreteDomain scale_to_area(const DiscreteDomain& domain, double target_area) {
  return build_domain(scale_descriptor(domain, target_area), domain.grid_h(),
                      static_cast<int>(domain.boundary().size()));
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int order) {
  if (order < 1) throw InvalidInput("quadrature order must be positive");
  // Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
  // Legendre recurrence, weights come from the first eigenvector components.
  Mat jacobi = Mat::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(jacobi);
  std::vector<double> nodes(static_cast<std::size_t>(order));
  std::vector<double> weights(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) {
    nodes[static_cast<std::size_t>(k)] = 0.5 * (eig.eigenvalues()[k] + 1.0);
    const double v0 = eig.eigenvectors()(0, k);
    weights[static_cast<std::size_t>(k)] = v0 * v0;  // 2 v0^2 on [-1, 1], halved on [0, 1]
  }
  return {nodes, weights};
}

double wulff_area(const NormSpec& spec, double radius) {
  if (spec.dimension() != 2) throw InvalidInput("wulff_area is planar only");
  double sum = 0.0;
  for (int k = 0; k < kPolarAngles; ++k) {
    const double rho = radius / dual_norm(spec, as_vec(direction(kTwoPi * k / kPolarAngles)));
    sum += 0.5 * rho * rho;
  }
  return sum * kTwoPi / kPolarAngles;
}

double polar_integrate(const NormSpec& spec, const std::function<double(const Vec2&)>& f, double radius,
                       const Vec2& center, int angles) {
  if (spec.dimension() != 2) throw InvalidInput("polar_integrate is planar only");
  if (angles < 8) throw InvalidInput("too few quadrature angles");
  const auto [t, w] = gauss_legendre01(kRadialOrder);
  std::vector<double> rays(static_cast<std::size_t>(angles));
  parallel_for(rays.size(), [&](std::size_t k) {
    const Vec2 dir = direction(kTwoPi * static_cast<double>(k) / angles);
    const double rho = radius / dual_norm(spec, as_vec(dir));
    double s = 0.0;
    for (int q = 0; q < kRadialOrder; ++q) {
      const auto uq = static_cast<std::size_t>(q);
      s += w[uq] * t[uq] * f(center + rho * t[uq] * dir);
    }
    rays[k] = rho * rho * s;
  });
  double sum = 0.0;
  for (double r : rays) sum += r;
  return sum * kTwoPi / angles;
}

CheckReport wulff_volume_identity(const NormSpec& spec, double grid_h, std::uint64_t seed) {
  const int n = spec.dimension();
  const double factor = 2.0 * (n + 2) / n;
  if (n == 2) {
    const DiscreteDomain ball = build_domain(WulffBall{spec, 1.0, Vec2::Zero()}, grid_h, 64);
    const double integral =
        polar_integrate(spec, [&](const Vec2& y) { return dual_energy(spec, as_vec(y)); });
    return make_check("wulff_volume_identity", ball.area(), factor * integral, Relation::Equal, 1e-3,
                      "grid area against polar quadrature of E0");
  }
  if (n != 3) throw InvalidInput("wulff_volume_identity supports dimensions 2 and 3");
  Vec half(3);
  for (int i = 0; i < 3; ++i) half[i] = eval_norm(spec, Vec::Unit(3, i));
  const double box = 8.0 * half.prod();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  constexpr int kSamples = 1000000;
  double inside = 0.0;
  double energy_sum = 0.0;
  Vec y(3);
  for (int k = 0; k < kSamples; ++k) {
    for (int i = 0; i < 3; ++i) y[i] = half[i] * unit(rng);
    const double h0 = dual_norm(spec, y);
    if (h0 <= 1.0) {
      inside += 1.0;
      energy_sum += 0.5 * h0 * h0;
    }
  }
  return make_check("wulff_volume_identity", box * inside / kSamples, factor * box * energy_sum / kSamples,
                    Relation::Equal, 1e-2, "Monte Carlo with 1e6 samples");
}

}  // namespace wulff
