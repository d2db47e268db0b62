#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "wulff/check_report.hpp"
#include "wulff/convex_calculus.hpp"
#include "wulff/norms.hpp"
#include "wulff/types.hpp"

namespace wulff {

/// The dual-norm ball {y : H0(y - center) <= radius}.
struct WulffBall {
  NormSpec norm;
  double radius = 1.0;
  Vec2 center = Vec2::Zero();
};

/// Strictly convex polygon; vertices are reordered counterclockwise on build.
struct Polygon {
  std::vector<Vec2> vertices;
};

/// {y : (y - center)^T M (y - center) <= 1} for symmetric positive-definite M.
struct Ellipse {
  Mat2 matrix = Mat2::Identity();
  Vec2 center = Vec2::Zero();
};

using DomainDescriptor = std::variant<Polygon, WulffBall, Ellipse>;

/// Axis-aligned square of the given side length.
Polygon square(double side, const Vec2& center = Vec2::Zero());

/// Ellipse B_{H0} of a quadratic norm H(xi) = sqrt(xi^T A xi), i.e. M = A^-1.
Ellipse dual_ellipse(const Mat2& a, const Vec2& center = Vec2::Zero());

std::string kind_name(const DomainDescriptor& descriptor);

struct InteriorNode {
  Vec2 point;
  double weight = 0.0;
  double mass = 0.0;  ///< integral of the region density over the cell (= weight without one)
  int i = 0;  ///< lattice cell index along x
  int j = 0;  ///< lattice cell index along y
};

struct BoundaryNode {
  Vec2 point;
  Vec2 normal;  ///< outward unit normal
  double weight = 0.0;
  double arc = 0.0;  ///< arc-length coordinate of the node
};

/// A bounded convex planar domain with interior quadrature and boundary samples.
///
/// Interior nodes live on the cells of a lattice whose centers are
/// center + (k + 1/2) h. Full cells carry weight h^2 and sit at the cell
/// center; cells crossed by the boundary are split into 4x4 subcells whose
/// coverage comes from the exact area of a square cut by the linearized
/// boundary, and the node moves to the covered centroid.
class DiscreteDomain {
 public:
  const DomainDescriptor& descriptor() const { return descriptor_; }
  double grid_h() const { return h_; }

  const std::vector<InteriorNode>& interior() const { return interior_; }
  const std::vector<BoundaryNode>& boundary() const { return boundary_; }

  /// Sum of interior weights.
  double area() const { return area_; }
  /// Exact area (polygon, ellipse) or high-order polar quadrature (Wulff ball).
  double reference_area() const { return reference_area_; }
  const Vec2& centroid() const { return centroid_; }
  double perimeter() const { return perimeter_; }
  double diameter() const;

  /// Negative inside, zero on the boundary.
  double level(const Vec2& y) const;
  bool contains(const Vec2& y) const { return level(y) <= 0.0; }

  /// Lattice covering every cell of the domain plus `margin` extra nodes on
  /// each side. The node of cell (i, j) has multi-index (i + margin, j + margin).
  GridDescriptor lattice(int margin) const;
  /// Flat index of interior node k in lattice(margin).
  std::size_t lattice_index(std::size_t k, int margin) const;

  double integrate(const std::function<double(const Vec2&)>& f) const;
  double boundary_integrate(const std::function<double(const BoundaryNode&)>& f) const;

 private:
  friend DiscreteDomain build_domain(const DomainDescriptor&, double, int);

  DomainDescriptor descriptor_;
  double h_ = 0.0;
  Vec2 lattice_origin_ = Vec2::Zero();  ///< center of cell (0, 0)
  int cells_x_ = 0;
  int cells_y_ = 0;
  std::vector<InteriorNode> interior_;
  std::vector<BoundaryNode> boundary_;
  double area_ = 0.0;
  double reference_area_ = 0.0;
  Vec2 centroid_ = Vec2::Zero();
  double perimeter_ = 0.0;
};

/// Builds interior quadrature on a lattice of spacing grid_h and
/// `boundary_nodes` arc-length-uniform boundary samples.
DiscreteDomain build_domain(const DomainDescriptor& descriptor, double grid_h, int boundary_nodes = 2048);

/// Dilates the descriptor about its centroid so the exact area equals target_area.
DomainDescriptor scale_descriptor(const DiscreteDomain& domain, double target_area);

/// Rebuilt dilated domain with the same lattice spacing and boundary count.
DiscreteDomain scale_to_area(const DiscreteDomain& domain, double target_area);

/// A convex sublevel set {level <= 0} with a Lipschitz bound on its level
/// function and a bounding box.
struct LevelSetRegion {
  std::function<double(const Vec2&)> level;
  double lipschitz = 1.0;
  Vec2 center = Vec2::Zero();
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Zero();
  /// Optional density; cell masses then integrate it with a 2x2 Gauss rule
  /// on full cells and the covered subcells on boundary cells.
  std::function<double(const Vec2&)> density;
};

/// The same boundary-corrected cell quadrature build_domain uses, for an
/// arbitrary region (the target ball B_H has no domain descriptor).
std::vector<InteriorNode> lattice_quadrature(const LevelSetRegion& region, double h);

/// Samples f at every node of domain.lattice(margin); the mask marks the
/// cells that carry an interior quadrature node.
GridFunction sample_on_lattice(const DiscreteDomain& domain, const std::function<double(const Vec2&)>& f,
                               int margin = 2);

/// Area of B_{H0} by polar quadrature; works in 2-D only.
double wulff_area(const NormSpec& spec, double radius = 1.0);

/// Integral of f over B_{H0}(center, radius) in polar coordinates: trapezoidal
/// in angle and 16-point Gauss-Legendre along each ray.
double polar_integrate(const NormSpec& spec, const std::function<double(const Vec2&)>& f, double radius = 1.0,
                       const Vec2& center = Vec2::Zero(), int angles = 4096);

/// Coarea identity L^n(B_{H0}) = (2(n+2)/n) * integral of E0 over B_{H0}.
/// Planar specs: grid area against polar quadrature, relative tolerance 1e-3.
/// Spatial specs: Monte Carlo with 10^6 samples, relative tolerance 1e-2.
CheckReport wulff_volume_identity(const NormSpec& spec, double grid_h = 1.0 / 128.0, std::uint64_t seed = 1);

/// Gauss-Legendre nodes and weights on [0, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int order);

}  // namespace wulff
