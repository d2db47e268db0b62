#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "wulff/types.hpp"

namespace wulff {

/// Uniform lattice: node k along axis a sits at origin[a] + k * spacing[a].
struct GridDescriptor {
  Vec origin;
  Vec spacing;
  std::vector<int> shape;

  int dimension() const { return static_cast<int>(shape.size()); }
  std::size_t size() const;
};

/// Centered lattice with `per_axis` nodes spanning [lo, hi] on every axis.
GridDescriptor box_grid(const Vec& lo, const Vec& hi, int per_axis);

/// Scalar samples on a uniform lattice with an inside-domain mask.
/// Flat index runs fastest along axis 0.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(GridDescriptor grid);
  GridFunction(GridDescriptor grid, std::vector<double> values, std::vector<std::uint8_t> mask);

  /// Samples f at every node; mask from `inside`, or all nodes when empty.
  static GridFunction sample(const GridDescriptor& grid, const std::function<double(const Vec&)>& f,
                             const std::function<bool(const Vec&)>& inside = {});

  const GridDescriptor& grid() const { return grid_; }
  int dimension() const { return grid_.dimension(); }
  std::size_t size() const { return values_.size(); }
  const std::vector<int>& shape() const { return grid_.shape; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<std::uint8_t>& mask() { return mask_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  bool masked(std::size_t i) const { return mask_[i] != 0; }

  std::size_t flat_index(const std::vector<int>& multi) const;
  std::vector<int> multi_index(std::size_t flat) const;
  Vec node(std::size_t flat) const;

  bool contains(const Vec& x) const;
  /// Multilinear interpolation; throws DomainError outside the lattice box.
  double interpolate(const Vec& x) const;

 private:
  GridDescriptor grid_;
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
};

/// Conjugate values together with the maximizing source node per dual node.
struct LegendreResult {
  GridFunction conjugate;
  std::vector<std::size_t> argmax;
};

/// Exact discrete conjugate: value at xi is the max over masked nodes x of
/// x.xi - u(x). Dual nodes rejected by `dual_inside` are computed but unmasked.
LegendreResult legendre_transform(const GridFunction& u, const GridDescriptor& dual,
                                  const std::function<bool(const Vec&)>& dual_inside = {});

GridFunction legendre_conjugate(const GridFunction& u, const GridDescriptor& dual,
                                const std::function<bool(const Vec&)>& dual_inside = {});

/// u(x) + u~(xi) - x.xi with both terms interpolated. Non-negative up to
/// interpolation error; near zero when xi = grad u(x).
double young_gap(const GridFunction& u, const GridFunction& u_conj, const Vec& x, const Vec& xi);

/// Counts midpoint-convexity violations u((x+y)/2) > (u(x)+u(y))/2 + tol over
/// random pairs of masked nodes whose midpoint is also masked-adjacent.
int midpoint_convexity_violations(const GridFunction& u, int pairs, std::uint64_t seed, double tol);

/// Matrix Newton inequality det(AB)^(1/n) <= tr(AB)/n.
struct NewtonCheck {
  double lhs = 0.0;     ///< det(AB)^(1/n)
  double rhs = 0.0;     ///< tr(AB)/n
  bool equality = false;
  double lambda = 0.0;  ///< tr(AB)/n, meaningful when equality holds
};

/// A must be symmetric positive definite, B symmetric positive semidefinite.
/// Equality is flagged when ||AB - lambda I||_inf <= 1e-10 (1 + lambda).
NewtonCheck newton_inequality(const Mat& a, const Mat& b);

}  // namespace wulff
