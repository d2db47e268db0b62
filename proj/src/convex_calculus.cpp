#include "wulff/convex_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "wulff/errors.hpp"
#include "wulff/parallel.hpp"

namespace wulff {

std::size_t GridDescriptor::size() const {
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  return n;
}

GridDescriptor box_grid(const Vec& lo, const Vec& hi, int per_axis) {
  if (per_axis < 2) throw InvalidInput("a grid needs at least two nodes per axis");
  GridDescriptor g;
  g.origin = lo;
  g.spacing = (hi - lo) / (per_axis - 1);
  g.shape.assign(static_cast<std::size_t>(lo.size()), per_axis);
  return g;
}

namespace {

void validate(const GridDescriptor& g) {
  const int n = g.dimension();
  if (n < 1 || g.origin.size() != n || g.spacing.size() != n) {
    throw InvalidInput("grid descriptor has inconsistent dimensions");
  }
  for (int a = 0; a < n; ++a) {
    if (!(g.spacing[a] > 0.0) || !std::isfinite(g.spacing[a])) throw InvalidInput("grid spacing must be positive");
    if (g.shape[static_cast<std::size_t>(a)] < 1) throw InvalidInput("grid shape must be positive");
  }
}

}  // namespace

GridFunction::GridFunction(GridDescriptor grid) : grid_(std::move(grid)) {
  validate(grid_);
  values_.assign(grid_.size(), 0.0);
  mask_.assign(grid_.size(), 1);
}

GridFunction::GridFunction(GridDescriptor grid, std::vector<double> values, std::vector<std::uint8_t> mask)
    : grid_(std::move(grid)), values_(std::move(values)), mask_(std::move(mask)) {
  validate(grid_);
  if (values_.size() != grid_.size()) throw InvalidInput("grid function value count does not match its shape");
  if (mask_.empty()) mask_.assign(values_.size(), 1);
  if (mask_.size() != values_.size()) throw InvalidInput("grid function mask size does not match its shape");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (mask_[i] && !std::isfinite(values_[i])) throw InvalidInput("non-finite value on a masked node");
  }
}

GridFunction GridFunction::sample(const GridDescriptor& grid, const std::function<double(const Vec&)>& f,
                                  const std::function<bool(const Vec&)>& inside) {
  GridFunction out(grid);
  parallel_for(out.size(), [&](std::size_t i) {
    const Vec x = out.node(i);
    out.values_[i] = f(x);
    out.mask_[i] = (!inside || inside(x)) ? 1 : 0;
  });
  return out;
}

std::size_t GridFunction::flat_index(const std::vector<int>& multi) const {
  std::size_t flat = 0;
  for (int a = dimension() - 1; a >= 0; --a) {
    flat = flat * static_cast<std::size_t>(grid_.shape[static_cast<std::size_t>(a)]) +
           static_cast<std::size_t>(multi[static_cast<std::size_t>(a)]);
  }
  return flat;
}

std::vector<int> GridFunction::multi_index(std::size_t flat) const {
  std::vector<int> multi(static_cast<std::size_t>(dimension()));
  for (int a = 0; a < dimension(); ++a) {
    const auto s = static_cast<std::size_t>(grid_.shape[static_cast<std::size_t>(a)]);
    multi[static_cast<std::size_t>(a)] = static_cast<int>(flat % s);
    flat /= s;
  }
  return multi;
}

Vec GridFunction::node(std::size_t flat) const {
  const auto multi = multi_index(flat);
  Vec x(dimension());
  for (int a = 0; a < dimension(); ++a) x[a] = grid_.origin[a] + multi[static_cast<std::size_t>(a)] * grid_.spacing[a];
  return x;
}

bool GridFunction::contains(const Vec& x) const {
  if (x.size() != dimension()) return false;
  for (int a = 0; a < dimension(); ++a) {
    const double t = (x[a] - grid_.origin[a]) / grid_.spacing[a];
    if (!(t >= -1e-12 && t <= grid_.shape[static_cast<std::size_t>(a)] - 1 + 1e-12)) return false;
  }
  return true;
}

double GridFunction::interpolate(const Vec& x) const {
  if (!contains(x)) throw DomainError("interpolation point lies outside the grid");
  const int n = dimension();
  std::vector<int> base(static_cast<std::size_t>(n));
  std::vector<double> frac(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const int s = grid_.shape[static_cast<std::size_t>(a)];
    const double t = std::clamp((x[a] - grid_.origin[a]) / grid_.spacing[a], 0.0, static_cast<double>(s - 1));
    int k = std::min(static_cast<int>(std::floor(t)), std::max(s - 2, 0));
    base[static_cast<std::size_t>(a)] = k;
    frac[static_cast<std::size_t>(a)] = s > 1 ? t - k : 0.0;
  }
  double result = 0.0;
  std::vector<int> corner(static_cast<std::size_t>(n));
  for (int c = 0; c < (1 << n); ++c) {
    double w = 1.0;
    for (int a = 0; a < n; ++a) {
      const bool up = (c >> a) & 1;
      const auto ua = static_cast<std::size_t>(a);
      if (up && grid_.shape[ua] == 1) {
        w = 0.0;
        break;
      }
      corner[ua] = base[ua] + (up ? 1 : 0);
      w *= up ? frac[ua] : 1.0 - frac[ua];
    }
    if (w != 0.0) result += w * values_[flat_index(corner)];
  }
  return result;
}

LegendreResult legendre_transform(const GridFunction& u, const GridDescriptor& dual,
                                  const std::function<bool(const Vec&)>& dual_inside) {
  if (dual.dimension() != u.dimension()) throw InvalidInput("dual grid dimension differs from the primal grid");
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.masked(i)) active.push_back(i);
  }
  if (active.empty()) throw InvalidInput("Legendre transform of a grid function with an empty mask");

  const int n = u.dimension();
  Mat nodes(n, static_cast<Eigen::Index>(active.size()));
  Vec values(static_cast<Eigen::Index>(active.size()));
  for (std::size_t k = 0; k < active.size(); ++k) {
    nodes.col(static_cast<Eigen::Index>(k)) = u.node(active[k]);
    values[static_cast<Eigen::Index>(k)] = u[active[k]];
  }

  LegendreResult out{GridFunction(dual), std::vector<std::size_t>(dual.size(), 0)};
  parallel_for(out.conjugate.size(), [&](std::size_t j) {
    const Vec xi = out.conjugate.node(j);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (Eigen::Index k = 0; k < nodes.cols(); ++k) {
      const double v = nodes.col(k).dot(xi) - values[k];
      if (v > best) {
        best = v;
        arg = static_cast<std::size_t>(k);
      }
    }
    out.conjugate[j] = best;
    out.argmax[j] = active[arg];
    out.conjugate.mask()[j] = (!dual_inside || dual_inside(xi)) ? 1 : 0;
  });
  return out;
}

GridFunction legendre_conjugate(const GridFunction& u, const GridDescriptor& dual,
                                const std::function<bool(const Vec&)>& dual_inside) {
  return legendre_transform(u, dual, dual_inside).conjugate;
}

double young_gap(const GridFunction& u, const GridFunction& u_conj, const Vec& x, const Vec& xi) {
  return u.interpolate(x) + u_conj.interpolate(xi) - x.dot(xi);
}

int midpoint_convexity_violations(const GridFunction& u, int pairs, std::uint64_t seed, double tol) {
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.masked(i)) active.push_back(i);
  }
  if (active.size() < 2) return 0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
  int violations = 0;
  int tested = 0;
  for (int attempt = 0; tested < pairs && attempt < 50 * pairs; ++attempt) {
    const auto a = u.multi_index(active[pick(rng)]);
    const auto b = u.multi_index(active[pick(rng)]);
    std::vector<int> mid(a.size());
    bool lattice = true;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if ((a[k] + b[k]) % 2 != 0) lattice = false;
      mid[k] = (a[k] + b[k]) / 2;
    }
    if (!lattice) continue;
    const std::size_t m = u.flat_index(mid);
    if (!u.masked(m)) continue;
    ++tested;
    if (u[m] > 0.5 * (u[u.flat_index(a)] + u[u.flat_index(b)]) + tol) ++violations;
  }
  return violations;
}

NewtonCheck newton_inequality(const Mat& a, const Mat& b) {
  const auto n = a.rows();
  if (a.cols() != n || b.rows() != n || b.cols() != n || n == 0) {
    throw InvalidInput("Newton inequality needs two square matrices of equal size");
  }
  if (!a.allFinite() || !b.allFinite()) throw InvalidInput("non-finite matrix entry");
  auto symmetric = [](const Mat& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + m.cwiseAbs().maxCoeff());
  };
  if (!symmetric(a)) throw InvalidInput("A is not symmetric");
  if (!symmetric(b)) throw InvalidInput("B is not symmetric");
  const Mat as = 0.5 * (a + a.transpose());
  const Mat bs = 0.5 * (b + b.transpose());
  Eigen::LLT<Mat> llt(as);
  if (llt.info() != Eigen::Success) throw InvalidInput("A is not positive definite");
  Eigen::SelfAdjointEigenSolver<Mat> eig(bs, Eigen::EigenvaluesOnly);
  const double bnorm = bs.cwiseAbs().maxCoeff();
  if (eig.eigenvalues().minCoeff() < -1e-12 * bnorm) throw InvalidInput("B is not positive semidefinite");

  const Mat ab = as * bs;
  const double dn = static_cast<double>(n);
  NewtonCheck out;
  out.rhs = ab.trace() / dn;
  // Numerically singular B has determinant zero; the raw product of its
  // eigenvalues would leave roundoff that the n-th root amplifies.
  double det_b = 1.0;
  for (double ev : eig.eigenvalues()) det_b *= ev <= 1e-12 * bnorm ? 0.0 : ev;
  const double det = std::max(0.0, as.determinant() * det_b);
  out.lhs = std::pow(det, 1.0 / dn);
  out.lambda = std::max(0.0, out.rhs);
  const Mat gap = ab - out.lambda * Mat::Identity(n, n);
  const double inf_norm = gap.cwiseAbs().rowwise().sum().maxCoeff();
  out.equality = inf_norm <= 1e-10 * (1.0 + out.lambda);
  return out;
}

}  // namespace wulff
