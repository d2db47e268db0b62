#include "wulff/finite_difference.hpp"

#include "wulff/errors.hpp"

namespace wulff {

namespace {

// Flat offset of one step along axis a (axis 0 runs fastest).
std::ptrdiff_t axis_stride(const GridFunction& u, int a) {
  std::ptrdiff_t stride = 1;
  for (int b = 0; b < a; ++b) stride *= u.shape()[static_cast<std::size_t>(b)];
  return stride;
}

}  // namespace

bool has_stencil(const GridFunction& u, std::size_t flat) {
  const auto multi = u.multi_index(flat);
  for (int a = 0; a < u.dimension(); ++a) {
    const int k = multi[static_cast<std::size_t>(a)];
    if (k < 1 || k > u.shape()[static_cast<std::size_t>(a)] - 2) return false;
  }
  return true;
}

Vec fd_gradient(const GridFunction& u, std::size_t flat) {
  if (!has_stencil(u, flat)) throw DomainError("finite-difference stencil leaves the lattice");
  const int n = u.dimension();
  const auto i = static_cast<std::ptrdiff_t>(flat);
  const auto& v = u.values();
  Vec g(n);
  for (int a = 0; a < n; ++a) {
    const std::ptrdiff_t s = axis_stride(u, a);
    g[a] = (v[static_cast<std::size_t>(i + s)] - v[static_cast<std::size_t>(i - s)]) / (2.0 * u.grid().spacing[a]);
  }
  return g;
}

Mat fd_hessian(const GridFunction& u, std::size_t flat) {
  if (!has_stencil(u, flat)) throw DomainError("finite-difference stencil leaves the lattice");
  const int n = u.dimension();
  const auto i = static_cast<std::ptrdiff_t>(flat);
  const auto& v = u.values();
  auto at = [&](std::ptrdiff_t k) { return v[static_cast<std::size_t>(k)]; };
  Mat hess(n, n);
  for (int a = 0; a < n; ++a) {
    const std::ptrdiff_t sa = axis_stride(u, a);
    const double ha = u.grid().spacing[a];
    hess(a, a) = (at(i + sa) - 2.0 * at(i) + at(i - sa)) / (ha * ha);
    for (int b = a + 1; b < n; ++b) {
      const std::ptrdiff_t sb = axis_stride(u, b);
      const double hb = u.grid().spacing[b];
      const double mixed = (at(i + sa + sb) - at(i + sa - sb) - at(i - sa + sb) + at(i - sa - sb)) / (4.0 * ha * hb);
      hess(a, b) = mixed;
      hess(b, a) = mixed;
    }
  }
  return hess;
}

}  // namespace wulff
