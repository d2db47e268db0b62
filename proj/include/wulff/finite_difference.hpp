#pragma once

#include <cstddef>

#include "wulff/convex_calculus.hpp"
#include "wulff/types.hpp"

namespace wulff {

/// True when every node of the 3^n stencil around `flat` exists in the lattice.
bool has_stencil(const GridFunction& u, std::size_t flat);

/// Second-order central gradient at a node; requires has_stencil.
Vec fd_gradient(const GridFunction& u, std::size_t flat);

/// Second-order central Hessian (mixed terms from the four diagonal
/// neighbours); requires has_stencil.
Mat fd_hessian(const GridFunction& u, std::size_t flat);

}  // namespace wulff
