#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "wulff/check_report.hpp"
#include "wulff/convex_calculus.hpp"
#include "wulff/geometry.hpp"
#include "wulff/norms.hpp"
#include "wulff/transport.hpp"

namespace wulff {

/// A candidate solution u with its gradient and its Legendre conjugate.
struct PotentialModel {
  std::function<double(const Vec2&)> u;
  std::function<Vec2(const Vec2&)> grad;
  std::function<double(const Vec2&)> conjugate;
  std::function<Vec2(const Vec2&)> conjugate_grad;
};

/// u(x) = E0(x - center) - 1/2 with conjugate E(xi) + 1/2 + center.xi.
PotentialModel radial_model(const NormSpec& spec, const Vec2& center = Vec2::Zero());

/// Solver potential shifted to zero boundary mean; the conjugate is the exact
/// discrete Legendre transform over the domain's interior nodes and its
/// gradient the barycentric inverse map.
PotentialModel solver_model(const TransportSolution& sol, const DiscreteDomain& domain);

/// Lattice samples of u aligned with a domain's quadrature, plus u at the
/// boundary nodes.
struct SampledPotential {
  GridFunction grid;
  std::vector<double> boundary_values;
  int margin = 2;
};

SampledPotential sample_potential(const DiscreteDomain& domain, const std::function<double(const Vec2&)>& u,
                                  int margin = 2);

/// Area of the domain against the area of B_{H0}.
CheckReport check_step1_mass(const DiscreteDomain& domain, const NormSpec& spec, double tol = 1e-3);

/// -integral of u Delta_H u against 2 * integral of E(grad u), with
/// Delta_H u = div(grad_E(grad u)) by central differences. Throws
/// PreconditionError when |u| exceeds boundary_tol on the boundary nodes.
CheckReport check_energy_identity(const NormSpec& spec, const DiscreteDomain& domain, const SampledPotential& u,
                                  double tol = 0.02, double boundary_tol = 1e-6);

/// Four equalities that hold along the proof on a Wulff-shaped domain:
///   chain_a: 2 int_{B_H0} E0 = -n int u
///   chain_b: int_{B_H0} E0 = int E(grad u)
///   chain_c: int_{B_H0} u~(grad E0) = -(n+1) int u
///   chain_d: int_{B_H0} grad u~(grad E0).grad E0 = (n/2)(|B_H0| - 2 int E0)
/// Throws PreconditionError unless is_wulff_shape(domain, spec).
std::vector<CheckReport> check_chain_equalities(const NormSpec& spec, const DiscreteDomain& domain,
                                                const PotentialModel& model, double tol);

/// True when H0(y - c) is constant (relative tolerance) over the boundary
/// nodes, with c the ball center for Wulff descriptors and the centroid
/// otherwise.
bool is_wulff_shape(const DiscreteDomain& domain, const NormSpec& spec, double rel_tol = 1e-3);

/// Interior lattice nodes where the finite-difference quantities are taken.
struct AdmissibleNode {
  std::size_t quad;  ///< interior-node index in the domain
  std::size_t flat;  ///< lattice index
  Vec grad;
  Mat hess;
};
std::vector<AdmissibleNode> admissible_nodes(const DiscreteDomain& domain, const SampledPotential& u,
                                             const ResidualOptions& opts = {});

/// sup over admissible nodes of the max-entry norm of
/// hess_E(grad u) hess u - I, and the RMS residual of fitting
/// grad_E(grad u(x)) by x - xbar.
std::vector<CheckReport> check_equality_condition(const NormSpec& spec, const DiscreteDomain& domain,
                                                  const SampledPotential& u, double tol, double fit_tol,
                                                  const ResidualOptions& opts = {});

/// tr(M) >= n det(M)^(1/n) with M = hess_E(grad u) hess u at admissible nodes.
/// Reports the fraction that satisfy it (must reach min_fraction); with
/// expect_equality, also the largest deviation of tr M / n and det(M)^(1/n)
/// from 1 (must stay below equality_tol).
std::vector<CheckReport> check_newton_pointwise(const NormSpec& spec, const DiscreteDomain& domain,
                                                const SampledPotential& u, bool expect_equality,
                                                double min_fraction = 0.99, double equality_tol = 0.02,
                                                const ResidualOptions& opts = {});

/// Boundary sample of a solved potential.
struct TraceRow {
  double arc = 0.0;
  double u = 0.0;
  double h_grad = 0.0;  ///< H(map(x))
};

struct BoundaryStats {
  double osc = 0.0;        ///< (max - min of u on the boundary) / sup |u|
  double h_rel_std = 0.0;  ///< relative std of H(map) on the boundary
  double h_min = 0.0;
  double sup_u = 0.0;
  std::vector<TraceRow> trace;
};

/// Boundary statistics of the zero-boundary-mean solver potential.
BoundaryStats boundary_stats(const TransportSolution& sol, const DiscreteDomain& domain, const NormSpec& spec);

struct ExperimentOptions {
  int source_nodes = 2000;
  int target_nodes = 2000;
  int boundary_nodes = 512;
  SolverOptions solver;
  double wulff_osc_tol = 0.05;
  double min_ratio = 3.0;
};

struct OverdeterminedResult {
  bool wulff = false;
  BoundaryStats domain;
  BoundaryStats baseline;  ///< Wulff ball at the same resolution
  double ratio = 0.0;      ///< domain osc / baseline osc
  std::vector<CheckReport> reports;
};

/// The descriptor dilated to the area of B_{H0} and built with a lattice
/// spacing that yields about source_nodes interior nodes.
DiscreteDomain build_compatible_domain(const NormSpec& spec, const DomainDescriptor& descriptor, int source_nodes,
                                       int boundary_nodes = 512);

/// Scales the domain to the area of B_{H0}, solves transport, and compares
/// the boundary oscillation against a Wulff-ball run at matched resolution.
/// Wulff domains must have osc <= wulff_osc_tol; others a ratio >= min_ratio.
OverdeterminedResult overdetermined_experiment(const NormSpec& spec, const DomainDescriptor& descriptor,
                                               const ExperimentOptions& opts = {});

/// Solver checks on Omega = B_{H0}: mean |map - grad E0| against
/// 0.03 diam(B_H0), bounded relative spread of H(map) and boundary
/// oscillation of u on the boundary nodes, and the second boundary condition.
std::vector<CheckReport> solver_wulff_checks(const TransportSolution& sol, const DiscreteDomain& domain,
                                             const NormSpec& spec);

/// Norm-calculus identities at `count` random points drawn from `seed`.
/// Duality, Euler, composition, inverse-map and bidual identities use
/// relative tolerance 1e-6 (1e-5 for Fourier profiles); homogeneity 1e-12;
/// Hessian homogeneity 1e-8 entrywise.
std::vector<CheckReport> check_norm_identities(const NormSpec& spec, int count, std::uint64_t seed);

}  // namespace wulff
