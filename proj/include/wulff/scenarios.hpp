#pragma once

#include "wulff/io.hpp"
#include "wulff/transport.hpp"

namespace wulff {

/// Exclusions used by the finite-difference checks of a run.
ResidualOptions derivative_options(const RunConfig& config, const NormSpec& spec);

/// Identity suite for the norm: duality, Euler, composition, inverse maps,
/// bidual, homogeneity, and (planar) the coarea volume identity.
ScenarioResult run_norm_identities(const RunConfig& config);

/// Every step of the rigidity argument along the analytic radial solution on
/// B_{H0}: mass, energy identity, chain equalities, Newton equality, the
/// equality condition, the Monge-Ampere residual and both weak forms.
ScenarioResult run_wulff_identities(const RunConfig& config);

/// Solves transport on the configured domain (B_{H0} by default) and runs the
/// solver-path checks. Non-Wulff domains get the checks valid on any domain.
ScenarioResult run_solve_and_verify(const RunConfig& config);

/// Boundary-oscillation comparison against the Wulff ball, repeated after
/// one refinement step.
ScenarioResult run_converse(const RunConfig& config);

/// Monge-Ampere residual and equality-condition errors of the radial
/// solution over the configured spacings, with the fitted order.
ScenarioResult run_convergence_study(const RunConfig& config);

/// Dispatches on config.scenario and sets the wall time. Solver failures are
/// recorded as failed checks rather than thrown.
ScenarioResult run_scenario(const RunConfig& config);

/// Least-squares slope of log(error) against log(h).
double fitted_order(const std::vector<double>& h, const std::vector<double>& error);

}  // namespace wulff
