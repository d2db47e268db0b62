#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wulff/check_report.hpp"
#include "wulff/convex_calculus.hpp"
#include "wulff/geometry.hpp"
#include "wulff/norms.hpp"
#include "wulff/types.hpp"

namespace wulff {

/// Weighted point cloud; total is the sum of masses.
struct CloudMeasure {
  std::vector<Vec2> points;
  std::vector<double> masses;
  double total = 0.0;
};

/// Validates finiteness and non-negativity and fills in the total.
CloudMeasure make_cloud(std::vector<Vec2> points, std::vector<double> masses);

/// Interior quadrature of a domain as a measure (Lebesgue on the domain).
CloudMeasure source_cloud(const DiscreteDomain& domain);

/// Lattice quadrature of B_H with masses the cell integrals of Phi; spacing
/// sqrt(area(B_H) / m). The total approximates the area of B_{H0}.
CloudMeasure discretize_target(const NormSpec& spec, int m);

/// Area of B_H = {H <= 1} by polar quadrature.
double norm_ball_area(const NormSpec& spec);

struct SolverOptions {
  double eps_final = -1.0;  ///< negative selects 1e-3 * diam(B_H)^2
  double marginal_tol = 1e-6;
  int max_sweeps = 10000;
  int source_nodes = 2000;
  int target_nodes = 2000;
};

/// Entropic optimal transport between the uniform measure on a domain and
/// Phi on B_H for the cost |x - xi|^2 / 2.
///
/// The plan is a_i b_j exp((f_i + g_j - C_ij) / eps), so f and g extend to
/// any point by a soft c-transform. The resulting potential
/// u(x) = eps log sum_j b_j exp((g_j - |xi_j|^2/2 + x.xi_j) / eps) is exactly
/// convex and smooth, and its gradient is the barycentric map.
class TransportSolution {
 public:
  TransportSolution(CloudMeasure source, CloudMeasure target, std::vector<double> f, std::vector<double> g,
                    double epsilon, double marginal_err, int sweeps);

  const CloudMeasure& source() const { return source_; }
  const CloudMeasure& target() const { return target_; }
  const std::vector<double>& f() const { return f_; }
  const std::vector<double>& g() const { return g_; }
  double epsilon() const { return epsilon_; }
  double marginal_err() const { return marginal_err_; }
  int sweeps() const { return sweeps_; }

  /// Barycentric image of x.
  Vec2 map(const Vec2& x) const;
  /// u(x) = |x|^2 / 2 - f^(x).
  double potential(const Vec2& x) const;
  /// Conjugate u~(xi) = |xi|^2 / 2 - g^(xi).
  double conjugate(const Vec2& xi) const;
  /// Barycentric preimage of xi, the gradient of conjugate().
  Vec2 inverse_map(const Vec2& xi) const;

  /// map() at every source point.
  std::vector<Vec2> source_map() const;

 private:
  CloudMeasure source_;
  CloudMeasure target_;
  std::vector<double> f_;
  std::vector<double> g_;
  double epsilon_;
  double marginal_err_;
  int sweeps_;
  std::vector<double> target_shift_;  // g_j - |xi_j|^2 / 2 + eps log b_j
  std::vector<double> source_shift_;  // f_i - |x_i|^2 / 2 + eps log a_i
};

/// Solves between two clouds. Throws CompatibilityError when the totals differ
/// by more than 1e-3 relative (the target is then rescaled to the source total)
/// and SolverFailure when the marginal tolerance is not reached.
TransportSolution solve_transport(const CloudMeasure& source, const CloudMeasure& target,
                                  const SolverOptions& opts = {});

/// Convenience overload: source from the domain, target from discretize_target.
TransportSolution solve_transport(const DiscreteDomain& domain, const NormSpec& spec,
                                  const SolverOptions& opts = {});

/// Analytic solution on B_{H0}: u = E0(x) - 1/2, grad u = grad E0(x).
struct RadialValue {
  double u = 0.0;
  Vec grad;
};
RadialValue radial_solution(const NormSpec& spec, const Vec& x);

/// Nodes whose gradient norm is below min_grad are skipped; a negative value
/// selects the lattice spacing. A positive axis_band also skips nodes where
/// some gradient component is smaller than it in magnitude, which keeps
/// PNorm evaluations at generic points.
struct ResidualOptions {
  double min_grad = -1.0;
  double axis_band = 0.0;
};

/// True when grad passes both exclusions of opts (min_grad already resolved).
bool admissible_gradient(const Vec& grad, double min_grad, const ResidualOptions& opts);

/// Residual Phi(grad u) det(hess u) - 1 from central differences at masked
/// nodes with a full stencil. The mask of the result marks evaluated nodes.
GridFunction ma_residual(const NormSpec& spec, const GridFunction& u, const ResidualOptions& opts = {});

/// Max |value| over masked nodes (0 when nothing is masked).
double sup_abs(const GridFunction& g);

struct TestFunction {
  std::string name;
  std::function<double(const Vec2&)> f;
};

/// Monomials up to degree three and two Gaussians: twelve functions.
std::vector<TestFunction> weak_form_battery();

/// Brenier weak form: integral of h Phi over B_H (from `target`) against
/// integral over the domain of h(map(x)). Relative error is measured against
/// max(|target side|, integral of |h| Phi) so odd integrands are meaningful.
std::vector<CheckReport> brenier_weak_check(const std::function<Vec2(const Vec2&)>& map,
                                            const DiscreteDomain& domain, const CloudMeasure& target,
                                            const std::vector<TestFunction>& tests, double tol,
                                            const std::string& prefix = "brenier");

/// Change of variables onto B_{H0}: polar integral of g over B_{H0} against
/// the domain integral of g(grad_E(map(x))).
std::vector<CheckReport> change_of_variables_check(const std::function<Vec2(const Vec2&)>& map,
                                                   const DiscreteDomain& domain, const NormSpec& spec,
                                                   const std::vector<TestFunction>& tests, double tol,
                                                   const std::string& prefix = "change1");

/// Both batteries on solver output at the given tolerance (3% by default).
std::vector<CheckReport> brenier_weak_check(const TransportSolution& sol, const DiscreteDomain& domain,
                                            const NormSpec& spec, const std::vector<TestFunction>& tests,
                                            double tol = 0.03);

}  // namespace wulff
