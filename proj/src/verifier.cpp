#include "wulff/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "wulff/errors.hpp"
#include "wulff/finite_difference.hpp"
#include "wulff/parallel.hpp"

namespace wulff {

namespace {

// Angular resolution of the B_H0 integrals in the chain. The integrands are
// smooth and periodic, so the trapezoidal rule is already spectrally accurate.
constexpr int kChainAngles = 1024;

Vec as_vec(const Vec2& v) {
  Vec out(2);
  out << v.x(), v.y();
  return out;
}

Vec2 as_vec2(const Vec& v) { return Vec2(v[0], v[1]); }

double weighted_boundary_mean(const DiscreteDomain& domain, const std::function<double(const Vec2&)>& f) {
  double s = 0.0, w = 0.0;
  for (const auto& b : domain.boundary()) {
    s += b.weight * f(b.point);
    w += b.weight;
  }
  return s / w;
}

Vec2 domain_center(const DiscreteDomain& domain) {
  if (const auto* ball = std::get_if<WulffBall>(&domain.descriptor())) return ball->center;
  return domain.centroid();
}

}  // namespace

PotentialModel radial_model(const NormSpec& spec, const Vec2& center) {
  PotentialModel m;
  m.u = [spec, center](const Vec2& x) { return dual_energy(spec, as_vec(x - center)) - 0.5; };
  m.grad = [spec, center](const Vec2& x) { return as_vec2(grad_E0(spec, as_vec(x - center))); };
  m.conjugate = [spec, center](const Vec2& xi) { return energy(spec, as_vec(xi)) + 0.5 + center.dot(xi); };
  m.conjugate_grad = [spec, center](const Vec2& xi) { return Vec2(center + as_vec2(grad_E(spec, as_vec(xi)))); };
  return m;
}

PotentialModel solver_model(const TransportSolution& solution, const DiscreteDomain& domain) {
  auto sol = std::make_shared<TransportSolution>(solution);
  const double mean = weighted_boundary_mean(domain, [&](const Vec2& x) { return sol->potential(x); });
  auto nodes = std::make_shared<std::vector<Vec2>>();
  auto values = std::make_shared<std::vector<double>>(domain.interior().size());
  for (const auto& n : domain.interior()) nodes->push_back(n.point);
  parallel_for(nodes->size(), [&](std::size_t k) { (*values)[k] = sol->potential((*nodes)[k]) - mean; });
  PotentialModel m;
  m.u = [sol, mean](const Vec2& x) { return sol->potential(x) - mean; };
  m.grad = [sol](const Vec2& x) { return sol->map(x); };
  m.conjugate = [nodes, values](const Vec2& xi) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < nodes->size(); ++k) best = std::max(best, (*nodes)[k].dot(xi) - (*values)[k]);
    return best;
  };
  m.conjugate_grad = [sol](const Vec2& xi) { return sol->inverse_map(xi); };
  return m;
}

SampledPotential sample_potential(const DiscreteDomain& domain, const std::function<double(const Vec2&)>& u,
                                  int margin) {
  SampledPotential s;
  s.margin = margin;
  s.grid = sample_on_lattice(domain, u, margin);
  s.boundary_values.resize(domain.boundary().size());
  parallel_for(s.boundary_values.size(), [&](std::size_t k) { s.boundary_values[k] = u(domain.boundary()[k].point); });
  return s;
}

CheckReport check_step1_mass(const DiscreteDomain& domain, const NormSpec& spec, double tol) {
  return make_check("step1_mass", domain.area(), wulff_area(spec), Relation::Equal, tol,
                    "domain quadrature area against polar area of B_H0");
}

CheckReport check_energy_identity(const NormSpec& spec, const DiscreteDomain& domain, const SampledPotential& u,
                                  double tol, double boundary_tol) {
  double worst = 0.0;
  for (double v : u.boundary_values) worst = std::max(worst, std::abs(v));
  if (worst > boundary_tol) {
    throw PreconditionError("energy identity needs u = 0 on the boundary; max |u| there is " +
                            std::to_string(worst));
  }
  const GridFunction& g = u.grid;
  const int n = g.dimension();
  // Flux grad_E(grad u) wherever the stencil exists.
  std::vector<Vec> flux(g.size());
  parallel_for(g.size(), [&](std::size_t k) {
    if (has_stencil(g, k)) flux[k] = grad_E(spec, fd_gradient(g, k));
  });
  std::ptrdiff_t stride[2] = {1, static_cast<std::ptrdiff_t>(g.shape()[0])};
  const auto& nodes = domain.interior();
  std::vector<double> lhs_terms(nodes.size()), rhs_terms(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) {
    const std::size_t flat = domain.lattice_index(k, u.margin);
    double div = 0.0;
    for (int a = 0; a < n; ++a) {
      const auto up = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(flat) + stride[a]);
      const auto dn = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(flat) - stride[a]);
      if (flux[up].size() == 0 || flux[dn].size() == 0) {
        throw DomainError("energy identity needs a two-node margin around the domain");
      }
      div += (flux[up][a] - flux[dn][a]) / (2.0 * g.grid().spacing[a]);
    }
    const double w = nodes[k].weight;
    lhs_terms[k] = -w * g[flat] * div;
    const double e = eval_norm(spec, fd_gradient(g, flat));
    rhs_terms[k] = w * e * e;  // 2 E = H^2
  });
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    lhs += lhs_terms[k];
    rhs += rhs_terms[k];
  }
  return make_check("energy_identity", lhs, rhs, Relation::Equal, tol,
                    "-int u Delta_H u against 2 int E(grad u), central differences on h=" +
                        std::to_string(domain.grid_h()));
}

bool is_wulff_shape(const DiscreteDomain& domain, const NormSpec& spec, double rel_tol) {
  if (spec.dimension() != 2 || domain.boundary().empty()) return false;
  const Vec2 c = domain_center(domain);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, mean = 0.0;
  for (const auto& b : domain.boundary()) {
    const double r = dual_norm(spec, as_vec(b.point - c));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    mean += r;
  }
  mean /= static_cast<double>(domain.boundary().size());
  return (hi - lo) <= rel_tol * mean;
}

std::vector<CheckReport> check_chain_equalities(const NormSpec& spec, const DiscreteDomain& domain,
                                                const PotentialModel& model, double tol) {
  if (!is_wulff_shape(domain, spec)) {
    throw PreconditionError("the equality chain is only claimed on Wulff-shaped domains");
  }
  const double n = spec.dimension();
  const double int_u = domain.integrate(model.u);
  const double int_e0 = polar_integrate(
      spec, [&](const Vec2& y) { return dual_energy(spec, as_vec(y)); }, 1.0, Vec2::Zero(), kChainAngles);
  const double int_e_grad = domain.integrate([&](const Vec2& x) { return energy(spec, as_vec(model.grad(x))); });
  const double int_conj = polar_integrate(
      spec, [&](const Vec2& y) { return model.conjugate(as_vec2(grad_E0(spec, as_vec(y)))); }, 1.0, Vec2::Zero(),
      kChainAngles);
  const double int_conj_grad = polar_integrate(
      spec,
      [&](const Vec2& y) {
        const Vec2 xi = as_vec2(grad_E0(spec, as_vec(y)));
        return model.conjugate_grad(xi).dot(xi);
      },
      1.0, Vec2::Zero(), kChainAngles);
  const double area = wulff_area(spec);
  return {
      make_check("chain_a", 2.0 * int_e0, -n * int_u, Relation::Equal, tol, "2 int E0 = -n int u"),
      make_check("chain_b", int_e0, int_e_grad, Relation::Equal, tol, "int E0 = int E(grad u)"),
      make_check("chain_c", int_conj, -(n + 1.0) * int_u, Relation::Equal, tol, "int u~(grad E0) = -(n+1) int u"),
      make_check("chain_d", int_conj_grad, 0.5 * n * (area - 2.0 * int_e0), Relation::Equal, tol,
                 "int grad u~(grad E0).grad E0 = (n/2)(|B_H0| - 2 int E0)"),
  };
}

std::vector<AdmissibleNode> admissible_nodes(const DiscreteDomain& domain, const SampledPotential& u,
                                             const ResidualOptions& opts) {
  const double min_grad = opts.min_grad >= 0.0 ? opts.min_grad : domain.grid_h();
  std::vector<AdmissibleNode> all(domain.interior().size());
  std::vector<std::uint8_t> keep(all.size(), 0);
  parallel_for(all.size(), [&](std::size_t k) {
    const std::size_t flat = domain.lattice_index(k, u.margin);
    if (!has_stencil(u.grid, flat)) return;
    Vec grad = fd_gradient(u.grid, flat);
    if (!admissible_gradient(grad, min_grad, opts)) return;
    all[k] = AdmissibleNode{k, flat, std::move(grad), fd_hessian(u.grid, flat)};
    keep[k] = 1;
  });
  std::vector<AdmissibleNode> out;
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (keep[k]) out.push_back(std::move(all[k]));
  }
  return out;
}

std::vector<CheckReport> check_equality_condition(const NormSpec& spec, const DiscreteDomain& domain,
                                                  const SampledPotential& u, double tol, double fit_tol,
                                                  const ResidualOptions& opts) {
  const auto nodes = admissible_nodes(domain, u, opts);
  if (nodes.empty()) throw PreconditionError("no admissible nodes for the equality condition");
  const int n = spec.dimension();
  std::vector<double> dev(nodes.size());
  std::vector<Vec2> flux(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) {
    const Mat m = hessian_E(spec, nodes[k].grad) * nodes[k].hess;
    dev[k] = (m - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
    flux[k] = as_vec2(grad_E(spec, nodes[k].grad));
  });
  const double sup = *std::max_element(dev.begin(), dev.end());

  // grad_E(grad u(x)) = x - xbar: xbar is the weighted mean of x - flux.
  const auto& interior = domain.interior();
  Vec2 xbar = Vec2::Zero();
  double wsum = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Vec xl = u.grid.node(nodes[k].flat);
    const double w = interior[nodes[k].quad].weight;
    xbar += w * (Vec2(xl[0], xl[1]) - flux[k]);
    wsum += w;
  }
  xbar /= wsum;
  double sq = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Vec xl = u.grid.node(nodes[k].flat);
    sq += interior[nodes[k].quad].weight * (flux[k] - (Vec2(xl[0], xl[1]) - xbar)).squaredNorm();
  }
  const double rms = std::sqrt(sq / wsum);
  const std::string where = std::to_string(nodes.size()) + " admissible nodes, h=" + std::to_string(domain.grid_h());
  return {
      make_check("equality_condition", sup, 0.0, Relation::Leq, tol, "sup |hess_E(grad u) hess u - I|, " + where),
      make_check("affine_structure", rms, 0.0, Relation::Leq, fit_tol,
                 "RMS of grad_E(grad u) - (x - xbar), xbar=(" + std::to_string(xbar.x()) + "," +
                     std::to_string(xbar.y()) + ")"),
  };
}

std::vector<CheckReport> check_newton_pointwise(const NormSpec& spec, const DiscreteDomain& domain,
                                                const SampledPotential& u, bool expect_equality, double min_fraction,
                                                double equality_tol, const ResidualOptions& opts) {
  const auto nodes = admissible_nodes(domain, u, opts);
  if (nodes.empty()) throw PreconditionError("no admissible nodes for the Newton check");
  const int n = spec.dimension();
  std::vector<std::uint8_t> ok(nodes.size(), 0);
  std::vector<double> tr_dev(nodes.size(), 0.0), det_dev(nodes.size(), 0.0);
  parallel_for(nodes.size(), [&](std::size_t k) {
    const Mat a = hessian_E(spec, nodes[k].grad);
    const Mat& b = nodes[k].hess;
    try {
      const NewtonCheck c = newton_inequality(a, b);
      ok[k] = c.lhs <= c.rhs + 1e-12 * (1.0 + std::abs(c.rhs));
      tr_dev[k] = std::abs(c.rhs - 1.0);
      det_dev[k] = std::abs(c.lhs - 1.0);
    } catch (const InvalidInput&) {
      // A non-convex finite-difference Hessian breaks the hypothesis; the
      // trace can then fall below the determinant term.
      const Mat m = a * b;
      ok[k] = m.trace() / n >= std::pow(std::max(0.0, m.determinant()), 1.0 / n);
      tr_dev[k] = std::abs(m.trace() / n - 1.0);
      det_dev[k] = std::abs(std::pow(std::max(0.0, m.determinant()), 1.0 / n) - 1.0);
    }
  });
  double good = 0.0;
  for (auto v : ok) good += v;
  const double fraction = good / static_cast<double>(nodes.size());
  std::vector<CheckReport> out{make_check("newton_pointwise", fraction, min_fraction, Relation::Geq, 0.0,
                                          std::to_string(nodes.size()) + " admissible nodes")};
  if (expect_equality) {
    out.push_back(make_check("newton_trace_equals_n", *std::max_element(tr_dev.begin(), tr_dev.end()), 0.0,
                             Relation::Leq, equality_tol, "max |tr M / n - 1|"));
    out.push_back(make_check("newton_det_equals_1", *std::max_element(det_dev.begin(), det_dev.end()), 0.0,
                             Relation::Leq, equality_tol, "max |det(M)^(1/n) - 1|"));
  }
  return out;
}

BoundaryStats boundary_stats(const TransportSolution& sol, const DiscreteDomain& domain, const NormSpec& spec) {
  BoundaryStats s;
  const auto& bnodes = domain.boundary();
  std::vector<double> ub(bnodes.size()), hb(bnodes.size());
  parallel_for(bnodes.size(), [&](std::size_t k) {
    ub[k] = sol.potential(bnodes[k].point);
    hb[k] = eval_norm(spec, as_vec(sol.map(bnodes[k].point)));
  });
  double mean = 0.0, wsum = 0.0;
  for (std::size_t k = 0; k < bnodes.size(); ++k) {
    mean += bnodes[k].weight * ub[k];
    wsum += bnodes[k].weight;
  }
  mean /= wsum;
  std::vector<double> ui(domain.interior().size());
  parallel_for(ui.size(), [&](std::size_t k) { ui[k] = sol.potential(domain.interior()[k].point) - mean; });
  for (double v : ui) s.sup_u = std::max(s.sup_u, std::abs(v));
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  double hmean = 0.0;
  s.h_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < bnodes.size(); ++k) {
    const double v = ub[k] - mean;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    hmean += hb[k];
    s.h_min = std::min(s.h_min, hb[k]);
    s.trace.push_back({bnodes[k].arc, v, hb[k]});
  }
  hmean /= static_cast<double>(bnodes.size());
  double var = 0.0;
  for (double h : hb) var += (h - hmean) * (h - hmean);
  s.h_rel_std = std::sqrt(var / static_cast<double>(hb.size())) / hmean;
  s.osc = (hi - lo) / s.sup_u;
  return s;
}

DiscreteDomain build_compatible_domain(const NormSpec& spec, const DomainDescriptor& descriptor, int source_nodes,
                                       int boundary_nodes) {
  if (source_nodes < 1) throw InvalidInput("source_nodes must be positive");
  const double area = wulff_area(spec);
  // A coarse build is enough to learn the exact area and centroid.
  const DiscreteDomain probe = build_domain(descriptor, 0.25 * std::sqrt(area), 64);
  const DomainDescriptor scaled = scale_descriptor(probe, area);
  return build_domain(scaled, std::sqrt(area / source_nodes), boundary_nodes);
}

namespace {

struct SolvedDomain {
  DiscreteDomain domain;
  TransportSolution solution;
};

SolvedDomain solve_on(const NormSpec& spec, const DomainDescriptor& descriptor, const CloudMeasure& target,
                      const ExperimentOptions& opts) {
  DiscreteDomain domain = build_compatible_domain(spec, descriptor, opts.source_nodes, opts.boundary_nodes);
  TransportSolution sol = solve_transport(source_cloud(domain), target, opts.solver);
  return {std::move(domain), std::move(sol)};
}

}  // namespace

OverdeterminedResult overdetermined_experiment(const NormSpec& spec, const DomainDescriptor& descriptor,
                                               const ExperimentOptions& opts) {
  const CloudMeasure target = discretize_target(spec, opts.target_nodes);
  OverdeterminedResult r;
  const SolvedDomain run = solve_on(spec, descriptor, target, opts);
  r.wulff = is_wulff_shape(run.domain, spec);
  r.domain = boundary_stats(run.solution, run.domain, spec);
  if (r.wulff) {
    r.baseline = r.domain;
  } else {
    const SolvedDomain base = solve_on(spec, WulffBall{spec, 1.0, Vec2::Zero()}, target, opts);
    r.baseline = boundary_stats(base.solution, base.domain, spec);
  }
  r.ratio = r.domain.osc / std::max(r.baseline.osc, std::numeric_limits<double>::min());
  const std::string res = "source_nodes=" + std::to_string(run.domain.interior().size()) +
                          " eps=" + std::to_string(run.solution.epsilon());
  if (r.wulff) {
    r.reports.push_back(make_check("boundary_oscillation", r.domain.osc, 0.0, Relation::Leq, opts.wulff_osc_tol,
                                   "Wulff domain, " + res));
  } else {
    r.reports.push_back(make_check("oscillation_ratio", r.ratio, opts.min_ratio, Relation::Geq, 0.0,
                                   "osc=" + std::to_string(r.domain.osc) +
                                       " baseline_osc=" + std::to_string(r.baseline.osc) + ", " + res));
  }
  return r;
}

std::vector<CheckReport> solver_wulff_checks(const TransportSolution& sol, const DiscreteDomain& domain,
                                             const NormSpec& spec) {
  const Vec2 c = domain_center(domain);
  const auto& nodes = domain.interior();
  std::vector<double> err(nodes.size()), hmap(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) {
    const Vec2 y = sol.map(nodes[k].point);
    err[k] = (y - as_vec2(grad_E0(spec, as_vec(nodes[k].point - c)))).norm();
    hmap[k] = eval_norm(spec, as_vec(y));
  });
  double mean_err = 0.0;
  for (double e : err) mean_err += e;
  mean_err /= static_cast<double>(err.size());
  const double diam = domain.diameter();
  const BoundaryStats b = boundary_stats(sol, domain, spec);
  return {
      make_check("map_vs_radial_gradient", mean_err / diam, 0.0, Relation::Leq, 0.03,
                 "mean |map - grad E0| / diam(B_H0)"),
      make_check("boundary_h_rel_std", b.h_rel_std, 0.0, Relation::Leq, 0.05, "relative std of H(map) on the boundary"),
      make_check("boundary_oscillation", b.osc, 0.0, Relation::Leq, 0.05, "osc of u on the boundary / sup |u|"),
      make_check("second_boundary_condition", *std::max_element(hmap.begin(), hmap.end()), 1.05, Relation::Leq, 0.0,
                 "max H(map) over source nodes"),
      make_check("boundary_maps_to_boundary", b.h_min, 0.85, Relation::Geq, 0.0, "min H(map) over boundary nodes"),
      make_check("marginal_error", sol.marginal_err(), 0.0, Relation::Leq, 1e-6, "L1 marginal violation"),
  };
}

std::vector<CheckReport> check_norm_identities(const NormSpec& spec, int count, std::uint64_t seed) {
  if (count < 1) throw InvalidInput("need at least one sample point");
  const int n = spec.dimension();
  const bool fourier = spec.family() == NormFamily::Fourier2D;
  const double tol = fourier ? 1e-5 : 1e-6;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> scale(-1.0, 1.0);
  // Generic points: every component bounded away from zero, since the p-norm
  // family is not twice differentiable on coordinate hyperplanes.
  auto draw = [&] {
    Vec v(n);
    for (;;) {
      for (int i = 0; i < n; ++i) v[i] = normal(rng);
      if (v.cwiseAbs().minCoeff() >= 0.05 * v.norm()) break;
    }
    return Vec(v * std::exp(scale(rng)));
  };

  double eq2 = 0, eq4 = 0, euler2 = 0, comp = 0, inverse = 0, bidual = 0, homog = 0, euler = 0, hess = 0;
  for (int s = 0; s < count; ++s) {
    const Vec xi = draw();
    const Vec x = draw();
    const double h = eval_norm(spec, xi);
    const Vec gh = grad_norm(spec, xi);
    const Vec ge = grad_E(spec, xi);
    eq2 = std::max(eq2, std::abs(dual_norm(spec, gh) - 1.0));
    eq4 = std::max(eq4, std::abs(eval_norm(spec, grad_dual_norm(spec, x)) - 1.0));
    euler2 = std::max(euler2, std::abs(xi.dot(ge) - h * h) / (h * h));
    comp = std::max(comp, std::abs(dual_energy(spec, ge) - 0.5 * h * h) / (0.5 * h * h));
    inverse = std::max(inverse, (grad_E(spec, grad_E0(spec, x)) - x).norm() / x.norm());
    inverse = std::max(inverse, (grad_E0(spec, ge) - xi).norm() / xi.norm());
    const Vec d = xi.normalized();
    const double bi = maximize_ratio([&](const Vec& z) { return dual_norm(spec, z); }, d).value;
    bidual = std::max(bidual, std::abs(bi - eval_norm(spec, d)) / eval_norm(spec, d));
    double t = std::exp(1.5 * scale(rng));
    if (spec.is_symmetric() && s % 2 == 1) t = -t;
    homog = std::max(homog, std::abs(eval_norm(spec, t * xi) - std::abs(t) * h) / h);
    euler = std::max(euler, std::abs(xi.dot(gh) - h) / h);
    const Mat base = hessian_E(spec, xi);
    for (double f : {0.5, 2.0, -3.0}) {
      if (f < 0.0 && !spec.is_symmetric()) continue;
      hess = std::max(hess, (hessian_E(spec, f * xi) - base).cwiseAbs().maxCoeff());
    }
  }
  const std::string family = to_string(spec.family());
  auto rec = [&](const std::string& name, double err, double t, const std::string& what) {
    return make_check(name, err, 0.0, Relation::Leq, t, family + ": " + what + " over " + std::to_string(count) + " points");
  };
  return {
      rec("dual_of_grad_norm", eq2, tol, "max |H0(grad H) - 1|"),
      rec("norm_of_grad_dual", eq4, tol, "max |H(grad H0) - 1|"),
      rec("euler_degree_two", euler2, tol, "max rel |xi.grad E - 2E|"),
      rec("composition", comp, tol, "max rel |E0(grad E) - E|"),
      rec("inverse_maps", inverse, tol, "max rel roundtrip error of grad E and grad E0"),
      rec("bidual", bidual, tol, "max rel |dual of H0 - H|"),
      rec("homogeneity", homog, 1e-12, "max |H(t xi) - |t| H(xi)| / H(xi)"),
      rec("euler", euler, 1e-8, "max rel |xi.grad H - H|"),
      rec("hessian_homogeneity", hess, 1e-8, "max entry change of hess E under scaling"),
  };
}

}  // namespace wulff
