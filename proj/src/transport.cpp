#include "wulff/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wulff/errors.hpp"
#include "wulff/finite_difference.hpp"
#include "wulff/parallel.hpp"

namespace wulff {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEpsStart = 0.5;
constexpr double kEpsFactor = 0.7;
constexpr double kStageTol = 1e-3;
constexpr int kStageSweeps = 500;
constexpr double kAbsorbLog = 40.0;
constexpr double kCompatibilityTol = 1e-3;

Vec as_vec(const Vec2& v) {
  Vec out(2);
  out << v.x(), v.y();
  return out;
}

Vec2 direction(double phi) { return {std::cos(phi), std::sin(phi)}; }

// log sum_k exp(s_k) together with the softmax-weighted mean of pts.
struct SoftMax {
  double lse = -std::numeric_limits<double>::infinity();
  Vec2 mean = Vec2::Zero();
};

SoftMax soft_max(const std::vector<Vec2>& pts, const std::vector<double>& shift, const Vec2& x, double eps) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pts.size(); ++k) m = std::max(m, (shift[k] + x.dot(pts[k])) / eps);
  SoftMax out;
  if (!std::isfinite(m)) return out;
  double s = 0.0;
  Vec2 acc = Vec2::Zero();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double w = std::exp((shift[k] + x.dot(pts[k])) / eps - m);
    s += w;
    acc += w * pts[k];
  }
  out.lse = m + std::log(s);
  out.mean = acc / s;
  return out;
}

std::vector<double> shifted(const CloudMeasure& c, const std::vector<double>& pot, double eps) {
  std::vector<double> shift(c.points.size());
  for (std::size_t k = 0; k < shift.size(); ++k) {
    shift[k] = c.masses[k] > 0.0 ? pot[k] - 0.5 * c.points[k].squaredNorm() + eps * std::log(c.masses[k])
                                 : -std::numeric_limits<double>::infinity();
  }
  return shift;
}

// Splits [0, n) into one contiguous block per worker.
template <typename F>
void for_blocks(Eigen::Index n, F&& f) {
  const auto workers = static_cast<Eigen::Index>(std::max(1, thread_count()));
  const Eigen::Index blocks = std::min(workers, std::max<Eigen::Index>(n, 1));
  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t b) {
    const Eigen::Index lo = n * static_cast<Eigen::Index>(b) / blocks;
    const Eigen::Index hi = n * (static_cast<Eigen::Index>(b) + 1) / blocks;
    if (hi > lo) f(lo, hi - lo);
  });
}

double max_pairwise_distance(const std::vector<Vec2>& pts) {
  double best = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) best = std::max(best, (pts[a] - pts[b]).squaredNorm());
  }
  return std::sqrt(best);
}

}  // namespace

CloudMeasure make_cloud(std::vector<Vec2> points, std::vector<double> masses) {
  if (points.size() != masses.size()) throw InvalidInput("cloud points and masses differ in length");
  if (points.empty()) throw InvalidInput("empty cloud");
  CloudMeasure c;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!points[k].allFinite()) throw InvalidInput("non-finite cloud point");
    if (!(masses[k] >= 0.0) || !std::isfinite(masses[k])) throw InvalidInput("cloud masses must be finite and >= 0");
    c.total += masses[k];
  }
  if (!(c.total > 0.0)) throw InvalidInput("cloud has zero total mass");
  c.points = std::move(points);
  c.masses = std::move(masses);
  return c;
}

CloudMeasure source_cloud(const DiscreteDomain& domain) {
  std::vector<Vec2> pts;
  std::vector<double> w;
  for (const auto& node : domain.interior()) {
    pts.push_back(node.point);
    w.push_back(node.weight);
  }
  return make_cloud(std::move(pts), std::move(w));
}

double norm_ball_area(const NormSpec& spec) {
  if (spec.dimension() != 2) throw InvalidInput("norm_ball_area is planar only");
  constexpr int kAngles = 4096;
  double sum = 0.0;
  for (int k = 0; k < kAngles; ++k) {
    const double h = eval_norm(spec, as_vec(direction(kTwoPi * k / kAngles)));
    sum += 0.5 / (h * h);
  }
  return sum * kTwoPi / kAngles;
}

CloudMeasure discretize_target(const NormSpec& spec, int m) {
  if (m < 100) throw InvalidInput("discretize_target needs at least 100 nodes");
  if (spec.dimension() != 2) throw InvalidInput("discretize_target is planar only");
  LevelSetRegion region;
  region.level = [spec](const Vec2& xi) { return eval_norm(spec, as_vec(xi)) - 1.0; };
  double gmax = 0.0;
  for (int k = 0; k < 1024; ++k) gmax = std::max(gmax, grad_norm(spec, as_vec(direction(kTwoPi * k / 1024))).norm());
  region.lipschitz = 1.05 * gmax;
  // The support function of B_H along a unit vector e is H0(e).
  region.lo = -Vec2(dual_norm(spec, as_vec(Vec2(-1, 0))), dual_norm(spec, as_vec(Vec2(0, -1))));
  region.hi = Vec2(dual_norm(spec, as_vec(Vec2(1, 0))), dual_norm(spec, as_vec(Vec2(0, 1))));
  region.density = [spec](const Vec2& xi) { return std::max(0.0, phi(spec, as_vec(xi))); };
  const double h = std::sqrt(norm_ball_area(spec) / m);
  const auto nodes = lattice_quadrature(region, h);
  std::vector<Vec2> pts(nodes.size());
  std::vector<double> masses(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) {
    pts[k] = nodes[k].point;
    masses[k] = nodes[k].mass;
  });
  return make_cloud(std::move(pts), std::move(masses));
}

// ---- TransportSolution --------------------------------------------------------

TransportSolution::TransportSolution(CloudMeasure source, CloudMeasure target, std::vector<double> f,
                                     std::vector<double> g, double epsilon, double marginal_err, int sweeps)
    : source_(std::move(source)),
      target_(std::move(target)),
      f_(std::move(f)),
      g_(std::move(g)),
      epsilon_(epsilon),
      marginal_err_(marginal_err),
      sweeps_(sweeps) {
  if (f_.size() != source_.points.size() || g_.size() != target_.points.size()) {
    throw InvalidInput("potential sizes do not match the clouds");
  }
  if (!(epsilon_ > 0.0)) throw InvalidInput("entropic level must be positive");
  target_shift_ = shifted(target_, g_, epsilon_);
  source_shift_ = shifted(source_, f_, epsilon_);
}

Vec2 TransportSolution::map(const Vec2& x) const {
  return soft_max(target_.points, target_shift_, x, epsilon_).mean;
}

double TransportSolution::potential(const Vec2& x) const {
  return epsilon_ * soft_max(target_.points, target_shift_, x, epsilon_).lse;
}

double TransportSolution::conjugate(const Vec2& xi) const {
  return epsilon_ * soft_max(source_.points, source_shift_, xi, epsilon_).lse;
}

Vec2 TransportSolution::inverse_map(const Vec2& xi) const {
  return soft_max(source_.points, source_shift_, xi, epsilon_).mean;
}

std::vector<Vec2> TransportSolution::source_map() const {
  std::vector<Vec2> out(source_.points.size());
  parallel_for(out.size(), [&](std::size_t i) { out[i] = map(source_.points[i]); });
  return out;
}

// ---- solver ---------------------------------------------------------------------

TransportSolution solve_transport(const CloudMeasure& source, const CloudMeasure& target_in,
                                  const SolverOptions& opts) {
  if (!(opts.marginal_tol > 0.0)) throw InvalidInput("marginal tolerance must be positive");
  if (opts.max_sweeps < 1) throw InvalidInput("max_sweeps must be positive");
  const double gap = std::abs(source.total - target_in.total) / target_in.total;
  if (gap > kCompatibilityTol) {
    throw CompatibilityError("source mass " + std::to_string(source.total) + " and target mass " +
                             std::to_string(target_in.total) + " differ beyond the compatibility tolerance");
  }
  CloudMeasure target = target_in;
  for (double& m : target.masses) m *= source.total / target_in.total;
  target.total = source.total;

  const auto n = static_cast<Eigen::Index>(source.points.size());
  const auto m = static_cast<Eigen::Index>(target.points.size());
  const double diam = max_pairwise_distance(target.points);
  const double eps_final = opts.eps_final > 0.0 ? opts.eps_final : 1e-3 * diam * diam;

  // Normalized marginals keep the scalings O(1) independently of the total.
  Vec a(n), b(m);
  for (Eigen::Index i = 0; i < n; ++i) a[i] = source.masses[static_cast<std::size_t>(i)] / source.total;
  for (Eigen::Index j = 0; j < m; ++j) b[j] = target.masses[static_cast<std::size_t>(j)] / target.total;
  Mat cost(n, m);
  for_blocks(m, [&](Eigen::Index c0, Eigen::Index len) {
    for (Eigen::Index j = c0; j < c0 + len; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        cost(i, j) = 0.5 * (source.points[static_cast<std::size_t>(i)] - target.points[static_cast<std::size_t>(j)])
                               .squaredNorm();
      }
    }
  });

  Vec f = Vec::Zero(n), g = Vec::Zero(m);
  Vec u = Vec::Ones(n), v = Vec::Ones(m);
  Mat kernel(n, m);
  Vec kv(n), ktu(m);

  auto build_kernel = [&](double eps) {
    for_blocks(m, [&](Eigen::Index c0, Eigen::Index len) {
      kernel.middleCols(c0, len) =
          ((f.replicate(1, len) + g.segment(c0, len).transpose().replicate(n, 1) - cost.middleCols(c0, len)) / eps)
              .array()
              .exp()
              .matrix();
    });
  };
  // Exact soft c-transform of g in the log domain, so every kernel row is
  // normalized against b whatever the previous level was.
  Vec log_b(m);
  for (Eigen::Index j = 0; j < m; ++j) log_b[j] = b[j] > 0.0 ? std::log(b[j]) : 0.0;
  auto refresh_f = [&](double eps) {
    for_blocks(n, [&](Eigen::Index r0, Eigen::Index len) {
      for (Eigen::Index i = r0; i < r0 + len; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < m; ++j) {
          if (b[j] > 0.0) mx = std::max(mx, (g[j] - cost(i, j)) / eps + log_b[j]);
        }
        double s = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
          if (b[j] > 0.0) s += std::exp((g[j] - cost(i, j)) / eps + log_b[j] - mx);
        }
        f[i] = -eps * (mx + std::log(s));
      }
    });
  };
  auto apply_k = [&](const Vec& w, Vec& out) {
    for_blocks(n, [&](Eigen::Index r0, Eigen::Index len) {
      out.segment(r0, len).noalias() = kernel.middleRows(r0, len) * w;
    });
  };
  auto apply_kt = [&](const Vec& w, Vec& out) {
    for_blocks(m, [&](Eigen::Index c0, Eigen::Index len) {
      out.segment(c0, len).noalias() = kernel.middleCols(c0, len).transpose() * w;
    });
  };
  auto absorb = [&](double eps) {
    f.array() += eps * u.array().log();
    g.array() += eps * v.array().log();
    u.setOnes();
    v.setOnes();
  };

  double eps = std::max(kEpsStart * diam * diam, eps_final);
  int sweeps = 0;
  double err = std::numeric_limits<double>::infinity();
  for (;;) {
    const bool last = eps <= eps_final;
    const double tol = last ? opts.marginal_tol : std::max(kStageTol, opts.marginal_tol);
    const int cap = last ? opts.max_sweeps - sweeps : std::min(kStageSweeps, opts.max_sweeps - sweeps);
    refresh_f(eps);
    build_kernel(eps);
    u.setOnes();
    v.setOnes();
    int stage_sweeps = 0;
    // Each sweep refreshes v (exact column marginal) and then measures the
    // row marginal, so err is the full violation of the current plan.
    for (;;) {
      apply_kt(a.cwiseProduct(u), ktu);
      v = ktu.cwiseInverse();
      apply_k(b.cwiseProduct(v), kv);
      err = (a.array() * (u.array() * kv.array() - 1.0).abs()).sum();
      ++sweeps;
      ++stage_sweeps;
      if (!std::isfinite(err)) throw SolverFailure("entropic transport produced non-finite scalings", err, sweeps);
      if (err <= tol || stage_sweeps >= cap) break;
      u = kv.cwiseInverse();
      const double lu = u.array().log().abs().maxCoeff();
      const double lv = v.array().log().abs().maxCoeff();
      if (lu > kAbsorbLog || lv > kAbsorbLog) {
        absorb(eps);
        build_kernel(eps);
      }
    }
    absorb(eps);
    if (last) break;
    if (sweeps >= opts.max_sweeps) break;
    eps = std::max(eps * kEpsFactor, eps_final);
  }
  if (err > opts.marginal_tol || eps > eps_final) {
    throw SolverFailure("entropic transport did not reach the marginal tolerance", err, sweeps);
  }
  // The column marginal was exact at the last v update; recompute it from
  // the absorbed potentials to report roundoff honestly.
  build_kernel(eps);
  apply_kt(a, ktu);
  const double col_err = (b.array() * (ktu.array() - 1.0).abs()).sum();

  // Potentials of the plan a_i b_j exp((f_i + g_j - C_ij) / eps) for the
  // unnormalized marginals: the mass factor enters f as eps log(total).
  std::vector<double> fs(static_cast<std::size_t>(n)), gs(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < n; ++i) fs[static_cast<std::size_t>(i)] = f[i];
  for (Eigen::Index j = 0; j < m; ++j) gs[static_cast<std::size_t>(j)] = g[j] - eps * std::log(target.total);
  return TransportSolution(source, target, std::move(fs), std::move(gs), eps, std::max(err, col_err), sweeps);
}

TransportSolution solve_transport(const DiscreteDomain& domain, const NormSpec& spec, const SolverOptions& opts) {
  return solve_transport(source_cloud(domain), discretize_target(spec, opts.target_nodes), opts);
}

// ---- radial solution and residuals ------------------------------------------------

RadialValue radial_solution(const NormSpec& spec, const Vec& x) {
  return {dual_energy(spec, x) - 0.5, grad_E0(spec, x)};
}

bool admissible_gradient(const Vec& grad, double min_grad, const ResidualOptions& opts) {
  if (grad.norm() < min_grad) return false;
  return opts.axis_band <= 0.0 || grad.cwiseAbs().minCoeff() >= opts.axis_band;
}

GridFunction ma_residual(const NormSpec& spec, const GridFunction& u, const ResidualOptions& opts) {
  if (u.dimension() != spec.dimension()) throw InvalidInput("grid dimension differs from the norm dimension");
  for (int s : u.shape()) {
    if (s < 9) throw InvalidInput("grid too coarse for Monge-Ampere residuals (need >= 9 nodes per axis)");
  }
  const double min_grad = opts.min_grad >= 0.0 ? opts.min_grad : u.grid().spacing.maxCoeff();
  GridFunction out(u.grid());
  parallel_for(u.size(), [&](std::size_t k) {
    out.mask()[k] = 0;
    out[k] = 0.0;
    if (!u.masked(k) || !has_stencil(u, k)) return;
    const Vec grad = fd_gradient(u, k);
    if (!admissible_gradient(grad, min_grad, opts)) return;
    out[k] = phi(spec, grad) * fd_hessian(u, k).determinant() - 1.0;
    out.mask()[k] = 1;
  });
  return out;
}

double sup_abs(const GridFunction& g) {
  double m = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.masked(k)) m = std::max(m, std::abs(g[k]));
  }
  return m;
}

// ---- weak-form batteries --------------------------------------------------------------

std::vector<TestFunction> weak_form_battery() {
  auto gaussian = [](Vec2 c, double sigma) {
    return [c, sigma](const Vec2& p) { return std::exp(-(p - c).squaredNorm() / (2.0 * sigma * sigma)); };
  };
  return {
      {"one", [](const Vec2&) { return 1.0; }},
      {"x", [](const Vec2& p) { return p.x(); }},
      {"y", [](const Vec2& p) { return p.y(); }},
      {"xx", [](const Vec2& p) { return p.x() * p.x(); }},
      {"xy", [](const Vec2& p) { return p.x() * p.y(); }},
      {"yy", [](const Vec2& p) { return p.y() * p.y(); }},
      {"xxx", [](const Vec2& p) { return p.x() * p.x() * p.x(); }},
      {"xxy", [](const Vec2& p) { return p.x() * p.x() * p.y(); }},
      {"xyy", [](const Vec2& p) { return p.x() * p.y() * p.y(); }},
      {"yyy", [](const Vec2& p) { return p.y() * p.y() * p.y(); }},
      {"gauss_a", gaussian(Vec2(0.3, 0.2), 0.25)},
      {"gauss_b", gaussian(Vec2(-0.2, 0.4), 0.4)},
  };
}

std::vector<CheckReport> brenier_weak_check(const std::function<Vec2(const Vec2&)>& map,
                                            const DiscreteDomain& domain, const CloudMeasure& target,
                                            const std::vector<TestFunction>& tests, double tol,
                                            const std::string& prefix) {
  std::vector<Vec2> images(domain.interior().size());
  parallel_for(images.size(), [&](std::size_t k) { images[k] = map(domain.interior()[k].point); });
  std::vector<CheckReport> out;
  for (const auto& t : tests) {
    double lhs = 0.0, scale = 0.0, rhs = 0.0;
    for (std::size_t j = 0; j < target.points.size(); ++j) {
      const double v = t.f(target.points[j]);
      lhs += target.masses[j] * v;
      scale += target.masses[j] * std::abs(v);
    }
    for (std::size_t k = 0; k < images.size(); ++k) rhs += domain.interior()[k].weight * t.f(images[k]);
    out.push_back(make_scaled_check(prefix + "." + t.name, lhs, rhs, std::max(std::abs(lhs), scale), tol,
                                    "target-side integral of h*Phi against source-side integral of h(map)"));
  }
  return out;
}

std::vector<CheckReport> change_of_variables_check(const std::function<Vec2(const Vec2&)>& map,
                                                   const DiscreteDomain& domain, const NormSpec& spec,
                                                   const std::vector<TestFunction>& tests, double tol,
                                                   const std::string& prefix) {
  std::vector<Vec2> images(domain.interior().size());
  parallel_for(images.size(), [&](std::size_t k) {
    const Vec ge = grad_E(spec, as_vec(map(domain.interior()[k].point)));
    images[k] = Vec2(ge[0], ge[1]);
  });
  std::vector<CheckReport> out;
  for (const auto& t : tests) {
    const double lhs = polar_integrate(spec, t.f);
    const double scale = polar_integrate(spec, [&](const Vec2& y) { return std::abs(t.f(y)); });
    double rhs = 0.0;
    for (std::size_t k = 0; k < images.size(); ++k) rhs += domain.interior()[k].weight * t.f(images[k]);
    out.push_back(make_scaled_check(prefix + "." + t.name, lhs, rhs, std::max(std::abs(lhs), scale), tol,
                                    "integral over B_H0 against source integral of g(grad_E(map))"));
  }
  return out;
}

std::vector<CheckReport> brenier_weak_check(const TransportSolution& sol, const DiscreteDomain& domain,
                                            const NormSpec& spec, const std::vector<TestFunction>& tests,
                                            double tol) {
  auto map = [&](const Vec2& x) { return sol.map(x); };
  auto out = brenier_weak_check(map, domain, sol.target(), tests, tol);
  auto more = change_of_variables_check(map, domain, spec, tests, tol);
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

}  // namespace wulff
