// Acceptance run: one PASS/FAIL line per criterion, with indented detail
// lines underneath. Reference values are closed forms or the oracles in
// tests/support, never the quantity under test read back from the library.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wulff/convex_calculus.hpp"
#include "wulff/geometry.hpp"
#include "wulff/norms.hpp"
#include "wulff/transport.hpp"
#include "wulff/verifier.hpp"

using namespace wulff;
using oracle::v2;

namespace {

constexpr double kPi = std::numbers::pi;

class Criterion {
 public:
  explicit Criterion(std::string title) : title_(std::move(title)), start_(std::chrono::steady_clock::now()) {}

  // Records one measured quantity; `ok` is decided by the caller.
  void expect(bool ok, const std::string& what) {
    ok_ = ok_ && ok;
    std::printf("    %s %s\n", ok ? "ok  " : "FAIL", what.c_str());
  }

  void near(const std::string& what, double value, double reference, double rel_tol) {
    const double rel = std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: %.10g vs %.10g (rel %.2e, tol %.1e)", what.c_str(), value, reference, rel, rel_tol);
    expect(rel <= rel_tol, buf);
  }

  void at_most(const std::string& what, double value, double limit) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: %.4e <= %.4e", what.c_str(), value, limit);
    expect(value <= limit, buf);
  }

  void at_least(const std::string& what, double value, double limit) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: %.4e >= %.4e", what.c_str(), value, limit);
    expect(value >= limit, buf);
  }

  bool finish() {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::printf("%s %s (%.1f s)\n", ok_ ? "PASS" : "FAIL", title_.c_str(), s);
    std::fflush(stdout);
    return ok_;
  }

 private:
  std::string title_;
  std::chrono::steady_clock::time_point start_;
  bool ok_ = true;
};

Vec as_vec(const Vec2& x) { return v2(x.x(), x.y()); }

Mat diag41() {
  Mat a(2, 2);
  a << 4, 0, 0, 1;
  return a;
}

const std::vector<oracle::Harmonic> kHarmonics{{3, 0.05, 0.0}};
NormSpec fourier_spec() { return NormSpec::fourier2d({{3, 0.05, 0.0}}); }

// Area of the convex body with support function g: (1/2) int (g^2 - g'^2).
// For g = 1 + a cos k t + b sin k t this is pi (1 + (a^2 + b^2)(1 - k^2) / 2).
double fourier_wulff_area(const std::vector<oracle::Harmonic>& h) {
  double area = kPi;
  for (const auto& c : h) area += kPi * (c.a * c.a + c.b * c.b) * (1.0 - c.k * c.k) / 2.0;
  return area;
}

// Closed-form area of B_{H0} for the families used below.
double closed_wulff_area(const NormSpec& spec) {
  switch (spec.family()) {
    case NormFamily::Euclidean: return kPi;
    case NormFamily::Quadratic: return kPi * std::sqrt(spec.matrix().determinant());
    case NormFamily::Fourier2D: return fourier_wulff_area(kHarmonics);
    default: return std::nan("");
  }
}

// Test-side E0 gradient: closed forms where they exist, finite differences of
// the dual energy otherwise.
Vec oracle_grad_E0(const NormSpec& spec, const Vec& x) {
  switch (spec.family()) {
    case NormFamily::Euclidean: return x;
    case NormFamily::Quadratic: return spec.matrix().inverse() * x;
    case NormFamily::PNorm: {
      const double q = spec.p() / (spec.p() - 1.0);
      const double nq = std::pow(std::pow(std::abs(x[0]), q) + std::pow(std::abs(x[1]), q), 1.0 / q);
      Vec g(2);
      for (int i = 0; i < 2; ++i) g[i] = std::pow(nq, 2.0 - q) * std::copysign(std::pow(std::abs(x[i]), q - 1.0), x[i]);
      return g;
    }
    default: return oracle::fd_gradient([&](const Vec& z) { return dual_energy(spec, z); }, x, 1e-6);
  }
}

// Test-side radial potential u = E0 - 1/2 and its conjugate.
PotentialModel oracle_radial_model(const NormSpec& spec) {
  PotentialModel m;
  if (spec.family() == NormFamily::Fourier2D) {
    m.u = [spec](const Vec2& x) { return dual_energy(spec, as_vec(x)) - 0.5; };
  } else {
    const Mat ainv = spec.family() == NormFamily::Quadratic ? Mat(spec.matrix().inverse()) : Mat(Mat::Identity(2, 2));
    m.u = [ainv](const Vec2& x) { return 0.5 * as_vec(x).dot(ainv * as_vec(x)) - 0.5; };
  }
  m.grad = [spec](const Vec2& x) {
    const Vec g = oracle_grad_E0(spec, as_vec(x));
    return Vec2(g[0], g[1]);
  };
  m.conjugate = [spec](const Vec2& xi) { return energy(spec, as_vec(xi)) + 0.5; };
  m.conjugate_grad = [spec](const Vec2& xi) {
    const Vec g = grad_E(spec, as_vec(xi));
    return Vec2(g[0], g[1]);
  };
  return m;
}

std::vector<Vec> generic_points(int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> scale(-1.0, 1.0);
  std::vector<Vec> pts;
  while (static_cast<int>(pts.size()) < count) {
    Vec v = v2(nd(rng), nd(rng));
    if (v.cwiseAbs().minCoeff() < 0.05 * v.norm()) continue;
    pts.push_back(v * std::exp(scale(rng)));
  }
  return pts;
}

double least_squares_order(const std::vector<double>& h, const std::vector<double>& e) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------

bool criterion1() {
  Criterion c("C1 norm identities (100 points per family)");
  Mat a(2, 2);
  a << 3, 1, 1, 2;
  const std::vector<NormSpec> families{NormSpec::euclidean(), NormSpec::quadratic(diag41()), NormSpec::quadratic(a),
                                       NormSpec::pnorm(3), fourier_spec(),
                                       NormSpec::fourier2d({{4, 0.03, 0.01}, {6, 0.01, 0.0}})};
  for (const auto& s : families) {
    const double tol = s.family() == NormFamily::Fourier2D ? 1e-5 : 1e-6;
    double dual_grad = 0, norm_grad = 0, euler = 0, comp = 0, round = 0, bidual = 0, brute = 0;
    for (const auto& x : generic_points(100, 2024)) {
      const double h = eval_norm(s, x), h0 = dual_norm(s, x);
      dual_grad = std::max(dual_grad, std::abs(dual_norm(s, grad_norm(s, x)) - 1.0));
      norm_grad = std::max(norm_grad, std::abs(eval_norm(s, grad_dual_norm(s, x)) - 1.0));
      euler = std::max(euler, std::abs(x.dot(grad_E(s, x)) - h * h) / (h * h));
      comp = std::max(comp, std::abs(dual_energy(s, grad_E(s, x)) - 0.5 * h * h) / (0.5 * h * h));
      round = std::max(round, (grad_E(s, grad_E0(s, x)) - x).norm() / x.norm());
      // Independent duals: the dual from a dense scan of the norm, and the
      // norm recovered as the scan-dual of the library's dual.
      const double ref0 = oracle::brute_dual([&](const Vec& d) { return eval_norm(s, d); }, x, 20000);
      brute = std::max(brute, std::abs(h0 - ref0) / ref0);
      const double ref = oracle::brute_dual([&](const Vec& d) { return dual_norm(s, d); }, x, 4000);
      bidual = std::max(bidual, std::abs(ref - h) / h);
    }
    const std::string f = to_string(s.family());
    c.at_most(f + " H0(grad H) = 1", dual_grad, tol);
    c.at_most(f + " H(grad H0) = 1", norm_grad, tol);
    c.at_most(f + " xi.grad E = H^2", euler, tol);
    c.at_most(f + " E0(grad E) = E", comp, tol);
    c.at_most(f + " grad E(grad E0(x)) = x", round, tol);
    c.at_most(f + " H0 against scan dual", brute, tol);
    c.at_most(f + " bidual H00 = H", bidual, tol);
    int failed = 0;
    for (const auto& r : check_norm_identities(s, 100, 7)) failed += !r.pass;
    c.expect(failed == 0, f + " library identity suite: " + std::to_string(failed) + " failed");
  }
  return c.finish();
}

bool criterion2() {
  Criterion c("C2 Newton inequality battery");
  std::mt19937 rng(99);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.1, 10.0);
  auto random_spd = [&](int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = nd(rng);
    return Mat(m * m.transpose() + 0.05 * Mat::Identity(n, n));
  };
  auto random_psd = [&](int n) {
    Mat m(n, n - 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n - 1; ++j) m(i, j) = nd(rng);
    return Mat(m * m.transpose());
  };
  int violations = 0, mismatches = 0, spurious_equal = 0;
  for (int s = 0; s < 1000; ++s) {
    const int n = 2 + s % 3;
    const Mat a = random_spd(n);
    const Mat b = (s % 2) ? random_psd(n) : random_spd(n);
    const NewtonCheck r = newton_inequality(a, b);
    if (r.lhs > r.rhs + 1e-12 * std::max(1.0, r.rhs)) ++violations;
    // Oracle: the spectrum of A^(1/2) B A^(1/2) equals that of AB.
    Eigen::SelfAdjointEigenSolver<Mat> ea(a);
    const Mat root = ea.operatorSqrt();
    Eigen::SelfAdjointEigenSolver<Mat> em(root * b * root);
    Vec ev = em.eigenvalues();
    for (auto& e : ev) e = e <= 1e-12 * ev.cwiseAbs().maxCoeff() ? 0.0 : e;
    const double am = ev.mean(), gm = std::pow(ev.prod(), 1.0 / n);
    if (std::abs(r.rhs - am) > 1e-9 * (1 + am) || std::abs(r.lhs - gm) > 1e-9 * (1 + am)) ++mismatches;
    spurious_equal += r.equality;
  }
  c.expect(violations == 0, "violations beyond 1e-12 over 1000 SPD/PSD pairs: " + std::to_string(violations));
  c.expect(mismatches == 0, "disagreements with the eigenvalue oracle: " + std::to_string(mismatches));
  c.expect(spurious_equal == 0, "random pairs flagged equal: " + std::to_string(spurious_equal));

  int equal = 0, lambda_ok = 0, strict = 0;
  for (int s = 0; s < 100; ++s) {
    const int n = 2 + s % 3;
    const Mat a = random_spd(n);
    const double lambda = ud(rng);
    const NewtonCheck eq = newton_inequality(a, lambda * a.inverse());
    equal += eq.equality;
    lambda_ok += std::abs(eq.lambda - lambda) <= 1e-8 * lambda;
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = nd(rng);
    v.normalize();
    const NewtonCheck pert = newton_inequality(a, lambda * a.inverse() + 0.01 * v * v.transpose());
    strict += !pert.equality && pert.lhs < pert.rhs;
  }
  c.expect(equal == 100, "B = lambda A^-1 flagged equal: " + std::to_string(equal) + "/100");
  c.expect(lambda_ok == 100, "recovered lambda: " + std::to_string(lambda_ok) + "/100");
  c.expect(strict == 100, "rank-one perturbations flagged strict: " + std::to_string(strict) + "/100");
  return c.finish();
}

bool criterion3() {
  Criterion c("C3 coarea volume identity");
  for (const auto& s : {NormSpec::euclidean(), NormSpec::quadratic(diag41()), fourier_spec()}) {
    const double area = closed_wulff_area(s);
    const std::string f = to_string(s.family());
    const CheckReport r = wulff_volume_identity(s, 1.0 / 128);
    c.expect(r.pass, f + " library check: " + summary_line(r));
    c.near(f + " grid area", r.lhs, area, 1e-3);
    c.near(f + " polar side", r.rhs, area, 1e-3);
    // 4 int E0 over B_{H0} by the test-side polar rule.
    auto rho = [&](double t) { return 1.0 / dual_norm(s, v2(std::cos(t), std::sin(t))); };
    const double e0 = oracle::polar_integral(rho, [&](double x, double y) { return dual_energy(s, v2(x, y)); });
    c.near(f + " 4 int E0", 4.0 * e0, area, 1e-3);
  }
  return c.finish();
}

double radial_residual(const NormSpec& spec, double h) {
  const DiscreteDomain d = build_domain(WulffBall{spec, 1.0, Vec2::Zero()}, h, 64);
  const SampledPotential sp = sample_potential(d, oracle_radial_model(spec).u);
  ResidualOptions opts;
  opts.min_grad = 0.4;
  return sup_abs(ma_residual(spec, sp.grid, opts));
}

bool criterion4() {
  Criterion c("C4 radial Monge-Ampere residual");
  for (const auto& s : {NormSpec::euclidean(), NormSpec::quadratic(diag41())}) {
    for (double h : {1.0 / 64, 1.0 / 128}) {
      c.at_most(std::string(to_string(s.family())) + " sup residual h=" + std::to_string(h), radial_residual(s, h), 1e-10);
    }
  }
  const std::vector<double> hs{1.0 / 32, 1.0 / 64, 1.0 / 128};
  std::vector<double> err;
  double constant = 0.0;
  for (double h : hs) {
    err.push_back(radial_residual(fourier_spec(), h));
    constant = std::max(constant, err.back() / (h * h));
    std::printf("    info fourier2d h=%.6g sup residual %.4e (err/h^2 = %.3f)\n", h, err.back(), err.back() / (h * h));
  }
  c.at_least("fourier2d measured order (least squares)", least_squares_order(hs, err), 1.8);
  std::printf("    info fourier2d residual <= C h^2 over the study with C = %.3f\n", constant);
  return c.finish();
}

bool criterion5() {
  Criterion c("C5 radial proof chain");
  for (const auto& s : {NormSpec::euclidean(), NormSpec::quadratic(diag41()), fourier_spec()}) {
    const double tol = s.family() == NormFamily::Euclidean ? 1e-3 : 2e-3;
    const double area = closed_wulff_area(s);
    const std::string f = to_string(s.family());
    const DiscreteDomain d = build_domain(WulffBall{s, 1.0, Vec2::Zero()}, 1.0 / 128, 2048);
    const PotentialModel m = oracle_radial_model(s);
    // n = 2: int u = -|B|/4, 2 int E0 = |B|/2, int u~(grad E0) = 3|B|/4.
    c.near(f + " int u", d.integrate(m.u), -area / 4.0, tol);
    const auto chain = check_chain_equalities(s, d, m, tol);
    for (const auto& r : chain) {
      c.expect(r.pass, f + " " + summary_line(r));
      if (r.name == "chain_a") {
        c.near(f + " 2 int E0", r.lhs, area / 2.0, tol);
        c.near(f + " -n int u", r.rhs, area / 2.0, tol);
      } else if (r.name == "chain_c") {
        c.near(f + " int u~(grad E0)", r.lhs, 3.0 * area / 4.0, tol);
        c.near(f + " -(n+1) int u", r.rhs, 3.0 * area / 4.0, tol);
      }
    }
    c.expect(chain.size() == 4, f + " chain equalities reported: " + std::to_string(chain.size()));
    const CheckReport e = check_energy_identity(s, d, sample_potential(d, m.u), tol);
    c.near(f + " -int u Delta_H u", e.lhs, area / 2.0, tol);
    c.near(f + " 2 int E(grad u)", e.rhs, area / 2.0, tol);
  }
  return c.finish();
}

struct Solved {
  NormSpec spec;
  DiscreteDomain domain;
  TransportSolution solution;
};

std::vector<Solved> solve_families() {
  std::vector<Solved> out;
  for (const auto& s : {NormSpec::euclidean(), NormSpec::quadratic(diag41()), NormSpec::pnorm(3), fourier_spec()}) {
    int request = 2000;
    DiscreteDomain d = build_compatible_domain(s, WulffBall{s, 1.0, Vec2::Zero()}, request);
    while (d.interior().size() < 2000) {
      request += 20;
      d = build_compatible_domain(s, WulffBall{s, 1.0, Vec2::Zero()}, request);
    }
    const CloudMeasure target = discretize_target(s, 2000);
    SolverOptions opts;  // eps_final = 1e-3 diam(B_H)^2
    TransportSolution sol = solve_transport(source_cloud(d), target, opts);
    out.push_back({s, std::move(d), std::move(sol)});
  }
  return out;
}

bool criterion6(const std::vector<Solved>& runs) {
  Criterion c("C6 transport solver on B_H0");
  for (const auto& run : runs) {
    const auto& s = run.spec;
    const auto& d = run.domain;
    const auto& sol = run.solution;
    const std::string f = to_string(s.family());
    c.at_least(f + " source nodes", static_cast<double>(d.interior().size()), 2000);

    double err = 0.0;
    for (const auto& node : d.interior()) {
      const Vec g = oracle_grad_E0(s, as_vec(node.point));
      err += (sol.map(node.point) - Vec2(g[0], g[1])).norm();
    }
    err /= static_cast<double>(d.interior().size());
    double diam = 0.0;
    for (const auto& p : d.boundary())
      for (const auto& q : d.boundary()) diam = std::max(diam, (p.point - q.point).norm());
    c.at_most(f + " mean |map - grad E0| / diam", err / diam, 0.03);

    std::vector<double> hb, ub;
    for (const auto& b : d.boundary()) {
      hb.push_back(eval_norm(s, as_vec(sol.map(b.point))));
      ub.push_back(sol.potential(b.point));
    }
    double mean = 0.0, var = 0.0;
    for (double v : hb) mean += v;
    mean /= static_cast<double>(hb.size());
    for (double v : hb) var += (v - mean) * (v - mean);
    c.at_most(f + " H(map) relative std on the boundary", std::sqrt(var / static_cast<double>(hb.size())) / mean, 0.05);

    double ubar = 0.0;
    for (double v : ub) ubar += v;
    ubar /= static_cast<double>(ub.size());
    double sup = 0.0;
    for (const auto& node : d.interior()) sup = std::max(sup, std::abs(sol.potential(node.point) - ubar));
    const auto [lo, hi] = std::minmax_element(ub.begin(), ub.end());
    c.at_most(f + " boundary oscillation / sup |u|", (*hi - *lo) / sup, 0.05);

    int failed = 0;
    for (const auto& r : solver_wulff_checks(sol, d, s)) {
      if (!r.pass) std::printf("      %s\n", summary_line(r).c_str());
      failed += !r.pass;
    }
    c.expect(failed == 0, f + " library solver checks failed: " + std::to_string(failed));
  }
  return c.finish();
}

bool criterion7() {
  Criterion c("C7 converse: square against disk");
  const NormSpec s = NormSpec::euclidean();
  double osc[2], ratio[2];
  for (int level = 0; level < 2; ++level) {
    ExperimentOptions opts;
    opts.source_nodes = opts.target_nodes = 2000 * (level + 1);
    const OverdeterminedResult r = overdetermined_experiment(s, square(1.0), opts);
    c.expect(!r.wulff, "square is not Wulff-shaped at nodes=" + std::to_string(opts.source_nodes));
    osc[level] = r.domain.osc;
    ratio[level] = r.ratio;
    std::printf("    info nodes=%d square osc %.4e disk osc %.4e\n", opts.source_nodes, r.domain.osc, r.baseline.osc);
    c.at_least("oscillation ratio at nodes=" + std::to_string(opts.source_nodes), r.ratio, 3.0);
  }
  // The disk oscillation is at the noise floor, so the ratio tracks solver
  // noise; stability is asserted on the square's oscillation itself.
  std::printf("    info ratio refined/coarse %.3f\n", ratio[1] / ratio[0]);
  const double change = osc[1] / osc[0];
  c.expect(change >= 0.5 && change <= 2.0, "square oscillation refined/coarse within factor 2: " + std::to_string(change));
  return c.finish();
}

// Test-side target integral of h Phi over B_H by the polar rule.
double oracle_target_integral(const NormSpec& s, const std::function<double(const Vec2&)>& h, bool absolute) {
  auto rho = [&](double t) {
    if (s.family() == NormFamily::Fourier2D) return 1.0 / oracle::g(kHarmonics, t);
    const Vec d = v2(std::cos(t), std::sin(t));
    if (s.family() == NormFamily::Quadratic) return 1.0 / std::sqrt(d.dot(s.matrix() * d));
    if (s.family() == NormFamily::PNorm)
      return 1.0 / std::pow(std::pow(std::abs(d[0]), s.p()) + std::pow(std::abs(d[1]), s.p()), 1.0 / s.p());
    return 1.0;
  };
  auto density = [&](double x, double y) {
    switch (s.family()) {
      case NormFamily::Euclidean: return 1.0;
      case NormFamily::Quadratic: return s.matrix().determinant();
      case NormFamily::Fourier2D: return oracle::fourier_phi(kHarmonics, std::atan2(y, x));
      default: return (x == 0.0 && y == 0.0) ? s.phi_at_origin() : phi(s, v2(x, y));
    }
  };
  return oracle::polar_integral(rho, [&](double x, double y) {
    const double v = h(Vec2(x, y)) * density(x, y);
    return absolute ? std::abs(v) : v;
  });
}

bool criterion8(const std::vector<Solved>& runs) {
  Criterion c("C8 weak-form battery");
  const auto tests = weak_form_battery();
  c.expect(tests.size() == 12, "battery size " + std::to_string(tests.size()));
  for (const auto& run : runs) {
    const std::string f = to_string(run.spec.family());
    int failed = 0;
    double worst = 0.0;
    for (const auto& r : brenier_weak_check(run.solution, run.domain, run.spec, tests, 0.03)) {
      failed += !r.pass;
      worst = std::max(worst, r.rel_err);
    }
    c.expect(failed == 0, f + " solver path brenier+change1 at 3%: " + std::to_string(failed) +
                              " failed, worst rel " + std::to_string(worst));
  }
  for (const auto& s : {NormSpec::euclidean(), NormSpec::quadratic(diag41()), NormSpec::pnorm(3), fourier_spec()}) {
    const std::string f = to_string(s.family());
    const DiscreteDomain d = build_domain(WulffBall{s, 1.0, Vec2::Zero()}, 1.0 / 128, 2048);
    const PotentialModel m = oracle_radial_model(s);
    const CloudMeasure target = discretize_target(s, 40000);
    int failed = 0, oracle_off = 0;
    double worst = 0.0, worst_oracle = 0.0;
    const auto brenier = brenier_weak_check(m.grad, d, target, tests, 1e-3, "radial_brenier");
    for (std::size_t k = 0; k < brenier.size(); ++k) {
      const auto& r = brenier[k];
      failed += !r.pass;
      worst = std::max(worst, r.rel_err);
      // The discrete target side must agree with the polar oracle as well.
      const double ref = oracle_target_integral(s, tests[k].f, false);
      const double scale = std::max(std::abs(ref), oracle_target_integral(s, tests[k].f, true));
      const double off = std::abs(r.lhs - ref) / scale;
      worst_oracle = std::max(worst_oracle, off);
      oracle_off += off > 1e-3;
    }
    for (const auto& r : change_of_variables_check(m.grad, d, s, tests, 1e-3, "radial_change1")) {
      failed += !r.pass;
      worst = std::max(worst, r.rel_err);
    }
    c.expect(failed == 0, f + " radial brenier+change1 at 1e-3: " + std::to_string(failed) + " failed, worst rel " +
                              std::to_string(worst));
    c.expect(oracle_off == 0, f + " target integrals against polar oracle: worst rel " + std::to_string(worst_oracle));
  }
  return c.finish();
}

}  // namespace

int main() {
  int failed = 0;
  failed += !criterion1();
  failed += !criterion2();
  failed += !criterion3();
  failed += !criterion4();
  failed += !criterion5();
  const auto runs = solve_families();
  failed += !criterion6(runs);
  failed += !criterion7();
  failed += !criterion8(runs);
  std::printf("%d of 8 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
