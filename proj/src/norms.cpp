#include "wulff/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include "wulff/errors.hpp"

namespace wulff {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kScanAngles = 1024;
constexpr int kAdmissibilityAngles = 4096;
constexpr int kPhiDirections2d = 4096;
constexpr int kPhiDirections3d = 100000;
constexpr double kGoldenBracket = 1e-12;
constexpr double kHessianStep = 1e-5;
constexpr int kNewtonMaxIterations = 60;

void require_point(const NormSpec& spec, const Vec& v) {
  if (v.size() != spec.dimension()) {
    throw InvalidInput("point has dimension " + std::to_string(v.size()) + ", norm expects " +
                       std::to_string(spec.dimension()));
  }
  if (!v.allFinite()) throw InvalidInput("non-finite point component");
}

Vec2 unit(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Directions on the sphere from a Fibonacci lattice; deterministic and
// close to uniform.
Vec fibonacci_direction(int i, int count) {
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double z = 1.0 - (2.0 * i + 1.0) / count;
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  Vec d(3);
  d << r * std::cos(golden * i), r * std::sin(golden * i), z;
  return d;
}

template <typename F>
void for_each_direction(int dimension, F&& f) {
  if (dimension == 2) {
    for (int i = 0; i < kPhiDirections2d; ++i) {
      Vec d(2);
      const Vec2 u = unit(kTwoPi * i / kPhiDirections2d);
      d << u.x(), u.y();
      f(d);
    }
  } else {
    for (int i = 0; i < kPhiDirections3d; ++i) f(fibonacci_direction(i, kPhiDirections3d));
  }
}

// Maximizes ratio(theta) on a periodic angle: coarse scan then golden section
// on the bracket around the best sample.
template <typename Ratio>
std::pair<double, double> angular_max(Ratio&& ratio, int best_index) {
  const double step = kTwoPi / kScanAngles;
  double lo = step * (best_index - 1);
  double hi = step * (best_index + 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = ratio(c);
  double fd = ratio(d);
  while (hi - lo > kGoldenBracket) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = ratio(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = ratio(d);
    }
  }
  const double theta = 0.5 * (lo + hi);
  return {theta, ratio(theta)};
}

// ---- family kernels --------------------------------------------------------

double pnorm_value(const Vec& v, double p) {
  const double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]) / m, p);
  return m * std::pow(s, 1.0 / p);
}

// grad of the l_p norm: sign(v_i) (|v_i| / ||v||)^(p-1).
Vec pnorm_gradient(const Vec& v, double p) {
  const double h = pnorm_value(v, p);
  Vec g(v.size());
  for (int i = 0; i < v.size(); ++i) {
    g[i] = std::copysign(std::pow(std::abs(v[i]) / h, p - 1.0), v[i]);
  }
  return g;
}

Vec2 fourier_grad_norm(const NormSpec& spec, const Vec2& xi) {
  const double theta = std::atan2(xi.y(), xi.x());
  const Vec2 er = unit(theta);
  const Vec2 et(-er.y(), er.x());
  return spec.profile(theta) * er + spec.profile_d1(theta) * et;
}

Vec2 fourier_grad_E(const NormSpec& spec, const Vec2& xi) {
  const double r = xi.norm();
  if (r == 0.0) return Vec2::Zero();
  const double theta = std::atan2(xi.y(), xi.x());
  const Vec2 er = unit(theta);
  const Vec2 et(-er.y(), er.x());
  const double g = spec.profile(theta);
  return r * g * (g * er + spec.profile_d1(theta) * et);
}

// Central differences of grad E at the unit vector along xi; the Hessian of
// E is homogeneous of degree 0 so the rescaling is exact.
Mat fourier_hessian_E(const NormSpec& spec, const Vec2& xi) {
  const Vec2 base = xi / xi.norm();
  const double h = kHessianStep * std::max(base.norm(), 1.0);
  Mat hess(2, 2);
  for (int j = 0; j < 2; ++j) {
    Vec2 e = Vec2::Zero();
    e[j] = h;
    const Vec2 col = (fourier_grad_E(spec, base + e) - fourier_grad_E(spec, base - e)) / (2.0 * h);
    hess.col(j) = col;
  }
  return 0.5 * (hess + hess.transpose());
}

struct FourierDual {
  double value;
  double theta;  // maximizing direction angle
};

FourierDual fourier_dual(const NormSpec& spec, const Vec2& x) {
  const auto& table = spec.dual_scan_table();
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScanAngles; ++i) {
    const double v = x.dot(table[static_cast<std::size_t>(i)]);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  auto ratio = [&](double theta) { return x.dot(unit(theta)) / spec.profile(theta); };
  const auto [theta, value] = angular_max(ratio, best);
  return {std::max(value, best_value), theta};
}

Vec to_vec(const Vec2& v) {
  Vec out(2);
  out << v.x(), v.y();
  return out;
}

}  // namespace

// ---- NormSpec ----------------------------------------------------------------

struct NormSpec::Cache {
  std::once_flag once;
  double phi0 = 0.0;
};

const char* to_string(NormFamily family) {
  switch (family) {
    case NormFamily::Euclidean:
      return "euclidean";
    case NormFamily::Quadratic:
      return "quadratic";
    case NormFamily::PNorm:
      return "pnorm";
    case NormFamily::Fourier2D:
      return "fourier2d";
  }
  return "unknown";
}

NormSpec NormSpec::euclidean(int dimension) {
  if (dimension < 2 || dimension > 3) throw InvalidInput("dimension must be 2 or 3");
  NormSpec s;
  s.family_ = NormFamily::Euclidean;
  s.dimension_ = dimension;
  s.finalize();
  return s;
}

NormSpec NormSpec::quadratic(const Mat& a) {
  if (a.rows() != a.cols()) throw InvalidInput("quadratic norm matrix must be square");
  if (a.rows() < 2 || a.rows() > 3) throw InvalidInput("dimension must be 2 or 3");
  if (!a.allFinite()) throw InvalidInput("quadratic norm matrix has non-finite entries");
  const double scale = a.cwiseAbs().maxCoeff();
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + scale)) {
    throw InvalidInput("quadratic norm matrix is not symmetric");
  }
  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::LLT<Mat> llt(sym);
  if (llt.info() != Eigen::Success) throw InvalidInput("quadratic norm matrix is not positive definite");
  NormSpec s;
  s.family_ = NormFamily::Quadratic;
  s.dimension_ = static_cast<int>(a.rows());
  s.a_ = sym;
  s.a_inv_ = llt.solve(Mat::Identity(sym.rows(), sym.cols()));
  s.a_inv_ = 0.5 * (s.a_inv_ + s.a_inv_.transpose());
  s.finalize();
  return s;
}

NormSpec NormSpec::pnorm(double p, int dimension) {
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidInput("p-norm exponent must lie in (1, inf)");
  if (dimension < 2 || dimension > 3) throw InvalidInput("dimension must be 2 or 3");
  NormSpec s;
  s.family_ = NormFamily::PNorm;
  s.dimension_ = dimension;
  s.p_ = p;
  s.q_ = p / (p - 1.0);
  s.finalize();
  return s;
}

NormSpec NormSpec::fourier2d(std::vector<FourierTerm> terms) {
  for (const auto& t : terms) {
    if (t.k < 2) throw InvalidInput("Fourier harmonics must have k >= 2");
    if (!std::isfinite(t.a) || !std::isfinite(t.b)) throw InvalidInput("non-finite Fourier coefficient");
  }
  NormSpec s;
  s.family_ = NormFamily::Fourier2D;
  s.dimension_ = 2;
  s.terms_ = std::move(terms);
  for (int i = 0; i < kAdmissibilityAngles; ++i) {
    const double theta = kTwoPi * i / kAdmissibilityAngles;
    const double g = s.profile(theta);
    if (!(g > 0.0)) throw InvalidInput("Fourier profile is not positive");
    if (!(g + s.profile_d2(theta) > 0.0)) throw InvalidInput("Fourier profile violates g + g'' > 0");
  }
  s.finalize();
  return s;
}

void NormSpec::finalize() {
  cache_ = std::make_shared<Cache>();
  if (family_ == NormFamily::Fourier2D) {
    scan_.resize(kScanAngles);
    for (int i = 0; i < kScanAngles; ++i) {
      const double theta = kTwoPi * i / kScanAngles;
      scan_[static_cast<std::size_t>(i)] = unit(theta) / profile(theta);
    }
  }
}

bool NormSpec::is_symmetric() const {
  if (family_ != NormFamily::Fourier2D) return true;
  return std::all_of(terms_.begin(), terms_.end(), [](const FourierTerm& t) {
    return t.k % 2 == 0 || (t.a == 0.0 && t.b == 0.0);
  });
}

double NormSpec::profile(double theta) const {
  double g = 1.0;
  for (const auto& t : terms_) g += t.a * std::cos(t.k * theta) + t.b * std::sin(t.k * theta);
  return g;
}

double NormSpec::profile_d1(double theta) const {
  double g = 0.0;
  for (const auto& t : terms_) g += t.k * (-t.a * std::sin(t.k * theta) + t.b * std::cos(t.k * theta));
  return g;
}

double NormSpec::profile_d2(double theta) const {
  double g = 0.0;
  for (const auto& t : terms_) {
    g -= t.k * t.k * (t.a * std::cos(t.k * theta) + t.b * std::sin(t.k * theta));
  }
  return g;
}

double NormSpec::phi_at_origin() const {
  std::call_once(cache_->once, [this] {
    double inf = std::numeric_limits<double>::infinity();
    for_each_direction(dimension_, [&](const Vec& d) { inf = std::min(inf, hessian_E(*this, d).determinant()); });
    cache_->phi0 = inf;
  });
  return cache_->phi0;
}

// ---- evaluations -------------------------------------------------------------

double eval_norm(const NormSpec& spec, const Vec& xi) {
  require_point(spec, xi);
  switch (spec.family()) {
    case NormFamily::Euclidean:
      return xi.norm();
    case NormFamily::Quadratic:
      return std::sqrt(std::max(0.0, xi.dot(spec.matrix() * xi)));
    case NormFamily::PNorm:
      return pnorm_value(xi, spec.p());
    case NormFamily::Fourier2D: {
      const double r = xi.norm();
      if (r == 0.0) return 0.0;
      return r * spec.profile(std::atan2(xi[1], xi[0]));
    }
  }
  return 0.0;
}

Vec grad_norm(const NormSpec& spec, const Vec& xi) {
  require_point(spec, xi);
  if (xi.isZero(0.0)) throw DegeneratePoint("grad H is undefined at the origin");
  switch (spec.family()) {
    case NormFamily::Euclidean:
      return xi / xi.norm();
    case NormFamily::Quadratic:
      return spec.matrix() * xi / eval_norm(spec, xi);
    case NormFamily::PNorm:
      return pnorm_gradient(xi, spec.p());
    case NormFamily::Fourier2D:
      return to_vec(fourier_grad_norm(spec, Vec2(xi[0], xi[1])));
  }
  return Vec();
}

Mat hessian_E(const NormSpec& spec, const Vec& xi) {
  require_point(spec, xi);
  if (xi.isZero(0.0)) throw DegeneratePoint("Hessian of E is undefined at the origin");
  const int n = spec.dimension();
  switch (spec.family()) {
    case NormFamily::Euclidean:
      return Mat::Identity(n, n);
    case NormFamily::Quadratic:
      return spec.matrix();
    case NormFamily::PNorm: {
      const double p = spec.p();
      const double h = pnorm_value(xi, p);
      const Vec s = pnorm_gradient(xi, p);
      Mat hess = (2.0 - p) * s * s.transpose();
      for (int i = 0; i < n; ++i) {
        if (xi[i] == 0.0 && p < 2.0) {
          throw DegeneratePoint("Hessian of the p-norm energy is unbounded on coordinate hyperplanes for p < 2");
        }
        hess(i, i) += (p - 1.0) * std::pow(std::abs(xi[i]) / h, p - 2.0);
      }
      return hess;
    }
    case NormFamily::Fourier2D:
      return fourier_hessian_E(spec, Vec2(xi[0], xi[1]));
  }
  return Mat();
}

NormEval eval_full(const NormSpec& spec, const Vec& xi) {
  NormEval out;
  out.value = eval_norm(spec, xi);
  out.gradient = grad_norm(spec, xi);
  out.hessian_E = hessian_E(spec, xi);
  return out;
}

Vec grad_E(const NormSpec& spec, const Vec& xi) {
  require_point(spec, xi);
  if (xi.isZero(0.0)) return Vec::Zero(spec.dimension());
  switch (spec.family()) {
    case NormFamily::Euclidean:
      return xi;
    case NormFamily::Quadratic:
      return spec.matrix() * xi;
    case NormFamily::PNorm:
      return pnorm_value(xi, spec.p()) * pnorm_gradient(xi, spec.p());
    case NormFamily::Fourier2D:
      return to_vec(fourier_grad_E(spec, Vec2(xi[0], xi[1])));
  }
  return Vec();
}

double dual_norm(const NormSpec& spec, const Vec& x) {
  require_point(spec, x);
  switch (spec.family()) {
    case NormFamily::Euclidean:
      return x.norm();
    case NormFamily::Quadratic:
      return std::sqrt(std::max(0.0, x.dot(spec.inverse_matrix() * x)));
    case NormFamily::PNorm:
      return pnorm_value(x, spec.conjugate_exponent());
    case NormFamily::Fourier2D:
      if (x.isZero(0.0)) return 0.0;
      return fourier_dual(spec, Vec2(x[0], x[1])).value;
  }
  return 0.0;
}

Vec grad_E0(const NormSpec& spec, const Vec& x) {
  require_point(spec, x);
  if (x.isZero(0.0)) return Vec::Zero(spec.dimension());
  switch (spec.family()) {
    case NormFamily::Euclidean:
      return x;
    case NormFamily::Quadratic:
      return spec.inverse_matrix() * x;
    case NormFamily::PNorm: {
      const double q = spec.conjugate_exponent();
      return pnorm_value(x, q) * pnorm_gradient(x, q);
    }
    case NormFamily::Fourier2D:
      break;
  }

  // Fourier2D: solve grad_E(xi) = x by damped Newton, seeded with
  // H0(x) grad H0(x) where grad H0(x) = xi*/H(xi*) at the maximizer xi*.
  const Vec2 target(x[0], x[1]);
  const FourierDual dual = fourier_dual(spec, target);
  Vec2 xi = dual.value * unit(dual.theta) / spec.profile(dual.theta);
  Vec2 residual = fourier_grad_E(spec, xi) - target;
  const double tol = 1e-10 * (1.0 + target.norm());
  for (int it = 0; it < kNewtonMaxIterations; ++it) {
    if (residual.norm() <= tol) return to_vec(xi);
    const Mat2 jac = fourier_hessian_E(spec, xi);
    const Vec2 step = jac.ldlt().solve(residual);
    double t = 1.0;
    Vec2 trial = xi - step;
    Vec2 trial_residual = fourier_grad_E(spec, trial) - target;
    while (trial_residual.norm() >= residual.norm() && t > 1e-8) {
      t *= 0.5;
      trial = xi - t * step;
      trial_residual = fourier_grad_E(spec, trial) - target;
    }
    if (trial_residual.norm() >= residual.norm()) break;
    xi = trial;
    residual = trial_residual;
  }
  if (residual.norm() <= tol) return to_vec(xi);
  throw SolverFailure("grad_E0 Newton iteration did not converge", residual.norm(), kNewtonMaxIterations);
}

Vec grad_dual_norm(const NormSpec& spec, const Vec& x) {
  require_point(spec, x);
  if (x.isZero(0.0)) throw DegeneratePoint("grad H0 is undefined at the origin");
  return grad_E0(spec, x) / dual_norm(spec, x);
}

double phi(const NormSpec& spec, const Vec& xi) {
  require_point(spec, xi);
  if (xi.isZero(0.0)) return spec.phi_at_origin();
  return hessian_E(spec, xi).determinant();
}

std::pair<double, double> hessian_bounds(const NormSpec& spec) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for_each_direction(spec.dimension(), [&](const Vec& d) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(hessian_E(spec, d), Eigen::EigenvaluesOnly);
    lo = std::min(lo, eig.eigenvalues().minCoeff());
    hi = std::max(hi, eig.eigenvalues().maxCoeff());
  });
  return {lo, hi};
}

// ---- generic support-function dual -------------------------------------------

RatioMax maximize_ratio(const std::function<double(const Vec&)>& gauge, const Vec& x) {
  if (!x.allFinite()) throw InvalidInput("non-finite point component");
  const auto n = x.size();
  RatioMax out;
  if (x.isZero(0.0)) {
    out.argmax = Vec::Zero(n);
    out.argmax[0] = 1.0;
    return out;
  }
  if (n == 2) {
    auto ratio = [&](double theta) {
      const Vec d = to_vec(unit(theta));
      return x.dot(d) / gauge(d);
    };
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kScanAngles; ++i) {
      const double v = ratio(kTwoPi * i / kScanAngles);
      if (v > best_value) {
        best_value = v;
        best = i;
      }
    }
    const auto [theta, value] = angular_max(ratio, best);
    out.value = std::max(value, best_value);
    out.argmax = to_vec(unit(theta));
    return out;
  }

  auto ratio = [&](const Vec& d) { return x.dot(d) / gauge(d); };
  std::vector<Vec> starts;
  starts.push_back(x.normalized());
  for (int i = 0; i < n; ++i) {
    starts.push_back(Vec::Unit(n, i));
    starts.push_back(-Vec::Unit(n, i));
  }
  starts.push_back(Vec::Ones(n).normalized());
  starts.resize(8, Vec::Ones(n).normalized());

  out.value = -std::numeric_limits<double>::infinity();
  for (const Vec& start : starts) {
    Vec d = start;
    double value = ratio(d);
    double step = 0.5;
    for (int it = 0; it < 4000 && step > 1e-15; ++it) {
      Vec grad(n);
      const double fd = 1e-6;
      for (int j = 0; j < n; ++j) {
        Vec e = Vec::Zero(n);
        e[j] = fd;
        grad[j] = (ratio(d + e) - ratio(d - e)) / (2.0 * fd);
      }
      const Vec tangent = grad - grad.dot(d) * d;
      if (tangent.norm() < 1e-11) break;
      const Vec trial = (d + step * tangent).normalized();
      const double trial_value = ratio(trial);
      if (trial_value > value) {
        d = trial;
        value = trial_value;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    if (value > out.value) {
      out.value = value;
      out.argmax = d;
    }
  }
  return out;
}

}  // namespace wulff
