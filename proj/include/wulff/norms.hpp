#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "wulff/types.hpp"

namespace wulff {

enum class NormFamily { Euclidean, Quadratic, PNorm, Fourier2D };

const char* to_string(NormFamily family);

/// One harmonic of a planar profile g(theta) = 1 + sum a_k cos(k theta) + b_k sin(k theta).
struct FourierTerm {
  int k = 2;
  double a = 0.0;
  double b = 0.0;
};

/// Immutable description of an anisotropic gauge H with H^2 in C^2_+ away from 0.
///
/// Quadratic: H(xi) = sqrt(xi^T A xi) for symmetric positive-definite A.
/// PNorm:     H(xi) = ||xi||_p, 1 < p < inf.
/// Fourier2D: H(xi) = |xi| g(theta), validated so that g > 0 and g + g'' > 0
///            on a dense angular grid. Profiles containing odd harmonics are
///            positively homogeneous gauges rather than symmetric norms;
///            is_symmetric() reports which.
///
/// Copies share the lazily computed Phi(0) cache, so a NormSpec can be passed
/// by value freely and used from several threads.
class NormSpec {
 public:
  static NormSpec euclidean(int dimension = 2);
  static NormSpec quadratic(const Mat& a);
  static NormSpec pnorm(double p, int dimension = 2);
  static NormSpec fourier2d(std::vector<FourierTerm> terms);

  NormFamily family() const { return family_; }
  int dimension() const { return dimension_; }
  bool is_symmetric() const;

  const Mat& matrix() const { return a_; }
  const Mat& inverse_matrix() const { return a_inv_; }
  double p() const { return p_; }
  double conjugate_exponent() const { return q_; }
  const std::vector<FourierTerm>& fourier_terms() const { return terms_; }

  // Profile g and its first two angular derivatives (Fourier2D only).
  double profile(double theta) const;
  double profile_d1(double theta) const;
  double profile_d2(double theta) const;

  /// Scan table for the dual-norm maximization: unit directions divided by H.
  const std::vector<Vec2>& dual_scan_table() const { return scan_; }

  double phi_at_origin() const;

 private:
  NormSpec() = default;
  void finalize();

  NormFamily family_ = NormFamily::Euclidean;
  int dimension_ = 2;
  Mat a_;
  Mat a_inv_;
  double p_ = 2.0;
  double q_ = 2.0;
  std::vector<FourierTerm> terms_;
  std::vector<Vec2> scan_;

  struct Cache;
  std::shared_ptr<Cache> cache_;
};

/// H(xi) together with its first derivatives and the Hessian of E = H^2/2.
struct NormEval {
  double value = 0.0;
  Vec gradient;   ///< grad H, homogeneous of degree 0
  Mat hessian_E;  ///< Hessian of E, homogeneous of degree 0
};

double eval_norm(const NormSpec& spec, const Vec& xi);
NormEval eval_full(const NormSpec& spec, const Vec& xi);
Vec grad_norm(const NormSpec& spec, const Vec& xi);
Mat hessian_E(const NormSpec& spec, const Vec& xi);

/// H0(x) = max over xi != 0 of x.xi / H(xi).
double dual_norm(const NormSpec& spec, const Vec& x);

/// grad E = H grad H, continued by 0 at the origin.
Vec grad_E(const NormSpec& spec, const Vec& xi);

/// grad E0 = H0 grad H0; inverse map of grad_E.
Vec grad_E0(const NormSpec& spec, const Vec& x);

/// grad H0, homogeneous of degree 0.
Vec grad_dual_norm(const NormSpec& spec, const Vec& x);

inline double energy(const NormSpec& spec, const Vec& xi) {
  const double h = eval_norm(spec, xi);
  return 0.5 * h * h;
}

inline double dual_energy(const NormSpec& spec, const Vec& x) {
  const double h = dual_norm(spec, x);
  return 0.5 * h * h;
}

/// Monge-Ampere coefficient det(Hessian E); the directional infimum at 0.
double phi(const NormSpec& spec, const Vec& xi);

/// Extreme eigenvalues of Hessian E over sampled directions.
std::pair<double, double> hessian_bounds(const NormSpec& spec);

/// Result of maximizing x.d / gauge(d) over directions d.
struct RatioMax {
  double value = 0.0;
  Vec argmax;  ///< maximizing direction, unit Euclidean length
};

/// Support-function dual of an arbitrary positively homogeneous gauge.
/// Planar inputs use a 1024-angle scan refined by golden-section search;
/// higher dimensions use a multi-start projected gradient ascent on the sphere.
RatioMax maximize_ratio(const std::function<double(const Vec&)>& gauge, const Vec& x);

}  // namespace wulff
