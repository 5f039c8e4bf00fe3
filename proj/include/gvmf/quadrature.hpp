#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "gvmf/family.hpp"

namespace gvmf {

struct QuadratureConfig {
  double rel_tol = 1e-10;
  /// Absolute error bound; 0 disables it. Integrals are carried in log space,
  /// so a fixed absolute bound would cut refinement short on tiny values.
  double abs_tol = 0.0;
  int max_subdivisions = 200;
  /// Number of Gauss-Legendre nodes per panel.
  int base_rule_order = 31;

  void validate() const;
};

/// A real number stored as sign * exp(log_magnitude). sign == 0 encodes an
/// exact zero, in which case log_magnitude is -inf and otherwise ignored.
struct LogScaledValue {
  double log_magnitude = -std::numeric_limits<double>::infinity();
  int sign = 0;

  static LogScaledValue zero() { return {}; }
  static LogScaledValue from_log(double log_mag) {
    if (log_mag == -std::numeric_limits<double>::infinity()) return zero();
    return {log_mag, 1};
  }

  bool is_zero() const { return sign == 0; }

  /// Plain value; overflows to inf once log_magnitude exceeds ~709.
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_magnitude); }
};

/// log(exp(a) + exp(b)) without overflow.
double log_add(double a, double b);

/// A point of the integration interval. from_lo = y - lo and to_hi = hi - y
/// are computed directly from the substitution variable, so they keep full
/// relative precision next to the endpoints where y itself does not.
struct IntervalPoint {
  double y;
  double from_lo;
  double to_hi;
};

using LogIntegrand = std::function<double(const IntervalPoint&)>;

/// Adaptive Gauss-Legendre integral of exp(log_f) over [lo, hi].
///
/// The declared endpoint exponents describe algebraic factors (y-lo)^a and
/// (hi-y)^b that log_f contains; they only steer the change of variables.
/// For a, b >= -1/2 the substitution y = lo + (hi-lo)(1 - cos t)/2 is used,
/// which makes a -1/2 endpoint factor regular. Steeper (but integrable)
/// singularities switch to a polynomial sigmoid map of sufficient order.
///
/// Each panel is estimated by the rule on the panel and by the rule on its
/// two halves; the difference is the panel error. Everything is accumulated
/// in log space with the panel maximum factored out.
LogScaledValue integrate_on_interval(const LogIntegrand& log_f, double lo, double hi,
                                     double singular_exponent_lo, double singular_exponent_hi,
                                     const QuadratureConfig& cfg = {});

LogScaledValue integrate_on_interval(const std::function<double(double)>& log_f, double lo,
                                     double hi, double singular_exponent_lo,
                                     double singular_exponent_hi,
                                     const QuadratureConfig& cfg = {});

enum class AKind { A1, A2 };

/// A1(kappa, alpha, beta) = int_0^1 exp((kappa/alpha) y^alpha) y^beta (1-y^2)^((d-3)/2) dy
/// A2(kappa, alpha, beta) = int_0^2 exp(-(kappa/alpha) y^alpha) (2-y)^((d-3)/2) y^((d-3)/2+beta) dy
struct AIntegralArgs {
  AKind kind = AKind::A1;
  int d = 3;
  double kappa = 0.0;
  double alpha = 1.0;
  double beta = 0.0;

  void validate() const;
};

/// Log of the moment integral. Finite for |kappa|/alpha <= 500.
LogScaledValue integrate_A(const AIntegralArgs& args, const QuadratureConfig& cfg = {});

inline double log_A1(int d, double kappa, double alpha, double beta,
                     const QuadratureConfig& cfg = {}) {
  return integrate_A({AKind::A1, d, kappa, alpha, beta}, cfg).log_magnitude;
}

inline double log_A2(int d, double kappa, double alpha, double beta,
                     const QuadratureConfig& cfg = {}) {
  return integrate_A({AKind::A2, d, kappa, alpha, beta}, cfg).log_magnitude;
}

/// log of 2 pi^((d-1)/2) / Gamma((d-1)/2), the surface measure of S^{d-2}.
/// This is the factor relating integrals of zonal functions over S^{d-1}
/// to weighted integrals over [-1, 1].
double log_zonal_factor(int d);

/// log of the surface measure of S^{d-1}: log(2 pi^(d/2) / Gamma(d/2)).
double log_sphere_area(int d);

/// log c_{j,d}(kappa, alpha), the normalizing constant of the family density
/// with respect to (unnormalized) surface measure.
LogScaledValue log_norm_const(Family family, int d, double kappa, double alpha,
                              const QuadratureConfig& cfg = {});

}  // namespace gvmf
