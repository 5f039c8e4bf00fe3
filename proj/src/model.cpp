#include "gvmf/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gvmf/error.hpp"

namespace gvmf {
namespace {

// log(exp(a) - exp(b)) for a >= b.
double log_sub(double a, double b) {
  if (b == -std::numeric_limits<double>::infinity()) return a;
  if (a <= b) return -std::numeric_limits<double>::infinity();
  return a + std::log(-std::expm1(b - a));
}

// (A1(k,a,beta) - A1(-k,a,beta)) / (A1(k,a,0) + A1(-k,a,0)), the signed
// power moment of family I.
double signed_ratio(int d, double kappa, double alpha, double beta, const QuadratureConfig& cfg) {
  if (kappa == 0.0) return 0.0;
  const double den = log_add(log_A1(d, kappa, alpha, 0.0, cfg), log_A1(d, -kappa, alpha, 0.0, cfg));
  const double num = log_sub(log_A1(d, kappa, alpha, beta, cfg), log_A1(d, -kappa, alpha, beta, cfg));
  return std::exp(num - den);
}

double chordal_ratio(int d, double kappa, double alpha, double beta, const QuadratureConfig& cfg) {
  return std::exp(log_A2(d, kappa, alpha, beta, cfg) - log_A2(d, kappa, alpha, 0.0, cfg));
}

double abs_ratio(int d, double kappa, double alpha, double beta, const QuadratureConfig& cfg) {
  return std::exp(log_A1(d, kappa, alpha, beta, cfg) - log_A1(d, kappa, alpha, 0.0, cfg));
}

// Composite Simpson on theta in [0, pi/2] of exp(rate cos^2) sin^(d-2).
double watson_half_integral_log(int d, double rate) {
  const int n = 200000;
  const double h = 0.5 * std::numbers::pi / n;
  double m = rate;  // upper bound of the exponent
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = i * h;
    const double c = std::cos(t);
    const double sn = std::sin(t);
    double v = std::exp(rate * c * c - m);
    if (d != 2) v *= std::pow(sn, d - 2);
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    s += w * v;
  }
  return m + std::log(s * h / 3.0);
}

std::vector<Eigen::VectorXd> reduction_points(int d, const UnitVector& mu) {
  std::vector<Eigen::VectorXd> pts;
  pts.push_back(mu.coords());
  pts.push_back(-mu.coords());
  if (d == 3) {
    const int n = 2000;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / n;
      const double r = std::sqrt(1.0 - z * z);
      pts.emplace_back(Eigen::Vector3d(r * std::cos(golden * i), r * std::sin(golden * i), z));
    }
  } else {
    // Deterministic spread: normalized rows of a Halton-like sequence pushed
    // through a symmetric map onto [-1, 1]^d.
    for (int i = 1; i <= 2000; ++i) {
      Eigen::VectorXd v(d);
      for (int j = 0; j < d; ++j) {
        const double frac = std::fmod(i * std::sqrt(2.0 + j) + 0.5 * j, 1.0);
        v(j) = 2.0 * frac - 1.0;
      }
      if (v.norm() > 1e-6) pts.emplace_back(v.normalized());
    }
  }
  return pts;
}

}  // namespace

void GvmfParams::validate() const {
  require(d >= 2, ErrorKind::InvalidArgs, "dimension d must be >= 2");
  require(mu.dim() == d, ErrorKind::DimensionMismatch, "mu has the wrong dimension");
  require(std::isfinite(alpha) && alpha >= 0.01 && alpha <= 50.0, ErrorKind::InvalidArgs,
          "alpha must lie in [0.01, 50]");
  require(std::isfinite(kappa) && kappa >= 0.0 && kappa <= 500.0 * alpha, ErrorKind::InvalidArgs,
          "kappa must lie in [0, 500 alpha]");
}

MomentKind natural_moment_kind(Family family) {
  switch (family) {
    case Family::I: return MomentKind::SignedPower;
    case Family::II: return MomentKind::ChordalPower;
    case Family::Axial: return MomentKind::AbsPower;
  }
  return MomentKind::SignedPower;
}

double log_density(const GvmfParams& p, const UnitVector& x, const QuadratureConfig& cfg) {
  p.validate();
  require(x.dim() == p.d, ErrorKind::DimensionMismatch, "point and mu differ in dimension");
  return log_norm_const(p.family, p.d, p.kappa, p.alpha, cfg).log_magnitude +
         log_kernel(p, x.coords());
}

Eigen::VectorXd log_density(const GvmfParams& p, const Eigen::MatrixXd& points,
                            const QuadratureConfig& cfg) {
  p.validate();
  require(points.rows() == p.d, ErrorKind::DimensionMismatch, "points and mu differ in dimension");
  const double log_c = log_norm_const(p.family, p.d, p.kappa, p.alpha, cfg).log_magnitude;
  Eigen::VectorXd out(points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) out(i) = log_c + log_kernel(p, points.col(i));
  return out;
}

double moment(const GvmfParams& p, const MomentSpec& spec, const QuadratureConfig& cfg) {
  p.validate();
  require(spec.beta >= 0.0, ErrorKind::InvalidArgs, "moment order must be >= 0");
  if (spec.kind != natural_moment_kind(p.family))
    fail(ErrorKind::UnsupportedMomentKind,
         "moment kind not available in closed form for family " + std::string(to_string(p.family)));
  switch (p.family) {
    case Family::I: return signed_ratio(p.d, p.kappa, p.alpha, spec.beta, cfg);
    case Family::II:
      return std::pow(2.0, spec.beta) * chordal_ratio(p.d, p.kappa, p.alpha, spec.beta, cfg);
    case Family::Axial: return abs_ratio(p.d, p.kappa, p.alpha, spec.beta, cfg);
  }
  return 0.0;
}

double mean_resultant_length(const GvmfParams& p, const QuadratureConfig& cfg) {
  p.validate();
  switch (p.family) {
    case Family::I: return signed_ratio(p.d, p.kappa, p.alpha, 1.0, cfg);
    case Family::II: return 1.0 - chordal_ratio(p.d, p.kappa, p.alpha, 1.0, cfg);
    case Family::Axial: return 0.0;
  }
  return 0.0;
}

double entropy(const GvmfParams& p, const QuadratureConfig& cfg) {
  p.validate();
  const double log_c = log_norm_const(p.family, p.d, p.kappa, p.alpha, cfg).log_magnitude;
  if (p.kappa == 0.0) return -log_c;
  const double rate = p.kappa / p.alpha;
  switch (p.family) {
    case Family::I: return -log_c - rate * signed_ratio(p.d, p.kappa, p.alpha, p.alpha, cfg);
    case Family::II: return -log_c + rate * chordal_ratio(p.d, p.kappa, p.alpha, p.alpha, cfg);
    case Family::Axial: return -log_c - rate * abs_ratio(p.d, p.kappa, p.alpha, p.alpha, cfg);
  }
  return 0.0;
}

ReductionReport validate_reduction(const GvmfParams& p, const QuadratureConfig& cfg) {
  p.validate();
  const bool vmf_case = p.family != Family::Axial;
  const double want_alpha = vmf_case ? 1.0 : 2.0;
  if (std::abs(p.alpha - want_alpha) > 1e-12)
    fail(ErrorKind::WrongAlphaForReduction,
         std::string("reduction requires alpha = ") + (vmf_case ? "1" : "2"));

  ReductionReport report;
  double ref_log_c = 0.0;
  if (vmf_case) {
    const double k = p.kappa;
    if (k == 0.0) {
      ref_log_c = -log_sphere_area(p.d);
      report.reference = "uniform density";
    } else if (p.d == 3) {
      // kappa / (4 pi sinh kappa), with log sinh written to avoid overflow.
      const double log_sinh = k + std::log1p(-std::exp(-2.0 * k)) - std::log(2.0);
      ref_log_c = std::log(k) - std::log(4.0 * std::numbers::pi) - log_sinh;
      report.reference = "vMF d=3: kappa exp(kappa mu'x) / (4 pi sinh kappa)";
    } else {
      require(k <= 700.0, ErrorKind::InvalidArgs, "Bessel reference limited to kappa <= 700");
      const double nu = 0.5 * p.d - 1.0;
      ref_log_c = nu * std::log(k) - 0.5 * p.d * std::log(2.0 * std::numbers::pi) -
                  std::log(std::cyl_bessel_i(nu, k));
      report.reference = "vMF: kappa^(d/2-1) / ((2 pi)^(d/2) I_{d/2-1}(kappa))";
    }
  } else {
    const double rate = 0.5 * p.kappa;
    ref_log_c = -(std::log(2.0) + log_zonal_factor(p.d) + watson_half_integral_log(p.d, rate));
    report.reference = "Watson with Simpson normalizer";
  }

  double worst = 0.0;
  const auto pts = reduction_points(p.d, p.mu);
  const double log_c = log_norm_const(p.family, p.d, p.kappa, p.alpha, cfg).log_magnitude;
  for (const auto& x : pts) {
    const double t = p.mu.coords().dot(x);
    const double ref = vmf_case ? ref_log_c + p.kappa * t : ref_log_c + 0.5 * p.kappa * t * t;
    worst = std::max(worst, std::abs(log_c + log_kernel(p, x) - ref));
  }
  report.max_abs_log_discrepancy = worst;
  report.points_checked = static_cast<int>(pts.size());
  return report;
}

}  // namespace gvmf
