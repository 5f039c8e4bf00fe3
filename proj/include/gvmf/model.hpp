#pragma once

#include <Eigen/Dense>
#include <string>

#include "gvmf/family.hpp"
#include "gvmf/quadrature.hpp"
#include "gvmf/types.hpp"

namespace gvmf {

/// Full parameterization of one law. Validity envelope: alpha in
/// [0.01, 50], 0 <= kappa <= 500 alpha, mu of dimension d.
struct GvmfParams {
  Family family = Family::I;
  int d = 3;
  double alpha = 1.0;
  double kappa = 0.0;
  UnitVector mu = UnitVector::basis(3, 2);

  GvmfParams() = default;
  GvmfParams(Family f, double alpha_, double kappa_, UnitVector mu_)
      : family(f), d(mu_.dim()), alpha(alpha_), kappa(kappa_), mu(std::move(mu_)) {}

  void validate() const;
  /// Same law with a different mean direction.
  GvmfParams with_mu(UnitVector m) const { return GvmfParams(family, alpha, kappa, std::move(m)); }
};

/// Box of admissible (alpha, kappa) used by estimation and testing.
struct ParameterBox {
  double alpha_min = 0.05;
  double alpha_max = 20.0;
  double ratio_min = 0.01;  // kappa / alpha
  double ratio_max = 200.0;

  bool contains(double alpha, double kappa) const {
    return alpha >= alpha_min && alpha <= alpha_max && kappa >= ratio_min * alpha &&
           kappa <= ratio_max * alpha;
  }
};

enum class MomentKind {
  SignedPower,   // E[(mu'X)^<beta>]      (family I)
  ChordalPower,  // E[|X - mu|^(2 beta)]  (family II)
  AbsPower,      // E[|mu'X|^beta]        (family Axial)
};

struct MomentSpec {
  double beta = 1.0;
  MomentKind kind = MomentKind::SignedPower;
};

/// The moment kind whose beta = alpha instance enters the entropy.
MomentKind natural_moment_kind(Family family);

/// Unnormalized log density at x; no dimension or norm checks.
template <typename Derived>
double log_kernel(const GvmfParams& p, const Eigen::MatrixBase<Derived>& x) {
  const double rate = p.kappa / p.alpha;
  if (rate == 0.0) return 0.0;
  switch (p.family) {
    case Family::I:
      return rate * signed_pow(p.mu.coords().dot(x), p.alpha);
    case Family::II:
      return -rate * std::pow(0.5 * (x - p.mu.coords()).squaredNorm(), p.alpha);
    case Family::Axial:
      return rate * std::pow(std::abs(p.mu.coords().dot(x)), p.alpha);
  }
  return 0.0;
}

double log_density(const GvmfParams& p, const UnitVector& x,
                   const QuadratureConfig& cfg = {});

/// Log densities of every column of a d x N matrix. The normalizing constant
/// is computed once.
Eigen::VectorXd log_density(const GvmfParams& p, const Eigen::MatrixXd& points,
                            const QuadratureConfig& cfg = {});

double moment(const GvmfParams& p, const MomentSpec& spec, const QuadratureConfig& cfg = {});

/// |E X|. Families I and II only have a mean direction; the axial family has
/// resultant length exactly 0 and that value is returned for it.
double mean_resultant_length(const GvmfParams& p, const QuadratureConfig& cfg = {});

/// Differential entropy with respect to surface measure (nats).
double entropy(const GvmfParams& p, const QuadratureConfig& cfg = {});

struct ReductionReport {
  double max_abs_log_discrepancy = 0.0;
  int points_checked = 0;
  std::string reference;
};

/// Compares log_density at alpha = 1 (families I, II) against the classical
/// von Mises-Fisher density, or at alpha = 2 (axial) against a Watson density
/// whose normalizer is obtained by a fine composite Simpson rule.
ReductionReport validate_reduction(const GvmfParams& p, const QuadratureConfig& cfg = {});

}  // namespace gvmf
