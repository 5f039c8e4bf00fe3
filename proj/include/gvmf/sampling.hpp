#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gvmf/family.hpp"
#include "gvmf/model.hpp"
#include "gvmf/rng.hpp"
#include "gvmf/types.hpp"

namespace gvmf {

/// Tabulated distribution of the projection y = mu'X.
///
/// Internally the table lives in the polar angle theta = arccos(y), where the
/// density exp(eta(cos theta)) sin^(d-2)(theta) has no endpoint singularity
/// for any d >= 2. Between nodes the CDF is a cubic Hermite interpolant built
/// from exact density values, with slopes limited to keep it monotone. The
/// grid is refined until the interpolant is within cdf_tolerance of the
/// quadrature CDF at every interval midpoint.
class MarginalTable {
 public:
  static constexpr double kCdfTolerance = 1e-10;

  MarginalTable() = default;

  Family family() const { return family_; }
  int dim() const { return d_; }
  double alpha() const { return alpha_; }
  double kappa() const { return kappa_; }

  /// Abscissae in y, strictly increasing from -1 to 1.
  std::vector<double> grid() const;
  /// CDF of y at grid(); starts at 0 and ends at 1.
  std::vector<double> cdf() const;

  /// P(mu'X <= y).
  double cdf_at(double y) const;
  /// Inverse of cdf_at.
  double quantile(double u) const;

  /// Polar angle with P(theta <= t) = u; cos and sin of the result are both
  /// returned so that points near the poles keep full precision.
  void quantile_angle(double u, double& cos_t, double& sin_t) const;

  /// Largest |interpolated - quadrature| CDF discrepancy seen at the midpoints
  /// during construction.
  double max_midpoint_error() const { return max_midpoint_error_; }
  std::size_t size() const { return theta_.size(); }

 private:
  friend MarginalTable build_marginal_table(Family, double, double, int, int);

  double angle_cdf(double theta) const;
  double angle_quantile(double u) const;

  Family family_ = Family::I;
  int d_ = 3;
  double alpha_ = 1.0;
  double kappa_ = 0.0;
  std::vector<double> theta_;  // increasing, 0 .. pi
  std::vector<double> G_;      // CDF in theta
  std::vector<double> g_;      // normalized density in theta, slope-limited
  double max_midpoint_error_ = 0.0;
};

MarginalTable build_marginal_table(Family family, double alpha, double kappa, int d,
                                   int n_grid = 4097);

inline MarginalTable build_marginal_table(const GvmfParams& p, int n_grid = 4097) {
  return build_marginal_table(p.family, p.alpha, p.kappa, p.d, n_grid);
}

/// n inverse-CDF draws of mu'X.
std::vector<double> sample_marginal(const MarginalTable& table, Rng& rng, std::size_t n);

/// Uniform point on the unit sphere of the orthogonal complement of mu.
UnitVector uniform_subsphere(Rng& rng, int d, const UnitVector& orthogonal_to);

/// X = t mu + sqrt(1 - t^2) Y with t drawn from the table and Y from
/// uniform_subsphere. Returns a d x n sample.
DirectionSample sample_gvmf(const GvmfParams& p, const MarginalTable& table, Rng& rng,
                            std::size_t n);
DirectionSample sample_gvmf(const GvmfParams& p, Rng& rng, std::size_t n);

/// Density proportional to exp(kappa1 mu1'x + beta2 (mu2'x)^2) on S^2.
struct FisherBinghamParams {
  int d = 3;
  UnitVector mu1 = UnitVector::basis(3, 0);
  UnitVector mu2 = UnitVector::basis(3, 1);
  double kappa1 = 0.0;
  double beta2 = 0.0;

  void validate() const;
};

struct FisherBinghamDraw {
  DirectionSample sample;
  double acceptance_rate = 1.0;
};

/// Rejection from a von Mises-Fisher(kappa1, mu1) proposal.
FisherBinghamDraw sample_fisher_bingham(const FisherBinghamParams& fb, Rng& rng, std::size_t n);

}  // namespace gvmf
