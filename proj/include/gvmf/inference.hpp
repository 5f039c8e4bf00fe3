#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "gvmf/model.hpp"
#include "gvmf/types.hpp"

namespace gvmf {

enum class Estimator { MLE, MoM };

std::string_view to_string(Estimator e);
std::optional<Estimator> parse_estimator(std::string_view s);

struct FitResult {
  GvmfParams params;
  Estimator method = Estimator::MLE;
  /// Total log-likelihood at params (also filled for MoM fits).
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective_history;
  /// Solution lies on the edge of the parameter box.
  bool on_boundary = false;
  /// Moment condition left-hand side minus right-hand side at the solution
  /// (the kappa score equation for MLE, the second equation for MoM).
  double score_residual = 0.0;
  std::string diagnostic;
};

struct MleOptions {
  ParameterBox box{};
  /// Stop when the simplex spread of the mean log-likelihood drops below this.
  double ftol = 1e-8;
  int max_iterations = 500;
  /// Refine mu jointly with (alpha, kappa) after the profile search.
  bool refine_direction = false;
  double score_tolerance = 1e-5;
  QuadratureConfig quadrature{};
};

struct MomOptions {
  ParameterBox box{};
  int alpha_grid = 64;
  QuadratureConfig quadrature{};
};

struct OrientationStats {
  Eigen::MatrixXd T_bar;
  double V_bar = 0.0;
};

double log_likelihood(const GvmfParams& p, const DirectionSample& sample,
                      const QuadratureConfig& cfg = {});

/// Normalized sample mean; DegenerateMeanDirection when its norm is < 1e-8.
UnitVector mean_direction(const DirectionSample& sample);

/// Principal eigenvector of the orientation tensor, first nonzero component
/// made positive.
UnitVector principal_axis(const DirectionSample& sample);

OrientationStats orientation_stats(const DirectionSample& sample);

/// Profile maximum likelihood: mu from the sample, then a simplex search over
/// (log alpha, log(kappa/alpha)) and a final one-dimensional solve of the
/// kappa score equation.
FitResult fit_mle(Family family, const DirectionSample& sample,
                  const std::optional<GvmfParams>& init = std::nullopt,
                  const MleOptions& opts = {});

/// Method of moments with nested bracketed root finding over the box.
FitResult fit_mom(Family family, const DirectionSample& sample, const MomOptions& opts = {});

FitResult fit(Estimator method, Family family, const DirectionSample& sample);

/// Estimates of E(mu'X)^2 and E(mu'X)^4 obtained from the orientation
/// tensor without knowing mu. They are the right-hand sides of the axial
/// moment equations.
struct AxialMomentTargets {
  double second = 0.0;
  double fourth = 0.0;
};
AxialMomentTargets axial_moment_targets(const DirectionSample& sample);

}  // namespace gvmf
