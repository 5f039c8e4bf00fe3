#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "gvmf/inference.hpp"
#include "gvmf/knn.hpp"
#include "gvmf/model.hpp"
#include "gvmf/rng.hpp"
#include "gvmf/sampling.hpp"

namespace gvmf {

struct GofConfig {
  Family family = Family::I;
  int k = 3;
  int n_null_replicates = 500;
  double beta_level = 0.05;
  Estimator estimator = Estimator::MLE;
  SeedSpec seed{};
  /// Largest tolerated fraction of null replicates whose fit fails.
  double max_dropped_fraction = 0.02;

  void validate() const;
};

/// Plug-in model entropy at the fitted parameters minus the nearest-neighbour
/// estimate. UnconvergedFit when the fit did not converge.
double test_statistic(Family family, const FitResult& fitted, const EntropyEstimate& entropy,
                      const QuadratureConfig& cfg = {});

/// Fit, entropy estimate and statistic for one sample.
struct StatisticEvaluation {
  FitResult fitted;
  EntropyEstimate entropy;
  double statistic = 0.0;
};
StatisticEvaluation evaluate_statistic(const DirectionSample& sample, Family family, int k,
                                       Estimator estimator);

/// Monte-Carlo null distribution of |T| for samples of size n.
struct NullDistribution {
  std::vector<double> abs_statistics;  // sorted ascending
  int requested = 0;
  int dropped = 0;
  double critical_value = 0.0;
};

/// Order statistic at ceil((1 - beta)(R + 1)), clamped to [1, R].
double quantile_critical_value(const std::vector<double>& sorted, double beta_level);

NullDistribution simulate_null(const GvmfParams& params, Eigen::Index n, const GofConfig& cfg);

double null_critical_value(Family family, double alpha, double kappa, Eigen::Index n,
                           const GofConfig& cfg, int d = 3);

struct GofResult {
  double statistic = 0.0;
  double critical_value = 0.0;
  double p_value = 1.0;
  bool reject = false;
  FitResult fitted;
  EntropyEstimate entropy;
  int null_replicates = 0;
  int null_dropped = 0;
};

/// (1 + #{|T_r| >= |t|}) / (R + 1).
double bootstrap_p_value(const std::vector<double>& sorted_abs, double statistic);

/// Parametric bootstrap test at the fitted parameters and the sample's size.
GofResult run_gof_test(const DirectionSample& sample, const GofConfig& cfg);

/// Same test against a null distribution computed elsewhere.
GofResult run_gof_test(const DirectionSample& sample, const GofConfig& cfg,
                       const NullDistribution& null);

enum class PowerScenario { TypeI_FB, Axial_FB };

std::string_view to_string(PowerScenario s);
std::optional<PowerScenario> parse_power_scenario(std::string_view s);

/// Fisher-Bingham alternative number j of a scenario:
///   TypeI_FB : exp(3 mu1'x + 0.35 j (mu2'x)^2)
///   Axial_FB : exp(0.05 j mu1'x + 6 (mu2'x)^2)
/// with mu1 = (1,0,0) and mu2 = (0, 1/sqrt2, 1/sqrt2).
FisherBinghamParams power_alternative(PowerScenario s, int j);

Family null_family(PowerScenario s);

struct PowerRow {
  int j = 0;
  int replicates = 0;
  int rejections = 0;
  int dropped = 0;
  double power = 0.0;
  double standard_error = 0.0;
  double acceptance_rate = 0.0;
};

/// Rejection rate per alternative. With a fixed critical value the rule is
/// |T| > critical; otherwise each replicate runs the full bootstrap test.
std::vector<PowerRow> power_study(PowerScenario scenario, const std::vector<int>& j_values,
                                  Eigen::Index n, int replicates, const GofConfig& cfg,
                                  std::optional<double> fixed_critical_value);

}  // namespace gvmf
