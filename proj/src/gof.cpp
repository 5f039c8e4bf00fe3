#include "gvmf/gof.hpp"

#include <algorithm>
#include <cmath>

#include "gvmf/error.hpp"
#include "gvmf/parallel.hpp"
#include "gvmf/sampling.hpp"

namespace gvmf {

void GofConfig::validate() const {
  require(k >= 1, ErrorKind::InvalidArgs, "k must be >= 1");
  require(n_null_replicates >= 100, ErrorKind::InvalidArgs,
          "at least 100 null replicates are required");
  require(beta_level > 0.0 && beta_level < 1.0, ErrorKind::InvalidArgs,
          "significance level must lie in (0, 1)");
  require(max_dropped_fraction >= 0.0 && max_dropped_fraction < 1.0, ErrorKind::InvalidArgs,
          "max_dropped_fraction must lie in [0, 1)");
}

double test_statistic(Family family, const FitResult& fitted, const EntropyEstimate& entropy,
                      const QuadratureConfig& cfg) {
  require(fitted.params.family == family, ErrorKind::InvalidArgs,
          "fitted parameters belong to a different family");
  if (!fitted.converged)
    fail(ErrorKind::UnconvergedFit, "fit did not converge: " + fitted.diagnostic);
  return gvmf::entropy(fitted.params, cfg) - entropy.value;
}

StatisticEvaluation evaluate_statistic(const DirectionSample& sample, Family family, int k,
                                       Estimator estimator) {
  StatisticEvaluation ev;
  ev.fitted = fit(estimator, family, sample);
  ev.entropy = estimate_entropy(sample, k);
  ev.statistic = test_statistic(family, ev.fitted, ev.entropy);
  return ev;
}

double quantile_critical_value(const std::vector<double>& sorted, double beta_level) {
  require(!sorted.empty(), ErrorKind::InvalidArgs, "empty null distribution");
  const double r = static_cast<double>(sorted.size());
  auto idx = static_cast<std::size_t>(std::ceil((1.0 - beta_level) * (r + 1.0)));
  idx = std::clamp<std::size_t>(idx, 1, sorted.size());
  return sorted[idx - 1];
}

NullDistribution simulate_null(const GvmfParams& params, Eigen::Index n, const GofConfig& cfg) {
  cfg.validate();
  params.validate();
  require(n > cfg.k, ErrorKind::InvalidArgs, "sample size must exceed k");
  const MarginalTable table = build_marginal_table(params);
  const int R = cfg.n_null_replicates;
  std::vector<double> stats(R);
  std::vector<char> ok(R, 0);
  parallel_for(static_cast<std::size_t>(R), [&](std::size_t r) {
    Rng rng(cfg.seed.child(r));
    const DirectionSample s = sample_gvmf(params, table, rng, static_cast<std::size_t>(n));
    try {
      stats[r] = std::abs(evaluate_statistic(s, params.family, cfg.k, cfg.estimator).statistic);
      ok[r] = 1;
    } catch (const Error& e) {
      if (!e.is_numeric()) throw;
    }
  });
  NullDistribution out;
  out.requested = R;
  for (int r = 0; r < R; ++r) {
    if (ok[r]) out.abs_statistics.push_back(stats[r]);
    else ++out.dropped;
  }
  if (out.dropped > cfg.max_dropped_fraction * R)
    fail(ErrorKind::UnconvergedFit, std::to_string(out.dropped) + " of " + std::to_string(R) +
                                        " null replicates failed to fit");
  std::sort(out.abs_statistics.begin(), out.abs_statistics.end());
  out.critical_value = quantile_critical_value(out.abs_statistics, cfg.beta_level);
  return out;
}

double null_critical_value(Family family, double alpha, double kappa, Eigen::Index n,
                           const GofConfig& cfg, int d) {
  const GvmfParams p(family, alpha, kappa, UnitVector::basis(d, d - 1));
  return simulate_null(p, n, cfg).critical_value;
}

double bootstrap_p_value(const std::vector<double>& sorted_abs, double statistic) {
  const double t = std::abs(statistic);
  const auto it = std::lower_bound(sorted_abs.begin(), sorted_abs.end(), t);
  const double exceed = static_cast<double>(sorted_abs.end() - it);
  return (1.0 + exceed) / (static_cast<double>(sorted_abs.size()) + 1.0);
}

namespace {

GofResult assemble(const StatisticEvaluation& ev, const NullDistribution& null) {
  GofResult res;
  res.statistic = ev.statistic;
  res.fitted = ev.fitted;
  res.entropy = ev.entropy;
  res.critical_value = null.critical_value;
  res.p_value = bootstrap_p_value(null.abs_statistics, ev.statistic);
  res.reject = std::abs(ev.statistic) >= null.critical_value;
  res.null_replicates = static_cast<int>(null.abs_statistics.size());
  res.null_dropped = null.dropped;
  return res;
}

}  // namespace

GofResult run_gof_test(const DirectionSample& sample, const GofConfig& cfg,
                       const NullDistribution& null) {
  cfg.validate();
  return assemble(evaluate_statistic(sample, cfg.family, cfg.k, cfg.estimator), null);
}

GofResult run_gof_test(const DirectionSample& sample, const GofConfig& cfg) {
  cfg.validate();
  const StatisticEvaluation ev = evaluate_statistic(sample, cfg.family, cfg.k, cfg.estimator);
  return assemble(ev, simulate_null(ev.fitted.params, sample.size(), cfg));
}

std::string_view to_string(PowerScenario s) {
  return s == PowerScenario::TypeI_FB ? "TypeI_FB" : "Axial_FB";
}

std::optional<PowerScenario> parse_power_scenario(std::string_view s) {
  if (s == "TypeI_FB" || s == "I" || s == "typeI_FB") return PowerScenario::TypeI_FB;
  if (s == "Axial_FB" || s == "Axial" || s == "axial_FB") return PowerScenario::Axial_FB;
  return std::nullopt;
}

Family null_family(PowerScenario s) {
  return s == PowerScenario::TypeI_FB ? Family::I : Family::Axial;
}

FisherBinghamParams power_alternative(PowerScenario s, int j) {
  FisherBinghamParams fb;
  fb.d = 3;
  fb.mu1 = UnitVector::basis(3, 0);
  fb.mu2 = UnitVector::normalized(Eigen::Vector3d(0.0, 1.0, 1.0));
  if (s == PowerScenario::TypeI_FB) {
    fb.kappa1 = 3.0;
    fb.beta2 = 0.35 * j;
  } else {
    fb.kappa1 = 0.05 * j;
    fb.beta2 = 6.0;
  }
  return fb;
}

std::vector<PowerRow> power_study(PowerScenario scenario, const std::vector<int>& j_values,
                                  Eigen::Index n, int replicates, const GofConfig& cfg,
                                  std::optional<double> fixed_critical_value) {
  require(replicates >= 1, ErrorKind::InvalidArgs, "replicates must be >= 1");
  require(n > cfg.k, ErrorKind::InvalidArgs, "sample size must exceed k");
  GofConfig c = cfg;
  c.family = null_family(scenario);
  if (!fixed_critical_value) c.validate();
  std::vector<PowerRow> rows;
  for (int j : j_values) {
    require(j >= 0, ErrorKind::InvalidArgs, "alternative index j must be >= 0");
    const FisherBinghamParams fb = power_alternative(scenario, j);
    std::vector<signed char> outcome(replicates, -1);
    std::vector<double> acceptance(replicates, 0.0);
    const SeedSpec js = cfg.seed.child(static_cast<std::uint64_t>(j));
    parallel_for(static_cast<std::size_t>(replicates), [&](std::size_t r) {
      Rng rng(js.child(r));
      const FisherBinghamDraw draw = sample_fisher_bingham(fb, rng, static_cast<std::size_t>(n));
      acceptance[r] = draw.acceptance_rate;
      try {
        if (fixed_critical_value) {
          const auto ev = evaluate_statistic(draw.sample, c.family, c.k, c.estimator);
          outcome[r] = std::abs(ev.statistic) > *fixed_critical_value ? 1 : 0;
        } else {
          GofConfig rc = c;
          rc.seed = js.child(r).child(0x5EEDULL);
          outcome[r] = run_gof_test(draw.sample, rc).reject ? 1 : 0;
        }
      } catch (const Error& e) {
        if (!e.is_numeric()) throw;
      }
    });
    PowerRow row;
    row.j = j;
    double acc = 0.0;
    for (int r = 0; r < replicates; ++r) {
      acc += acceptance[r];
      if (outcome[r] < 0) {
        ++row.dropped;
        continue;
      }
      ++row.replicates;
      row.rejections += outcome[r];
    }
    row.acceptance_rate = acc / replicates;
    if (row.replicates > 0) {
      row.power = static_cast<double>(row.rejections) / row.replicates;
      row.standard_error = std::sqrt(row.power * (1.0 - row.power) / row.replicates);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gvmf
