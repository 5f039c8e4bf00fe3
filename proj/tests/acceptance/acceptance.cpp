// Acceptance checks. Run with criterion numbers as arguments (default: all);
// prints one PASS/FAIL line per criterion and exits nonzero on any failure.

#include <Eigen/Geometry>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "gvmf/gof.hpp"
#include "gvmf/inference.hpp"
#include "gvmf/io.hpp"
#include "gvmf/knn.hpp"
#include "gvmf/model.hpp"
#include "gvmf/parallel.hpp"
#include "gvmf/quadrature.hpp"
#include "gvmf/sampling.hpp"

using namespace gvmf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const UnitVector kNorth = UnitVector::basis(3, 2);

DirectionSample draw(const GvmfParams& p, const SeedSpec& seed, std::size_t n) {
  Rng rng(seed);
  return sample_gvmf(p, rng, n);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

// ---------------------------------------------------------------------------
// 1. Moment integrals against a composite Simpson rule on 10^6 + 1 nodes.
//
// The oracle works in s = sqrt(y). For odd d and half-integer alpha every
// factor of the transformed integrand is a polynomial or an exponential of
// one, so Simpson converges at its full fourth order.

double simpson_log(const std::function<double(double)>& log_f, double hi, double shift) {
  const long n = 1000000;
  const double h = hi / n;
  long double s = 0.0L;
  for (long i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * std::exp(log_f(i * h) - shift);
  }
  return shift + std::log(static_cast<double>(s * h / 3.0L));
}

double oracle_A1(int d, double kappa, double alpha, double beta) {
  const double rate = kappa / alpha;
  const int p = static_cast<int>(std::lround(2 * alpha));
  const double q = 0.5 * (d - 3);
  auto f = [&](double s) {
    if (s == 0.0) return -std::numeric_limits<double>::infinity();
    const double y = s * s;
    const double poly = std::pow(s, 2 * beta + 1) * std::pow((1 - y) * (1 + y), q);
    return rate * std::pow(s, p) + std::log(2 * poly);
  };
  return simpson_log(f, 1.0, std::max(rate, 0.0));
}

double oracle_A2(int d, double kappa, double alpha, double beta) {
  const double rate = kappa / alpha;
  const int p = static_cast<int>(std::lround(2 * alpha));
  const double q = 0.5 * (d - 3);
  auto f = [&](double s) {
    const double y = s * s;
    const double poly = std::pow(2 - y, q) * std::pow(s, d - 3 + 2 * beta + 1);
    return -rate * std::pow(s, p) + std::log(2 * poly);
  };
  return simpson_log(f, std::sqrt(2.0), 0.0);
}

Outcome criterion_1() {
  struct Point {
    int d;
    double alpha, kappa, beta;
  };
  std::vector<Point> grid;
  for (int d : {3, 5})
    for (double a : {0.5, 1.0, 1.5, 2.0, 3.0})
      for (double k : {0.5, 2.0, 10.0, 40.0, 120.0})
        for (double b : {0.0, 1.0, 2.0, 4.0}) grid.push_back({d, a, k, b});

  // Library pass, timed on its own.
  std::vector<double> lib(3 * grid.size());
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point& g = grid[i];
    lib[3 * i] = log_A1(g.d, g.kappa, g.alpha, g.beta);
    lib[3 * i + 1] = log_A1(g.d, -g.kappa, g.alpha, g.beta);
    lib[3 * i + 2] = log_A2(g.d, g.kappa, g.alpha, g.beta);
  }
  const double lib_seconds = seconds_since(t0);

  std::vector<double> worst(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t i) {
    const Point& g = grid[i];
    const double ref[3] = {oracle_A1(g.d, g.kappa, g.alpha, g.beta), oracle_A1(g.d, -g.kappa, g.alpha, g.beta),
                           oracle_A2(g.d, g.kappa, g.alpha, g.beta)};
    for (int j = 0; j < 3; ++j) worst[i] = std::max(worst[i], std::abs(std::expm1(lib[3 * i + j] - ref[j])));
  });
  const double w = *std::max_element(worst.begin(), worst.end());
  return {w <= 1e-9 && lib_seconds < 10.0,
          fmt("%zu grid points (A1(+k), A1(-k), A2): max rel err %.2e (tol 1e-9); library time %.2f s (< 10 s)",
              grid.size(), w, lib_seconds)};
}

// ---------------------------------------------------------------------------
// 2. vMF normalizing constant at alpha = 1.

Outcome criterion_2() {
  double worst = 0.0;
  for (double k : {0.1, 0.5, 1.0, 2.0, 7.0, 50.0}) {
    const double log_sinh = k + std::log1p(-std::exp(-2 * k)) - std::log(2.0);
    const double ref = std::log(k) - std::log(4 * std::numbers::pi) - log_sinh;
    const double got = log_norm_const(Family::I, 3, k, 1.0).log_magnitude;
    worst = std::max(worst, std::abs(std::expm1(got - ref)));
  }
  return {worst <= 1e-8, fmt("max rel err of c(kappa, 1) vs kappa/(4 pi sinh kappa): %.2e (tol 1e-8)", worst)};
}

// ---------------------------------------------------------------------------
// 3. Sample moments against model moments.

Outcome criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = 100000;
  double worst_z = 0.0;
  std::string worst_case;
  int checks = 0;
  std::uint64_t case_no = 0;
  const UnitVector mu = UnitVector::normalized(Eigen::Vector3d(0.4, -0.2, 0.9));
  for (Family f : {Family::I, Family::II, Family::Axial})
    for (double a : {0.5, 1.5, 3.0})
      for (double k : {0.5, 2.0, 7.0}) {
        const GvmfParams p(f, a, k, mu);
        const DirectionSample s = draw(p, SeedSpec{3, 0}.child(case_no++), n);
        const Eigen::ArrayXd t = (mu.coords().transpose() * s.points).transpose().array();
        for (double b : {1.0, 2.0, 4.0}) {
          Eigen::ArrayXd v(t.size());
          MomentKind kind = natural_moment_kind(f);
          for (Eigen::Index i = 0; i < t.size(); ++i) {
            switch (f) {
              case Family::I: v(i) = signed_pow(t(i), b); break;
              case Family::II: v(i) = std::pow(2.0 * (1.0 - t(i)), b); break;
              case Family::Axial: v(i) = std::pow(std::abs(t(i)), b); break;
            }
          }
          const double m = v.mean();
          const double se = std::sqrt((v - m).square().sum() / (n - 1) / n);
          const double z = std::abs(m - moment(p, {b, kind})) / se;
          ++checks;
          if (z > worst_z) {
            worst_z = z;
            worst_case = fmt("%s a=%.1f k=%.1f beta=%.0f", std::string(to_string(f)).c_str(), a, k, b);
          }
        }
      }
  const double secs = seconds_since(t0);
  return {worst_z <= 4.0 && secs < 120.0,
          fmt("%d moments, n=1e5: max |z| = %.2f (%s), limit 4; %.1f s", checks, worst_z, worst_case.c_str(), secs)};
}

// ---------------------------------------------------------------------------
// 4. kNN entropy on the uniform sphere.

Outcome criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  const GvmfParams uniform(Family::I, 1.0, 0.0, kNorth);
  std::vector<double> h(200);
  parallel_for(h.size(), [&](std::size_t r) {
    h[r] = estimate_entropy(draw(uniform, SeedSpec{4, 0}.child(r), 1000), 3).value;
  });
  const double m = mean(h), v = variance(h), secs = seconds_since(t0);
  return {std::abs(m - 2.531024) <= 0.02 && v <= 0.003 && secs < 60.0,
          fmt("mean %.5f (target 2.531024 +- 0.02), variance %.5f (<= 0.003); %.1f s", m, v, secs)};
}

// ---------------------------------------------------------------------------
// 5. Replicate variance of the estimator for k = 1, 2, 3.

Outcome criterion_5() {
  const GvmfParams p(Family::I, 1.5, 2.0, kNorth);
  const int reps = 200;
  std::vector<std::vector<double>> h(3, std::vector<double>(reps));
  parallel_for(reps, [&](std::size_t r) {
    const DirectionSample s = draw(p, SeedSpec{5, 0}.child(r), 1000);
    for (int k = 1; k <= 3; ++k) h[k - 1][r] = estimate_entropy(s, k).value;
  });
  const double v1 = variance(h[0]), v2 = variance(h[1]), v3 = variance(h[2]);
  const bool band = v1 >= 0.00214 / 2 && v1 <= 0.00388 * 2;
  return {v1 > v2 && v2 > v3 && band,
          fmt("variance k=1 %.5f, k=2 %.5f, k=3 %.5f; decreasing and k=1 in [0.00107, 0.00776]", v1, v2, v3)};
}

// ---------------------------------------------------------------------------
// 6. MSE of the maximum-likelihood shape estimate.

Outcome criterion_6() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    Family f;
    double alpha, kappa, reference;
  };
  const Case cases[] = {{Family::I, 1.0, 2.0, 0.00838}, {Family::II, 1.0, 2.0, 0.00721}, {Family::Axial, 2.0, 4.0, 0.08807}};
  bool ok = true;
  std::string detail;
  std::uint64_t c = 0;
  for (const Case& cs : cases) {
    const GvmfParams p(cs.f, cs.alpha, cs.kappa, kNorth);
    std::vector<double> err(200);
    std::vector<char> conv(200);
    parallel_for(err.size(), [&](std::size_t r) {
      const FitResult fr = fit_mle(cs.f, draw(p, SeedSpec{6, c}.child(r), 1000));
      err[r] = fr.params.alpha - cs.alpha;
      conv[r] = fr.converged;
    });
    ++c;
    double mse = 0.0;
    for (double e : err) mse += e * e;
    mse /= err.size();
    const bool pass = mse >= cs.reference / 2 && mse <= cs.reference * 2;
    ok &= pass;
    detail += fmt("%s MSE %.5f (reference %.5f, %d/200 converged)%s; ", std::string(to_string(cs.f)).c_str(), mse, cs.reference,
                  static_cast<int>(std::count(conv.begin(), conv.end(), 1)), pass ? "" : " OUT OF RANGE");
  }
  return {ok, detail + fmt("%.1f s", seconds_since(t0))};
}

// ---------------------------------------------------------------------------
// 7. Null critical values with R = 500.

Outcome criterion_7() {
  bool ok = true;
  std::string detail;
  const double reference[] = {0.04745, 0.04824, 0.04839};
  int i = 0;
  for (Family f : {Family::I, Family::II, Family::Axial}) {
    GofConfig cfg;
    cfg.family = f;
    cfg.n_null_replicates = 500;
    cfg.seed = SeedSpec{7, static_cast<std::uint64_t>(i)};
    const double crit = null_critical_value(f, 1.5, 2.0, 1000, cfg);
    const bool pass = crit >= 0.042 && crit <= 0.054;
    ok &= pass;
    detail += fmt("%s %.5f (reference %.5f)%s; ", std::string(to_string(f)).c_str(), crit, reference[i++], pass ? "" : " OUT");
  }
  return {ok, detail + "range [0.042, 0.054]"};
}

// ---------------------------------------------------------------------------
// 8. Size under the null with a 100-replicate bootstrap per trial.

Outcome criterion_8() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  std::uint64_t c = 0;
  for (Family f : {Family::I, Family::II, Family::Axial}) {
    const GvmfParams p(f, 1.5, 2.0, kNorth);
    int rejections = 0, failed = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const SeedSpec seed = SeedSpec{8, c}.child(static_cast<std::uint64_t>(trial));
      GofConfig cfg;
      cfg.family = f;
      cfg.n_null_replicates = 100;
      cfg.seed = seed.child(1);
      try {
        rejections += run_gof_test(draw(p, seed.child(0), 1000), cfg).reject;
      } catch (const Error&) {
        ++failed;
      }
    }
    ++c;
    const double rate = static_cast<double>(rejections) / (200 - failed);
    const bool pass = rate >= 0.02 && rate <= 0.09;
    ok &= pass;
    detail += fmt("%s %.3f (%d failed)%s; ", std::string(to_string(f)).c_str(), rate, failed, pass ? "" : " OUT");
  }
  return {ok, detail + fmt("range [0.02, 0.09]; %.0f s", seconds_since(t0))};
}

// ---------------------------------------------------------------------------
// 9. Power against the Type I / Fisher-Bingham alternatives.

Outcome criterion_9() {
  GofConfig cfg;
  cfg.family = Family::I;
  cfg.seed = SeedSpec{9, 0};
  const auto rows = power_study(PowerScenario::TypeI_FB, {1, 5, 10, 15, 20}, 1000, 100, cfg, 0.05373);
  bool monotone = true;
  std::string detail = "power:";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    detail += fmt(" j=%d %.2f", rows[i].j, rows[i].power);
    if (i > 0) {
      const double se = std::hypot(rows[i].standard_error, rows[i - 1].standard_error);
      monotone &= rows[i].power >= rows[i - 1].power - 2 * se;
    }
  }
  const bool end = rows.back().power >= 0.8;
  return {monotone && end, detail + fmt("; nondecreasing within 2 se: %s; j=20 >= 0.8: %s", monotone ? "yes" : "no",
                                        end ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 10. Deterministic property checks.

Outcome criterion_10() {
  std::vector<std::string> failed;
  auto check = [&](bool cond, const char* name) {
    if (!cond) failed.emplace_back(name);
  };
  const Eigen::Matrix3d R = Eigen::AngleAxisd(1.3, Eigen::Vector3d(1, -2, 0.5).normalized()).toRotationMatrix();
  const UnitVector mu = UnitVector::normalized(Eigen::Vector3d(0.3, 0.6, -0.7));
  const UnitVector Rmu(Eigen::Vector3d(R * mu.coords()));

  // Model: density equivariance and axial sign-blindness.
  double worst = 0.0;
  for (Family f : {Family::I, Family::II, Family::Axial}) {
    const GvmfParams p(f, 1.7, 4.0, mu);
    for (int i = 0; i < 50; ++i) {
      const Eigen::Vector3d x = Eigen::Vector3d(std::sin(i), std::cos(3.0 * i), std::sin(7.0 * i + 1)).normalized();
      worst = std::max(worst, std::abs(log_density(p, UnitVector(x)) -
                                       log_density(p.with_mu(Rmu), UnitVector(Eigen::Vector3d(R * x)))));
    }
  }
  check(worst < 1e-12, "density rotation equivariance");
  const GvmfParams ax(Family::Axial, 2.5, 5.0, mu);
  const Eigen::Vector3d x0 = Eigen::Vector3d(0.1, 0.2, 0.3).normalized();
  check(log_density(ax, UnitVector(x0)) == log_density(ax, UnitVector(Eigen::Vector3d(-x0))), "axial density sign-blind");

  // kNN entropy invariance; fit and statistic equivariance.
  for (Family f : {Family::I, Family::II, Family::Axial}) {
    const DirectionSample s = draw(GvmfParams(f, 1.8, 5.0, mu), SeedSpec{10, 0}, 600);
    const DirectionSample rs(R * s.points);
    check(std::abs(estimate_entropy(s, 3).value - estimate_entropy(rs, 3).value) < 1e-12, "knn rotation invariance");
    const auto a = evaluate_statistic(s, f, 3, Estimator::MLE);
    const auto b = evaluate_statistic(rs, f, 3, Estimator::MLE);
    check(std::abs(a.fitted.params.alpha - b.fitted.params.alpha) < 1e-6, "fit rotation equivariance (alpha)");
    check(std::abs((R * a.fitted.params.mu.coords()).dot(b.fitted.params.mu.coords())) > 1 - 1e-10,
          "fit rotation equivariance (mu)");
    check(std::abs(a.statistic - b.statistic) < 1e-7, "statistic rotation invariance");
  }
  {
    const DirectionSample s = draw(ax, SeedSpec{10, 1}, 600);
    const DirectionSample flipped = symmetrize(s, SeedSpec{10, 2});
    const auto a = evaluate_statistic(s, Family::Axial, 3, Estimator::MLE);
    const auto b = evaluate_statistic(flipped, Family::Axial, 3, Estimator::MLE);
    check(std::abs(a.fitted.params.alpha - b.fitted.params.alpha) < 1e-9, "axial fit sign-blind");
  }

  // Normalization on a (theta, phi) product grid with a tilted mu.
  double worst_norm = 0.0;
  for (Family f : {Family::I, Family::II, Family::Axial}) {
    const GvmfParams p(f, 2.0, 3.0, mu);
    const int nt = 800, np = 800;
    double total = 0.0;
    for (int i = 0; i < nt; ++i) {
      const double th = (i + 0.5) * std::numbers::pi / nt;
      Eigen::MatrixXd pts(3, np);
      for (int j = 0; j < np; ++j) {
        const double ph = (j + 0.5) * 2 * std::numbers::pi / np;
        pts.col(j) << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
      }
      total += log_density(p, pts).array().exp().sum() * std::sin(th);
    }
    total *= (std::numbers::pi / nt) * (2 * std::numbers::pi / np);
    worst_norm = std::max(worst_norm, std::abs(total - 1.0));
  }
  check(worst_norm < 1e-5, "normalization integrals");

  // d/dkappa A2 = -(1/alpha) A2(beta + alpha).
  double worst_deriv = 0.0;
  for (double a : {0.5, 1.5, 3.0})
    for (double k : {0.5, 3.0, 20.0}) {
      const double h = 1e-4 * k;
      const double fd = (std::exp(log_A2(3, k + h, a, 1.0)) - std::exp(log_A2(3, k - h, a, 1.0))) / (2 * h);
      const double want = -std::exp(log_A2(3, k, a, 1.0 + a)) / a;
      worst_deriv = std::max(worst_deriv, std::abs(fd / want - 1.0));
    }
  check(worst_deriv < 1e-7, "A2 kappa-derivative identity");

  // Regular tetrahedron: every k-th neighbour distance is the edge length.
  Eigen::MatrixXd tet(3, 4);
  tet << 1, 1, -1, -1, 1, -1, 1, -1, 1, -1, -1, 1;
  const DirectionSample t(tet / std::sqrt(3.0));
  double worst_tet = 0.0;
  for (int k = 1; k <= 3; ++k)
    for (auto s : {NeighborSearch::KdTree, NeighborSearch::BruteForce})
      worst_tet = std::max(worst_tet, (knn_distances(t, k, {s, {}}).array() - std::sqrt(8.0 / 3.0)).abs().maxCoeff());
  check(worst_tet < 1e-15, "tetrahedron kNN distances");

  std::string detail = fmt("density equivariance %.1e, normalization %.1e, derivative identity %.1e, tetrahedron %.1e",
                           worst, worst_norm, worst_deriv, worst_tet);
  for (const auto& f : failed) detail += "; FAILED: " + f;
  return {failed.empty(), detail};
}

// ---------------------------------------------------------------------------
// 11. Block pipeline on a synthetic lattice: one planted Axial block and three
// blocks contaminated with Fisher-Bingham draws, repeated over 50 seeds.

Dataset synthetic_lattice(std::uint64_t seed_no, int block_size, double contamination) {
  const SeedSpec seed{11, seed_no};
  Rng rng(seed.child(0));
  const UnitVector mu = UnitVector::normalized(Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()));
  const GvmfParams planted(Family::Axial, 8.5, 47.6, mu);
  const MarginalTable table = build_marginal_table(planted);
  FisherBinghamParams fb = power_alternative(PowerScenario::Axial_FB, 10);

  const LatticeIndex extent{16, 15, 16};
  const LatticeIndex blocks[] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  Dataset data;
  data.sample.points.resize(3, 4 * block_size);
  Eigen::Index col = 0;
  for (int b = 0; b < 4; ++b) {
    const int n_fb = b == 0 ? 0 : static_cast<int>(std::lround(contamination * block_size));
    Rng brng(seed.child(1 + b));
    const DirectionSample base = sample_gvmf(planted, table, brng, block_size - n_fb);
    data.sample.points.middleCols(col, base.size()) = base.points;
    if (n_fb > 0)
      data.sample.points.middleCols(col + base.size(), n_fb) = sample_fisher_bingham(fb, brng, n_fb).sample.points;
    for (int i = 0; i < block_size; ++i) {
      LatticeIndex idx;
      for (int a = 0; a < 3; ++a)
        idx[a] = 1 + blocks[b][a] * extent[a] + static_cast<long>(brng.uniform() * extent[a]);
      data.lattice.push_back(idx);
    }
    col += block_size;
  }
  data.manifest.has_lattice = true;
  data.manifest.d = 3;
  data.manifest.n_rows = data.lattice.size();
  return data;
}

Outcome criterion_11() {
  const auto t0 = std::chrono::steady_clock::now();
  const int seeds = 50;
  int planted_ok = 0, contaminated = 0, rejected = 0, failed = 0;
  for (int s = 0; s < seeds; ++s) {
    const Dataset data = synthetic_lattice(static_cast<std::uint64_t>(s), 1000, 0.3);
    GofConfig cfg;
    cfg.family = Family::Axial;
    cfg.n_null_replicates = 100;
    cfg.seed = SeedSpec{11, 1000 + static_cast<std::uint64_t>(s)};
    const auto rows = run_block_tests(data, BlockSpec{}, cfg);
    for (const BlockRow& r : rows) {
      if (r.n == 0) continue;
      const bool is_planted = r.start == LatticeIndex{1, 1, 1};
      if (!r.result) {
        ++failed;
        if (!is_planted) ++contaminated;
        continue;
      }
      if (is_planted) {
        planted_ok += r.result->p_value >= 0.05;
      } else {
        ++contaminated;
        rejected += r.result->reject;
      }
    }
  }
  const double planted_rate = static_cast<double>(planted_ok) / seeds;
  const double reject_rate = static_cast<double>(rejected) / contaminated;
  return {planted_rate >= 0.9 && reject_rate >= 0.8,
          fmt("planted block p >= 0.05 in %d/%d seeds (need 90%%); contaminated blocks rejected %d/%d = %.2f (need 0.80); "
              "%d failed blocks; %.0f s",
              planted_ok, seeds, rejected, contaminated, reject_rate, failed, seconds_since(t0))};
}

const char* const kNames[] = {"",
                              "quadrature oracle agreement",
                              "vMF reduction",
                              "sampling moments",
                              "entropy estimator on uniform sphere",
                              "variance-vs-k trend",
                              "estimator MSE spot checks",
                              "null critical values",
                              "size calibration",
                              "power trend",
                              "property suites",
                              "synthetic block pipeline"};

}  // namespace

int main(int argc, char** argv) {
  const std::function<Outcome()> criteria[] = {nullptr,      criterion_1, criterion_2, criterion_3,
                                               criterion_4,  criterion_5, criterion_6, criterion_7,
                                               criterion_8,  criterion_9, criterion_10, criterion_11};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (int i = 1; i <= 11; ++i) which.push_back(i);
  int failures = 0;
  for (int c : which) {
    if (c < 1 || c > 11) {
      std::printf("[FAIL] criterion %d: no such criterion\n", c);
      ++failures;
      continue;
    }
    Outcome o;
    try {
      o = criteria[c]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %d, %s: %s\n", o.pass ? "PASS" : "FAIL", c, kNames[c], o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
