#include "gvmf/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gvmf/error.hpp"
#include "optim.hpp"

namespace gvmf {
namespace {

constexpr double kHuge = 1e300;

// Per-sample quantities that make the profile likelihood in (alpha, kappa)
// cheap to evaluate for a fixed mean direction.
class Profile {
 public:
  Profile(Family family, const DirectionSample& sample, const UnitVector& mu)
      : family_(family), d_(sample.dim()), n_(sample.size()) {
    log_abs_.resize(n_);
    sign_.resize(n_);
    const Eigen::VectorXd& m = mu.coords();
    for (Eigen::Index i = 0; i < n_; ++i) {
      const auto x = sample.col(i);
      double v;
      if (family == Family::II) {
        v = 0.5 * (x - m).squaredNorm();
        sign_[i] = 1.0;
      } else {
        v = m.dot(x);
        sign_[i] = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
        if (family == Family::Axial) sign_[i] = 1.0;
        v = std::abs(v);
      }
      log_abs_[i] = v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
    }
  }

  Family family() const { return family_; }
  int dim() const { return d_; }
  Eigen::Index size() const { return n_; }

  /// Sample mean of the kernel term k_alpha(x): (mu'x)^<a>, -((1-mu'x))^a or |mu'x|^a.
  double kernel_mean(double alpha) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n_; ++i)
      if (sign_[i] != 0.0) s += sign_[i] * std::exp(alpha * log_abs_[i]);
    s /= static_cast<double>(n_);
    return family_ == Family::II ? -s : s;
  }

  /// Sample side of the kappa score equation, on the same scale as
  /// moment(p, {alpha, natural kind}).
  double score_statistic(double alpha) const {
    const double k = kernel_mean(alpha);
    return family_ == Family::II ? -std::pow(2.0, alpha) * k : k;
  }

  double mean_loglik(double alpha, double kappa, const QuadratureConfig& cfg) const {
    return log_norm_const(family_, d_, kappa, alpha, cfg).log_magnitude +
           (kappa / alpha) * kernel_mean(alpha);
  }

 private:
  Family family_;
  int d_;
  Eigen::Index n_;
  std::vector<double> log_abs_;
  std::vector<double> sign_;
};

double natural_moment(Family family, const UnitVector& mu, double alpha, double kappa, double beta,
                      const QuadratureConfig& cfg) {
  return moment(GvmfParams(family, alpha, kappa, mu), {beta, natural_moment_kind(family)}, cfg);
}

// Root in kappa of moment(alpha, kappa, beta) = target over the box, searched
// in log kappa. Returns nullopt when the target is outside the attainable range.
std::optional<double> solve_kappa(Family family, const UnitVector& mu, double alpha, double beta,
                                  double target, const ParameterBox& box,
                                  const QuadratureConfig& cfg) {
  auto r = [&](double log_k) {
    return natural_moment(family, mu, alpha, std::exp(log_k), beta, cfg) - target;
  };
  const double a = std::log(box.ratio_min * alpha);
  const double b = std::log(box.ratio_max * alpha);
  const auto root = detail::brent_root(r, a, b, r(a), r(b), 1e-12);
  if (!root) return std::nullopt;
  return std::exp(*root);
}

bool near_edge(double v, double lo, double hi) {
  return std::abs(std::log(v / lo)) < 1e-7 || std::abs(std::log(hi / v)) < 1e-7;
}

UnitVector tangent_step(const UnitVector& base, const Eigen::MatrixXd& tangent_basis,
                        const Eigen::VectorXd& w) {
  const Eigen::VectorXd v = tangent_basis * w;
  const double r = v.norm();
  if (r == 0.0) return base;
  return UnitVector::normalized(Eigen::VectorXd(std::cos(r) * base.coords() + std::sin(r) / r * v));
}

// Orthonormal basis of the complement of mu, as the columns of a d x (d-1) matrix.
Eigen::MatrixXd complement_basis(const UnitVector& mu) {
  const int d = mu.dim();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(mu.coords());
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  return Q.rightCols(d - 1);
}

struct ProfileFit {
  double alpha, kappa, mean_loglik;
  int iterations;
  bool converged;
  std::vector<double> history;
};

ProfileFit profile_search(const Profile& prof, double alpha0, double kappa0,
                          const MleOptions& opts) {
  const auto& box = opts.box;
  Eigen::Vector2d lo(std::log(box.alpha_min), std::log(box.ratio_min));
  Eigen::Vector2d hi(std::log(box.alpha_max), std::log(box.ratio_max));
  auto objective = [&](const Eigen::VectorXd& v) {
    const double a = std::exp(v(0));
    const double k = a * std::exp(v(1));
    try {
      return -prof.mean_loglik(a, k, opts.quadrature);
    } catch (const Error& e) {
      if (!e.is_numeric()) throw;
      return kHuge;
    }
  };
  Eigen::Vector2d x0(std::log(alpha0), std::log(kappa0 / alpha0));
  const auto res = detail::nelder_mead(objective, x0, Eigen::Vector2d(0.3, 0.3), lo, hi, opts.ftol,
                                       opts.max_iterations);
  ProfileFit out;
  out.alpha = std::exp(res.x(0));
  out.kappa = out.alpha * std::exp(res.x(1));
  out.mean_loglik = -res.f;
  out.iterations = res.iterations;
  out.converged = res.converged;
  out.history.reserve(res.history.size());
  for (double f : res.history) out.history.push_back(-f);
  return out;
}

}  // namespace

std::string_view to_string(Estimator e) { return e == Estimator::MLE ? "MLE" : "MoM"; }

std::optional<Estimator> parse_estimator(std::string_view s) {
  if (s == "MLE" || s == "mle") return Estimator::MLE;
  if (s == "MoM" || s == "mom" || s == "MOM") return Estimator::MoM;
  return std::nullopt;
}

double log_likelihood(const GvmfParams& p, const DirectionSample& sample,
                      const QuadratureConfig& cfg) {
  p.validate();
  require(sample.dim() == p.d, ErrorKind::DimensionMismatch, "sample and mu differ in dimension");
  const Eigen::VectorXd ld = log_density(p, sample.points, cfg);
  return ld.sum();
}

UnitVector mean_direction(const DirectionSample& sample) {
  require(!sample.empty(), ErrorKind::EmptyDataset, "sample is empty");
  const Eigen::VectorXd m = sample.points.rowwise().mean();
  require(m.norm() >= 1e-8, ErrorKind::DegenerateMeanDirection,
          "sample mean has norm below 1e-8; the mean direction is undefined");
  return UnitVector::normalized(m);
}

OrientationStats orientation_stats(const DirectionSample& sample) {
  require(!sample.empty(), ErrorKind::EmptyDataset, "sample is empty");
  const double n = static_cast<double>(sample.size());
  OrientationStats s;
  s.T_bar = (sample.points * sample.points.transpose()) / n;
  s.T_bar = 0.5 * (s.T_bar + s.T_bar.transpose()).eval();
  s.V_bar = (s.T_bar * sample.points).cwiseProduct(sample.points).colwise().sum().mean();
  const double trace_sq = (s.T_bar * s.T_bar).trace();
  if (std::abs(s.V_bar - trace_sq) > 1e-12)
    fail(ErrorKind::NonConvergence, "orientation tensor identity V = tr(T^2) violated");
  return s;
}

UnitVector principal_axis(const DirectionSample& sample) {
  const OrientationStats s = orientation_stats(sample);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.T_bar);
  Eigen::VectorXd v = es.eigenvectors().col(s.T_bar.rows() - 1);
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (std::abs(v(j)) > 1e-12) {
      if (v(j) < 0.0) v = -v;
      break;
    }
  }
  return UnitVector::normalized(v);
}

AxialMomentTargets axial_moment_targets(const DirectionSample& sample) {
  const OrientationStats s = orientation_stats(sample);
  const double d = sample.dim();
  const double excess = std::max(0.0, d * s.V_bar - 1.0);
  AxialMomentTargets t;
  t.second = 1.0 / d + std::sqrt((d - 1.0) / d) * std::sqrt(std::max(0.0, s.V_bar - 1.0 / d));
  if (excess <= 0.0) {
    t.fourth = 3.0 / (d * (d + 2.0));
    return t;
  }
  const double c = (1.0 - t.second) / (d - 1.0);
  const Eigen::ArrayXd q = (s.T_bar * sample.points).cwiseProduct(sample.points).colwise().sum();
  t.fourth = (d - 1.0) / excess * (q - c).square().mean();
  return t;
}

FitResult fit_mle(Family family, const DirectionSample& sample,
                  const std::optional<GvmfParams>& init, const MleOptions& opts) {
  require(sample.size() >= 30, ErrorKind::InvalidArgs, "maximum likelihood needs at least 30 points");
  require(sample.dim() >= 2, ErrorKind::InvalidArgs, "dimension d must be >= 2");
  if (init) require(init->family == family && init->d == sample.dim(), ErrorKind::InvalidArgs,
                    "initial parameters do not match the family or dimension");
  const auto& box = opts.box;
  const auto& cfg = opts.quadrature;

  UnitVector mu = family == Family::Axial ? principal_axis(sample) : mean_direction(sample);
  Profile prof(family, sample, mu);

  double alpha0 = 1.0, kappa0 = 1.0;
  if (init) {
    alpha0 = std::clamp(init->alpha, box.alpha_min, box.alpha_max);
    kappa0 = std::clamp(init->kappa, box.ratio_min * alpha0, box.ratio_max * alpha0);
  } else if (auto k = solve_kappa(family, mu, 1.0, 1.0, prof.score_statistic(1.0), box, cfg)) {
    kappa0 = *k;
  }

  ProfileFit pf = profile_search(prof, alpha0, kappa0, opts);
  int iterations = pf.iterations;
  bool converged = pf.converged;
  std::vector<double> history = pf.history;

  if (opts.refine_direction) {
    const int d = sample.dim();
    const Eigen::MatrixXd basis = complement_basis(mu);
    const int dim = d + 1;
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(dim), lo(dim), hi(dim), step(dim);
    x0(0) = std::log(pf.alpha);
    x0(1) = std::log(pf.kappa / pf.alpha);
    lo(0) = std::log(box.alpha_min);
    hi(0) = std::log(box.alpha_max);
    lo(1) = std::log(box.ratio_min);
    hi(1) = std::log(box.ratio_max);
    step(0) = step(1) = 0.05;
    for (int j = 2; j < dim; ++j) {
      lo(j) = -0.5;
      hi(j) = 0.5;
      step(j) = 0.01;
    }
    auto objective = [&](const Eigen::VectorXd& v) {
      const double a = std::exp(v(0));
      const double k = a * std::exp(v(1));
      const UnitVector m = tangent_step(mu, basis, v.tail(d - 1));
      try {
        return -Profile(family, sample, m).mean_loglik(a, k, cfg);
      } catch (const Error& e) {
        if (!e.is_numeric()) throw;
        return kHuge;
      }
    };
    const auto res = detail::nelder_mead(objective, x0, step, lo, hi, opts.ftol, opts.max_iterations);
    if (-res.f >= pf.mean_loglik) {
      mu = tangent_step(mu, basis, res.x.tail(d - 1));
      prof = Profile(family, sample, mu);
      pf.alpha = std::exp(res.x(0));
      pf.kappa = pf.alpha * std::exp(res.x(1));
    }
    iterations += res.iterations;
    converged = converged && res.converged;
    for (double f : res.history) history.push_back(-f);
  }

  FitResult out;
  out.method = Estimator::MLE;
  out.iterations = iterations;
  out.objective_history = std::move(history);
  double alpha = pf.alpha, kappa = pf.kappa;

  const double stat = prof.score_statistic(alpha);
  if (auto k = solve_kappa(family, mu, alpha, alpha, stat, box, cfg)) kappa = *k;
  out.on_boundary = near_edge(alpha, box.alpha_min, box.alpha_max) ||
                    near_edge(kappa / alpha, box.ratio_min, box.ratio_max);
  out.params = GvmfParams(family, alpha, kappa, mu);
  out.score_residual = natural_moment(family, mu, alpha, kappa, alpha, cfg) - stat;
  out.loglik = prof.mean_loglik(alpha, kappa, cfg) * static_cast<double>(sample.size());
  out.converged = converged;
  if (!converged) out.diagnostic = "simplex search hit the iteration limit";
  if (!out.on_boundary && std::abs(out.score_residual) > opts.score_tolerance) {
    out.converged = false;
    out.diagnostic = "kappa score equation not satisfied at the optimum (residual " +
                     std::to_string(out.score_residual) + ")";
  }
  return out;
}

FitResult fit_mom(Family family, const DirectionSample& sample, const MomOptions& opts) {
  require(sample.size() >= 2, ErrorKind::InvalidArgs, "method of moments needs at least 2 points");
  const auto& box = opts.box;
  const auto& cfg = opts.quadrature;
  const int d = sample.dim();

  UnitVector mu = UnitVector::basis(d, 0);
  double beta1 = 0, beta2 = 0, target1 = 0, target2 = 0;
  switch (family) {
    case Family::I: {
      const Eigen::VectorXd m = sample.points.rowwise().mean();
      mu = mean_direction(sample);
      beta1 = 1.0;
      target1 = m.norm();
      beta2 = 0.0;
      const Eigen::ArrayXd proj = (m.transpose() * sample.points).transpose().array();
      target2 = proj.sign().mean();
      break;
    }
    case Family::II: {
      mu = mean_direction(sample);
      const double r = sample.points.rowwise().mean().norm();
      beta1 = 1.0;
      target1 = 2.0 * (1.0 - r);
      beta2 = 2.0;
      const Eigen::ArrayXd sq = (sample.points.colwise() - mu.coords()).colwise().squaredNorm();
      target2 = sq.square().mean();
      break;
    }
    case Family::Axial: {
      mu = principal_axis(sample);
      const AxialMomentTargets t = axial_moment_targets(sample);
      beta1 = 2.0;
      target1 = t.second;
      beta2 = 4.0;
      target2 = t.fourth;
      break;
    }
  }

  struct GridPoint {
    double alpha;
    std::optional<double> kappa;
    double r2 = 0.0;
  };
  auto eval_alpha = [&](double alpha) {
    GridPoint g{alpha, solve_kappa(family, mu, alpha, beta1, target1, box, cfg)};
    if (g.kappa) g.r2 = natural_moment(family, mu, alpha, *g.kappa, beta2, cfg) - target2;
    return g;
  };

  const int n_grid = std::max(2, opts.alpha_grid);
  std::vector<GridPoint> grid;
  grid.reserve(n_grid);
  const double la = std::log(box.alpha_min), lb = std::log(box.alpha_max);
  for (int i = 0; i < n_grid; ++i) grid.push_back(eval_alpha(std::exp(la + (lb - la) * i / (n_grid - 1))));

  int bracket = -1;
  double bracket_score = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < n_grid; ++i) {
    const auto& a = grid[i];
    const auto& b = grid[i + 1];
    if (!a.kappa || !b.kappa) continue;
    if ((a.r2 > 0.0) == (b.r2 > 0.0) && a.r2 != 0.0 && b.r2 != 0.0) continue;
    const double score = std::abs(a.r2) + std::abs(b.r2);
    if (score < bracket_score) {
      bracket_score = score;
      bracket = i;
    }
  }

  FitResult out;
  out.method = Estimator::MoM;
  out.iterations = n_grid;
  double alpha = 1.0, kappa = box.ratio_min;
  if (bracket >= 0) {
    auto r2 = [&](double log_a) {
      const GridPoint g = eval_alpha(std::exp(log_a));
      return g.kappa ? g.r2 : std::numeric_limits<double>::quiet_NaN();
    };
    const auto root = detail::brent_root(r2, std::log(grid[bracket].alpha),
                                         std::log(grid[bracket + 1].alpha), grid[bracket].r2,
                                         grid[bracket + 1].r2, 1e-12);
    const GridPoint g = eval_alpha(std::exp(*root));
    if (g.kappa && std::isfinite(g.r2)) {
      alpha = g.alpha;
      kappa = *g.kappa;
      out.score_residual = g.r2;
      out.converged = true;
    }
  }
  if (!out.converged) {
    // Best grid point, for diagnostics only.
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : grid) {
      if (g.kappa && std::abs(g.r2) < best) {
        best = std::abs(g.r2);
        alpha = g.alpha;
        kappa = *g.kappa;
        out.score_residual = g.r2;
      }
    }
    if (!std::isfinite(best)) {
      // The first equation has no root either: report the box edge it points to.
      const double r_lo = natural_moment(family, mu, 1.0, box.ratio_min, beta1, cfg) - target1;
      kappa = r_lo > 0.0 ? box.ratio_min : box.ratio_max;
    }
    out.diagnostic = std::string(to_string(ErrorKind::NoRootInBox)) +
                     ": moment equations have no sign change inside the parameter box";
  }
  out.params = GvmfParams(family, alpha, kappa, mu);
  out.on_boundary = near_edge(alpha, box.alpha_min, box.alpha_max) ||
                    near_edge(kappa / alpha, box.ratio_min, box.ratio_max);
  out.loglik = Profile(family, sample, mu).mean_loglik(alpha, kappa, cfg) *
               static_cast<double>(sample.size());
  return out;
}

FitResult fit(Estimator method, Family family, const DirectionSample& sample) {
  return method == Estimator::MLE ? fit_mle(family, sample) : fit_mom(family, sample);
}

}  // namespace gvmf
