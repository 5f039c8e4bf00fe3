#include "gvmf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "gvmf/error.hpp"

namespace gvmf {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> log_weights;
};

GaussLegendreRule make_rule(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.log_weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.log_weights[i] = rule.log_weights[n - 1 - i] = std::log(w);
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

const GaussLegendreRule& rule_for(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendreRule>(make_rule(n));
  return *slot;
}

double log_sum(const double* v, std::size_t n) {
  double m = kNegInf;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, v[i]);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

/// log |exp(a) - exp(b)|
double log_abs_diff(double a, double b) {
  if (a == b) return kNegInf;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  if (lo == kNegInf) return hi;
  return hi + std::log(-std::expm1(lo - hi));
}

/// Maps the working variable t of a panel onto the original interval and
/// supplies log(dy/dt).
class Substitution {
 public:
  Substitution(double lo, double hi, double exp_lo, double exp_hi)
      : lo_(lo), hi_(hi), len_(hi - lo), log_len_(std::log(hi - lo)) {
    const double worst = std::min(exp_lo, exp_hi);
    if (worst >= -0.5) {
      trig_ = true;
      t_end_ = std::numbers::pi;
    } else {
      trig_ = false;
      order_ = std::max(2.0, std::ceil(1.0 / (1.0 + worst)));
      t_end_ = 1.0;
    }
  }

  double t_end() const { return t_end_; }

  IntervalPoint point(double t, double& log_jacobian) const {
    IntervalPoint p;
    if (trig_) {
      const double s = std::sin(0.5 * t);
      const double c = std::cos(0.5 * t);
      p.from_lo = len_ * s * s;
      p.to_hi = len_ * c * c;
      log_jacobian = log_len_ + std::log(s) + std::log(c);
    } else {
      const double lt = order_ * std::log(t);
      const double lu = order_ * std::log1p(-t);
      const double lden = log_add(lt, lu);
      p.from_lo = std::exp(log_len_ + lt - lden);
      p.to_hi = std::exp(log_len_ + lu - lden);
      log_jacobian = log_len_ + std::log(order_) + (order_ - 1.0) * (std::log(t) + std::log1p(-t)) -
                     2.0 * lden;
    }
    p.y = p.from_lo <= p.to_hi ? lo_ + p.from_lo : hi_ - p.to_hi;
    return p;
  }

 private:
  double lo_, hi_, len_, log_len_;
  bool trig_ = true;
  double order_ = 2.0;
  double t_end_ = 1.0;
};

struct Panel {
  double a, b;
  double log_whole;
  double log_left, log_right;
  double log_halves;
  double log_err;
};

class Engine {
 public:
  Engine(const LogIntegrand& f, const Substitution& sub, const GaussLegendreRule& rule)
      : f_(f), sub_(sub), rule_(rule), buf_(rule.nodes.size()) {}

  double apply(double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const double log_half = std::log(half);
    for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
      const double t = mid + half * rule_.nodes[i];
      double log_jac = 0.0;
      const IntervalPoint p = sub_.point(t, log_jac);
      const double lf = f_(p);
      if (std::isnan(lf) || lf == std::numeric_limits<double>::infinity())
        fail(ErrorKind::NonConvergence, "integrand is not finite at y = " + std::to_string(p.y));
      buf_[i] = lf + log_jac + rule_.log_weights[i] + log_half;
    }
    return log_sum(buf_.data(), buf_.size());
  }

  Panel make_panel(double a, double b, double log_whole) {
    Panel p{a, b, log_whole, 0, 0, 0, 0};
    const double m = 0.5 * (a + b);
    p.log_left = apply(a, m);
    p.log_right = apply(m, b);
    p.log_halves = log_add(p.log_left, p.log_right);
    // Floor the estimate at a few ulps of the value so a tolerance below
    // round-off reports non-convergence instead of looping.
    p.log_err = std::max(log_abs_diff(p.log_whole, p.log_halves), p.log_halves + std::log(4e-16));
    return p;
  }

 private:
  const LogIntegrand& f_;
  const Substitution& sub_;
  const GaussLegendreRule& rule_;
  std::vector<double> buf_;
};

}  // namespace

void QuadratureConfig::validate() const {
  require(rel_tol > 0.0, ErrorKind::InvalidArgs, "rel_tol must be positive");
  require(abs_tol >= 0.0, ErrorKind::InvalidArgs, "abs_tol must be >= 0");
  require(max_subdivisions >= 1, ErrorKind::InvalidArgs, "max_subdivisions must be >= 1");
  require(base_rule_order >= 2, ErrorKind::InvalidArgs, "base_rule_order must be >= 2");
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

LogScaledValue integrate_on_interval(const LogIntegrand& log_f, double lo, double hi,
                                     double singular_exponent_lo, double singular_exponent_hi,
                                     const QuadratureConfig& cfg) {
  cfg.validate();
  require(lo < hi, ErrorKind::InvalidArgs, "integration interval must satisfy lo < hi");
  require(singular_exponent_lo > -1.0 && singular_exponent_hi > -1.0,
          ErrorKind::SingularEndpoint, "endpoint exponent must exceed -1");

  const Substitution sub(lo, hi, singular_exponent_lo, singular_exponent_hi);
  Engine engine(log_f, sub, rule_for(cfg.base_rule_order));

  std::vector<Panel> panels;
  panels.push_back(engine.make_panel(0.0, sub.t_end(), engine.apply(0.0, sub.t_end())));

  const double log_rel = std::log(cfg.rel_tol);
  const double log_abs = cfg.abs_tol > 0.0 ? std::log(cfg.abs_tol) : kNegInf;
  int subdivisions = 0;
  for (;;) {
    double total = kNegInf, err = kNegInf;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total = log_add(total, panels[i].log_halves);
      err = log_add(err, panels[i].log_err);
      if (panels[i].log_err > panels[worst].log_err) worst = i;
    }
    if (err <= log_rel + total || (cfg.abs_tol > 0.0 && err <= log_abs)) return LogScaledValue::from_log(total);
    if (subdivisions >= cfg.max_subdivisions)
      fail(ErrorKind::NonConvergence,
           "adaptive quadrature exhausted " + std::to_string(cfg.max_subdivisions) +
               " subdivisions (relative error estimate " + std::to_string(std::exp(err - total)) +
               ")");
    const Panel parent = panels[worst];
    const double m = 0.5 * (parent.a + parent.b);
    panels[worst] = engine.make_panel(parent.a, m, parent.log_left);
    panels.push_back(engine.make_panel(m, parent.b, parent.log_right));
    ++subdivisions;
  }
}

LogScaledValue integrate_on_interval(const std::function<double(double)>& log_f, double lo,
                                     double hi, double singular_exponent_lo,
                                     double singular_exponent_hi, const QuadratureConfig& cfg) {
  const LogIntegrand wrapped = [&log_f](const IntervalPoint& p) { return log_f(p.y); };
  return integrate_on_interval(wrapped, lo, hi, singular_exponent_lo, singular_exponent_hi, cfg);
}

void AIntegralArgs::validate() const {
  require(d >= 2, ErrorKind::InvalidArgs, "dimension d must be >= 2");
  require(alpha > 0.0 && std::isfinite(alpha), ErrorKind::InvalidArgs, "alpha must be > 0");
  require(beta >= 0.0 && std::isfinite(beta), ErrorKind::InvalidArgs, "beta must be >= 0");
  require(std::isfinite(kappa), ErrorKind::InvalidArgs, "kappa must be finite");
  require(kind == AKind::A1 || kappa >= 0.0, ErrorKind::InvalidArgs, "A2 requires kappa >= 0");
}

LogScaledValue integrate_A(const AIntegralArgs& args, const QuadratureConfig& cfg) {
  args.validate();
  const double w = 0.5 * (args.d - 3);
  const double rate = args.kappa / args.alpha;
  const double alpha = args.alpha;
  const double beta = args.beta;

  if (args.kind == AKind::A1) {
    const LogIntegrand f = [=](const IntervalPoint& p) {
      const double log_y = std::log(p.from_lo);
      double v = rate == 0.0 ? 0.0 : rate * std::exp(alpha * log_y);
      if (beta != 0.0) v += beta * log_y;
      if (w != 0.0) v += w * (std::log(p.to_hi) + std::log1p(p.y));
      return v;
    };
    return integrate_on_interval(f, 0.0, 1.0, beta, w, cfg);
  }
  const double lo_exp = w + beta;
  const LogIntegrand f = [=](const IntervalPoint& p) {
    const double log_y = std::log(p.from_lo);
    double v = rate == 0.0 ? 0.0 : -rate * std::exp(alpha * log_y);
    if (lo_exp != 0.0) v += lo_exp * log_y;
    if (w != 0.0) v += w * std::log(p.to_hi);
    return v;
  };
  return integrate_on_interval(f, 0.0, 2.0, lo_exp, w, cfg);
}

double log_zonal_factor(int d) {
  require(d >= 2, ErrorKind::InvalidArgs, "dimension d must be >= 2");
  const double h = 0.5 * (d - 1);
  return std::log(2.0) + h * std::log(std::numbers::pi) - std::lgamma(h);
}

double log_sphere_area(int d) {
  require(d >= 1, ErrorKind::InvalidArgs, "dimension d must be >= 1");
  const double h = 0.5 * d;
  return std::log(2.0) + h * std::log(std::numbers::pi) - std::lgamma(h);
}

LogScaledValue log_norm_const(Family family, int d, double kappa, double alpha,
                              const QuadratureConfig& cfg) {
  require(kappa >= 0.0, ErrorKind::InvalidArgs, "kappa must be >= 0");
  const double zonal = log_zonal_factor(d);
  double log_mass = 0.0;
  switch (family) {
    case Family::I:
      log_mass = zonal + log_add(log_A1(d, kappa, alpha, 0.0, cfg), log_A1(d, -kappa, alpha, 0.0, cfg));
      break;
    case Family::II:
      log_mass = zonal + log_A2(d, kappa, alpha, 0.0, cfg);
      break;
    case Family::Axial:
      log_mass = std::log(2.0) + zonal + log_A1(d, kappa, alpha, 0.0, cfg);
      break;
  }
  return LogScaledValue::from_log(-log_mass);
}

}  // namespace gvmf
