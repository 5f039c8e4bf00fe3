#include "gvmf/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gvmf/error.hpp"
#include "gvmf/quadrature.hpp"

namespace gvmf {
namespace {

constexpr double kPi = std::numbers::pi;

// Log of the unnormalized marginal density of theta = arccos(mu'X).
struct AngleDensity {
  Family family;
  int d;
  double alpha;
  double rate;

  double operator()(double theta) const {
    const double c = std::cos(theta);
    double eta = 0.0;
    if (rate != 0.0) {
      switch (family) {
        case Family::I: eta = rate * signed_pow(c, alpha); break;
        case Family::II: {
          const double s = std::sin(0.5 * theta);
          eta = -rate * std::pow(2.0 * s * s, alpha);
          break;
        }
        case Family::Axial: eta = rate * std::pow(std::abs(c), alpha); break;
      }
    }
    if (d == 2) return eta;
    const double sn = std::sin(theta);
    if (sn <= 0.0) return -std::numeric_limits<double>::infinity();
    return eta + (d - 2) * std::log(sn);
  }
};

// 10-point Gauss-Legendre on [-1, 1].
constexpr double kGLx[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                            0.8650633666889845, 0.9739065285171717};
constexpr double kGLw[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                            0.1494513491505806, 0.0666713443086881};

template <typename F>
double gauss10(const F& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double m = 0.5 * (a + b);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += kGLw[i] * (f(m - h * kGLx[i]) + f(m + h * kGLx[i]));
  return s * h;
}

// Cubic Hermite value at fraction t of an interval of width h.
double hermite(double t, double h, double G0, double G1, double m0, double m1) {
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * G0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * G1 +
         (t3 - t2) * h * m1;
}

double hermite_slope(double t, double h, double G0, double G1, double m0, double m1) {
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * G0 + (-6 * t2 + 6 * t) * G1) / h + (3 * t2 - 4 * t + 1) * m0 +
         (3 * t2 - 2 * t) * m1;
}

struct Node {
  double theta;
  double g;       // normalized density
  double mass;    // integral to the next node
  double left;    // integral over the left half of the interval to the next node
};

}  // namespace

MarginalTable build_marginal_table(Family family, double alpha, double kappa, int d, int n_grid) {
  require(d >= 2, ErrorKind::InvalidArgs, "dimension d must be >= 2");
  require(alpha > 0.0 && std::isfinite(alpha), ErrorKind::InvalidArgs, "alpha must be > 0");
  require(kappa >= 0.0 && std::isfinite(kappa), ErrorKind::InvalidArgs, "kappa must be >= 0");
  require(n_grid >= 3, ErrorKind::InvalidArgs, "n_grid must be >= 3");

  const AngleDensity log_g{family, d, alpha, kappa / alpha};
  const LogScaledValue total = integrate_on_interval(log_g, 0.0, kPi, 0.0, 0.0);
  const double log_total = total.log_magnitude;
  auto g = [&](double th) { return std::exp(log_g(th) - log_total); };

  const double tol = MarginalTable::kCdfTolerance;
  std::vector<Node> nodes;
  nodes.reserve(n_grid * 2);

  // Depth-first refinement of [a, b]; appends nodes for a and interior points.
  auto refine = [&](auto&& self, double a, double b, double ga, double gb, int depth) -> void {
    const double m = 0.5 * (a + b);
    const double whole = gauss10(g, a, b);
    const double left = gauss10(g, a, m);
    const double right = gauss10(g, m, b);
    const double mass = left + right;
    const double h = b - a;
    const double interp_left = 0.5 * mass + h * (ga - gb) / 8.0;
    const bool ok = std::abs(whole - mass) <= 0.01 * tol && std::abs(interp_left - left) <= 0.5 * tol;
    if (ok || depth >= 64) {
      nodes.push_back({a, ga, mass, left});
      return;
    }
    const double gm = g(m);
    self(self, a, m, ga, gm, depth + 1);
    self(self, m, b, gm, gb, depth + 1);
  };

  // The uniform initial grid always contains pi/2 when n_grid is odd.
  const int intervals = n_grid - 1;
  std::vector<double> g0(n_grid);
  for (int i = 0; i < n_grid; ++i) g0[i] = g(kPi * i / intervals);
  for (int i = 0; i < intervals; ++i)
    refine(refine, kPi * i / intervals, kPi * (i + 1) / intervals, g0[i], g0[i + 1], 0);

  MarginalTable t;
  t.family_ = family;
  t.d_ = d;
  t.alpha_ = alpha;
  t.kappa_ = kappa;
  const std::size_t n = nodes.size() + 1;
  t.theta_.resize(n);
  t.G_.resize(n);
  t.g_.resize(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    t.theta_[i] = nodes[i].theta;
    t.G_[i] = acc;
    t.g_[i] = nodes[i].g;
    acc += nodes[i].mass;
  }
  t.theta_[n - 1] = kPi;
  t.g_[n - 1] = g0.back();
  // Rescale the accumulated masses so the table ends exactly at 1.
  const double scale = 1.0 / acc;
  for (std::size_t i = 0; i < n; ++i) {
    t.G_[i] *= scale;
    t.g_[i] *= scale;
  }
  t.G_[n - 1] = 1.0;

  // Fritsch-Carlson limiter on the node slopes.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = t.theta_[i + 1] - t.theta_[i];
    const double secant = (t.G_[i + 1] - t.G_[i]) / h;
    if (secant <= 0.0) {
      t.g_[i] = t.g_[i + 1] = 0.0;
      continue;
    }
    const double a = t.g_[i] / secant;
    const double b = t.g_[i + 1] / secant;
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double s = 3.0 / std::sqrt(r);
      t.g_[i] = s * a * secant;
      t.g_[i + 1] = s * b * secant;
    }
  }

  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = t.theta_[i + 1] - t.theta_[i];
    const double interp = hermite(0.5, h, t.G_[i], t.G_[i + 1], t.g_[i], t.g_[i + 1]);
    worst = std::max(worst, std::abs(interp - (t.G_[i] + nodes[i].left * scale)));
  }
  t.max_midpoint_error_ = worst;
  return t;
}

double MarginalTable::angle_cdf(double theta) const {
  if (theta <= 0.0) return 0.0;
  if (theta >= kPi) return 1.0;
  const auto it = std::upper_bound(theta_.begin(), theta_.end(), theta);
  const std::size_t i = std::min<std::size_t>(it - theta_.begin() - 1, theta_.size() - 2);
  const double h = theta_[i + 1] - theta_[i];
  const double v = hermite((theta - theta_[i]) / h, h, G_[i], G_[i + 1], g_[i], g_[i + 1]);
  return std::clamp(v, G_[i], G_[i + 1]);
}

double MarginalTable::angle_quantile(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return kPi;
  auto it = std::upper_bound(G_.begin(), G_.end(), u);
  std::size_t i = std::min<std::size_t>(it - G_.begin() - 1, G_.size() - 2);
  // Skip zero-mass intervals produced by underflow in the tails.
  while (i + 2 < G_.size() && G_[i + 1] <= G_[i]) ++i;
  const double h = theta_[i + 1] - theta_[i];
  const double span = G_[i + 1] - G_[i];
  if (span <= 0.0) return theta_[i];
  double lo = 0.0, hi = 1.0;
  double t = std::clamp((u - G_[i]) / span, 0.0, 1.0);
  for (int iter = 0; iter < 60; ++iter) {
    const double f = hermite(t, h, G_[i], G_[i + 1], g_[i], g_[i + 1]) - u;
    if (f == 0.0) break;
    if (f > 0.0) hi = t; else lo = t;
    const double slope = hermite_slope(t, h, G_[i], G_[i + 1], g_[i], g_[i + 1]) * h;
    double next = slope > 0.0 ? t - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-16) {
      t = next;
      break;
    }
    t = next;
  }
  return theta_[i] + t * h;
}

std::vector<double> MarginalTable::grid() const {
  std::vector<double> y(theta_.size());
  for (std::size_t i = 0; i < theta_.size(); ++i) y[theta_.size() - 1 - i] = std::cos(theta_[i]);
  y.front() = -1.0;
  y.back() = 1.0;
  return y;
}

std::vector<double> MarginalTable::cdf() const {
  std::vector<double> F(G_.size());
  for (std::size_t i = 0; i < G_.size(); ++i) F[G_.size() - 1 - i] = 1.0 - G_[i];
  return F;
}

double MarginalTable::cdf_at(double y) const {
  if (y <= -1.0) return 0.0;
  if (y >= 1.0) return 1.0;
  return 1.0 - angle_cdf(std::acos(y));
}

double MarginalTable::quantile(double u) const { return std::cos(angle_quantile(1.0 - u)); }

void MarginalTable::quantile_angle(double u, double& cos_t, double& sin_t) const {
  const double th = angle_quantile(u);
  cos_t = std::cos(th);
  sin_t = std::sin(th);
}

std::vector<double> sample_marginal(const MarginalTable& table, Rng& rng, std::size_t n) {
  std::vector<double> out(n);
  double s = 0.0;
  for (auto& y : out) table.quantile_angle(rng.uniform(), y, s);
  return out;
}

UnitVector uniform_subsphere(Rng& rng, int d, const UnitVector& orthogonal_to) {
  require(d >= 2, ErrorKind::InvalidArgs, "dimension d must be >= 2");
  require(orthogonal_to.dim() == d, ErrorKind::DimensionMismatch, "mu has the wrong dimension");
  const Eigen::VectorXd& mu = orthogonal_to.coords();
  Eigen::VectorXd z(d);
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (int j = 0; j < d; ++j) z(j) = rng.normal();
    z -= mu.dot(z) * mu;
    // A second projection removes the residual left by round-off.
    z -= mu.dot(z) * mu;
    const double nz = z.norm();
    if (nz > 1e-12) return UnitVector(Eigen::VectorXd(z / nz));
  }
  fail(ErrorKind::DegenerateDraw, "100 consecutive degenerate subsphere draws");
}

DirectionSample sample_gvmf(const GvmfParams& p, const MarginalTable& table, Rng& rng,
                            std::size_t n) {
  p.validate();
  require(table.family() == p.family && table.dim() == p.d && table.alpha() == p.alpha &&
              table.kappa() == p.kappa,
          ErrorKind::InvalidArgs, "marginal table does not match the parameters");
  const Eigen::VectorXd& mu = p.mu.coords();
  Eigen::MatrixXd pts(p.d, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double c = 0.0, s = 0.0;
    table.quantile_angle(rng.uniform(), c, s);
    const UnitVector y = uniform_subsphere(rng, p.d, p.mu);
    Eigen::VectorXd x = c * mu + s * y.coords();
    pts.col(static_cast<Eigen::Index>(i)) = x / x.norm();
  }
  return DirectionSample(std::move(pts));
}

DirectionSample sample_gvmf(const GvmfParams& p, Rng& rng, std::size_t n) {
  p.validate();
  return sample_gvmf(p, build_marginal_table(p), rng, n);
}

void FisherBinghamParams::validate() const {
  require(d == 3, ErrorKind::InvalidArgs, "Fisher-Bingham sampling supports d = 3 only");
  require(mu1.dim() == d && mu2.dim() == d, ErrorKind::DimensionMismatch,
          "mu1 and mu2 must have dimension d");
  require(kappa1 >= 0.0 && std::isfinite(kappa1), ErrorKind::InvalidArgs, "kappa1 must be >= 0");
  require(std::isfinite(beta2), ErrorKind::InvalidArgs, "beta2 must be finite");
}

FisherBinghamDraw sample_fisher_bingham(const FisherBinghamParams& fb, Rng& rng, std::size_t n) {
  fb.validate();
  const double k = fb.kappa1;
  const double envelope = std::max(fb.beta2, 0.0);
  const Eigen::VectorXd& mu1 = fb.mu1.coords();
  const Eigen::VectorXd& mu2 = fb.mu2.coords();
  Eigen::MatrixXd pts(3, static_cast<Eigen::Index>(n));
  std::size_t proposals = 0;
  for (std::size_t i = 0; i < n;) {
    // vMF on S^2: the projection has an exact inverse CDF.
    const double u = rng.uniform();
    double w = k > 0.0 ? 1.0 + std::log(u + (1.0 - u) * std::exp(-2.0 * k)) / k : 2.0 * u - 1.0;
    w = std::clamp(w, -1.0, 1.0);
    const UnitVector y = uniform_subsphere(rng, 3, fb.mu1);
    Eigen::VectorXd x = w * mu1 + std::sqrt(std::max(0.0, 1.0 - w * w)) * y.coords();
    x /= x.norm();
    ++proposals;
    const double t = mu2.dot(x);
    const double accept = std::exp(fb.beta2 * t * t - envelope);
    if (accept > 1.0 + 1e-12) fail(ErrorKind::EnvelopeError, "acceptance probability exceeds 1");
    if (rng.uniform() <= accept) pts.col(static_cast<Eigen::Index>(i++)) = x;
  }
  FisherBinghamDraw out;
  out.sample = DirectionSample(std::move(pts));
  out.acceptance_rate = n == 0 ? 1.0 : static_cast<double>(n) / static_cast<double>(proposals);
  return out;
}

}  // namespace gvmf
