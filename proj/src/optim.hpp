#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace gvmf::detail {

/// Brent's method on a bracket [a, b] with f(a) f(b) <= 0.
/// Returns nullopt when the bracket is invalid.
inline std::optional<double> brent_root(const std::function<double(double)>& f, double a, double b,
                                        double fa, double fb, double xtol = 1e-13,
                                        int max_iter = 200) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) return std::nullopt;
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2.0 * 2.2e-16 * std::abs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q; else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
  }
  return b;
}

struct SimplexResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

/// Nelder-Mead minimization inside the box [lo, hi]; trial points are
/// clamped onto the box. Stops when the spread of objective values over the
/// simplex falls below ftol or after max_iter iterations.
inline SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                                 const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                 double ftol, int max_iter) {
  const int n = static_cast<int>(x0.size());
  auto clamp = [&](Eigen::VectorXd v) {
    for (int j = 0; j < n; ++j) v(j) = std::clamp(v(j), lo(j), hi(j));
    return v;
  };
  std::vector<Eigen::VectorXd> pts(n + 1, clamp(x0));
  std::vector<double> fv(n + 1);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd v = pts[0];
    v(j) += step(j);
    if (v(j) > hi(j)) v(j) = pts[0](j) - step(j);
    pts[j + 1] = clamp(v);
  }
  for (int i = 0; i <= n; ++i) fv[i] = f(pts[i]);

  SimplexResult res;
  std::vector<int> order(n + 1);
  for (int iter = 0;; ++iter) {
    for (int i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const int best = order[0], worst = order[n], second = order[n - 1];
    res.history.push_back(fv[best]);
    res.iterations = iter;
    if (fv[worst] - fv[best] <= ftol) {
      res.converged = true;
      break;
    }
    if (iter >= max_iter) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= n;

    const Eigen::VectorXd xr = clamp(centroid + (centroid - pts[worst]));
    const double fr = f(xr);
    if (fr < fv[best]) {
      const Eigen::VectorXd xe = clamp(centroid + 2.0 * (centroid - pts[worst]));
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        fv[worst] = fe;
      } else {
        pts[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      pts[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const Eigen::VectorXd xc = outside ? clamp(centroid + 0.5 * (xr - centroid))
                                       : clamp(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = f(xc);
    if (fc < (outside ? fr : fv[worst])) {
      pts[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (int i = 0; i <= n; ++i) {
      if (i == best) continue;
      pts[i] = clamp(pts[best] + 0.5 * (pts[i] - pts[best]));
      fv[i] = f(pts[i]);
    }
  }
  const int best = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = pts[best];
  res.f = fv[best];
  return res;
}

}  // namespace gvmf::detail
