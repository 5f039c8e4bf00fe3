#include "gvmf/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "gvmf/error.hpp"
#include "gvmf/parallel.hpp"
#include "gvmf/rng.hpp"

namespace gvmf {
namespace {

constexpr double kDuplicateDistance = 1e-12;
constexpr double kJitter = 1e-10;

double sq_dist(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int j = 0; j < d; ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

// Keeps the k smallest squared distances seen so far, sorted ascending.
class KBest {
 public:
  explicit KBest(int k) : k_(k) { v_.reserve(k + 1); }
  double bound() const {
    return static_cast<int>(v_.size()) < k_ ? std::numeric_limits<double>::infinity() : v_.back();
  }
  void offer(double s) {
    if (s >= bound()) return;
    v_.insert(std::upper_bound(v_.begin(), v_.end(), s), s);
    if (static_cast<int>(v_.size()) > k_) v_.pop_back();
  }
  double first() const { return v_.front(); }
  double kth() const { return v_.back(); }

 private:
  int k_;
  std::vector<double> v_;
};

class KdTree {
 public:
  explicit KdTree(const Eigen::MatrixXd& pts) : pts_(pts), d_(static_cast<int>(pts.rows())) {
    idx_.resize(pts.cols());
    std::iota(idx_.begin(), idx_.end(), 0);
    nodes_.reserve(2 * pts.cols() / kLeaf + 2);
    build(0, idx_.size());
  }

  void query(Eigen::Index self, KBest& best) const { search(0, pts_.col(self).data(), self, best); }

 private:
  static constexpr std::size_t kLeaf = 8;

  struct Node {
    std::size_t begin, end;
    int axis = -1;
    double split = 0.0;
    int left = -1, right = -1;
  };

  int build(std::size_t begin, std::size_t end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({begin, end});
    if (end - begin <= kLeaf) return id;
    int axis = 0;
    double widest = -1.0;
    for (int j = 0; j < d_; ++j) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = begin; i < end; ++i) {
        lo = std::min(lo, pts_(j, idx_[i]));
        hi = std::max(hi, pts_(j, idx_[i]));
      }
      if (hi - lo > widest) {
        widest = hi - lo;
        axis = j;
      }
    }
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(idx_.begin() + begin, idx_.begin() + mid, idx_.begin() + end,
                     [&](Eigen::Index a, Eigen::Index b) { return pts_(axis, a) < pts_(axis, b); });
    const double split = pts_(axis, idx_[mid]);
    const int l = build(begin, mid);
    const int r = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  void search(int id, const double* q, Eigen::Index self, KBest& best) const {
    const Node& nd = nodes_[id];
    if (nd.axis < 0) {
      for (std::size_t i = nd.begin; i < nd.end; ++i) {
        const Eigen::Index j = idx_[i];
        if (j != self) best.offer(sq_dist(q, pts_.col(j).data(), d_));
      }
      return;
    }
    const double diff = q[nd.axis] - nd.split;
    const int near = diff < 0.0 ? nd.left : nd.right;
    const int far = diff < 0.0 ? nd.right : nd.left;
    search(near, q, self, best);
    // Points with coordinate equal to the split may sit on either side, so
    // the far side is visited whenever the plane is within reach (inclusive).
    if (diff * diff <= best.bound()) search(far, q, self, best);
  }

  const Eigen::MatrixXd& pts_;
  int d_;
  std::vector<Eigen::Index> idx_;
  std::vector<Node> nodes_;
};

Eigen::MatrixXd jittered(const Eigen::MatrixXd& pts, std::uint64_t seed) {
  Rng rng({seed, 0x6A177E4ULL});
  Eigen::MatrixXd out = pts;
  for (Eigen::Index i = 0; i < out.cols(); ++i) {
    for (Eigen::Index j = 0; j < out.rows(); ++j) out(j, i) += kJitter * rng.normal();
    out.col(i).normalize();
  }
  return out;
}

Eigen::VectorXd kth_distances(const Eigen::MatrixXd& pts, int k, NeighborSearch search) {
  const Eigen::Index n = pts.cols();
  const int d = static_cast<int>(pts.rows());
  Eigen::VectorXd rho(n);
  std::vector<double> nearest(n);
  if (search == NeighborSearch::BruteForce) {
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      KBest best(k);
      const double* q = pts.col(i).data();
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != static_cast<Eigen::Index>(i)) best.offer(sq_dist(q, pts.col(j).data(), d));
      rho(i) = std::sqrt(best.kth());
      nearest[i] = best.first();
    });
  } else {
    const KdTree tree(pts);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      KBest best(k);
      tree.query(static_cast<Eigen::Index>(i), best);
      rho(i) = std::sqrt(best.kth());
      nearest[i] = best.first();
    });
  }
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::sqrt(nearest[i]) < kDuplicateDistance)
      fail(ErrorKind::DuplicatePoints,
           "point " + std::to_string(i) + " coincides with another point (enable jitter to proceed)");
  return rho;
}

}  // namespace

double psi_const(int k) {
  require(k >= 1, ErrorKind::InvalidArgs, "k must be >= 1");
  double s = 0.0;
  for (int j = 1; j < k; ++j) s += 1.0 / j;
  return s - std::numbers::egamma;
}

double log_unit_ball_volume(int m) {
  return 0.5 * m * std::log(std::numbers::pi) - std::lgamma(1.0 + 0.5 * m);
}

double compensated_sum(const double* v, std::size_t n) {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = s + v[i];
    if (std::abs(s) >= std::abs(v[i]))
      c += (s - t) + v[i];
    else
      c += (v[i] - t) + s;
    s = t;
  }
  return s + c;
}

Eigen::VectorXd knn_distances(const DirectionSample& sample, int k, const KnnOptions& opts) {
  require(k >= 1, ErrorKind::InvalidArgs, "k must be >= 1");
  require(sample.dim() >= 2, ErrorKind::InvalidArgs, "dimension d must be >= 2");
  require(sample.size() >= k + 1, ErrorKind::InvalidArgs, "need at least k+1 points");
  if (opts.jitter_seed)
    return kth_distances(jittered(sample.points, *opts.jitter_seed), k, opts.search);
  return kth_distances(sample.points, k, opts.search);
}

EntropyEstimate estimate_entropy(const DirectionSample& sample, int k, const KnnOptions& opts) {
  const Eigen::VectorXd rho = knn_distances(sample, k, opts);
  const Eigen::Index n = rho.size();
  const int m = sample.dim() - 1;
  Eigen::VectorXd log_rho = rho.array().log();
  const double mean_log_rho = compensated_sum(log_rho.data(), n) / static_cast<double>(n);
  EntropyEstimate e;
  e.k = k;
  e.n = n;
  e.m = m;
  e.mean_log_rho = mean_log_rho;
  e.value = m * mean_log_rho + log_unit_ball_volume(m) + std::log(static_cast<double>(n - 1)) -
            psi_const(k);
  return e;
}

}  // namespace gvmf
