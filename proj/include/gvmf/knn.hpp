#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "gvmf/types.hpp"

namespace gvmf {

/// psi(k) = sum_{j<k} 1/j - gamma.
double psi_const(int k);

/// log volume of the unit ball in R^m.
double log_unit_ball_volume(int m);

enum class NeighborSearch { KdTree, BruteForce };

struct KnnOptions {
  NeighborSearch search = NeighborSearch::KdTree;
  /// When set, coincident points are separated by a random perturbation of
  /// size 1e-10 (seeded by this value) instead of raising DuplicatePoints.
  std::optional<std::uint64_t> jitter_seed;
};

/// Chordal distance from every point to its k-th nearest other point.
/// Both search strategies evaluate distances with the same expression, so
/// they agree exactly.
Eigen::VectorXd knn_distances(const DirectionSample& sample, int k, const KnnOptions& opts = {});

struct EntropyEstimate {
  double value = 0.0;
  int k = 0;
  Eigen::Index n = 0;
  int m = 0;
  double mean_log_rho = 0.0;
};

/// Kozachenko-Leonenko estimate on S^{d-1} with intrinsic dimension m = d-1:
///   H = (1/N) sum log(rho_k^m V_m (N-1) exp(-psi(k))).
EntropyEstimate estimate_entropy(const DirectionSample& sample, int k, const KnnOptions& opts = {});

/// Sum of v in index order with Neumaier compensation.
double compensated_sum(const double* v, std::size_t n);

}  // namespace gvmf
