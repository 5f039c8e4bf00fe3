#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>

#include "gvmf/error.hpp"

namespace gvmf {

/// Point on S^{d-1}. Construction checks the norm; use normalized() to
/// project an arbitrary nonzero vector.
class UnitVector {
 public:
  static constexpr double kNormTolerance = 1e-9;

  UnitVector() = default;

  template <typename Derived>
  explicit UnitVector(const Eigen::MatrixBase<Derived>& v) : coords_(v) {
    require(coords_.size() >= 2, ErrorKind::InvalidArgs, "unit vectors need d >= 2");
    require(std::abs(coords_.norm() - 1.0) <= kNormTolerance, ErrorKind::InvalidArgs,
            "vector is not of unit norm");
  }

  template <typename Derived>
  static UnitVector normalized(const Eigen::MatrixBase<Derived>& v) {
    const double n = v.norm();
    require(n > 0.0 && std::isfinite(n), ErrorKind::InvalidArgs, "cannot normalize a zero vector");
    return UnitVector(Eigen::VectorXd(v / n));
  }

  /// e_{axis} in R^d.
  static UnitVector basis(int d, int axis) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    v(axis) = 1.0;
    return UnitVector(v);
  }

  int dim() const { return static_cast<int>(coords_.size()); }
  const Eigen::VectorXd& coords() const { return coords_; }
  double operator()(int i) const { return coords_(i); }
  operator const Eigen::VectorXd&() const { return coords_; }

  UnitVector operator-() const {
    UnitVector r;
    r.coords_ = -coords_;
    return r;
  }

 private:
  Eigen::VectorXd coords_;
};

/// N directions stored column-wise in a d x N matrix, plus a free-form note
/// describing where they came from (seed, file, ...).
struct DirectionSample {
  Eigen::MatrixXd points;
  std::string provenance;

  DirectionSample() = default;
  explicit DirectionSample(Eigen::MatrixXd pts, std::string prov = {})
      : points(std::move(pts)), provenance(std::move(prov)) {}

  int dim() const { return static_cast<int>(points.rows()); }
  Eigen::Index size() const { return points.cols(); }
  bool empty() const { return points.cols() == 0; }
  auto col(Eigen::Index i) const { return points.col(i); }
};

/// sign(y) |y|^a, with 0^a = 0.
inline double signed_pow(double y, double a) {
  if (y == 0.0) return 0.0;
  const double m = std::pow(std::abs(y), a);
  return y > 0.0 ? m : -m;
}

}  // namespace gvmf
