#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ocolt/errors.hpp"
#include "ocolt/rng.hpp"

namespace ocolt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A set with an exact closed-form Euclidean projection. Boxes and balls are
// the only kinds supported; anything polyhedral beyond that is handled as
// functional constraints, not as the simple set.
class SimpleSet {
 public:
  enum class Kind { box, ball };

  static SimpleSet box(Vec lower, Vec upper) {
    if (lower.size() != upper.size() || lower.size() < 1)
      throw std::invalid_argument("box: bound dimensions mismatch");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
      if (!(lower[i] < upper[i]))
        throw std::invalid_argument("box: lower[" + std::to_string(i) +
                                    "] must be < upper[" + std::to_string(i) +
                                    "]");
    }
    SimpleSet s;
    s.kind_ = Kind::box;
    s.lower_ = std::move(lower);
    s.upper_ = std::move(upper);
    return s;
  }

  static SimpleSet ball(Vec center, double radius) {
    if (center.size() < 1)
      throw std::invalid_argument("ball: empty center");
    if (!(radius > 0.0)) throw std::invalid_argument("ball: radius must be > 0");
    SimpleSet s;
    s.kind_ = Kind::ball;
    s.center_ = std::move(center);
    s.radius_ = radius;
    return s;
  }

  Kind kind() const { return kind_; }
  int dim() const {
    return static_cast<int>(kind_ == Kind::box ? lower_.size()
                                               : center_.size());
  }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }

  Vec project(const Vec& point) const {
    if (point.size() != dim())
      throw std::invalid_argument("project: dimension mismatch");
    if (!point.allFinite())
      throw std::invalid_argument("project: non-finite input");
    if (kind_ == Kind::box)
      return point.cwiseMax(lower_).cwiseMin(upper_);
    const Vec d = point - center_;
    const double r = d.norm();
    // The ulp guard keeps the map exactly idempotent: rescaling can land a
    // hair outside the radius, and re-projecting that point must not move it.
    if (r <= radius_ * (1.0 + 8.0 * std::numeric_limits<double>::epsilon()))
      return point;
    return center_ + d * (radius_ / r);
  }

  bool contains(const Vec& point, double tol = 1e-9) const {
    return (point - project(point)).norm() <= tol;
  }

  Vec centroid() const {
    if (kind_ == Kind::box) return 0.5 * (lower_ + upper_);
    return center_;
  }

  double diameter() const {
    if (kind_ == Kind::box) return (upper_ - lower_).norm();
    return 2.0 * radius_;
  }

  // Uniform sample, used by estimation and tests. Ball sampling rejects from
  // the bounding box; acceptance is fine for the dimensions in use.
  Vec sample(rng::Sequence& seq) const {
    const int n = dim();
    Vec x(n);
    if (kind_ == Kind::box) {
      for (int i = 0; i < n; ++i)
        x[i] = seq.next_uniform(lower_[i], upper_[i]);
      return x;
    }
    for (;;) {
      for (int i = 0; i < n; ++i) x[i] = seq.next_uniform(-1.0, 1.0);
      if (x.squaredNorm() <= 1.0) return center_ + radius_ * x;
    }
  }

 private:
  SimpleSet() = default;
  Kind kind_ = Kind::box;
  Vec lower_, upper_;  // box
  Vec center_;         // ball
  double radius_ = 0.0;
};

inline Vec project_simple(const SimpleSet& set, const Vec& point) {
  return set.project(point);
}

}  // namespace ocolt
