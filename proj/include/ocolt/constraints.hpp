#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <utility>

#include "ocolt/simple_set.hpp"

namespace ocolt {

// Stacked constraint functions g : R^n -> R^m, each component convex on the
// simple set. Linear constraints g(x) = A x - b keep A, b explicit so the
// per-round update can take the closed-form path; generic constraints are a
// black-box value + subgradient pair.
class ConstraintFunction {
 public:
  enum class Kind { linear, generic };

  using EvalFn = std::function<Vec(const Vec&)>;
  using JacobianFn = std::function<Mat(const Vec&)>;

  static ConstraintFunction linear(Mat A, Vec b) {
    if (A.rows() != b.size())
      throw std::invalid_argument("linear constraints: A rows != b size");
    if (A.cols() < 1)
      throw std::invalid_argument("linear constraints: n must be >= 1");
    ConstraintFunction c;
    c.kind_ = Kind::linear;
    c.A_ = std::move(A);
    c.b_ = std::move(b);
    c.m_ = static_cast<int>(c.A_.rows());
    c.n_ = static_cast<int>(c.A_.cols());
    c.curvature_ = 0.0;
    return c;
  }

  // curvature: upper bound on the Lipschitz modulus of each component's
  // gradient (0 for affine components). Feeds the inner solver's step size.
  static ConstraintFunction generic(int m, int n, EvalFn eval, JacobianFn jac,
                                    double curvature) {
    if (n < 1) throw std::invalid_argument("generic constraints: n must be >= 1");
    if (m < 0) throw std::invalid_argument("generic constraints: m must be >= 0");
    if (curvature < 0.0)
      throw std::invalid_argument("generic constraints: curvature must be >= 0");
    ConstraintFunction c;
    c.kind_ = Kind::generic;
    c.m_ = m;
    c.n_ = n;
    c.eval_ = std::move(eval);
    c.jacobian_ = std::move(jac);
    c.curvature_ = curvature;
    return c;
  }

  // Empty constraint stack (m = 0); the per-round subproblem degenerates to a
  // plain proximal step. Real problem instances require m >= 1, enforced at
  // configuration level.
  static ConstraintFunction none(int n) {
    return linear(Mat::Zero(0, n), Vec::Zero(0));
  }

  Kind kind() const { return kind_; }
  bool is_linear() const { return kind_ == Kind::linear; }
  int m() const { return m_; }
  int n() const { return n_; }
  const Mat& A() const { return A_; }
  const Vec& b() const { return b_; }
  double curvature() const { return curvature_; }

  Vec eval(const Vec& x) const {
    if (x.size() != n_) throw std::invalid_argument("constraints: dim mismatch");
    if (kind_ == Kind::linear) return A_ * x - b_;
    Vec g = eval_(x);
    if (g.size() != m_)
      throw std::invalid_argument("constraints: evaluator returned wrong m");
    return g;
  }

  // Rows are subgradients of the components at x.
  Mat jacobian(const Vec& x) const {
    if (x.size() != n_) throw std::invalid_argument("constraints: dim mismatch");
    if (kind_ == Kind::linear) return A_;
    Mat J = jacobian_(x);
    if (J.rows() != m_ || J.cols() != n_)
      throw std::invalid_argument("constraints: jacobian has wrong shape");
    return J;
  }

 private:
  ConstraintFunction() = default;
  Kind kind_ = Kind::linear;
  int m_ = 0, n_ = 0;
  Mat A_;
  Vec b_;
  EvalFn eval_;
  JacobianFn jacobian_;
  double curvature_ = 0.0;
};

}  // namespace ocolt
