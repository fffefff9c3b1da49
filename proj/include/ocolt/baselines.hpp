#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "ocolt/algorithm.hpp"
#include "ocolt/errors.hpp"
#include "ocolt/problem.hpp"

namespace ocolt {

// Euclidean projection onto X0 intersected with {A x <= b}, computed by
// Dykstra's alternating projections over the simple set and each halfspace.
// Plain cyclic projections would find a feasible point, not the nearest one;
// Dykstra's correction terms are what make the limit the projection.
inline Vec project_polyhedron(const SimpleSet& set, const Mat& A, const Vec& b,
                              const Vec& point, double tol = 1e-8) {
  if (A.rows() != b.size() || A.cols() != set.dim())
    throw std::invalid_argument("project_polyhedron: dimension mismatch");
  if (!point.allFinite())
    throw std::invalid_argument("project_polyhedron: non-finite input");

  const int m = static_cast<int>(A.rows());
  const int max_sweeps = 50000;
  const double blowup = 1e4 * (1.0 + point.norm() + set.diameter());

  Vec y = point;
  std::vector<Vec> corrections(static_cast<std::size_t>(m) + 1,
                               Vec::Zero(set.dim()));
  Vec row_sqnorm(m);
  for (int k = 0; k < m; ++k) row_sqnorm[k] = A.row(k).squaredNorm();

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const Vec y_prev = y;
    // The iterate alone can revisit a point while the correction terms are
    // still moving, so convergence is judged on both.
    double delta = 0.0;
    double correction_norm = 0.0;
    {
      const Vec z = y + corrections[0];
      y = set.project(z);
      const Vec c_new = z - y;
      delta += (c_new - corrections[0]).norm();
      corrections[0] = c_new;
      correction_norm += c_new.norm();
    }
    for (int k = 0; k < m; ++k) {
      Vec& c_k = corrections[static_cast<std::size_t>(k) + 1];
      const Vec z = y + c_k;
      if (row_sqnorm[k] > 0.0) {
        const double excess = A.row(k).dot(z) - b[k];
        y = excess > 0.0 ? Vec(z - (excess / row_sqnorm[k]) * A.row(k).transpose())
                         : z;
      } else {
        if (b[k] < 0.0)
          throw InfeasibleError("project_polyhedron: zero row with b < 0");
        y = z;
      }
      const Vec c_new = z - y;
      delta += (c_new - c_k).norm();
      c_k = c_new;
      correction_norm += c_new.norm();
    }
    if (correction_norm > blowup)
      throw InfeasibleError(
          "project_polyhedron: corrections diverge, intersection looks empty");

    delta += (y - y_prev).norm();
    if (delta <= tol) {
      bool feasible = set.contains(y, tol);
      for (int k = 0; feasible && k < m; ++k) {
        const double rn = std::sqrt(row_sqnorm[k]);
        if (A.row(k).dot(y) - b[k] > tol * std::max(1.0, rn)) feasible = false;
      }
      if (feasible) return y;
    }
  }
  throw ConvergenceError("project_polyhedron: sweep cap reached",
                         std::vector<double>(y.data(), y.data() + y.size()),
                         0.0);
}

// One step of projection-based online gradient descent where the projection
// is onto the full constrained set X0 ∩ {Ax <= b}.
inline Vec ogd_step(const SimpleSet& set, const Mat& A, const Vec& b,
                    const Vec& x_t, const Vec& grad_t, double step,
                    double tol = 1e-8) {
  if (!(step > 0.0)) throw std::invalid_argument("ogd_step: step must be > 0");
  return project_polyhedron(set, A, b, x_t - step * grad_t, tol);
}

// Dual variables of the regularized primal-dual baseline. theta_exp is the
// trade-off exponent of the prior-work family this method stands in for.
struct DualState {
  Vec lambda;
  double theta_exp = 0.5;

  static DualState zeros(int m, double theta_exp) {
    DualState s;
    s.lambda = Vec::Zero(m);
    s.theta_exp = theta_exp;
    return s;
  }
};

// Saddle-point step: projected primal descent on the Lagrangian, regularized
// dual ascent clipped at zero.
inline std::pair<Vec, DualState> primal_dual_step(
    const ProblemInstance& instance, const DualState& state, const Vec& x_t,
    const Vec& grad_t, double step_primal, double step_dual, double reg) {
  if (!(step_primal > 0.0) || !(step_dual > 0.0))
    throw std::invalid_argument("primal_dual_step: steps must be > 0");
  if (reg < 0.0)
    throw std::invalid_argument("primal_dual_step: reg must be >= 0");
  if (state.lambda.size() != instance.m())
    throw std::invalid_argument("primal_dual_step: dual dimension mismatch");

  const Vec g_vals = instance.constraints.eval(x_t);
  const Mat J = instance.constraints.jacobian(x_t);
  const Vec primal_grad = grad_t + J.transpose() * state.lambda;
  Vec x_next = instance.set.project(x_t - step_primal * primal_grad);

  DualState next = state;
  next.lambda =
      (state.lambda + step_dual * (g_vals - reg * state.lambda)).cwiseMax(0.0);
  return {std::move(x_next), std::move(next)};
}

// Step-size family for the primal-dual baseline. The prior works are
// described only through their bounds, so the constants here are artifact
// choices, recorded in the run manifest. The primal constant normalizes by
// the same curvature factor the queue algorithm's proximal weight uses, which
// puts both methods on a comparable per-round movement scale.
struct PrimalDualSchedule {
  double step_primal = 0.0;
  double step_dual = 0.0;
  double reg = 0.0;

  static PrimalDualSchedule from_horizon(long T, double theta_exp,
                                         double beta) {
    if (T < 1) throw std::invalid_argument("primal-dual schedule: T must be >= 1");
    if (!(theta_exp > 0.0 && theta_exp < 1.0))
      throw std::invalid_argument("primal-dual schedule: exponent in (0,1)");
    const double Td = static_cast<double>(T);
    PrimalDualSchedule s;
    const double primal_exp = std::max(theta_exp, 1.0 - theta_exp);
    s.step_primal =
        0.7 / (beta * beta + 1.0) * std::pow(Td, -primal_exp);
    s.step_dual = std::pow(Td, -theta_exp / 2.0);
    s.reg = std::pow(Td, -theta_exp / 2.0);
    return s;
  }
};

// Full-loop runners for the baselines. Traces share the RoundTrace layout;
// for the primal-dual method the queue column holds the dual variables, for
// projected OGD it stays at zero.
inline std::vector<RoundTrace> run_ogd_projected(const ProblemInstance& inst,
                                                 const LossOracle& losses,
                                                 long T, double step,
                                                 double tol = 1e-8) {
  if (!inst.constraints.is_linear())
    throw WrongPathError("run_ogd_projected: needs linear constraints");
  const Mat& A = inst.constraints.A();
  const Vec& b = inst.constraints.b();
  Vec x = project_polyhedron(inst.set, A, b, inst.set.centroid(), tol);

  std::vector<RoundTrace> trace;
  trace.reserve(static_cast<std::size_t>(T) + 1);
  for (long t = 0; t <= T; ++t) {
    RoundTrace row;
    row.t = t;
    row.x = x;
    row.loss = losses.value(t, x);
    row.grad = losses.gradient(t, x);
    row.g_vals = inst.constraints.eval(x);
    row.gtil_vals = row.g_vals;
    row.queue_after = Vec::Zero(inst.m());
    row.drift = 0.0;
    if (t < T) x = ogd_step(inst.set, A, b, x, row.grad, step, tol);
    trace.push_back(std::move(row));
  }
  return trace;
}

inline std::vector<RoundTrace> run_primal_dual(const ProblemInstance& inst,
                                               const LossOracle& losses, long T,
                                               const PrimalDualSchedule& sched,
                                               double theta_exp) {
  Vec x = inst.set.project(inst.set.centroid());
  DualState dual = DualState::zeros(inst.m(), theta_exp);

  std::vector<RoundTrace> trace;
  trace.reserve(static_cast<std::size_t>(T) + 1);
  for (long t = 0; t <= T; ++t) {
    RoundTrace row;
    row.t = t;
    row.x = x;
    row.loss = losses.value(t, x);
    row.grad = losses.gradient(t, x);
    row.g_vals = inst.constraints.eval(x);
    row.gtil_vals = row.g_vals;
    const double l_before = 0.5 * dual.lambda.squaredNorm();
    auto [x_next, dual_next] =
        primal_dual_step(inst, dual, x, row.grad, sched.step_primal,
                         sched.step_dual, sched.reg);
    if (t < T) x = std::move(x_next);
    dual = std::move(dual_next);
    row.queue_after = dual.lambda;
    row.drift = 0.5 * dual.lambda.squaredNorm() - l_before;
    trace.push_back(std::move(row));
  }
  return trace;
}

}  // namespace ocolt
