#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "ocolt/algorithm.hpp"
#include "ocolt/problem.hpp"

namespace ocolt {

// Worst-case slacks of the queue-path inequalities over a full trace. Each
// field is the largest violation observed (negative or zero means the
// inequality held everywhere with room to spare).
struct QueuePropertyReport {
  double negative_queue = 0.0;    // max over t,k of -Q_k(t+1)
  double negative_weight = 0.0;   // max over t,k of -(Q_k(t+1) + gtil_k)
  double queue_vs_gtil = 0.0;     // max of ||gtil||^2 - ||Q(t+1)||^2
  double queue_growth = 0.0;      // max of ||Q(t+1)|| - ||Q(t)|| - ||gtil||
  double drift_bound = 0.0;       // max of drift - (Q(t)'gtil + ||gtil||^2)
  double violation_cert = 0.0;    // max_k of sum_t g_k - Q_k(T+1)/gamma
  double membership = 0.0;        // max distance of x(t) from the simple set
  double scaling = 0.0;           // max |gtil - gamma*g| componentwise
};

// Checks the queue-path facts round by round. Expects a trace produced by
// run(), i.e. starting at the bootstrap round with Q(0) = 0.
inline QueuePropertyReport check_queue_properties(
    const std::vector<RoundTrace>& trace, const ProblemInstance& instance,
    double gamma) {
  QueuePropertyReport rep;
  if (trace.empty()) return rep;
  rep.negative_queue = rep.negative_weight = rep.queue_vs_gtil =
      rep.queue_growth = rep.drift_bound = rep.membership = rep.scaling =
          -std::numeric_limits<double>::infinity();

  Vec q_prev = Vec::Zero(instance.m());
  Vec viol_sum = Vec::Zero(instance.m());
  for (const RoundTrace& row : trace) {
    const Vec& q = row.queue_after;
    const Vec& gtil = row.gtil_vals;
    if (q.size() > 0) {
      rep.negative_queue = std::max(rep.negative_queue, (-q).maxCoeff());
      rep.negative_weight =
          std::max(rep.negative_weight, (-(q + gtil)).maxCoeff());
    }
    rep.queue_vs_gtil =
        std::max(rep.queue_vs_gtil, gtil.squaredNorm() - q.squaredNorm());
    rep.queue_growth =
        std::max(rep.queue_growth, q.norm() - q_prev.norm() - gtil.norm());
    rep.drift_bound =
        std::max(rep.drift_bound,
                 row.drift - (q_prev.dot(gtil) + gtil.squaredNorm()));
    rep.membership = std::max(
        rep.membership, (row.x - instance.set.project(row.x)).norm());
    if (gtil.size() > 0)
      rep.scaling = std::max(
          rep.scaling, (gtil - gamma * row.g_vals).cwiseAbs().maxCoeff());
    else
      rep.scaling = std::max(rep.scaling, 0.0);
    if (row.t >= 1) viol_sum += row.g_vals;
    q_prev = q;
  }
  if (instance.m() > 0) {
    const Vec cert = trace.back().queue_after / gamma;
    rep.violation_cert = (viol_sum - cert).maxCoeff();
  } else {
    rep.violation_cert = 0.0;
  }
  return rep;
}

// Worst slack of the per-round drift-plus-penalty inequality against a fixed
// feasible comparator. Valid whenever alpha >= 0.5*(gamma^2 beta^2 + eta).
inline double drift_plus_penalty_worst_slack(
    const std::vector<RoundTrace>& trace, const AlgorithmParams& params,
    double D, const Vec& x_star, const LossOracle& losses) {
  double worst = -std::numeric_limits<double>::infinity();
  if (trace.size() < 3) return worst;
  // Rows are indexed by round; row for t carries Q(t+1) and its drift.
  for (std::size_t idx = 0; idx + 1 < trace.size(); ++idx) {
    const RoundTrace& cur = trace[idx];
    if (cur.t < 1) continue;
    const RoundTrace& nxt = trace[idx + 1];
    const double lhs = nxt.drift + cur.loss;
    const double rhs =
        losses.value(cur.t, x_star) +
        params.alpha * ((x_star - cur.x).squaredNorm() -
                        (x_star - nxt.x).squaredNorm()) +
        0.5 * (nxt.gtil_vals.squaredNorm() - cur.gtil_vals.squaredNorm()) +
        D * D / (2.0 * params.eta);
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

// Largest excess of ||Q(t)|| over the queue bound
// 2 gamma G + (alpha R^2 + 2DR + 2 gamma^2 G^2) / (gamma epsilon).
inline double queue_bound_worst_excess(const std::vector<RoundTrace>& trace,
                                       const ProblemInstance& instance,
                                       const AlgorithmParams& params) {
  const double bound =
      2.0 * params.gamma * instance.G +
      (params.alpha * instance.R * instance.R +
       2.0 * instance.D * instance.R +
       2.0 * params.gamma * params.gamma * instance.G * instance.G) /
          (params.gamma * instance.epsilon);
  double worst = -std::numeric_limits<double>::infinity();
  for (const RoundTrace& row : trace)
    worst = std::max(worst, row.queue_after.norm() - bound);
  return worst;
}

// Measured regret minus the certified regret bound.
inline double regret_bound_gap(const std::vector<RoundTrace>& trace,
                               const ProblemInstance& instance,
                               const AlgorithmParams& params, const Vec& x_star,
                               const LossOracle& losses) {
  double measured = 0.0;
  long T = 0;
  for (const RoundTrace& row : trace) {
    if (row.t < 1) continue;
    measured += row.loss - losses.value(row.t, x_star);
    ++T;
  }
  return measured - certified_regret_bound(instance, params, T);
}

// Measured worst cumulative violation minus the certified violation bound.
inline double violation_bound_gap(const std::vector<RoundTrace>& trace,
                                  const ProblemInstance& instance,
                                  const AlgorithmParams& params) {
  Vec sum = Vec::Zero(instance.m());
  for (const RoundTrace& row : trace)
    if (row.t >= 1) sum += row.g_vals;
  const double measured = instance.m() > 0 ? sum.maxCoeff() : 0.0;
  return measured - certified_violation_bound(instance, params);
}

// Largest gradient norm seen on the trace minus the declared bound D.
inline double gradient_bound_excess(const std::vector<RoundTrace>& trace,
                                    double D) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const RoundTrace& row : trace)
    worst = std::max(worst, row.grad.norm() - D);
  return worst;
}

}  // namespace ocolt
