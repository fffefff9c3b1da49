#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ocolt/errors.hpp"
#include "ocolt/problem.hpp"
#include "ocolt/vqueue.hpp"

namespace ocolt {

struct AlgorithmParams {
  double gamma = 0.0;  // constraint scaling
  double alpha = 0.0;  // proximal weight
  double eta = 0.0;    // analysis parameter
  long horizon = 0;

  // alpha >= 0.5*(gamma^2 beta^2 + eta), with a relative slack that absorbs
  // rounding of the schedule formulas (gamma^2 vs sqrt(T) differ by ulps).
  bool valid_for(double beta) const {
    const double threshold = 0.5 * (gamma * gamma * beta * beta + eta);
    return gamma > 0.0 && alpha > 0.0 && eta > 0.0 &&
           alpha - threshold >= -1e-9 * std::max(1.0, threshold);
  }

  void require_valid_for(double beta) const {
    if (!valid_for(beta))
      throw ConfigError(
          "algorithm params: alpha must be >= 0.5*(gamma^2*beta^2 + eta)");
  }
};

// The horizon-aware schedule: gamma = T^{1/4}, eta = sqrt(T),
// alpha = 0.5*(beta^2+1)*sqrt(T). Satisfies the validity condition whenever
// the instance's Lipschitz modulus is at most `beta`.
inline AlgorithmParams default_schedule(long T, double beta) {
  if (T < 1) throw std::invalid_argument("default_schedule: T must be >= 1");
  if (!(beta > 0.0))
    throw std::invalid_argument("default_schedule: beta must be > 0");
  AlgorithmParams p;
  const double sqrtT = std::sqrt(static_cast<double>(T));
  p.gamma = std::sqrt(sqrtT);
  p.eta = sqrtT;
  p.alpha = 0.5 * (beta * beta + 1.0) * sqrtT;
  p.horizon = T;
  return p;
}

struct RoundTrace {
  long t = 0;
  Vec x;                         // decision committed this round
  double loss = 0.0;             // f^t(x(t))
  Vec grad;                      // gradient (or subgradient) of f^t at x(t)
  Vec g_vals;                    // g(x(t))
  Vec gtil_vals;                 // gamma * g(x(t))
  Vec queue_after;               // Q(t+1)
  double drift = 0.0;            // L(t+1) - L(t) for this round's update
  std::optional<Vec> direction;  // d(t), fast path only
};

struct InnerSolverOptions {
  double grad_map_tol = 1e-8;
  double min_decrease = 1e-12;
  int max_iter = 10000;
};

namespace detail {

inline Vec nonnegative_queue_weight(const Vec& queue_next, const Vec& gtil_t) {
  Vec w = queue_next + gtil_t;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (w[k] < -1e-9)
      throw std::logic_error(
          "per-round subproblem: queue weight went negative, queue update "
          "violated");
    if (w[k] < 0.0) w[k] = 0.0;
  }
  return w;
}

}  // namespace detail

// Closed-form update for linear g:
//   x(t+1) = P[x(t) - d(t)/(2 alpha)],
//   d(t) = grad_t + sum_k (Q_k(t+1) + gtil_k(x(t))) * gamma * a_k.
struct FastStepResult {
  Vec x_next;
  Vec direction;
};

inline FastStepResult step_fast_linear(const ProblemInstance& instance,
                                       const AlgorithmParams& params,
                                       const Vec& x_t, const Vec& grad_t,
                                       const Vec& queue_next,
                                       const Vec& gtil_t) {
  if (!instance.constraints.is_linear())
    throw WrongPathError("step_fast_linear: constraints are not linear");
  const Vec w = detail::nonnegative_queue_weight(queue_next, gtil_t);
  const Vec d =
      grad_t + params.gamma * (instance.constraints.A().transpose() * w);
  FastStepResult r;
  r.direction = d;
  r.x_next = instance.set.project(x_t - d / (2.0 * params.alpha));
  return r;
}

// Generic inner solver: projected gradient descent on
//   phi(x) = grad_t'(x - x_t) + w' gtil(x) + alpha ||x - x_t||^2
// which is 2*alpha strongly convex. Constant step 1/(L_constraint + 2 alpha)
// where L_constraint bounds the curvature of the w' gtil term.
inline Vec step_inner_solver(const ProblemInstance& instance,
                             const AlgorithmParams& params, const Vec& x_t,
                             const Vec& grad_t, const Vec& queue_next,
                             const Vec& gtil_t,
                             const InnerSolverOptions& opts = {}) {
  const auto& g = instance.constraints;
  const Vec w = detail::nonnegative_queue_weight(queue_next, gtil_t);
  const double gamma = params.gamma;
  const double two_alpha = 2.0 * params.alpha;

  const auto phi = [&](const Vec& x) -> double {
    double v = grad_t.dot(x - x_t) + params.alpha * (x - x_t).squaredNorm();
    if (g.m() > 0) v += w.dot(gamma * g.eval(x));
    return v;
  };
  const auto phi_grad = [&](const Vec& x) -> Vec {
    Vec gr = grad_t + two_alpha * (x - x_t);
    if (g.m() > 0) gr += gamma * (g.jacobian(x).transpose() * w);
    return gr;
  };

  const double l_constraint =
      g.m() > 0 ? gamma * g.curvature() * w.sum() : 0.0;
  const double step = 1.0 / (l_constraint + two_alpha);

  Vec x = x_t;
  double obj = phi(x);
  Vec best_x = x;
  double best_obj = obj;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iter; ++it) {
    const Vec x_new = instance.set.project(x - step * phi_grad(x));
    residual = (x - x_new).norm() / step;  // projected gradient map norm
    const double obj_new = phi(x_new);
    if (obj_new < best_obj) {
      best_obj = obj_new;
      best_x = x_new;
    }
    const double decrease = obj - obj_new;
    x = x_new;
    obj = obj_new;
    if (residual <= opts.grad_map_tol) return x;
    if (decrease >= 0.0 && decrease <= opts.min_decrease && it > 0)
      return best_x;
  }
  throw ConvergenceError(
      "inner solver: iteration cap reached before tolerance",
      std::vector<double>(best_x.data(), best_x.data() + best_x.size()),
      residual);
}

inline double certified_regret_bound(const ProblemInstance& inst,
                                     const AlgorithmParams& p, long T) {
  // The 2*gamma^2*G^2 middle term is what the telescoped drift analysis
  // actually yields, so this is the value traces are checked against.
  return p.alpha * inst.R * inst.R +
         2.0 * p.gamma * p.gamma * inst.G * inst.G +
         inst.D * inst.D * static_cast<double>(T) / (2.0 * p.eta);
}

inline double certified_violation_bound(const ProblemInstance& inst,
                                        const AlgorithmParams& p) {
  return 2.0 * inst.G +
         (p.alpha * inst.R * inst.R + 2.0 * inst.D * inst.R +
          2.0 * p.gamma * p.gamma * inst.G * inst.G) /
             (p.gamma * p.gamma * inst.epsilon);
}

// (regret bound, violation bound). The regret bound excludes the hindsight
// term; both require the full constant set including the Slater margin.
inline std::pair<double, double> certified_bounds(const ProblemInstance& inst,
                                                  const AlgorithmParams& p,
                                                  long T) {
  if (!inst.has_constants() || inst.D < 0.0)
    throw MissingConstantsError("certified_bounds: constants not derived");
  if (!(inst.epsilon > 0.0))
    throw SlaterViolationError("certified_bounds: Slater margin missing");
  return {certified_regret_bound(inst, p, T),
          certified_violation_bound(inst, p)};
}

// Full per-round loop. Round 0 bootstraps from the projected centroid and is
// excluded from the regret/violation sums; rounds 1..T are the counted ones.
// The trace row for round t carries Q(t+1), the queue after that round's
// update.
inline std::vector<RoundTrace> run(const ProblemInstance& instance,
                                   const AlgorithmParams& params,
                                   const LossOracle& losses, long T,
                                   const InnerSolverOptions& inner_opts = {}) {
  if (T < 0) throw std::invalid_argument("run: T must be >= 0");
  params.require_valid_for(instance.beta);

  const bool fast = instance.constraints.is_linear();
  Vec x = instance.set.project(instance.set.centroid());
  QueueState queue = QueueState::zeros(instance.m());

  std::vector<RoundTrace> trace;
  trace.reserve(static_cast<std::size_t>(T) + 1);
  for (long t = 0; t <= T; ++t) {
    RoundTrace row;
    row.t = t;
    row.x = x;
    row.loss = losses.value(t, x);
    row.grad = losses.gradient(t, x);
    row.g_vals = instance.constraints.eval(x);
    row.gtil_vals = params.gamma * row.g_vals;
    const QueueState next_queue = queue_update(queue, row.gtil_vals);
    row.queue_after = next_queue.Q;
    row.drift = next_queue.last_drift;

    if (t < T) {
      if (fast) {
        FastStepResult s = step_fast_linear(instance, params, x, row.grad,
                                            next_queue.Q, row.gtil_vals);
        row.direction = s.direction;
        x = s.x_next;
      } else {
        x = step_inner_solver(instance, params, x, row.grad, next_queue.Q,
                              row.gtil_vals, inner_opts);
      }
    }
    queue = next_queue;
    trace.push_back(std::move(row));
  }
  return trace;
}

struct DoublingState {
  int period_index = 1;       // i, starting at 1
  long rounds_in_period = 0;  // counted rounds consumed in this period
  long period_horizon = 2;    // 2^i
};

struct PeriodInfo {
  int index = 0;           // i
  long horizon = 0;        // 2^i, the horizon the schedule was built for
  long start_round = 0;    // first global counted round of the period
  long rounds_run = 0;     // counted rounds actually executed
  AlgorithmParams params;  // schedule for this period
  Vec queue_final;         // Q(T_p + 1) of the period
};

struct DoublingResult {
  std::vector<RoundTrace> trace;  // global counted rounds 1..stop_round
  std::vector<PeriodInfo> periods;
};

// Doubling trick: run the queue algorithm in periods i = 1, 2, ... of length
// 2^i, each with the schedule for horizon 2^i. Queues reset at period starts;
// the decision carries over. Each period's bootstrap reuses the most recent
// observed loss, so every global round is a counted round.
inline DoublingResult run_doubling(const ProblemInstance& instance,
                                   const LossOracle& losses, double beta,
                                   long stop_round,
                                   const InnerSolverOptions& inner_opts = {}) {
  if (stop_round < 1)
    throw std::invalid_argument("run_doubling: stop_round must be >= 1");

  DoublingResult result;
  result.trace.reserve(static_cast<std::size_t>(stop_round));
  const bool fast = instance.constraints.is_linear();

  Vec x = instance.set.project(instance.set.centroid());
  long global_t = 1;
  long bootstrap_round = 0;  // round whose loss seeds each period's warm-up
  DoublingState st;

  while (global_t <= stop_round) {
    st.period_horizon = 1L << st.period_index;
    st.rounds_in_period = 0;
    const AlgorithmParams params = default_schedule(st.period_horizon, beta);

    PeriodInfo info;
    info.index = st.period_index;
    info.horizon = st.period_horizon;
    info.start_round = global_t;
    info.params = params;

    QueueState queue = QueueState::zeros(instance.m());

    // Warm-up: replay the latest observed loss at the carried decision to
    // produce Q(1) and the period's first counted decision.
    {
      const Vec grad0 = losses.gradient(bootstrap_round, x);
      const Vec g0 = instance.constraints.eval(x);
      const Vec gtil0 = params.gamma * g0;
      const QueueState q1 = queue_update(queue, gtil0);
      if (fast) {
        x = step_fast_linear(instance, params, x, grad0, q1.Q, gtil0).x_next;
      } else {
        x = step_inner_solver(instance, params, x, grad0, q1.Q, gtil0,
                              inner_opts);
      }
      queue = q1;
    }

    while (st.rounds_in_period < st.period_horizon && global_t <= stop_round) {
      RoundTrace row;
      row.t = global_t;
      row.x = x;
      row.loss = losses.value(global_t, x);
      row.grad = losses.gradient(global_t, x);
      row.g_vals = instance.constraints.eval(x);
      row.gtil_vals = params.gamma * row.g_vals;
      const QueueState next_queue = queue_update(queue, row.gtil_vals);
      row.queue_after = next_queue.Q;
      row.drift = next_queue.last_drift;

      if (fast) {
        FastStepResult s = step_fast_linear(instance, params, x, row.grad,
                                            next_queue.Q, row.gtil_vals);
        row.direction = s.direction;
        x = s.x_next;
      } else {
        x = step_inner_solver(instance, params, x, row.grad, next_queue.Q,
                              row.gtil_vals, inner_opts);
      }
      queue = next_queue;
      result.trace.push_back(std::move(row));
      bootstrap_round = global_t;
      ++global_t;
      ++st.rounds_in_period;
    }

    info.rounds_run = st.rounds_in_period;
    info.queue_final = queue.Q;
    result.periods.push_back(std::move(info));
    ++st.period_index;
  }
  return result;
}

}  // namespace ocolt
