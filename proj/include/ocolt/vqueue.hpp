#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "ocolt/simple_set.hpp"

namespace ocolt {

// Virtual queue backlog per constraint, its Lyapunov value L = 0.5*||Q||^2,
// and the drift of the most recent update. Queues start at zero and are
// never warm-started across runs; doubling-trick periods reset them.
struct QueueState {
  Vec Q;
  double L = 0.0;
  double last_drift = 0.0;

  static QueueState zeros(int m) {
    QueueState s;
    s.Q = Vec::Zero(m);
    return s;
  }

  int m() const { return static_cast<int>(Q.size()); }
};

// Q_k <- max{ -gtil_k, Q_k + gtil_k } componentwise; recomputes L and records
// the drift of this update.
inline QueueState queue_update(const QueueState& state, const Vec& gtil) {
  if (gtil.size() != state.Q.size())
    throw std::invalid_argument("queue_update: dimension mismatch");
  QueueState next;
  next.Q = (-gtil).cwiseMax(state.Q + gtil);
  next.L = 0.5 * next.Q.squaredNorm();
  next.last_drift = next.L - 0.5 * state.Q.squaredNorm();
  return next;
}

inline double drift(const QueueState& before, const QueueState& after) {
  if (before.Q.size() != after.Q.size())
    throw std::invalid_argument("drift: dimension mismatch");
  return 0.5 * (after.Q.squaredNorm() - before.Q.squaredNorm());
}

// Certified componentwise upper bounds on the cumulative constraint sums:
// sum_{t=1..T} g_k(x(t)) <= Q_k(T+1) / gamma.
inline Vec violation_from_queue(const Vec& Q_final, double gamma) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("violation_from_queue: gamma must be > 0");
  return Q_final / gamma;
}

}  // namespace ocolt
