#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "ocolt/errors.hpp"

namespace ocolt {

struct TunerConstants {
  double D = 0.0, G = 0.0, R = 0.0, beta = 0.0, epsilon = 0.0;
  long T = 0;

  void validate() const {
    if (!(D > 0.0 && G > 0.0 && R > 0.0 && beta > 0.0 && epsilon > 0.0) ||
        T < 1)
      throw ConfigError("tuner: all constants must be strictly positive");
  }
};

struct TunerProblem {
  enum class Mode {
    minimax,                      // min max(regret bound, violation bound)
    regret_subject_to_violation,  // min regret bound s.t. violation <= cap
    violation_subject_to_regret,  // min violation bound s.t. regret <= cap
  };
  Mode mode = Mode::minimax;
  TunerConstants constants;
  std::optional<double> cap;  // z0 (or the regret cap for the third mode)

  void validate() const {
    constants.validate();
    if (mode != Mode::minimax) {
      if (!cap) throw ConfigError("tuner: constrained mode needs a cap");
      if (mode == Mode::regret_subject_to_violation &&
          !(*cap > 2.0 * constants.G))
        throw InfeasibleError(
            "tuner: violation cap must exceed 2G, the bound's floor term");
    }
  }
};

struct TuneResult {
  double gamma = 0.0, eta = 0.0, alpha = 0.0;
  double objective = 0.0;
};

// The regret expression comes in two variants that differ in the gamma^2 G^2
// coefficient: the tuning program uses the 1/2 factor, while the runtime
// trace checks certify against the 2 factor. Both are reported.
struct BoundPair {
  double regret_program = 0.0;    // alpha R^2 + (1/2) gamma^2 G^2 + D^2 T/(2 eta)
  double regret_certified = 0.0;  // alpha R^2 + 2 gamma^2 G^2 + D^2 T/(2 eta)
  double violation = 0.0;         // 2G + (alpha R^2 + 2DR + 2 gamma^2 G^2)/(gamma^2 eps)
};

namespace tuner_detail {

inline double alpha_floor(const TunerConstants& c, double gamma, double eta) {
  return 0.5 * (c.beta * c.beta * gamma * gamma + eta);
}

inline double regret_program(const TunerConstants& c, double gamma,
                               double eta, double alpha) {
  return alpha * c.R * c.R + 0.5 * gamma * gamma * c.G * c.G +
         c.D * c.D * static_cast<double>(c.T) / (2.0 * eta);
}

inline double regret_certified(const TunerConstants& c, double gamma, double eta,
                           double alpha) {
  return alpha * c.R * c.R + 2.0 * gamma * gamma * c.G * c.G +
         c.D * c.D * static_cast<double>(c.T) / (2.0 * eta);
}

inline double violation(const TunerConstants& c, double gamma, double alpha) {
  return 2.0 * c.G + (alpha * c.R * c.R + 2.0 * c.D * c.R +
                      2.0 * gamma * gamma * c.G * c.G) /
                         (gamma * gamma * c.epsilon);
}

// Golden-section minimization of a unimodal function on [lo, hi].
inline double golden_section(const std::function<double(double)>& f, double lo,
                             double hi, int iters = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && b - a > 1e-13; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

// Coarse log-grid scan followed by golden-section refinement around the
// best cell. The scan makes the search robust to infeasible stretches in
// the constrained modes.
inline double scan_then_refine(const std::function<double(double)>& f,
                               double log_lo, double log_hi, int grid = 257) {
  double best_x = log_lo;
  double best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const double x = log_lo + (log_hi - log_lo) * i / (grid - 1);
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  }
  if (!std::isfinite(best_f))
    throw InfeasibleError("tuner: no feasible parameters in the search range");
  const double cell = (log_hi - log_lo) / (grid - 1);
  const double lo = std::max(log_lo, best_x - 2.0 * cell);
  const double hi = std::min(log_hi, best_x + 2.0 * cell);
  return golden_section(f, lo, hi);
}

inline constexpr double kLogLo = -4.0 * 2.302585092994046;  // 1e-4
inline constexpr double kLogHi = 7.0 * 2.302585092994046;   // 1e7

}  // namespace tuner_detail

// Evaluates both geometric-program bound expressions at a parameter triple.
// The regret row is reported with both coefficient variants (see BoundPair).
inline BoundPair evaluate_bounds(double gamma, double eta, double alpha,
                                 const TunerConstants& c, long T) {
  TunerConstants cc = c;
  cc.T = T;
  cc.validate();
  if (!(gamma > 0.0 && eta > 0.0 && alpha > 0.0))
    throw ValidityError("evaluate_bounds: parameters must be positive");
  const double floor = tuner_detail::alpha_floor(cc, gamma, eta);
  if (alpha - floor < -1e-9 * std::max(1.0, floor))
    throw ValidityError(
        "evaluate_bounds: alpha below 0.5*(beta^2 gamma^2 + eta)");
  BoundPair out;
  out.regret_program = tuner_detail::regret_program(cc, gamma, eta, alpha);
  out.regret_certified = tuner_detail::regret_certified(cc, gamma, eta, alpha);
  out.violation = tuner_detail::violation(cc, gamma, alpha);
  return out;
}

// Solves the parameter-selection geometric program by eliminating alpha at
// its lower bound (both bound expressions increase in alpha, so the third
// constraint binds at the optimum) and searching the remaining two variables
// in log space: a nested coarse-grid + golden-section minimization. The
// regret expression uses the program's 1/2 coefficient.
inline TuneResult tune(const TunerProblem& problem) {
  problem.validate();
  const TunerConstants& c = problem.constants;
  using namespace tuner_detail;

  const auto rb = [&c](double gamma, double eta) {
    return regret_program(c, gamma, eta, alpha_floor(c, gamma, eta));
  };
  const auto vb = [&c](double gamma, double eta) {
    return violation(c, gamma, alpha_floor(c, gamma, eta));
  };

  // Inner minimization over log eta for a fixed gamma; returns the objective
  // value and records the minimizing eta.
  const auto inner = [&](double gamma, double* eta_out) -> double {
    switch (problem.mode) {
      case TunerProblem::Mode::minimax: {
        const auto f = [&](double v) {
          const double eta = std::exp(v);
          return std::max(rb(gamma, eta), vb(gamma, eta));
        };
        const double v = scan_then_refine(f, kLogLo, kLogHi);
        *eta_out = std::exp(v);
        return f(v);
      }
      case TunerProblem::Mode::regret_subject_to_violation: {
        // violation <= cap caps eta from above (violation increases in eta
        // through alpha); regret is convex in eta with an interior minimum.
        const double g2e = gamma * gamma * c.epsilon;
        const double eta_cap =
            ((*problem.cap - 2.0 * c.G) * g2e - 2.0 * c.D * c.R -
             2.0 * gamma * gamma * c.G * c.G) *
                2.0 / (c.R * c.R) -
            c.beta * c.beta * gamma * gamma;
        if (!(eta_cap > 0.0))
          return std::numeric_limits<double>::infinity();
        const double eta_unconstrained =
            c.D * std::sqrt(static_cast<double>(c.T)) / c.R;
        const double eta =
            std::min(eta_unconstrained, eta_cap * (1.0 - 1e-12));
        *eta_out = eta;
        return rb(gamma, eta);
      }
      case TunerProblem::Mode::violation_subject_to_regret: {
        // regret <= cap defines an eta window; violation increases in eta,
        // so the window's lower edge is optimal.
        const double fixed = 0.5 * c.beta * c.beta * gamma * gamma * c.R * c.R +
                             0.5 * gamma * gamma * c.G * c.G;
        const double slack = *problem.cap - fixed;
        // 0.5 R^2 eta^2 - slack * eta + D^2 T / 2 <= 0
        const double a = 0.5 * c.R * c.R;
        const double bq = -slack;
        const double cq = c.D * c.D * static_cast<double>(c.T) / 2.0;
        const double disc = bq * bq - 4.0 * a * cq;
        if (!(slack > 0.0) || disc < 0.0)
          return std::numeric_limits<double>::infinity();
        const double eta_lo = (slack - std::sqrt(disc)) / (2.0 * a);
        const double eta = std::max(eta_lo, 1e-300) * (1.0 + 1e-12);
        if (rb(gamma, eta) > *problem.cap * (1.0 + 1e-12))
          return std::numeric_limits<double>::infinity();
        *eta_out = eta;
        return vb(gamma, eta);
      }
    }
    return std::numeric_limits<double>::infinity();
  };

  double eta_scratch = 0.0;
  const auto outer = [&](double u) {
    return inner(std::exp(u), &eta_scratch);
  };
  const double u = scan_then_refine(outer, kLogLo, kLogHi);

  TuneResult r;
  r.gamma = std::exp(u);
  r.objective = inner(r.gamma, &r.eta);
  r.alpha = alpha_floor(c, r.gamma, r.eta);
  if (!std::isfinite(r.objective))
    throw InfeasibleError("tuner: problem infeasible over the search range");
  return r;
}

}  // namespace ocolt
