#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "ocolt/constraints.hpp"
#include "ocolt/errors.hpp"
#include "ocolt/rng.hpp"
#include "ocolt/simple_set.hpp"

namespace ocolt {

// Slater margins at or below this are treated as a violated interior-point
// assumption: the violation bound scales with 1/epsilon and stops being
// meaningful.
inline constexpr double kSlaterFloor = 1e-6;

struct ProblemInstance {
  SimpleSet set;
  ConstraintFunction constraints;

  // Constants of the gradient-bound / Lipschitz / diameter / interior-point
  // assumptions. Zero means "not yet known" for the strictly positive ones.
  double D = 0.0;        // bound on loss gradient norms over the set
  double beta = 0.0;     // Lipschitz modulus of g
  double G = 0.0;        // bound on ||g(x)|| over the set
  double R = 0.0;        // diameter of the set
  double epsilon = 0.0;  // interior-point margin
  Vec slater_point;      // point with g_k <= -epsilon for all k

  int n() const { return set.dim(); }
  int m() const { return constraints.m(); }
  bool has_epsilon() const { return epsilon > 0.0 && slater_point.size() == n(); }
  bool has_constants() const { return beta > 0.0 && G > 0.0 && R > 0.0; }
};

// Losses arrive one round at a time; round 0 is the bootstrap round whose
// loss never enters the regret sums.
struct LossOracle {
  std::function<double(long, const Vec&)> value;
  std::function<Vec(long, const Vec&)> gradient;
  double grad_bound = 0.0;  // declared D; audited against the trace
};

inline Vec scaled_constraints(const ProblemInstance& instance, double gamma,
                              const Vec& point) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("scaled_constraints: gamma must be > 0");
  return gamma * instance.constraints.eval(point);
}

// Largest singular value via power iteration on A^T A. Deterministic start.
inline double spectral_norm_power_iteration(const Mat& A,
                                            int max_iter = 20000,
                                            double rel_tol = 1e-14) {
  if (A.rows() == 0 || A.cols() == 0) return 0.0;
  const Mat AtA = A.transpose() * A;
  Vec v = Vec::Ones(A.cols());
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vec w = AtA * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    w /= norm;
    const double lambda_new = w.dot(AtA * w);
    const bool settled =
        std::abs(lambda_new - lambda) <= rel_tol * std::max(1.0, lambda_new);
    v = w;
    lambda = lambda_new;
    if (settled && it > 2) break;
  }
  return std::sqrt(std::max(0.0, lambda));
}

namespace detail {

// max_k g_k and one subgradient of it (row of the smallest attaining index).
inline std::pair<double, Vec> max_component_and_subgradient(
    const ConstraintFunction& g, const Vec& x) {
  const Vec vals = g.eval(x);
  int best = 0;
  for (int k = 1; k < g.m(); ++k)
    if (vals[k] > vals[best]) best = k;
  return {vals[best], g.jacobian(x).row(best).transpose()};
}

inline double box_vertex_max_norm(const Mat& A, const Vec& b, const Vec& lower,
                                  const Vec& upper) {
  const int n = static_cast<int>(lower.size());
  double best = 0.0;
  const std::uint64_t count = 1ULL << n;
  Vec x(n);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    for (int i = 0; i < n; ++i)
      x[i] = (mask >> i) & 1 ? upper[i] : lower[i];
    best = std::max(best, (A * x - b).norm());
  }
  return best;
}

inline double box_interval_norm_bound(const Mat& A, const Vec& b,
                                      const Vec& lower, const Vec& upper) {
  double sum = 0.0;
  for (int k = 0; k < A.rows(); ++k) {
    double lo = -b[k], hi = -b[k];
    for (int i = 0; i < A.cols(); ++i) {
      const double a = A(k, i);
      lo += std::min(a * lower[i], a * upper[i]);
      hi += std::max(a * lower[i], a * upper[i]);
    }
    const double row = std::max(std::abs(lo), std::abs(hi));
    sum += row * row;
  }
  return std::sqrt(sum);
}

}  // namespace detail

// Approximate interior point: projected subgradient descent on max_k g_k with
// step R/sqrt(j) for 5000 iterations, returning the average of the last half
// of the iterates (the early iterates are a transient that would pollute a
// plain average). Deterministic given the instance. `tolerance` allows an
// early exit once the suffix average stops moving.
inline std::pair<Vec, double> estimate_slater(const SimpleSet& set,
                                              const ConstraintFunction& g,
                                              double tolerance = 1e-10) {
  if (g.m() < 1)
    throw std::invalid_argument("estimate_slater: no constraints");
  const int iters = 5000;
  const double step_scale = set.diameter();
  Vec x = set.project(set.centroid());
  Vec suffix_sum = Vec::Zero(set.dim());
  long suffix_count = 0;
  Vec prev_avg = x;
  for (int j = 1; j <= iters; ++j) {
    auto [h, sub] = detail::max_component_and_subgradient(g, x);
    const double sub_norm = sub.norm();
    if (sub_norm > 0.0) {
      const double step = step_scale / std::sqrt(static_cast<double>(j));
      x = set.project(x - (step / std::max(1.0, sub_norm)) * sub);
    }
    if (j > iters / 2) {
      suffix_sum += x;
      ++suffix_count;
      if (suffix_count % 250 == 0) {
        const Vec avg = suffix_sum / static_cast<double>(suffix_count);
        if ((avg - prev_avg).norm() <= tolerance) break;
        prev_avg = avg;
      }
    }
  }
  Vec x_hat = set.project(suffix_sum / static_cast<double>(suffix_count));
  const double eps = -g.eval(x_hat).maxCoeff();
  if (eps <= kSlaterFloor)
    throw SlaterViolationError(
        "estimate_slater: margin " + std::to_string(eps) +
        " is at or below the floor; interior-point assumption unverifiable");
  return {std::move(x_hat), eps};
}

// Fills beta, G, R (keeping any user-supplied positive values). Linear
// constraints get exact or certified-upper-bound constants; generic ones
// need a sampling budget and get inflated sampled estimates.
inline ProblemInstance derive_constants(
    ProblemInstance instance, std::optional<long> sampling_budget = {},
    std::uint64_t sample_seed = 0) {
  const auto& g = instance.constraints;
  const auto& set = instance.set;

  if (instance.R <= 0.0) instance.R = set.diameter();

  if (g.is_linear()) {
    if (instance.beta <= 0.0)
      instance.beta = spectral_norm_power_iteration(g.A());
    if (instance.G <= 0.0) {
      if (set.kind() == SimpleSet::Kind::box) {
        instance.G = set.dim() <= 20
                         ? detail::box_vertex_max_norm(g.A(), g.b(),
                                                       set.lower(), set.upper())
                         : detail::box_interval_norm_bound(
                               g.A(), g.b(), set.lower(), set.upper());
      } else {
        instance.G = (g.A() * set.center() - g.b()).norm() +
                     spectral_norm_power_iteration(g.A()) * set.radius();
      }
    }
    return instance;
  }

  if (instance.beta > 0.0 && instance.G > 0.0) return instance;
  if (!sampling_budget)
    throw MissingConstantsError(
        "derive_constants: generic constraints need user-supplied constants "
        "or a sampling budget");

  // Sampled estimates, inflated to act as working upper bounds. The inflation
  // factor is recorded here rather than hidden: sampled maxima understate the
  // true suprema.
  const double inflation = 1.25;
  rng::Sequence seq(sample_seed, rng::kStreamTest + 7);
  double beta_hat = 0.0, g_hat = 0.0;
  for (long s = 0; s < *sampling_budget; ++s) {
    const Vec x = set.sample(seq);
    const Vec y = set.sample(seq);
    const double dx = (x - y).norm();
    if (dx > 1e-12)
      beta_hat = std::max(beta_hat, (g.eval(x) - g.eval(y)).norm() / dx);
    g_hat = std::max(g_hat, g.eval(x).norm());
  }
  if (instance.beta <= 0.0) instance.beta = inflation * beta_hat;
  if (instance.G <= 0.0) instance.G = inflation * g_hat;
  return instance;
}

}  // namespace ocolt
