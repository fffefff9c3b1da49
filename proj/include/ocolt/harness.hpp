#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ocolt/algorithm.hpp"
#include "ocolt/baselines.hpp"
#include "ocolt/errors.hpp"
#include "ocolt/problem.hpp"
#include "ocolt/rng.hpp"

namespace ocolt {

// Adversarial cost stream of the benchmark experiment:
//   c(t) = c1(t) + c2(t) + c3(t)
// with c1 uniform in [-t^{1/10}, t^{1/10}] per component, c2 uniform in
// [-1,0] when t falls in one of three sub-intervals of the horizon (and in
// [0,1] otherwise), and c3 = (-1)^{mu(t)} in every component for a random
// permutation mu of 1..T. All draws are counter-based, so a generator is
// immutable and can serve concurrent runs. Losses are f^t(x) = c(t)'x.
class CostGenerator {
 public:
  using Intervals = std::array<std::pair<double, double>, 3>;

  // Sub-intervals of [0,1]; at T = 5000 the defaults reproduce the round
  // ranges [1,1500], [2000,3500], [4000,5000].
  static constexpr Intervals kDefaultIntervals = {
      {{0.0, 0.3}, {0.4, 0.7}, {0.8, 1.0}}};

  CostGenerator(std::uint64_t seed, long T, int n,
                const Intervals& interval_fractions = kDefaultIntervals)
      : seed_(seed),
        T_(T),
        n_(n),
        intervals_(interval_fractions),
        c1_(seed, rng::kStreamCost1),
        c2_(seed, rng::kStreamCost2),
        boot_(seed, rng::kStreamBootstrap) {
    if (T < 0) throw std::invalid_argument("cost generator: T must be >= 0");
    if (n < 1) throw std::invalid_argument("cost generator: n must be >= 1");
    for (const auto& [a, b] : intervals_)
      if (!(0.0 <= a && a <= b && b <= 1.0))
        throw std::invalid_argument("cost generator: bad interval fractions");
    rng::Sequence perm_seq(seed, rng::kStreamPermutation);
    mu_ = rng::permutation_one_to_n(static_cast<int>(std::max(1L, T)),
                                    perm_seq);
  }

  std::uint64_t seed() const { return seed_; }
  long T() const { return T_; }
  int n() const { return n_; }
  const std::vector<int>& permutation() const { return mu_; }
  const Intervals& interval_fractions() const { return intervals_; }

  bool in_negative_interval(long t) const {
    const double Td = static_cast<double>(T_);
    for (const auto& [a, b] : intervals_)
      if (a * Td <= static_cast<double>(t) && static_cast<double>(t) <= b * Td)
        return true;
    return false;
  }

  Vec cost_at(long t) const {
    if (t < 1 || t > T_)
      throw std::invalid_argument("cost_at: round index out of range");
    const double amp = std::pow(static_cast<double>(t), 0.1);
    const bool neg = in_negative_interval(t);
    const double sign =
        mu_[static_cast<std::size_t>(t - 1)] % 2 == 0 ? 1.0 : -1.0;
    Vec c(n_);
    const std::uint64_t base = static_cast<std::uint64_t>(t - 1) *
                               static_cast<std::uint64_t>(n_);
    for (int i = 0; i < n_; ++i) {
      const double c1 = c1_.uniform(base + static_cast<std::uint64_t>(i), -amp, amp);
      const double c2 = neg ? c2_.uniform(base + static_cast<std::uint64_t>(i), -1.0, 0.0)
                            : c2_.uniform(base + static_cast<std::uint64_t>(i), 0.0, 1.0);
      c[i] = c1 + c2 + sign;
    }
    return c;
  }

  // Round-0 bootstrap cost: round 1's distribution, drawn from a reserved
  // stream so counted rounds never share draws with the warm-up.
  Vec bootstrap_cost() const {
    const bool neg = T_ >= 1 ? in_negative_interval(1) : true;
    Vec c(n_);
    const double sign = (boot_.bits(2 * static_cast<std::uint64_t>(n_)) & 1ULL)
                            ? -1.0
                            : 1.0;
    for (int i = 0; i < n_; ++i) {
      const double c1 = boot_.uniform(static_cast<std::uint64_t>(i), -1.0, 1.0);
      const double c2 =
          neg ? boot_.uniform(static_cast<std::uint64_t>(n_ + i), -1.0, 0.0)
              : boot_.uniform(static_cast<std::uint64_t>(n_ + i), 0.0, 1.0);
      c[i] = c1 + c2 + sign;
    }
    return c;
  }

  // Componentwise |c_i| <= T^{1/10} + 2, hence this bound on gradient norms.
  double grad_bound() const {
    return std::sqrt(static_cast<double>(n_)) *
           (std::pow(static_cast<double>(std::max(1L, T_)), 0.1) + 2.0);
  }

  Vec cost_sum() const {
    Vec s = Vec::Zero(n_);
    for (long t = 1; t <= T_; ++t) s += cost_at(t);
    return s;
  }

  LossOracle oracle() const {
    const CostGenerator* self = this;
    LossOracle o;
    o.value = [self](long t, const Vec& x) {
      return (t == 0 ? self->bootstrap_cost() : self->cost_at(t)).dot(x);
    };
    o.gradient = [self](long t, const Vec& x) {
      (void)x;
      return t == 0 ? self->bootstrap_cost() : self->cost_at(t);
    };
    o.grad_bound = grad_bound();
    return o;
  }

 private:
  std::uint64_t seed_;
  long T_;
  int n_;
  Intervals intervals_;
  rng::Stream c1_, c2_, boot_;
  std::vector<int> mu_;
};

// Benchmark instance: A in [0,1]^{m x n}, b in [0,2]^m componentwise uniform,
// X0 the unit box, constants derived, interior point estimated. Instances
// whose Slater margin lands at the floor are regenerated from the next
// attempt's streams (recorded so the manifest can report it).
inline ProblemInstance generate_instance(std::uint64_t seed, int n = 2,
                                         int m = 3,
                                         int* attempts_out = nullptr) {
  const int max_attempts = 100;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const std::uint64_t shift =
        static_cast<std::uint64_t>(attempt) * rng::kAttemptStride;
    rng::Stream sa(seed, rng::kStreamInstanceA + shift);
    rng::Stream sb(seed, rng::kStreamInstanceB + shift);
    Mat A(m, n);
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < n; ++i)
        A(k, i) = sa.unit(static_cast<std::uint64_t>(k * n + i));
    Vec b(m);
    for (int k = 0; k < m; ++k)
      b[k] = 2.0 * sb.unit(static_cast<std::uint64_t>(k));

    ProblemInstance inst{
        SimpleSet::box(Vec::Constant(n, -1.0), Vec::Constant(n, 1.0)),
        ConstraintFunction::linear(std::move(A), std::move(b))};
    inst = derive_constants(std::move(inst));
    try {
      auto [x_hat, eps] = estimate_slater(inst.set, inst.constraints);
      inst.slater_point = std::move(x_hat);
      inst.epsilon = eps;
    } catch (const SlaterViolationError&) {
      continue;
    }
    if (attempts_out) *attempts_out = attempt + 1;
    return inst;
  }
  throw GenerationError("generate_instance: no instance with a usable Slater "
                        "margin within the attempt cap");
}

struct Hindsight {
  Vec x_star;
  double value = 0.0;
};

namespace detail {

// All faces of the feasible region as rows c'x <= d: box faces then the
// functional constraints.
inline std::pair<Mat, Vec> stacked_halfspaces(const SimpleSet& set,
                                              const Mat& A, const Vec& b) {
  const int n = set.dim();
  const int m = static_cast<int>(A.rows());
  Mat C(2 * n + m, n);
  Vec d(2 * n + m);
  C.setZero();
  for (int i = 0; i < n; ++i) {
    C(i, i) = 1.0;
    d[i] = set.upper()[i];
    C(n + i, i) = -1.0;
    d[n + i] = -set.lower()[i];
  }
  C.bottomRows(m) = A;
  d.tail(m) = b;
  return {std::move(C), std::move(d)};
}

inline bool lex_less(const Vec& a, const Vec& b, double tol = 1e-12) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - tol) return true;
    if (a[i] > b[i] + tol) return false;
  }
  return false;
}

inline std::vector<Vec> enumerate_vertices(const Mat& C, const Vec& d,
                                           double feas_tol = 1e-9) {
  const int n = static_cast<int>(C.cols());
  const int rows = static_cast<int>(C.rows());
  std::vector<Vec> vertices;
  std::vector<int> combo(static_cast<std::size_t>(n));
  // Iterate over all n-subsets of the rows.
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Mat M(n, n);
      Vec rhs(n);
      for (int j = 0; j < n; ++j) {
        M.row(j) = C.row(combo[static_cast<std::size_t>(j)]);
        rhs[j] = d[combo[static_cast<std::size_t>(j)]];
      }
      Eigen::FullPivLU<Mat> lu(M);
      if (!lu.isInvertible()) return;
      const Vec v = lu.solve(rhs);
      if (((C * v - d).array() <= feas_tol).all()) {
        for (const Vec& u : vertices)
          if ((u - v).norm() <= 1e-9) return;
        vertices.push_back(v);
      }
      return;
    }
    for (int r = start; r < rows; ++r) {
      combo[static_cast<std::size_t>(depth)] = r;
      rec(r + 1, depth + 1);
    }
  };
  rec(0, 0);
  return vertices;
}

}  // namespace detail

// Best fixed feasible decision for summed linear losses. Box sets with linear
// constraints in dimension <= 3 are solved exactly by vertex enumeration (a
// linear objective over a compact polytope attains its minimum at a vertex);
// everything else falls back to projected subgradient on an exact-penalty
// objective. Value ties pick the lexicographically smallest vertex.
inline Hindsight hindsight_optimum(const ProblemInstance& instance,
                                   const Vec& cost_sum) {
  const int n = instance.n();
  if (cost_sum.size() != n)
    throw std::invalid_argument("hindsight_optimum: dimension mismatch");

  const bool exact = instance.set.kind() == SimpleSet::Kind::box &&
                     instance.constraints.is_linear() && n <= 3;
  if (exact) {
    auto [C, d] = detail::stacked_halfspaces(
        instance.set, instance.constraints.A(), instance.constraints.b());
    const auto vertices = detail::enumerate_vertices(C, d);
    if (vertices.empty())
      throw InfeasibleError("hindsight_optimum: feasible region is empty");
    const Vec* best = &vertices.front();
    double best_val = cost_sum.dot(vertices.front());
    for (const Vec& v : vertices) {
      const double val = cost_sum.dot(v);
      if (val < best_val - 1e-9 ||
          (std::abs(val - best_val) <= 1e-9 && detail::lex_less(v, *best))) {
        best = &v;
        best_val = val;
      }
    }
    return {*best, cost_sum.dot(*best)};
  }

  // Exact penalty: rho beyond ||c|| R / eps makes the penalized minimizer
  // coincide with the constrained one under the interior-point assumption.
  const double eps = instance.epsilon > 0.0 ? instance.epsilon : 1e-3;
  const double rho =
      2.0 * (cost_sum.norm() * instance.set.diameter() / eps + cost_sum.norm() + 1.0);
  const auto& g = instance.constraints;
  const long iters = 20000;
  Vec x = instance.set.project(instance.set.centroid());
  Vec suffix = Vec::Zero(n);
  long count = 0;
  for (long j = 1; j <= iters; ++j) {
    Vec grad = cost_sum;
    if (g.m() > 0) {
      const Vec vals = g.eval(x);
      const Mat J = g.jacobian(x);
      for (int k = 0; k < g.m(); ++k)
        if (vals[k] > 0.0) grad += rho * J.row(k).transpose();
    }
    const double gn = grad.norm();
    if (gn > 0.0) {
      const double step = instance.set.diameter() /
                          (gn * std::sqrt(static_cast<double>(j)));
      x = instance.set.project(x - step * grad);
    }
    if (j > iters / 2) {
      suffix += x;
      ++count;
    }
  }
  Vec x_star = instance.set.project(suffix / static_cast<double>(count));
  if (g.m() > 0 && g.eval(x_star).maxCoeff() > 1e-4)
    throw InfeasibleError("hindsight_optimum: penalty solution infeasible");
  return {x_star, cost_sum.dot(x_star)};
}

struct Manifest {
  std::uint64_t seed = 0;
  long T = 0;
  int n = 0, m = 0;
  std::string algorithm;
  std::map<std::string, double> parameters;  // schedule / step constants
  std::map<std::string, double> constants;   // D, beta, G, R, epsilon
  std::map<std::string, double> bounds;      // certified bound values
  int instance_attempts = 1;
  std::string generator = "splitmix64-counter";
};

struct RunResult {
  std::vector<RoundTrace> trace;              // rounds 0..T
  std::vector<double> cumulative_regret;      // length T, entry for round t+1
  std::vector<Vec> cumulative_violation;      // length T
  Vec hindsight_x;
  double hindsight_value = 0.0;
  Manifest manifest;
  double wall_ms = 0.0;  // in-memory only; never serialized

  long rounds() const { return static_cast<long>(cumulative_regret.size()); }
  double final_regret() const {
    return cumulative_regret.empty() ? 0.0 : cumulative_regret.back();
  }
  double final_max_violation() const {
    return cumulative_violation.empty() ? 0.0
                                        : cumulative_violation.back().maxCoeff();
  }
};

// Prefix regret/violation series from a trace. The comparator is the fixed
// full-horizon optimum; prefix curves deliberately do not re-optimize it.
inline RunResult compute_metrics(std::vector<RoundTrace> trace,
                                 const ProblemInstance& instance,
                                 const Hindsight& hindsight,
                                 const LossOracle& losses) {
  if (trace.empty())
    throw IncompleteTraceError("compute_metrics: empty trace");
  const long T = trace.back().t;
  const bool has_bootstrap = trace.front().t == 0;
  const long expected =
      has_bootstrap ? T + 1 : T;
  if (static_cast<long>(trace.size()) != expected)
    throw IncompleteTraceError("compute_metrics: missing rounds in trace");

  RunResult result;
  result.hindsight_x = hindsight.x_star;
  result.hindsight_value = hindsight.value;
  result.cumulative_regret.reserve(static_cast<std::size_t>(T));
  result.cumulative_violation.reserve(static_cast<std::size_t>(T));

  double regret = 0.0;
  Vec viol = Vec::Zero(instance.m());
  for (const RoundTrace& row : trace) {
    if (row.t == 0) continue;
    regret += row.loss - losses.value(row.t, hindsight.x_star);
    viol += row.g_vals;
    result.cumulative_regret.push_back(regret);
    result.cumulative_violation.push_back(viol);
  }
  result.trace = std::move(trace);
  return result;
}

// Which algorithm a comparison cell runs.
struct AlgorithmSpec {
  enum class Kind { vq, ogd_proj, primal_dual };
  Kind kind = Kind::vq;
  double theta_exp = 0.5;  // primal-dual only
  std::optional<AlgorithmParams> params_override;

  std::string label() const {
    switch (kind) {
      case Kind::vq: return "vq";
      case Kind::ogd_proj: return "ogd-proj";
      case Kind::primal_dual: {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "pd-%.4g", theta_exp);
        return buf;
      }
    }
    return "?";
  }

  static AlgorithmSpec parse(const std::string& name, double theta_exp) {
    AlgorithmSpec s;
    s.theta_exp = theta_exp;
    if (name == "vq") s.kind = Kind::vq;
    else if (name == "ogd-proj") s.kind = Kind::ogd_proj;
    else if (name == "primal-dual") s.kind = Kind::primal_dual;
    else throw ConfigError("unknown algorithm: " + name);
    return s;
  }
};

// One full seeded run of one algorithm on the benchmark scenario.
inline RunResult run_benchmark(const AlgorithmSpec& spec,
                               const ProblemInstance& instance_in,
                               const CostGenerator& gen) {
  const auto t0 = std::chrono::steady_clock::now();
  ProblemInstance instance = instance_in;
  instance.D = gen.grad_bound();
  const long T = gen.T();
  const LossOracle losses = gen.oracle();
  const Hindsight hs = hindsight_optimum(instance, gen.cost_sum());

  Manifest man;
  man.seed = gen.seed();
  man.T = T;
  man.n = instance.n();
  man.m = instance.m();
  man.algorithm = spec.label();
  man.constants = {{"D", instance.D},
                   {"beta", instance.beta},
                   {"G", instance.G},
                   {"R", instance.R},
                   {"epsilon", instance.epsilon}};

  std::vector<RoundTrace> trace;
  switch (spec.kind) {
    case AlgorithmSpec::Kind::vq: {
      const AlgorithmParams params = spec.params_override
                                         ? *spec.params_override
                                         : default_schedule(std::max(1L, T),
                                                            instance.beta);
      trace = run(instance, params, losses, T);
      man.parameters = {{"gamma", params.gamma},
                        {"alpha", params.alpha},
                        {"eta", params.eta}};
      if (instance.has_epsilon() && T >= 1) {
        auto [rb, vb] = certified_bounds(instance, params, T);
        man.bounds = {{"regret_certified", rb}, {"violation", vb}};
      }
      break;
    }
    case AlgorithmSpec::Kind::ogd_proj: {
      const double step =
          instance.R /
          (std::max(1e-12, instance.D) *
           std::sqrt(static_cast<double>(std::max(1L, T))));
      trace = run_ogd_projected(instance, losses, T, step);
      man.parameters = {{"step", step}};
      break;
    }
    case AlgorithmSpec::Kind::primal_dual: {
      const auto sched = PrimalDualSchedule::from_horizon(
          std::max(1L, T), spec.theta_exp, instance.beta);
      trace = run_primal_dual(instance, losses, T, sched, spec.theta_exp);
      man.parameters = {{"step_primal", sched.step_primal},
                        {"step_dual", sched.step_dual},
                        {"reg", sched.reg},
                        {"theta_exp", spec.theta_exp}};
      break;
    }
  }

  RunResult result = compute_metrics(std::move(trace), instance, hs, losses);

  // Gradient-bound audit: every certified bound leans on D, so a loss oracle
  // that breaks its declared bound must not produce a silently wrong run.
  double worst_grad = 0.0;
  for (const RoundTrace& row : result.trace)
    worst_grad = std::max(worst_grad, row.grad.norm());
  if (worst_grad > instance.D + 1e-9)
    throw std::logic_error(
        "run_benchmark: loss gradients exceed the declared bound D");

  result.manifest = std::move(man);
  result.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return result;
}

struct ComparisonCell {
  std::string algorithm;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  RunResult result;  // valid when ok
};

struct ComparisonTable {
  long T = 0;
  std::vector<std::string> algorithms;  // column order
  std::vector<std::uint64_t> seeds;     // row order
  std::vector<ComparisonCell> cells;    // seed-major

  const ComparisonCell* find(std::uint64_t seed,
                             const std::string& algorithm) const {
    for (const auto& c : cells)
      if (c.seed == seed && c.algorithm == algorithm) return &c;
    return nullptr;
  }
};

// Runs every algorithm on the one given instance and cost stream. Failures
// are recorded in their cell; the sweep continues.
inline ComparisonTable compare(const std::vector<AlgorithmSpec>& algorithms,
                               const ProblemInstance& instance,
                               const CostGenerator& gen) {
  ComparisonTable table;
  table.T = gen.T();
  table.seeds = {gen.seed()};
  for (const auto& a : algorithms) table.algorithms.push_back(a.label());
  for (const auto& spec : algorithms) {
    ComparisonCell cell;
    cell.algorithm = spec.label();
    cell.seed = gen.seed();
    try {
      cell.result = run_benchmark(spec, instance, gen);
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
    table.cells.push_back(std::move(cell));
  }
  return table;
}

// Seed-battery comparison: one generated instance and cost stream per seed,
// identical across the algorithms.
inline ComparisonTable compare(const std::vector<AlgorithmSpec>& algorithms,
                               long T, const std::vector<std::uint64_t>& seeds,
                               int n = 2, int m = 3) {
  ComparisonTable table;
  table.T = T;
  table.seeds = seeds;
  for (const auto& a : algorithms) table.algorithms.push_back(a.label());
  for (const std::uint64_t seed : seeds) {
    int attempts = 1;
    const ProblemInstance instance = generate_instance(seed, n, m, &attempts);
    const CostGenerator gen(seed, T, n);
    ComparisonTable one = compare(algorithms, instance, gen);
    for (ComparisonCell& cell : one.cells) {
      if (cell.ok) cell.result.manifest.instance_attempts = attempts;
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

}  // namespace ocolt
