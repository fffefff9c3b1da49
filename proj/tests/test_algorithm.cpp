#include <catch2/catch_amalgamated.hpp>

#include "ocolt/algorithm.hpp"
#include "ocolt/diagnostics.hpp"
#include "test_util.hpp"

using namespace ocolt;
using namespace ocolt::testutil;

namespace {

ProblemInstance one_dim_instance(double offset = 0.25) {
  Mat A(1, 1);
  A << 1;
  ProblemInstance inst{SimpleSet::box(vec1(-1), vec1(1)),
                       ConstraintFunction::linear(A, vec1(offset))};
  inst = derive_constants(std::move(inst));
  inst.D = 1.0;
  return inst;
}

LossOracle constant_loss(const Vec& c) {
  LossOracle o;
  o.value = [c](long, const Vec& x) { return c.dot(x); };
  o.gradient = [c](long, const Vec&) { return c; };
  o.grad_bound = c.norm();
  return o;
}

}  // namespace

TEST_CASE("default schedule closed forms") {
  const auto p16 = default_schedule(16, 1.0);
  CHECK(p16.gamma == Catch::Approx(2.0).margin(1e-12));
  CHECK(p16.eta == Catch::Approx(4.0).margin(1e-12));
  CHECK(p16.alpha == Catch::Approx(4.0).margin(1e-12));
  CHECK(0.5 * (p16.gamma * p16.gamma + p16.eta) <= p16.alpha + 1e-12);
  CHECK(p16.valid_for(1.0));

  const auto p5000 = default_schedule(5000, 1.0);
  CHECK(p5000.gamma == Catch::Approx(std::pow(5000.0, 0.25)).margin(1e-12));
  CHECK(p5000.alpha == Catch::Approx(std::sqrt(5000.0)).margin(1e-9));

  const auto p1 = default_schedule(1, 2.0);
  CHECK(p1.gamma == 1.0);
  CHECK(p1.eta == 1.0);
  CHECK(p1.alpha == Catch::Approx(0.5 * (4.0 + 1.0)).margin(1e-12));

  CHECK_THROWS_AS(default_schedule(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(default_schedule(16, 0.0), std::invalid_argument);
}

TEST_CASE("invalid parameter triples are a hard configuration error") {
  AlgorithmParams p{.gamma = 2.0, .alpha = 3.9, .eta = 4.0, .horizon = 16};
  CHECK_FALSE(p.valid_for(1.0));  // needs alpha >= 4
  CHECK_THROWS_AS(p.require_valid_for(1.0), ConfigError);
  p.alpha = 4.0;
  CHECK_NOTHROW(p.require_valid_for(1.0));
}

TEST_CASE("fast path reproduces the worked 1-D update") {
  const auto inst = one_dim_instance(0.25);
  AlgorithmParams params{.gamma = 1.0, .alpha = 1.0, .eta = 1.0, .horizon = 1};
  // x(t) = 0.5, grad = 1, gtil = 0.25, Q(t+1) = 2:
  // d = 1 + (2 + 0.25) * 1 = 3.25, x+ = P[0.5 - 1.625] = -1.
  const auto r = step_fast_linear(inst, params, vec1(0.5), vec1(1.0),
                                  vec1(2.0), vec1(0.25));
  CHECK(r.direction[0] == Catch::Approx(3.25).margin(1e-15));
  CHECK(r.x_next[0] == -1.0);
}

TEST_CASE("fast path with zero direction is a fixed point") {
  const auto inst = one_dim_instance(0.25);
  AlgorithmParams params{.gamma = 1.0, .alpha = 1.0, .eta = 1.0, .horizon = 1};
  // Q(t+1) + gtil = 0 and grad = 0.
  const auto r = step_fast_linear(inst, params, vec1(0.5), vec1(0.0),
                                  vec1(0.25), vec1(-0.25));
  CHECK(r.direction.norm() == 0.0);
  CHECK(r.x_next[0] == 0.5);
}

TEST_CASE("fast path refuses generic constraints") {
  ProblemInstance inst{SimpleSet::box(vec1(-1), vec1(1)), quadratic_1d()};
  AlgorithmParams params{.gamma = 1.0, .alpha = 2.0, .eta = 1.0, .horizon = 1};
  CHECK_THROWS_AS(step_fast_linear(inst, params, vec1(0), vec1(1), vec1(1),
                                   vec1(-1)),
                  WrongPathError);
}

TEST_CASE("inner solver with no constraints is a proximal step") {
  ProblemInstance inst{SimpleSet::box(vec2(-1, -1), vec2(1, 1)),
                       ConstraintFunction::none(2)};
  inst.R = inst.set.diameter();
  AlgorithmParams params{.gamma = 1.0, .alpha = 2.0, .eta = 1.0, .horizon = 1};
  const Vec x_t = vec2(0.25, -0.5);
  const Vec c = vec2(1.5, -3.0);
  const Vec got = step_inner_solver(inst, params, x_t, c, Vec::Zero(0),
                                    Vec::Zero(0));
  const Vec want = inst.set.project(x_t - c / (2.0 * params.alpha));
  CHECK((got - want).norm() <= 1e-9);
}

TEST_CASE("inner solver matches the 1-D grid oracle") {
  const auto inst = one_dim_instance(0.25);
  AlgorithmParams params{.gamma = 1.0, .alpha = 1.0, .eta = 1.0, .horizon = 1};
  const Vec got = step_inner_solver(inst, params, vec1(0.5), vec1(1.0),
                                    vec1(2.0), vec1(0.25));
  CHECK(got[0] == Catch::Approx(-1.0).margin(1e-6));

  const auto phi = [&](double x) {
    return 1.0 * (x - 0.5) + 2.25 * (x - 0.25) + std::pow(x - 0.5, 2);
  };
  const double oracle = grid_argmin_1d(phi, -1.0, 1.0, 1e-4);
  CHECK(std::abs(got[0] - oracle) <= 1e-4);
}

TEST_CASE("inner solver matches the grid oracle on a quadratic constraint") {
  ProblemInstance inst{SimpleSet::box(vec1(-2), vec1(2)), quadratic_1d()};
  inst.R = 4.0;
  AlgorithmParams params{.gamma = 1.0, .alpha = 1.0, .eta = 1.0, .horizon = 1};
  // x(t) = 0, grad = 1, Q(t+1) = 1, gtil(x(t)) = -1 so weight w = 0... use
  // Q(t+1) = 2 to keep the constraint term alive: w = 2 + (-1) = 1.
  const Vec x_t = vec1(0.0);
  const Vec got = step_inner_solver(inst, params, x_t, vec1(1.0), vec1(2.0),
                                    vec1(-1.0));
  const auto phi = [&](double x) {
    return x + 1.0 * (x * x - 1.0) + x * x;
  };
  const double oracle = grid_argmin_1d(phi, -2.0, 2.0, 1e-5);
  CHECK(std::abs(got[0] - oracle) <= 1e-4);
}

TEST_CASE("inner solver caps iterations with a convergence error") {
  ProblemInstance inst{SimpleSet::box(vec1(-2), vec1(2)), quadratic_1d()};
  inst.R = 4.0;
  AlgorithmParams params{.gamma = 1.0, .alpha = 1.0, .eta = 1.0, .horizon = 1};
  InnerSolverOptions opts;
  opts.max_iter = 1;
  opts.grad_map_tol = 1e-16;
  opts.min_decrease = 0.0;
  try {
    step_inner_solver(inst, params, vec1(2.0), vec1(1.0), vec1(5.0), vec1(3.0),
                      opts);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.best_iterate().size() == 1);
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("fast path agrees with the generic solver on random subproblems") {
  rng::Sequence seq(11, rng::kStreamTest + 8);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(seq.next_below(3));
    const int m = 1 + static_cast<int>(seq.next_below(3));
    Mat A(m, n);
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < n; ++i) A(k, i) = seq.next_uniform(-1, 1);
    Vec b(m);
    for (int k = 0; k < m; ++k) b[k] = seq.next_uniform(-1, 1);
    ProblemInstance inst{
        SimpleSet::box(Vec::Constant(n, -1.0), Vec::Constant(n, 1.0)),
        ConstraintFunction::linear(A, b)};
    AlgorithmParams params{.gamma = seq.next_uniform(0.5, 3),
                           .alpha = seq.next_uniform(1, 5),
                           .eta = 1.0,
                           .horizon = 1};
    Vec x_t(n), grad(n);
    for (int i = 0; i < n; ++i) {
      x_t[i] = seq.next_uniform(-1, 1);
      grad[i] = seq.next_uniform(-2, 2);
    }
    const Vec gtil = params.gamma * inst.constraints.eval(x_t);
    Vec queue(m);
    for (int k = 0; k < m; ++k)
      queue[k] = std::max(-gtil[k], seq.next_uniform(0, 4));
    const auto fast =
        step_fast_linear(inst, params, x_t, grad, queue, gtil);
    const Vec slow =
        step_inner_solver(inst, params, x_t, grad, queue, gtil);
    CHECK((fast.x_next - slow).norm() <= 1e-6);
  }
}

TEST_CASE("subproblem minimizer satisfies the strong-convexity certificate") {
  rng::Sequence seq(13, rng::kStreamTest + 9);
  const auto inst = one_dim_instance(0.25);
  AlgorithmParams params{.gamma = 1.5, .alpha = 2.0, .eta = 1.0, .horizon = 1};
  const Vec x_t = vec1(0.3);
  const Vec grad = vec1(-0.7);
  const Vec gtil = params.gamma * inst.constraints.eval(x_t);
  const Vec queue = vec1(1.2);
  const Vec w = queue + gtil;
  const Vec x_plus = step_inner_solver(inst, params, x_t, grad, queue, gtil);

  const auto phi = [&](const Vec& x) {
    return grad.dot(x - x_t) +
           w.dot(params.gamma * inst.constraints.eval(x)) +
           params.alpha * (x - x_t).squaredNorm();
  };
  for (int trial = 0; trial < 100; ++trial) {
    const Vec x = inst.set.sample(seq);
    CHECK(phi(x_plus) <=
          phi(x) - params.alpha * (x - x_plus).squaredNorm() + 1e-7);
  }
}

TEST_CASE("run with T=0 is the bootstrap round only") {
  const auto inst = one_dim_instance(0.25);
  const auto losses = constant_loss(vec1(1.0));
  const auto trace = run(inst, default_schedule(1, inst.beta), losses, 0);
  REQUIRE(trace.size() == 1);
  CHECK(trace[0].t == 0);
  CHECK(trace[0].x[0] == 0.0);  // projected centroid of [-1,1]
}

TEST_CASE("constant-zero loss keeps the certificate over the whole trace") {
  Mat A(1, 1);
  A << 1;
  ProblemInstance inst{SimpleSet::box(vec1(-1), vec1(1)),
                       ConstraintFunction::linear(A, vec1(0))};
  inst = derive_constants(std::move(inst));
  inst.D = 0.5;
  const auto losses = constant_loss(vec1(0.0));
  const long T = 120;
  const auto params = default_schedule(T, inst.beta);
  const auto trace = run(inst, params, losses, T);
  double sum = 0.0;
  double max_x = -2.0;
  for (const auto& row : trace) {
    if (row.t >= 1) {
      sum += row.g_vals[0];
      max_x = std::max(max_x, row.x[0]);
    }
  }
  // With no loss pressure the queue pushes decisions nonpositive.
  CHECK(max_x <= 0.5);
  CHECK(sum <= trace.back().queue_after[0] / params.gamma + 1e-9);
}

TEST_CASE("trace rows respect membership and exact scaling") {
  const auto inst = one_dim_instance(0.1);
  const auto losses = constant_loss(vec1(0.8));
  const long T = 60;
  const auto params = default_schedule(T, inst.beta);
  const auto trace = run(inst, params, losses, T);
  for (const auto& row : trace) {
    CHECK((row.x - inst.set.project(row.x)).norm() <= 1e-9);
    CHECK((row.gtil_vals - params.gamma * row.g_vals).norm() == 0.0);
    if (row.t < T) REQUIRE(row.direction.has_value());
  }
}

TEST_CASE("the full loop runs on a ball-shaped simple set") {
  Mat A(1, 2);
  A << 1, 1;
  ProblemInstance inst{SimpleSet::ball(vec2(0, 0), 1.5),
                       ConstraintFunction::linear(A, vec1(0.5))};
  inst = derive_constants(std::move(inst));
  auto [x_hat, eps] = estimate_slater(inst.set, inst.constraints);
  inst.slater_point = x_hat;
  inst.epsilon = eps;
  inst.D = 1.0;

  rng::Stream costs(23, rng::kStreamTest + 17);
  LossOracle losses;
  losses.value = [costs](long t, const Vec& x) {
    return costs.uniform(static_cast<std::uint64_t>(2 * t), -0.7, 0.7) * x[0] +
           costs.uniform(static_cast<std::uint64_t>(2 * t + 1), -0.7, 0.7) *
               x[1];
  };
  losses.gradient = [costs](long t, const Vec&) {
    return vec2(costs.uniform(static_cast<std::uint64_t>(2 * t), -0.7, 0.7),
                costs.uniform(static_cast<std::uint64_t>(2 * t + 1), -0.7, 0.7));
  };
  losses.grad_bound = 1.0;

  const long T = 100;
  const auto params = default_schedule(T, inst.beta);
  const auto trace = run(inst, params, losses, T);
  const auto rep = check_queue_properties(trace, inst, params.gamma);
  CHECK(rep.negative_queue <= 0.0);
  CHECK(rep.violation_cert <= 1e-9);
  CHECK(rep.membership <= 1e-9);
  CHECK(queue_bound_worst_excess(trace, inst, params) <= 1e-6);
}

TEST_CASE("runs are bitwise deterministic") {
  const auto inst = one_dim_instance(0.25);
  rng::Stream costs(3, rng::kStreamTest + 10);
  LossOracle losses;
  losses.value = [costs](long t, const Vec& x) {
    return costs.uniform(static_cast<std::uint64_t>(t), -1, 1) * x[0];
  };
  losses.gradient = [costs](long t, const Vec&) {
    return vec1(costs.uniform(static_cast<std::uint64_t>(t), -1, 1));
  };
  losses.grad_bound = 1.0;
  const auto params = default_schedule(80, inst.beta);
  const auto a = run(inst, params, losses, 80);
  const auto b = run(inst, params, losses, 80);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x[0] == b[i].x[0]);
    CHECK(a[i].queue_after[0] == b[i].queue_after[0]);
    CHECK(a[i].loss == b[i].loss);
    CHECK(a[i].drift == b[i].drift);
  }
}

TEST_CASE("certified bounds evaluate in closed form") {
  ProblemInstance inst{SimpleSet::box(vec2(-1, -1), vec2(1, 1)),
                       ConstraintFunction::linear(Mat::Identity(2, 2),
                                                  vec2(0, 0))};
  inst.beta = 1.0;
  inst.G = 1.0;
  inst.R = 2.0;
  inst.D = 1.0;
  inst.epsilon = 0.5;
  inst.slater_point = vec2(-0.9, -0.9);
  AlgorithmParams p{.gamma = 2.0, .alpha = 4.0, .eta = 4.0, .horizon = 16};
  const auto [regret_bound, violation_bound] = certified_bounds(inst, p, 16);
  CHECK(regret_bound == Catch::Approx(26.0).margin(1e-12));
  CHECK(violation_bound == Catch::Approx(16.0).margin(1e-12));

  // G = 0: only the alpha R^2 + 2DR part remains in the numerator.
  ProblemInstance zero_g = inst;
  zero_g.G = 1e-300;  // formally positive, numerically nil
  const double expected =
      (p.alpha * 4.0 + 2.0 * 1.0 * 2.0) / (p.gamma * p.gamma * 0.5);
  CHECK(certified_violation_bound(zero_g, p) ==
        Catch::Approx(expected).margin(1e-9));

  ProblemInstance no_eps = inst;
  no_eps.epsilon = 0.0;
  CHECK_THROWS_AS(certified_bounds(no_eps, p, 16), SlaterViolationError);
}

TEST_CASE("default-schedule violation bound has the advertised limit") {
  ProblemInstance inst{SimpleSet::box(vec2(-1, -1), vec2(1, 1)),
                       ConstraintFunction::linear(Mat::Identity(2, 2),
                                                  vec2(0, 0))};
  inst.beta = 1.3;
  inst.G = 2.0;
  inst.R = 2.5;
  inst.D = 1.7;
  inst.epsilon = 0.6;
  const double limit =
      2.0 * inst.G +
      (0.5 * (inst.beta * inst.beta + 1.0) * inst.R * inst.R +
       2.0 * inst.G * inst.G) /
          inst.epsilon;
  const double capped = limit + 2.0 * inst.D * inst.R / inst.epsilon;
  double prev = std::numeric_limits<double>::infinity();
  for (const long T : {100L, 10000L, 1000000L}) {
    const auto p = default_schedule(T, inst.beta);
    const double vb = certified_violation_bound(inst, p);
    // Exact identity: vb = limit + 2DR/(sqrt(T) eps).
    const double expected =
        limit + 2.0 * inst.D * inst.R /
                    (std::sqrt(static_cast<double>(T)) * inst.epsilon);
    CHECK(vb == Catch::Approx(expected).epsilon(1e-9));
    CHECK(vb <= capped + 1e-9);
    CHECK(vb <= prev);
    prev = vb;
  }
}

TEST_CASE("doubling period layout") {
  const auto inst = one_dim_instance(0.25);
  const auto losses = constant_loss(vec1(0.4));

  const auto r10 = run_doubling(inst, losses, inst.beta, 10);
  REQUIRE(r10.periods.size() == 3);
  CHECK(r10.periods[0].horizon == 2);
  CHECK(r10.periods[0].start_round == 1);
  CHECK(r10.periods[0].rounds_run == 2);
  CHECK(r10.periods[1].horizon == 4);
  CHECK(r10.periods[1].start_round == 3);
  CHECK(r10.periods[1].rounds_run == 4);
  CHECK(r10.periods[2].horizon == 8);
  CHECK(r10.periods[2].start_round == 7);
  CHECK(r10.periods[2].rounds_run == 4);  // truncated at stop_round
  CHECK(r10.trace.size() == 10);
  CHECK(r10.trace.front().t == 1);
  CHECK(r10.trace.back().t == 10);

  const auto r2 = run_doubling(inst, losses, inst.beta, 2);
  REQUIRE(r2.periods.size() == 1);
  CHECK(r2.periods[0].rounds_run == 2);
}

TEST_CASE("doubling periods satisfy their per-period certificates") {
  Mat A(1, 1);
  A << 1;
  ProblemInstance inst{SimpleSet::box(vec1(-1), vec1(1)),
                       ConstraintFunction::linear(A, vec1(0.2))};
  inst = derive_constants(std::move(inst));
  inst.D = 1.0;
  rng::Stream costs(17, rng::kStreamTest + 11);
  LossOracle losses;
  losses.value = [costs](long t, const Vec& x) {
    return costs.uniform(static_cast<std::uint64_t>(t), -1, 1) * x[0];
  };
  losses.gradient = [costs](long t, const Vec&) {
    return vec1(costs.uniform(static_cast<std::uint64_t>(t), -1, 1));
  };
  losses.grad_bound = 1.0;

  const auto res = run_doubling(inst, losses, inst.beta, 100);
  std::size_t row = 0;
  for (const auto& period : res.periods) {
    double sum = 0.0;
    for (long i = 0; i < period.rounds_run; ++i, ++row)
      sum += res.trace[row].g_vals[0];
    CHECK(sum <= period.queue_final[0] / period.params.gamma + 1e-9);
  }
}
