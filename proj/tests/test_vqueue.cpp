#include <catch2/catch_amalgamated.hpp>

#include "ocolt/algorithm.hpp"
#include "ocolt/diagnostics.hpp"
#include "ocolt/vqueue.hpp"
#include "test_util.hpp"

using namespace ocolt;
using namespace ocolt::testutil;

TEST_CASE("zero queue with zero constraints stays at zero") {
  auto s = QueueState::zeros(3);
  s = queue_update(s, vec3(0, 0, 0));
  CHECK(s.Q.norm() == 0.0);
  CHECK(s.L == 0.0);
  CHECK(s.last_drift == 0.0);
}

TEST_CASE("max-rule update, positive and negative drive") {
  QueueState s = QueueState::zeros(1);
  s.Q[0] = 1.0;
  s.L = 0.5;
  const auto up = queue_update(s, vec1(0.5));
  CHECK(up.Q[0] == 1.5);  // max{-0.5, 1.5}

  QueueState t = QueueState::zeros(1);
  t.Q[0] = 0.2;
  const auto down = queue_update(t, vec1(-0.6));
  CHECK(down.Q[0] == Catch::Approx(0.6).margin(1e-15));  // max{0.6, -0.4}
}

TEST_CASE("queue update checks dimensions") {
  const auto s = QueueState::zeros(2);
  CHECK_THROWS_AS(queue_update(s, vec3(0, 0, 0)), std::invalid_argument);
}

TEST_CASE("drift of explicit states") {
  QueueState a = QueueState::zeros(2), b = QueueState::zeros(2);
  a.Q = vec2(3, 4);
  b.Q = vec2(0, 0);
  CHECK(drift(a, b) == Catch::Approx(-12.5).margin(1e-15));
  CHECK(drift(a, a) == 0.0);

  QueueState c = QueueState::zeros(1), d = QueueState::zeros(1);
  c.Q = vec1(0);
  d.Q = vec1(2);
  CHECK(drift(c, d) == Catch::Approx(2.0).margin(1e-15));
  CHECK_THROWS_AS(drift(a, c), std::invalid_argument);
}

TEST_CASE("lyapunov value is recomputed exactly by the update") {
  rng::Sequence seq(31, rng::kStreamTest + 5);
  QueueState s = QueueState::zeros(4);
  for (int it = 0; it < 200; ++it) {
    Vec gtil(4);
    for (int k = 0; k < 4; ++k) gtil[k] = seq.next_uniform(-1, 1);
    const QueueState next = queue_update(s, gtil);
    const double recomputed = 0.5 * next.Q.squaredNorm();
    CHECK(std::abs(next.L - recomputed) <=
          1e-12 * std::max(1.0, std::abs(recomputed)));
    CHECK(next.last_drift == Catch::Approx(drift(s, next)).margin(1e-15));
    s = next;
  }
}

TEST_CASE("violation certificate divides by gamma") {
  const Vec cert = violation_from_queue(vec2(4, 2), 2.0);
  CHECK(cert[0] == 2.0);
  CHECK(cert[1] == 1.0);
  CHECK(violation_from_queue(vec2(0, 0), 3.0).norm() == 0.0);
  CHECK_THROWS_AS(violation_from_queue(vec2(1, 1), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(violation_from_queue(vec2(1, 1), -2.0),
                  std::invalid_argument);
}

TEST_CASE("certificate dominates the measured sums on a seeded 1-D run") {
  Mat A(1, 1);
  A << 1;
  ProblemInstance inst{SimpleSet::box(vec1(-1), vec1(1)),
                       ConstraintFunction::linear(A, vec1(0.25))};
  inst = derive_constants(std::move(inst));
  inst.D = 1.0;

  rng::Stream costs(99, rng::kStreamTest + 6);
  LossOracle losses;
  losses.value = [costs](long t, const Vec& x) {
    return costs.uniform(static_cast<std::uint64_t>(t), -1, 1) * x[0];
  };
  losses.gradient = [costs](long t, const Vec&) {
    return vec1(costs.uniform(static_cast<std::uint64_t>(t), -1, 1));
  };
  losses.grad_bound = 1.0;

  const long T = 200;
  const auto params = default_schedule(T, inst.beta);
  const auto trace = run(inst, params, losses, T);

  double sum = 0.0;
  for (const auto& row : trace)
    if (row.t >= 1) sum += row.g_vals[0];
  const Vec cert = violation_from_queue(trace.back().queue_after, params.gamma);
  CHECK(sum <= cert[0] + 1e-9);
}

TEST_CASE("trace checkers flag corrupted traces") {
  Mat A(1, 1);
  A << 1;
  ProblemInstance inst{SimpleSet::box(vec1(-1), vec1(1)),
                       ConstraintFunction::linear(A, vec1(0.25))};
  inst = derive_constants(std::move(inst));
  inst.D = 1.0;
  LossOracle losses;
  losses.value = [](long, const Vec& x) { return 0.3 * x[0]; };
  losses.gradient = [](long, const Vec&) { return vec1(0.3); };
  const auto params = default_schedule(40, inst.beta);
  auto trace = run(inst, params, losses, 40);

  auto clean = check_queue_properties(trace, inst, params.gamma);
  CHECK(clean.negative_queue <= 0.0);

  auto corrupted = trace;
  corrupted[10].queue_after[0] = -0.5;
  const auto rep = check_queue_properties(corrupted, inst, params.gamma);
  CHECK(rep.negative_queue > 0.0);

  auto drifted = trace;
  drifted[10].drift += 1.0;
  CHECK(check_queue_properties(drifted, inst, params.gamma).drift_bound > 0.5);

  auto escaped = trace;
  escaped[5].x[0] = 2.0;
  CHECK(check_queue_properties(escaped, inst, params.gamma).membership >=
        1.0 - 1e-9);

  auto violated = trace;
  violated[20].g_vals[0] += 100.0;
  CHECK(check_queue_properties(violated, inst, params.gamma).violation_cert >
        0.0);
}

TEST_CASE("queue-path inequalities hold on a mixed trace") {
  Mat A(2, 2);
  A << 0.5, 0.25, -0.3, 0.8;
  ProblemInstance inst{SimpleSet::box(vec2(-1, -1), vec2(1, 1)),
                       ConstraintFunction::linear(A, vec2(0.1, 0.4))};
  inst = derive_constants(std::move(inst));
  inst.D = 2.0;

  rng::Stream costs(5, rng::kStreamTest + 7);
  LossOracle losses;
  losses.value = [costs](long t, const Vec& x) {
    return costs.uniform(static_cast<std::uint64_t>(2 * t), -2, 2) * x[0] +
           costs.uniform(static_cast<std::uint64_t>(2 * t + 1), -1, 1) * x[1];
  };
  losses.gradient = [costs](long t, const Vec&) {
    return vec2(costs.uniform(static_cast<std::uint64_t>(2 * t), -2, 2),
                costs.uniform(static_cast<std::uint64_t>(2 * t + 1), -1, 1));
  };
  losses.grad_bound = std::sqrt(5.0);

  const long T = 150;
  const auto params = default_schedule(T, inst.beta);
  const auto trace = run(inst, params, losses, T);
  const auto rep = check_queue_properties(trace, inst, params.gamma);
  CHECK(rep.negative_queue <= 0.0);
  CHECK(rep.negative_weight <= 0.0);
  CHECK(rep.queue_vs_gtil <= 1e-12);
  CHECK(rep.queue_growth <= 1e-12);
  CHECK(rep.drift_bound <= 1e-9);
  CHECK(rep.violation_cert <= 1e-9);
  CHECK(rep.membership <= 1e-9);
  CHECK(rep.scaling == 0.0);
}
