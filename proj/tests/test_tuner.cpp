#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ocolt/tuner.hpp"
#include "test_util.hpp"

using namespace ocolt;

namespace {

double grid_minimax(const TunerConstants& c, int cells = 200,
                    double lo = 1e-2, double hi = 1e3) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j) {
      const double gamma =
          lo * std::pow(hi / lo, static_cast<double>(i) / (cells - 1));
      const double eta =
          lo * std::pow(hi / lo, static_cast<double>(j) / (cells - 1));
      const double alpha = 0.5 * (c.beta * c.beta * gamma * gamma + eta);
      const double rb = alpha * c.R * c.R + 0.5 * gamma * gamma * c.G * c.G +
                        c.D * c.D * static_cast<double>(c.T) / (2.0 * eta);
      const double vb = 2.0 * c.G + (alpha * c.R * c.R + 2.0 * c.D * c.R +
                                     2.0 * gamma * gamma * c.G * c.G) /
                                        (gamma * gamma * c.epsilon);
      best = std::min(best, std::max(rb, vb));
    }
  return best;
}

}  // namespace

TEST_CASE("boundary triple is feasible for beta=1") {
  const BoundPair bp = evaluate_bounds(1.0, 1.0, 1.0, {1, 1, 1, 1, 1, 16}, 16);
  CHECK(bp.regret_program > 0.0);  // 0.5*(1+1) = 1 <= alpha = 1 accepted
}

TEST_CASE("evaluate_bounds reports both regret constants") {
  const TunerConstants c{1.0, 1.0, 2.0, 1.0, 0.5, 16};
  const BoundPair bp = evaluate_bounds(2.0, 4.0, 4.0, c, 16);
  CHECK(bp.regret_certified == Catch::Approx(26.0).margin(1e-12));
  // alpha R^2 + (1/2) gamma^2 G^2 + D^2 T/(2 eta) = 16 + 2 + 2.
  CHECK(bp.regret_program == Catch::Approx(20.0).margin(1e-12));
  CHECK(bp.violation == Catch::Approx(16.0).margin(1e-12));
}

TEST_CASE("alpha below the floor is a validity error") {
  const TunerConstants c{1, 1, 1, 1, 1, 16};
  CHECK_THROWS_AS(evaluate_bounds(2.0, 4.0, 3.9, c, 16), ValidityError);
  CHECK_THROWS_AS(evaluate_bounds(-1.0, 4.0, 10.0, c, 16), ValidityError);
}

TEST_CASE("minimax tuner is within one percent of the dense grid") {
  TunerProblem p;
  p.constants = {1, 1, 1, 1, 1, 256};
  const TuneResult r = tune(p);
  const double grid = grid_minimax(p.constants);
  CHECK(r.objective <= 1.01 * grid);

  // All three constraints hold at the returned triple.
  const BoundPair bp = evaluate_bounds(r.gamma, r.eta, r.alpha, p.constants, 256);
  CHECK(bp.regret_program <= r.objective + 1e-9);
  CHECK(bp.violation <= r.objective + 1e-9);
  CHECK(0.5 * (p.constants.beta * p.constants.beta * r.gamma * r.gamma +
               r.eta) <=
        r.alpha + 1e-9);
}

TEST_CASE("capped-violation tuning tracks the schedule exponents") {
  // Under a fixed violation budget the optimal gamma must absorb the
  // sqrt(T) growth of eta, which forces gamma ~ T^{1/4} and eta ~ sqrt(T),
  // the same exponents as the horizon schedule. (The unconstrained minimax
  // optimum instead keeps gamma bounded and lets the violation bound grow
  // with the regret bound.)
  TunerConstants base{1, 1, 1, 1, 1, 0};
  const double cap =
      2.0 + (0.5 * 2.0 + 2.0 + 2.0) / 1.0 + 5.0;  // O(1) violation budget
  TunerProblem p1{TunerProblem::Mode::regret_subject_to_violation, base, cap};
  p1.constants.T = 10000;
  TunerProblem p2{TunerProblem::Mode::regret_subject_to_violation, base, cap};
  p2.constants.T = 1000000;
  const TuneResult r1 = tune(p1);
  const TuneResult r2 = tune(p2);
  const double gr1 = r1.gamma / std::pow(1e4, 0.25);
  const double gr2 = r2.gamma / std::pow(1e6, 0.25);
  const double er1 = r1.eta / std::sqrt(1e4);
  const double er2 = r2.eta / std::sqrt(1e6);
  CHECK(std::abs(gr1 - gr2) <= 0.2 * std::max(gr1, gr2));
  CHECK(std::abs(er1 - er2) <= 0.2 * std::max(er1, er2));
}

TEST_CASE("constrained modes respect their caps") {
  TunerProblem p;
  p.mode = TunerProblem::Mode::regret_subject_to_violation;
  p.constants = {1, 1, 2, 1, 0.5, 1024};

  p.cap = 1.9;  // below the 2G floor
  CHECK_THROWS_AS(tune(p), InfeasibleError);

  p.cap = 30.0;
  const TuneResult r = tune(p);
  const BoundPair bp =
      evaluate_bounds(r.gamma, r.eta, r.alpha, p.constants, 1024);
  CHECK(bp.violation <= *p.cap + 1e-9);
  CHECK(r.objective == Catch::Approx(bp.regret_program).margin(1e-9));

  // The symmetric mode: minimize violation under a regret cap.
  TunerProblem q;
  q.mode = TunerProblem::Mode::violation_subject_to_regret;
  q.constants = p.constants;
  q.cap = 2.0 * bp.regret_program;
  const TuneResult rv = tune(q);
  const BoundPair bv =
      evaluate_bounds(rv.gamma, rv.eta, rv.alpha, q.constants, 1024);
  CHECK(bv.regret_program <= *q.cap + 1e-9);
  CHECK(rv.objective == Catch::Approx(bv.violation).margin(1e-9));
  // Loosening the regret cap cannot hurt the achievable violation.
  CHECK(rv.objective <= bp.violation + 1e-9);
}

TEST_CASE("constrained mode rejects unreachable regret caps") {
  TunerProblem q;
  q.mode = TunerProblem::Mode::violation_subject_to_regret;
  q.constants = {1, 1, 1, 1, 1, 4096};
  q.cap = 1e-6;
  CHECK_THROWS_AS(tune(q), InfeasibleError);
}

TEST_CASE("tuner validates constants") {
  TunerProblem p;
  p.constants = {1, 0, 1, 1, 1, 256};
  CHECK_THROWS_AS(tune(p), ConfigError);
  p.constants = {1, 1, 1, 1, 1, 0};
  CHECK_THROWS_AS(tune(p), ConfigError);
}

TEST_CASE("minimax objective is monotone in the horizon") {
  TunerConstants c{1.5, 0.8, 2.0, 1.2, 0.4, 0};
  double prev = 0.0;
  for (const long T : {64L, 256L, 1024L, 4096L}) {
    TunerProblem p{TunerProblem::Mode::minimax, c, {}};
    p.constants.T = T;
    const TuneResult r = tune(p);
    CHECK(r.objective >= prev - 1e-9);
    prev = r.objective;
  }
}
