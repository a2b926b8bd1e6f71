#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "scengame/admm.hpp"
#include "scengame/fixtures.hpp"
#include "scengame/oracle.hpp"
#include "scengame/rendezvous.hpp"
#include "support.hpp"

using namespace scengame;

namespace {

ConsensusState random_state(int s, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ConsensusState st = ConsensusState::zeros(s, dim);
  for (int j = 0; j < s; ++j) {
    for (int c = 0; c < dim; ++c) {
      st.w(j, c) = u(rng);
      st.lambda(j, c) = u(rng);
    }
  }
  for (int c = 0; c < dim; ++c) st.x[c] = u(rng);
  return st;
}

std::string csv_of(const SolverTrace& t) {
  std::ostringstream out;
  t.write_csv(out, false);
  return out.str();
}

}  // namespace

TEST_CASE("consensus update") {
  SUBCASE("one scenario, zero multiplier: x = w") {
    ConsensusState st = random_state(1, 4, 1);
    st.lambda.setZero();
    CHECK(consensus_update(st, 3.0) == st.w.row(0).transpose());
  }
  SUBCASE("identical copies with zero-sum multipliers") {
    ConsensusState st = ConsensusState::zeros(4, 3);
    const Vector c = Vector::LinSpaced(3, 0.25, 0.75);
    for (int j = 0; j < 4; ++j) st.w.row(j) = c.transpose();
    st.lambda.row(0) << 1.0, -2.0, 0.5;
    st.lambda.row(1) << -1.0, 2.0, -0.5;
    st.lambda.row(2) << 0.25, 0.0, 4.0;
    st.lambda.row(3) << -0.25, 0.0, -4.0;
    CHECK((consensus_update(st, 5.0) - c).lpNorm<Eigen::Infinity>() <= 1e-15);
  }
  SUBCASE("random fixture against a second implementation") {
    const ConsensusState st = random_state(3, 5, 2);
    const double rho = 2.5;
    for (int c = 0; c < 5; ++c) {
      double acc = 0.0;
      for (int j = 0; j < 3; ++j) acc += st.lambda(j, c) / rho + st.w(j, c);
      CHECK(std::abs(consensus_update(st, rho)[c] - acc / 3.0) <= 1e-14);
    }
  }
}

TEST_CASE("dual update") {
  SUBCASE("copies equal to x leave lambda unchanged") {
    ConsensusState st = random_state(3, 2, 3);
    for (int j = 0; j < 3; ++j) st.w.row(j) = st.x.transpose();
    const ScenarioMatrix before = st.lambda;
    dual_update(st, st.x, 4.0);
    CHECK(st.lambda == before);
  }
  SUBCASE("two opposite copies") {
    ConsensusState st = ConsensusState::zeros(2, 2);
    const Vector a = Vector::LinSpaced(2, 0.5, -1.5);
    st.w.row(0) = a.transpose();
    st.w.row(1) = -a.transpose();
    dual_update(st, Vector::Zero(2), 3.0);
    CHECK(st.lambda.row(0).transpose() == 3.0 * a);
    CHECK(st.lambda.row(1).transpose() == -3.0 * a);
    CHECK(multiplier_imbalance(st.lambda) == 0.0);
  }
  SUBCASE("zero-sum is preserved after a consensus step") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      ConsensusState st = random_state(7, 6, seed);
      st.lambda.rowwise() -= st.lambda.colwise().mean();
      const Vector x = consensus_update(st, 1.7);
      dual_update(st, x, 1.7);
      CHECK(multiplier_imbalance(st.lambda) <= 1e-12);
    }
  }
}

TEST_CASE("consensus residual") {
  ConsensusState st = random_state(4, 3, 5);
  for (int j = 0; j < 4; ++j) st.w.row(j) = st.x.transpose();
  CHECK(consensus_residual(st, st.x) == 0.0);

  ConsensusState one = ConsensusState::zeros(1, 3);
  one.w(0, 1) = 1.0;
  CHECK(consensus_residual(one, Vector::Zero(3)) == 1.0);

  const ConsensusState r = random_state(9, 7, 6);
  const Vector xp = Vector::LinSpaced(7, -0.3, 0.3);
  double acc = 0.0;
  for (int j = 0; j < 9; ++j) acc += (r.w.row(j).transpose() - xp).squaredNorm();
  CHECK(std::abs(consensus_residual(r, xp) - acc) <= 1e-14);
}

TEST_CASE("lyapunov function") {
  const ConsensusState st = random_state(10, 4, 8);
  const ReferenceTriple ref{st.w, st.x, st.lambda};
  CHECK(lyapunov(st, ref, 5.0) == 0.0);
  ConsensusState moved = st;
  moved.x[2] += 1.0;
  CHECK(lyapunov(moved, ref, 5.0) == doctest::Approx(50.0).epsilon(1e-14));
}

TEST_CASE("linear rate bound arithmetic") {
  CHECK(linear_rate_bound(1.0, 1.0, 1.0) == 0.5);
  CHECK(linear_rate_bound(0.25, 0.25, 0.25) == 0.5);
  // kappa = 4, rho = sqrt(mL): e = 0, bound = 1 - 1/(2 * 2).
  CHECK(linear_rate_bound(1.0, 4.0, 2.0) == doctest::Approx(0.75));
  // kappa = 4, rho = 4 sqrt(mL): e = 1, bound = 1 - 1/(2 * 4^1.5).
  CHECK(linear_rate_bound(1.0, 4.0, 8.0) ==
        doctest::Approx(1.0 - 1.0 / (2.0 * std::pow(4.0, 1.5))));
  CHECK_THROWS(linear_rate_bound(2.0, 1.0, 1.0));
}

TEST_CASE("single scenario run: multiplier stays zero and x is the copy") {
  const auto game = rendezvous::build_game({});
  const ScenarioSet set = testing::rendezvous_scenarios(game, 1, 4);
  AdmmConfig cfg;
  cfg.workers = 1;
  cfg.tol = 1e-16;
  int steps = 0;
  RunOptions opt;
  opt.on_step = [&](const StepView& v) {
    ++steps;
    CHECK(v.state.lambda.isZero(0.0));
    CHECK(v.state.x == v.state.w.row(0).transpose());
  };
  const RunResult r = run(game.spec, set, cfg, opt);
  CHECK(r.status == RunStatus::Converged);
  CHECK(steps == r.iterations);
  // Proximal point iteration on one scenario: lands on the single-scenario
  // equilibrium.
  const ReferenceSolution ref = solve_centralized(game.spec, set);
  CHECK((r.x - ref.x_star).lpNorm<Eigen::Infinity>() <= 1e-5);
}

TEST_CASE("decoupled quadratic converges to the mean of the centres") {
  const GameSpec g = fixtures::decoupled_quadratic({});
  const ScenarioSet set = sample_scenarios(g.param_box, 15, 3);
  AdmmConfig cfg;
  cfg.workers = 2;
  cfg.tol = 1e-20;
  const RunResult r = run(g, set, cfg);
  REQUIRE(r.status == RunStatus::Converged);
  Vector mean = Vector::Zero(g.joint_dim());
  for (const Vector& th : set.scenarios) mean += th;
  mean /= set.size();
  CHECK((r.x - mean).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("huge tolerance stops after the first iteration") {
  const auto game = rendezvous::build_game({});
  const ScenarioSet set = testing::rendezvous_scenarios(game, 3, 4);
  AdmmConfig cfg;
  cfg.tol = 1e300;
  const RunResult r = run(game.spec, set, cfg);
  CHECK(r.status == RunStatus::Converged);
  CHECK(r.iterations == 1);
}

TEST_CASE("iteration cap gives MaxIter") {
  const auto game = rendezvous::build_game({});
  const ScenarioSet set = testing::rendezvous_scenarios(game, 3, 4);
  AdmmConfig cfg;
  cfg.max_iter = 2;
  const RunResult r = run(game.spec, set, cfg);
  CHECK(r.status == RunStatus::MaxIter);
  CHECK(r.iterations == 2);
  CHECK(r.trace.rows.size() == 2);
}

TEST_CASE("rendezvous S=10 matches the centralized solution, with descent and the key inequality") {
  const auto game = rendezvous::build_game({});
  const ScenarioSet set = testing::rendezvous_scenarios(game, 10);
  const ReferenceSolution ref = solve_centralized(game.spec, set);
  const ReferenceTriple z = ref.triple();
  AdmmConfig cfg;
  cfg.tol = 1e-13;
  cfg.max_iter = 20000;
  int failures = 0;
  RunOptions opt;
  opt.reference = &z;
  opt.on_step = [&](const StepView& v) {
    if (!key_inequality_check(v.x_prev, v.lambda_prev, v.state, z, cfg.rho).holds) ++failures;
  };
  const RunResult r = run(game.spec, set, cfg, opt);
  REQUIRE(r.status == RunStatus::Converged);
  CHECK((r.x - ref.x_star).lpNorm<Eigen::Infinity>() <= 1e-4);
  CHECK(failures == 0);

  double prev = *r.trace.lyapunov_initial;
  int descent_violations = 0;
  for (const TraceRow& row : r.trace.rows) {
    const double v = *row.lyapunov;
    if (v > prev - cfg.rho * row.consensus_residual + 1e-8 * (1.0 + prev)) {
      ++descent_violations;
    }
    prev = v;
  }
  CHECK(descent_violations == 0);

}

TEST_CASE("steps with an active shared row are exempt from the rate bound but descend") {
  const GameSpec g = testing::shared_budget_game();
  const int s = 6;
  const ScenarioSet set = sample_scenarios(g.param_box, s, 12);
  const ReferenceSolution ref = solve_centralized(g, set);
  double vmax = 0.0;
  for (const Vector& v : ref.v_star) vmax = std::max(vmax, v.maxCoeff());
  REQUIRE(vmax > 1e-3);
  const ReferenceTriple z = ref.triple();
  AdmmConfig cfg;
  cfg.tol = 1e-14;
  cfg.max_iter = 20000;
  RunOptions opt;
  opt.reference = &z;
  const RunResult r = run(g, set, cfg, opt);
  REQUIRE(r.status == RunStatus::Converged);
  // Each scaled per-scenario operator is (1/S) I.
  const LinearRateReport rep = linear_rate_check(r.trace, 1.0 / s, 1.0 / s, cfg.rho);
  CHECK_FALSE(rep.exempted.empty());
  CHECK(rep.descent_violations.empty());
}

TEST_CASE("key inequality") {
  const ConsensusState st = random_state(4, 3, 9);
  const ReferenceTriple ref{st.w, st.x, st.lambda};
  const KeyInequality at_fixed = key_inequality_check(st.x, st.lambda, st, ref, 2.0);
  CHECK(at_fixed.lhs == 0.0);
  CHECK(at_fixed.rhs == 0.0);
  CHECK(at_fixed.holds);

  ConsensusState bad = st;
  bad.lambda.array() += 1.0;  // lhs = S n / rho > 0, rhs = 0
  const KeyInequality k = key_inequality_check(st.x, st.lambda, bad, ref, 2.0);
  CHECK(k.lhs == doctest::Approx(6.0));
  CHECK_FALSE(k.holds);
}

TEST_CASE("linear rate on the unconstrained decoupled quadratic") {
  const int s = 20;
  const GameSpec g = fixtures::decoupled_quadratic({});
  const ScenarioSet set = sample_scenarios(g.param_box, s, 12);
  const ReferenceSolution ref = solve_centralized(g, set);
  const ReferenceTriple z = ref.triple();
  AdmmConfig cfg;
  cfg.tol = 1e-20;
  cfg.max_iter = 200;
  RunOptions opt;
  opt.reference = &z;
  const RunResult r = run(g, set, cfg, opt);
  // Scaled by 1/S the operator has m = L = 1/S.
  const LinearRateReport rep = linear_rate_check(r.trace, 1.0 / s, 1.0 / s, cfg.rho);
  CHECK(rep.passed);
  CHECK(rep.violations.empty());
  CHECK(rep.exempted.empty());
  CHECK(rep.max_ratio <= rep.bound + 1e-9);
}

TEST_CASE("optimality residual") {
  const auto game = rendezvous::build_game({});
  const int s = 4;
  const ScenarioSet set = testing::rendezvous_scenarios(game, s, 6);
  const ReferenceSolution ref = solve_centralized(game.spec, set);
  ConsensusState st = ConsensusState::zeros(s, game.spec.joint_dim());
  st.w = ref.w_star;
  st.x = ref.x_star;
  st.lambda = ref.lambda_star;
  const double rho = 5.0;
  CHECK(vi_optimality_residual(game.spec, set, st, ref.v_star, rho).total <= 1e-6);

  st.x[3] += 0.1;
  const ViResidual moved = vi_optimality_residual(game.spec, set, st, ref.v_star, rho);
  CHECK(moved.consensus >= rho * 0.1 * std::sqrt(double(s)) - 1e-8);

  const GameSpec id = testing::identity_game(1, 2);
  ScenarioSet one;
  one.scenarios = {Vector::Zero(1)};
  ConsensusState z = ConsensusState::zeros(1, 2);
  CHECK(vi_optimality_residual(id, one, z, {Vector()}, 1.0).total == 0.0);
}

TEST_CASE("trace is independent of the worker count") {
  const auto game = rendezvous::build_game({});
  const ScenarioSet set = testing::rendezvous_scenarios(game, 12, 5);
  AdmmConfig cfg;
  cfg.max_iter = 60;
  cfg.workers = 1;
  const RunResult a = run(game.spec, set, cfg);
  cfg.workers = 3;
  const RunResult b = run(game.spec, set, cfg);
  CHECK(b.workers == 3);
  CHECK(csv_of(a.trace) == csv_of(b.trace));
  CHECK(a.x == b.x);
}

TEST_CASE("trace csv layout") {
  SolverTrace t;
  TraceRow row;
  row.k = 0;
  row.consensus_residual = 0.5;
  row.phase_ms_inner = 1.25;
  t.rows.push_back(row);
  std::ostringstream with, without;
  t.write_csv(with, true);
  t.write_csv(without, false);
  CHECK(without.str().find("1.25") == std::string::npos);
  CHECK(with.str().find("1.25") != std::string::npos);
  CHECK(without.str().substr(0, without.str().find('\n')) ==
        with.str().substr(0, with.str().find('\n')));
}

TEST_CASE("config validation") {
  AdmmConfig cfg;
  cfg.rho = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.max_iter = 0;
  CHECK_THROWS(cfg.validate());
}
