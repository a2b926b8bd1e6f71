#include <doctest.h>

#include <cmath>
#include <limits>

#include "scengame/fixtures.hpp"
#include "scengame/inner_solver.hpp"
#include "scengame/oracle.hpp"
#include "scengame/rendezvous.hpp"
#include "support.hpp"

using namespace scengame;

TEST_CASE("decoupled quadratic: centralized solution is the mean of the centres") {
  const GameSpec g = fixtures::decoupled_quadratic({3, 2, {-2.0, 2.0}});
  const ScenarioSet set = sample_scenarios(g.param_box, 25, 8);
  const ReferenceSolution ref = solve_centralized(g, set);
  Vector mean = Vector::Zero(g.joint_dim());
  for (const Vector& th : set.scenarios) mean += th;
  mean /= set.size();
  CHECK((ref.x_star - mean).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(ref.lambda_star.colwise().sum().lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("single scenario: the centralized point is a fixed point of the subgame") {
  const auto game = rendezvous::build_game({});
  const ScenarioSet set = testing::rendezvous_scenarios(game, 1, 21);
  const ReferenceSolution ref = solve_centralized(game.spec, set);
  // With x_ref = x* and lambda = 0 the proximal term vanishes at w = x*.
  ScenarioSubproblem p;
  p.spec = &game.spec;
  p.theta = set[0];
  p.x_ref = ref.x_star;
  p.lambda_ref = Vector::Zero(game.spec.joint_dim());
  p.rho = 1.0;
  p.num_scenarios = 1;
  const KKTPoint k = solve_subgame(p, std::nullopt);
  CHECK((k.w - ref.x_star).lpNorm<Eigen::Infinity>() <= 1e-7);
  CHECK(ref.lambda_star.isZero(0.0));
}

TEST_CASE("two scenarios with a shared budget row match a grid search") {
  const GameSpec g = testing::shared_budget_game();
  ScenarioSet set;
  Vector a(3), b(3);
  a << 0.9, 0.6, 0.8;
  b << 0.7, 0.8, 0.5;
  set.scenarios = {a, b};
  const ReferenceSolution ref = solve_centralized(g, set);

  // The variational equilibrium minimises the potential
  // (1/S) sum_j sum_i 1/2 (x_i - theta_i^j)^2 over the intersection.
  const int n = 1000;
  double best = std::numeric_limits<double>::infinity();
  Vector arg(2);
  for (int p = 0; p <= n; ++p) {
    for (int q = 0; q <= n; ++q) {
      const double x0 = -1.0 + 2.0 * p / n, x1 = -1.0 + 2.0 * q / n;
      bool feasible = true;
      double pot = 0.0;
      for (const Vector& th : set.scenarios) {
        if (x0 + x1 - th[2] > 0.0) feasible = false;
        pot += 0.25 * ((x0 - th[0]) * (x0 - th[0]) + (x1 - th[1]) * (x1 - th[1]));
      }
      if (feasible && pot < best) {
        best = pot;
        arg << x0, x1;
      }
    }
  }
  CHECK((ref.x_star - arg).lpNorm<Eigen::Infinity>() <= 2.0 * 2.0 / n);
  CHECK(ref.x_star.sum() == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("oracle refuses instances above the row budget") {
  const auto game = rendezvous::build_game({});
  CHECK(centralized_rows(game.spec, 1000) == 35000);
  const ScenarioSet set = testing::rendezvous_scenarios(game, 3000, 1);
  CHECK_THROWS_AS(solve_centralized(game.spec, set), OracleSizeError);
}

TEST_CASE("oracle reports an empty feasible set") {
  GameSpec g = testing::shared_budget_game();
  ScenarioSet set;
  Vector a(3);
  a << 0.5, 0.5, -1e3;  // x_1 + x_2 <= -1000 with the solution far outside
  set.scenarios = {a};
  g.constraint = [](const Vector& x, const Vector& th, int i) {
    Vector h(i == 0 ? 1 : 0);
    if (i == 0) h[0] = x[0] * x[0] + x[1] * x[1] - th[2];
    return h;
  };
  g.constraint_jacobian = [](const Vector& x, const Vector&, int i) {
    Matrix j = Matrix::Zero(i == 0 ? 1 : 0, 2);
    if (i == 0) j << 2.0 * x[0], 2.0 * x[1];
    return j;
  };
  g.affine_constraints = false;
  g.constraint_curvature = [](const Vector&, const Vector&, int i, const Vector& w) {
    Matrix h = Matrix::Zero(2, 2);
    if (i == 0) h.diagonal().setConstant(2.0 * w[0]);
    return h;
  };
  CHECK_THROWS_AS(solve_centralized(g, set), InfeasibleError);
}

TEST_CASE("extragradient reference") {
  SUBCASE("identity operator converges to zero") {
    const GameSpec g = testing::identity_game(2, 2);
    ScenarioSet set;
    set.scenarios = {Vector::Zero(1)};
    const Vector x = extragradient_reference(g, set, 0.5, 200, std::nullopt,
                                             Vector::Constant(4, 0.8));
    CHECK(x.lpNorm<Eigen::Infinity>() <= 1e-12);
  }
  SUBCASE("bilinear game: extragradient contracts where the gradient step cycles outward") {
    const GameSpec g = testing::bilinear_game();
    ScenarioSet set;
    set.scenarios = {Vector::Zero(1)};
    const Vector x0 = Vector::Constant(2, 0.5);
    const Vector x = extragradient_reference(g, set, 0.3, 100, std::nullopt, x0);
    CHECK(x.norm() < 0.5 * x0.norm());
    // Plain simultaneous gradient steps grow by sqrt(1 + step^2) per iteration.
    Vector y = x0;
    for (int k = 0; k < 100; ++k) y = y - 0.3 * pseudogradient(g, y, Vector::Zero(1));
    CHECK(y.norm() > x0.norm());
  }
  SUBCASE("decoupled quadratic agrees with the closed form") {
    const GameSpec g = fixtures::decoupled_quadratic({});
    const ScenarioSet set = sample_scenarios(g.param_box, 9, 4);
    Vector mean = Vector::Zero(g.joint_dim());
    for (const Vector& th : set.scenarios) mean += th;
    mean /= set.size();
    const Vector x = extragradient_reference(g, set, 0.5, 500);
    CHECK((x - mean).lpNorm<Eigen::Infinity>() <= 1e-3);
  }
  SUBCASE("games with constraint rows are rejected") {
    const auto game = rendezvous::build_game({});
    const ScenarioSet set = testing::rendezvous_scenarios(game, 2, 1);
    CHECK_THROWS_AS(extragradient_reference(game.spec, set, 0.1, 10), Error);
  }
}
