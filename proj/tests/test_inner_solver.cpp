#include <doctest.h>

#include <cmath>
#include <limits>

#include "scengame/inner_solver.hpp"
#include "scengame/rendezvous.hpp"
#include "support.hpp"

using namespace scengame;

namespace {

GameSpec one_dim_game(double bound_row_sign) {
  // f = 0 with an optional row sign * w <= 0.
  GameSpec s = testing::identity_game(1, 1);
  s.objective = [](const Vector&, const Vector&, int) { return 0.0; };
  s.objective_gradient = [](const Vector&, const Vector&, int) {
    return Vector::Zero(1).eval();
  };
  s.constraint_dims = {1};
  s.constraint = [bound_row_sign](const Vector& w, const Vector&, int) {
    return Vector::Constant(1, bound_row_sign * w[0]);
  };
  s.constraint_jacobian = [bound_row_sign](const Vector&, const Vector&, int) {
    return Matrix::Constant(1, 1, bound_row_sign);
  };
  s.validate();
  return s;
}

// f_i = 1/2 w_i^2, shared row 1 - w_1 - w_2 <= 0 owned by player 1.
GameSpec halfspace_game() {
  GameSpec s = testing::identity_game(2, 1);
  s.constraint_dims = {1, 0};
  s.constraint = [](const Vector& w, const Vector&, int i) {
    Vector h(i == 0 ? 1 : 0);
    if (i == 0) h[0] = 1.0 - w[0] - w[1];
    return h;
  };
  s.constraint_jacobian = [](const Vector&, const Vector&, int i) {
    return Matrix::Constant(i == 0 ? 1 : 0, 2, -1.0);
  };
  s.validate();
  return s;
}

ScenarioSubproblem make_problem(const GameSpec& g, double rho, Vector x_ref) {
  ScenarioSubproblem p;
  p.spec = &g;
  p.theta = Vector::Zero(g.param_dim);
  p.x_ref = std::move(x_ref);
  p.lambda_ref = Vector::Zero(g.joint_dim());
  p.rho = rho;
  p.num_scenarios = 1;
  return p;
}

}  // namespace

TEST_CASE("unconstrained scalar subgame: w + w = 0") {
  const GameSpec g = testing::identity_game(1, 1);
  const KKTPoint k = solve_subgame(make_problem(g, 1.0, Vector::Zero(1)), std::nullopt);
  CHECK(std::abs(k.w[0]) <= 1e-12);
  CHECK(k.v.size() == 0);
}

TEST_CASE("proximal step onto w <= 0 gives w = 0 and v = rho") {
  const GameSpec g = one_dim_game(1.0);
  const KKTPoint k = solve_subgame(make_problem(g, 2.0, Vector::Ones(1)), std::nullopt);
  CHECK(k.w[0] == doctest::Approx(0.0).epsilon(1e-7).scale(1.0));
  CHECK(k.v[0] == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("shared half-space: symmetric solution with common multiplier") {
  const GameSpec g = halfspace_game();
  const ScenarioSubproblem p = make_problem(g, 1.0, Vector::Zero(2));
  const KKTPoint k = solve_subgame(p, std::nullopt);
  CHECK(k.w[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(k.w[1] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(k.v[0] == doctest::Approx(1.0).epsilon(1e-8));

  // Grid oracle: the subgame is a potential game with potential
  // sum_i (1/2 w_i^2 + rho/2 w_i^2), minimised over the half-space.
  double best = std::numeric_limits<double>::infinity();
  double bw0 = 0.0, bw1 = 0.0;
  const int n = 400;
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; b <= n; ++b) {
      const double w0 = a / double(n), w1 = b / double(n);
      if (w0 + w1 < 1.0) continue;
      const double pot = w0 * w0 + w1 * w1;
      if (pot < best) {
        best = pot;
        bw0 = w0;
        bw1 = w1;
      }
    }
  }
  CHECK(std::abs(k.w[0] - bw0) <= 1.0 / n);
  CHECK(std::abs(k.w[1] - bw1) <= 1.0 / n);
}

TEST_CASE("kkt residuals") {
  const GameSpec g = halfspace_game();
  const ScenarioSubproblem p = make_problem(g, 1.0, Vector::Zero(2));
  KKTPoint exact;
  exact.w = Vector::Constant(2, 0.5);
  exact.v = Vector::Ones(1);
  const KktResidual r = kkt_residual(p, exact);
  CHECK(r.stationarity <= 1e-9);
  CHECK(r.feasibility <= 1e-9);
  CHECK(r.complementarity <= 1e-9);

  KKTPoint inner;
  inner.w = Vector::Constant(2, 2.0);
  inner.v = Vector::Zero(1);
  CHECK(kkt_residual(p, inner).complementarity == 0.0);

  KKTPoint outside;
  outside.w = Vector::Constant(2, 0.35);  // h = 1 - 0.7 = 0.3
  outside.v = Vector::Zero(1);
  CHECK(kkt_residual(p, outside).feasibility == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("infeasible subgame is reported as such") {
  // w <= -1 and -w <= -1.
  GameSpec g = testing::identity_game(1, 1);
  g.constraint_dims = {2};
  g.constraint = [](const Vector& w, const Vector&, int) {
    Vector h(2);
    h << w[0] + 1.0, 1.0 - w[0];
    return h;
  };
  g.constraint_jacobian = [](const Vector&, const Vector&, int) {
    Matrix j(2, 1);
    j << 1.0, -1.0;
    return j;
  };
  g.validate();
  CHECK_THROWS_AS(solve_subgame(make_problem(g, 1.0, Vector::Zero(1)), std::nullopt),
                  InfeasibleSubproblemError);
}

TEST_CASE("iteration cap raises InnerSolveError with the best point") {
  const GameSpec g = halfspace_game();
  InnerOptions opt;
  opt.max_iter = 1;
  try {
    solve_subgame(make_problem(g, 1.0, Vector::Zero(2)), std::nullopt, opt);
    FAIL("expected InnerSolveError");
  } catch (const InnerSolveError& e) {
    CHECK(e.best().w.size() == 2);
  }
}

TEST_CASE("rendezvous subgames meet the KKT tolerances, cold and warm") {
  const auto game = rendezvous::build_game({});
  const ScenarioSet set = testing::rendezvous_scenarios(game, 6, 2);
  const int dim = game.spec.joint_dim();
  std::optional<KKTPoint> warm;
  for (int j = 0; j < set.size(); ++j) {
    ScenarioSubproblem p;
    p.spec = &game.spec;
    p.theta = set[j];
    p.x_ref = Vector::LinSpaced(dim, -0.5, 0.5);
    p.lambda_ref = Vector::LinSpaced(dim, 0.1, -0.1);
    p.rho = 5.0;
    p.num_scenarios = 6;
    const KKTPoint k = solve_subgame(p, warm);
    const KktResidual r = kkt_residual(p, k);
    CHECK(r.stationarity <= 1e-8);
    CHECK(r.feasibility <= 1e-9);
    CHECK(r.complementarity <= 1e-8);
    CHECK(k.v.minCoeff() >= 0.0);
    CHECK(k.v.size() == 35);
    warm = k;
  }
}

TEST_CASE("subproblem validation") {
  const GameSpec g = testing::identity_game(2, 1);
  ScenarioSubproblem p = make_problem(g, 1.0, Vector::Zero(2));
  p.rho = 0.0;
  CHECK_THROWS_AS(solve_subgame(p, std::nullopt), Error);
  p = make_problem(g, 1.0, Vector::Zero(3));
  CHECK_THROWS_AS(solve_subgame(p, std::nullopt), DimensionError);
}
