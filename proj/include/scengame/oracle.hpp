#pragma once

#include <optional>
#include <vector>

#include "scengame/admm.hpp"
#include "scengame/certificates.hpp"
#include "scengame/game.hpp"
#include "scengame/interior_point.hpp"

namespace scengame {

inline constexpr long long kOracleRowBudget = 100'000;

/// Solution of the whole scenario game in the single variable x, with the
/// consensus multipliers recovered per scenario.
struct ReferenceSolution {
  Vector x_star;
  ScenarioMatrix w_star;       // x_star replicated once per scenario
  ScenarioMatrix lambda_star;  // sums to zero over scenarios
  std::vector<Vector> v_star;  // inequality multipliers, one block per scenario
  double stationarity = 0.0;
  double feasibility = 0.0;
  double complementarity = 0.0;
  int iterations = 0;

  ReferenceTriple triple() const { return {w_star, x_star, lambda_star}; }
};

/// Interior-point solve of
///   F_S(x) + sum_j J_j(x)' v_j = 0,  h(x; theta^j) <= 0 for all j,
/// with F_S the scenario-averaged pseudogradient. Throws OracleSizeError above
/// kOracleRowBudget stacked rows and InfeasibleError when the sampled
/// constraint set is empty.
ReferenceSolution solve_centralized(const GameSpec& spec, const ScenarioSet& scenarios,
                                    double tol = 1e-10, int max_iter = 200);

/// Stacked constraint rows the centralized solve would need.
long long centralized_rows(const GameSpec& spec, int num_scenarios);

/// Projected extragradient on the scenario-averaged pseudogradient:
///   y = P(x - step F_S(x)),  x = P(x - step F_S(y)).
/// Only for games without constraint rows; `box` (per coordinate) is optional.
/// Throws Error when |x| exceeds 1e6.
Vector extragradient_reference(const GameSpec& spec, const ScenarioSet& scenarios,
                               double step, int iters,
                               const std::optional<Interval>& box = std::nullopt,
                               const std::optional<Vector>& x0 = std::nullopt);

}  // namespace scengame
