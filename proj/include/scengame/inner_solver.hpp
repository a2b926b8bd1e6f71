#pragma once

#include <optional>

#include "scengame/errors.hpp"
#include "scengame/game.hpp"
#include "scengame/interior_point.hpp"

namespace scengame {

/// One scenario's subgame at outer iteration k. Player i minimises
///
///   f_i(w; theta) / S + lambda_i' (w_i - x_i) + rho/2 |w_i - x_i|^2
///
/// subject to the stacked scenario constraints h(w; theta) <= 0.
struct ScenarioSubproblem {
  const GameSpec* spec = nullptr;
  Vector theta;
  Vector x_ref;
  Vector lambda_ref;
  double rho = 1.0;
  int num_scenarios = 1;
  // d F / d x at theta, for games with a constant pseudogradient Jacobian.
  // Evaluated on demand when null.
  const Matrix* pseudogradient_jacobian = nullptr;

  void validate() const;
};

/// A primal-dual point of one subgame. v holds one multiplier per stacked
/// constraint row (player blocks in player order), shared by every player the
/// row involves.
struct KKTPoint {
  Vector w;
  Vector v;
  double stationarity_residual = 0.0;
  double complementarity_residual = 0.0;
  double feasibility_violation = 0.0;
  int iterations = 0;
};

using InnerOptions = InteriorPointOptions;

class InnerSolveError : public Error {
 public:
  InnerSolveError(const std::string& what, KKTPoint best)
      : Error(what), best_(std::move(best)) {}
  const KKTPoint& best() const { return best_; }

 private:
  KKTPoint best_;
};

class InfeasibleSubproblemError : public InfeasibleError {
 public:
  InfeasibleSubproblemError(const std::string& what, KKTPoint last)
      : InfeasibleError(what), last_(std::move(last)) {}
  const KKTPoint& last() const { return last_; }

 private:
  KKTPoint last_;
};

/// Variational equilibrium of the subgame. A warm start with an empty v is
/// treated as a primal starting point only.
KKTPoint solve_subgame(const ScenarioSubproblem& p,
                       const std::optional<KKTPoint>& warm_start,
                       const InnerOptions& options = {});

struct KktResidual {
  double stationarity = 0.0;
  double feasibility = 0.0;
  double complementarity = 0.0;
};

/// Infinity norms of the stationarity equations, max(h, 0) and v .* h.
KktResidual kkt_residual(const ScenarioSubproblem& p, const KKTPoint& point);

/// KktSystem view of a subproblem, shared with the diagnostics.
class SubgameSystem final : public KktSystem {
 public:
  explicit SubgameSystem(const ScenarioSubproblem& p);

  int dim() const override { return p_.spec->joint_dim(); }
  int rows() const override { return p_.spec->total_constraints(); }
  void eval_operator(const Vector& w, Vector& g, Matrix* jac) const override;
  void eval_constraints(const Vector& w, Vector& c, Matrix* jac) const override;
  void add_curvature(const Vector& w, const Vector& v, Matrix& newton) const override;

 private:
  const ScenarioSubproblem& p_;
  Matrix constant_jacobian_;  // scaled by 1/S, rho I added
  bool has_constant_jacobian_ = false;
};

}  // namespace scengame
