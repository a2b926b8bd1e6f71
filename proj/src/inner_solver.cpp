#include "scengame/inner_solver.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace scengame {

void ScenarioSubproblem::validate() const {
  if (spec == nullptr) throw Error("subproblem has no game");
  if (!(rho > 0.0)) throw Error("rho must be positive");
  if (num_scenarios < 1) throw Error("num_scenarios must be at least 1");
  check_parameter(*spec, theta);
  check_joint_decision(*spec, x_ref, "x_ref");
  check_joint_decision(*spec, lambda_ref, "lambda_ref");
}

SubgameSystem::SubgameSystem(const ScenarioSubproblem& p) : p_(p) {
  if (p.pseudogradient_jacobian || p.spec->constant_pseudogradient_jacobian) {
    constant_jacobian_ = p.pseudogradient_jacobian
                             ? *p.pseudogradient_jacobian
                             : pseudogradient_jacobian(*p.spec, p.x_ref, p.theta);
    constant_jacobian_ /= static_cast<double>(p.num_scenarios);
    constant_jacobian_.diagonal().array() += p.rho;
    has_constant_jacobian_ = true;
  }
}

void SubgameSystem::eval_operator(const Vector& w, Vector& g, Matrix* jac) const {
  const double inv_s = 1.0 / p_.num_scenarios;
  g = pseudogradient(*p_.spec, w, p_.theta) * inv_s + p_.lambda_ref +
      p_.rho * (w - p_.x_ref);
  if (!jac) return;
  if (has_constant_jacobian_) {
    *jac = constant_jacobian_;
    return;
  }
  *jac = pseudogradient_jacobian(*p_.spec, w, p_.theta) * inv_s;
  jac->diagonal().array() += p_.rho;
}

void SubgameSystem::eval_constraints(const Vector& w, Vector& c, Matrix* jac) const {
  c = joint_constraint(*p_.spec, w, p_.theta);
  if (jac) *jac = joint_constraint_jacobian(*p_.spec, w, p_.theta);
}

void SubgameSystem::add_curvature(const Vector& w, const Vector& v,
                                  Matrix& newton) const {
  if (p_.spec->affine_constraints) return;
  newton += joint_constraint_curvature(*p_.spec, w, p_.theta, v);
}

KktResidual kkt_residual(const ScenarioSubproblem& p, const KKTPoint& point) {
  const GameSpec& spec = *p.spec;
  check_joint_decision(spec, point.w, "KKT point w");
  const int m = spec.total_constraints();
  if (point.v.size() != m) {
    throw DimensionError("v", fmt::format("multiplier vector has length {}, expected {}",
                                          point.v.size(), m));
  }
  SubgameSystem sys(p);
  Vector g;
  sys.eval_operator(point.w, g, nullptr);
  KktResidual r;
  if (m > 0) {
    Vector c;
    Matrix jac;
    sys.eval_constraints(point.w, c, &jac);
    g.noalias() += jac.transpose() * point.v;
    r.feasibility = c.cwiseMax(0.0).maxCoeff();
    r.complementarity = point.v.cwiseProduct(c).lpNorm<Eigen::Infinity>();
  }
  r.stationarity = g.size() ? g.lpNorm<Eigen::Infinity>() : 0.0;
  return r;
}

KKTPoint solve_subgame(const ScenarioSubproblem& p,
                       const std::optional<KKTPoint>& warm_start,
                       const InnerOptions& options) {
  p.validate();
  SubgameSystem sys(p);
  InteriorPointStart start;
  if (warm_start) {
    check_joint_decision(*p.spec, warm_start->w, "warm start w");
    start.w = warm_start->w;
    if (warm_start->v.size() == sys.rows() && sys.rows() > 0) start.v = warm_start->v;
  } else {
    start.w = p.x_ref;
  }

  const InteriorPointResult res = solve_kkt_system(sys, start, options);
  KKTPoint point;
  point.w = res.w;
  point.v = res.v;
  point.stationarity_residual = res.stationarity;
  point.feasibility_violation = res.feasibility;
  point.complementarity_residual = res.complementarity;
  point.iterations = res.iterations;

  switch (res.outcome) {
    case InteriorPointOutcome::Converged:
      return point;
    case InteriorPointOutcome::Infeasible:
      throw InfeasibleSubproblemError(
          fmt::format("subgame appears infeasible: constraint violation {:.3e} after {} "
                      "iterations (multipliers diverging)",
                      res.feasibility, res.iterations),
          std::move(point));
    case InteriorPointOutcome::MaxIter:
      break;
  }
  throw InnerSolveError(
      fmt::format("subgame not solved in {} iterations: stationarity {:.3e}, "
                  "feasibility {:.3e}, complementarity {:.3e}",
                  res.iterations, res.stationarity, res.feasibility,
                  res.complementarity),
      std::move(point));
}

}  // namespace scengame
