#include "scengame/oracle.hpp"

#include <fmt/format.h>

namespace scengame {

namespace {

class CentralizedSystem final : public KktSystem {
 public:
  CentralizedSystem(const GameSpec& spec, const ScenarioSet& scenarios)
      : spec_(spec), scenarios_(scenarios), m_(spec.total_constraints()) {}

  int dim() const override { return spec_.joint_dim(); }
  int rows() const override { return m_ * scenarios_.size(); }

  void eval_operator(const Vector& w, Vector& g, Matrix* jac) const override {
    const int S = scenarios_.size();
    g = Vector::Zero(dim());
    if (jac) *jac = Matrix::Zero(dim(), dim());
    for (int j = 0; j < S; ++j) {
      g += pseudogradient(spec_, w, scenarios_[j]);
      if (jac) *jac += pseudogradient_jacobian(spec_, w, scenarios_[j]);
    }
    g /= static_cast<double>(S);
    if (jac) *jac /= static_cast<double>(S);
  }

  void eval_constraints(const Vector& w, Vector& c, Matrix* jac) const override {
    c.resize(rows());
    if (jac) jac->resize(rows(), dim());
    for (int j = 0; j < scenarios_.size(); ++j) {
      c.segment(j * m_, m_) = joint_constraint(spec_, w, scenarios_[j]);
      if (jac) jac->middleRows(j * m_, m_) = joint_constraint_jacobian(spec_, w, scenarios_[j]);
    }
  }

  void add_curvature(const Vector& w, const Vector& v, Matrix& newton) const override {
    if (spec_.affine_constraints) return;
    for (int j = 0; j < scenarios_.size(); ++j) {
      newton += joint_constraint_curvature(spec_, w, scenarios_[j], v.segment(j * m_, m_));
    }
  }

 private:
  const GameSpec& spec_;
  const ScenarioSet& scenarios_;
  int m_;
};

}  // namespace

long long centralized_rows(const GameSpec& spec, int num_scenarios) {
  return static_cast<long long>(spec.total_constraints()) * num_scenarios;
}

ReferenceSolution solve_centralized(const GameSpec& spec, const ScenarioSet& scenarios,
                                    double tol, int max_iter) {
  spec.validate();
  const int S = scenarios.size();
  if (S < 1) throw Error("solve_centralized needs at least one scenario");
  for (int j = 0; j < S; ++j) check_parameter(spec, scenarios[j]);
  const long long rows = centralized_rows(spec, S);
  if (rows > kOracleRowBudget) {
    throw OracleSizeError(fmt::format(
        "centralized reference refuses {} stacked constraint rows ({} scenarios x {} "
        "rows); the dense budget is {}",
        rows, S, spec.total_constraints(), kOracleRowBudget));
  }

  CentralizedSystem sys(spec, scenarios);
  InteriorPointOptions opt;
  opt.stationarity_tol = tol;
  opt.feasibility_tol = std::min(1e-9, tol);
  opt.complementarity_tol = tol;
  opt.max_iter = max_iter;
  InteriorPointStart start;
  start.w = Vector::Zero(spec.joint_dim());
  const InteriorPointResult res = solve_kkt_system(sys, start, opt);
  if (res.outcome == InteriorPointOutcome::Infeasible) {
    throw InfeasibleError(fmt::format(
        "the sampled constraint set is empty: violation {:.3e} persists after {} "
        "iterations",
        res.feasibility, res.iterations));
  }
  if (res.outcome != InteriorPointOutcome::Converged) {
    throw Error(fmt::format("centralized reference did not converge in {} iterations: "
                            "stationarity {:.3e}, feasibility {:.3e}, complementarity "
                            "{:.3e}",
                            res.iterations, res.stationarity, res.feasibility,
                            res.complementarity));
  }

  ReferenceSolution ref;
  ref.x_star = res.w;
  ref.stationarity = res.stationarity;
  ref.feasibility = res.feasibility;
  ref.complementarity = res.complementarity;
  ref.iterations = res.iterations;
  const int dim = spec.joint_dim();
  const int m = spec.total_constraints();
  ref.w_star = ScenarioMatrix(S, dim);
  ref.lambda_star = ScenarioMatrix(S, dim);
  Vector total = Vector::Zero(dim);
  for (int j = 0; j < S; ++j) {
    Vector v = res.v.segment(j * m, m);
    Vector gap = pseudogradient(spec, ref.x_star, scenarios[j]) / static_cast<double>(S);
    if (m > 0) {
      gap.noalias() +=
          joint_constraint_jacobian(spec, ref.x_star, scenarios[j]).transpose() * v;
    }
    ref.w_star.row(j) = ref.x_star.transpose();
    ref.lambda_star.row(j) = -gap.transpose();
    total += gap;
    ref.v_star.push_back(std::move(v));
  }
  // The gaps sum to the final stationarity residual; spreading it evenly makes
  // the recovered multipliers sum to zero.
  const Vector share = total / static_cast<double>(S);
  for (int j = 0; j < S; ++j) ref.lambda_star.row(j) += share.transpose();
  return ref;
}

Vector extragradient_reference(const GameSpec& spec, const ScenarioSet& scenarios,
                               double step, int iters, const std::optional<Interval>& box,
                               const std::optional<Vector>& x0) {
  spec.validate();
  if (spec.total_constraints() > 0) {
    throw Error("extragradient_reference handles box constraints only; the game "
                "declares constraint rows");
  }
  if (!(step > 0.0)) throw Error("extragradient step must be positive");
  const int S = scenarios.size();
  if (S < 1) throw Error("extragradient_reference needs at least one scenario");
  auto op = [&](const Vector& x) {
    Vector g = Vector::Zero(spec.joint_dim());
    for (int j = 0; j < S; ++j) g += pseudogradient(spec, x, scenarios[j]);
    return Vector(g / static_cast<double>(S));
  };
  auto project = [&](Vector x) {
    if (box) x = x.cwiseMax(box->lo).cwiseMin(box->hi);
    return x;
  };
  Vector x = x0 ? *x0 : Vector::Zero(spec.joint_dim());
  check_joint_decision(spec, x, "extragradient start");
  for (int it = 0; it < iters; ++it) {
    const Vector y = project(x - step * op(x));
    x = project(x - step * op(y));
    if (!x.allFinite() || x.norm() > 1e6) {
      throw Error(fmt::format("extragradient diverged at iteration {} (|x| = {:.3e})", it,
                              x.norm()));
    }
  }
  return x;
}

}  // namespace scengame
