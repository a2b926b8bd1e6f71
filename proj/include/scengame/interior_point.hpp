#pragma once

#include <optional>

#include "scengame/types.hpp"

namespace scengame {

/// A monotone variational inequality over a convex set, in KKT form:
///
///   G(w) + Jc(w)' v = 0,   c(w) <= 0,   v >= 0,   v .* c(w) = 0.
///
/// G is the (possibly nonsymmetric) game operator, c the stacked inequality
/// constraints. The curvature term adds sum_k v_k Hessian(c_k) to the Newton
/// matrix.
class KktSystem {
 public:
  virtual ~KktSystem() = default;

  virtual int dim() const = 0;
  virtual int rows() const = 0;

  /// Operator value and, when `jac` is non-null, its Jacobian.
  virtual void eval_operator(const Vector& w, Vector& g, Matrix* jac) const = 0;

  /// Constraint values and, when `jac` is non-null, the rows x dim Jacobian.
  virtual void eval_constraints(const Vector& w, Vector& c, Matrix* jac) const = 0;

  /// Adds sum_k v_k Hessian(c_k)(w) to `newton`.
  virtual void add_curvature(const Vector& w, const Vector& v, Matrix& newton) const = 0;
};

struct InteriorPointOptions {
  double stationarity_tol = 1e-8;
  double feasibility_tol = 1e-9;
  double complementarity_tol = 1e-8;
  int max_iter = 100;
  double mu_init = 0.1;         // barrier parameter for cold starts
  double mu_warm = 1e-8;        // barrier parameter for warm starts
  double mu_decrease = 0.2;     // geometric barrier reduction
  double boundary_fraction = 0.995;
  double barrier_tolerance_factor = 10.0;  // reduce mu once |r_mu| <= factor * mu
  double divergence_threshold = 1e12;      // |v| beyond this means infeasible
};

struct InteriorPointStart {
  Vector w;
  std::optional<Vector> v;  // multipliers from a previous solve
};

enum class InteriorPointOutcome { Converged, MaxIter, Infeasible };

struct InteriorPointResult {
  InteriorPointOutcome outcome = InteriorPointOutcome::MaxIter;
  Vector w;
  Vector v;
  Vector s;
  double stationarity = 0.0;    // |G + Jc' v|_inf
  double feasibility = 0.0;     // |max(c, 0)|_inf
  double complementarity = 0.0; // |v .* c|_inf
  double mu = 0.0;
  int iterations = 0;
};

/// Primal-dual interior-point method with slacks (infeasible start allowed),
/// Newton steps on the perturbed KKT system, fraction-to-boundary step rule and
/// a residual-norm backtracking line search.
InteriorPointResult solve_kkt_system(const KktSystem& system,
                                     const InteriorPointStart& start,
                                     const InteriorPointOptions& options);

}  // namespace scengame
