#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scengame/errors.hpp"
#include "scengame/sampling.hpp"
#include "scengame/types.hpp"

namespace scengame {

/// An N-player game whose costs and constraints depend on a parameter vector
/// theta.
///
/// Every callback receives the full joint decision (length N*n) because
/// constraints couple players; callbacks slice out what they need. Player
/// indices are zero-based. Callbacks must be pure functions of their
/// arguments: the solvers evaluate them concurrently from worker threads.
///
/// Player i is feasible iff constraint(x, theta, i) <= 0 componentwise. The
/// joint constraint h(x; theta) is the stack of all players' constraints in
/// player order and is assembled by the library.
struct GameSpec {
  using ObjectiveFn =
      std::function<double(const Vector& x, const Vector& theta, int player)>;
  using GradientFn =
      std::function<Vector(const Vector& x, const Vector& theta, int player)>;
  using ConstraintFn =
      std::function<Vector(const Vector& x, const Vector& theta, int player)>;
  using ConstraintJacobianFn =
      std::function<Matrix(const Vector& x, const Vector& theta, int player)>;
  /// d F / d x for the stacked own-block gradients, (N*n) x (N*n).
  using PseudogradientJacobianFn =
      std::function<Matrix(const Vector& x, const Vector& theta)>;
  /// sum_k weights_k * Hessian(h_{i,k}), an (N*n) x (N*n) matrix.
  using ConstraintCurvatureFn = std::function<Matrix(
      const Vector& x, const Vector& theta, int player, const Vector& weights)>;

  int num_players = 0;
  int decision_dim = 0;
  int param_dim = 0;
  std::vector<int> constraint_dims;  // one entry per player, may be zero
  double objective_bound = 0.0;      // D with sup |f_i| <= D
  bool separable_constraints = false;
  bool affine_constraints = false;  // skips the curvature term entirely
  // F(x; theta) is affine in x, so its Jacobian depends on theta only and
  // solvers may evaluate it once per scenario.
  bool constant_pseudogradient_jacobian = false;

  ObjectiveFn objective;
  GradientFn objective_gradient;
  ConstraintFn constraint;
  ConstraintJacobianFn constraint_jacobian;

  // Optional. Finite differences are used when absent.
  PseudogradientJacobianFn pseudogradient_jacobian;
  ConstraintCurvatureFn constraint_curvature;

  // Sampling domains for the numerical audits (monotonicity, derivative
  // checks). The decision box applies to every joint coordinate.
  UniformBox param_box;
  Interval decision_box{-1.0, 1.0};

  int joint_dim() const { return num_players * decision_dim; }
  int constraint_dim(int player) const;
  int total_constraints() const;
  int constraint_offset(int player) const;

  /// Throws DimensionError / Error when the description is inconsistent.
  void validate() const;
};

// Size checks with errors that name the offending block.
void check_joint_decision(const GameSpec& spec, const Vector& x,
                          const std::string& context = "joint decision");
void check_parameter(const GameSpec& spec, const Vector& theta);

/// Stacked own-block gradients F(x; theta), block i = grad_{x_i} f_i.
Vector pseudogradient(const GameSpec& spec, const Vector& x, const Vector& theta);

/// Analytic pseudogradient Jacobian when supplied, central differences
/// otherwise.
Matrix pseudogradient_jacobian(const GameSpec& spec, const Vector& x,
                               const Vector& theta);

Vector joint_constraint(const GameSpec& spec, const Vector& x, const Vector& theta);
Matrix joint_constraint_jacobian(const GameSpec& spec, const Vector& x,
                                 const Vector& theta);

/// sum over all stacked rows k of weights_k * Hessian(h_k).
Matrix joint_constraint_curvature(const GameSpec& spec, const Vector& x,
                                  const Vector& theta, const Vector& weights);

/// Central-difference step for a coordinate of magnitude `value`.
double finite_difference_step(double value);

struct MonotonicityReport {
  double min_inner_product = 0.0;
  bool violated = false;
  // The sample attaining min_inner_product.
  Vector x;
  Vector y;
  Vector theta;
};

/// Samples (x, y, theta) triples and reports min (x-y)'(F(x)-F(y)).
MonotonicityReport check_monotonicity(const GameSpec& spec, int num_pairs,
                                      std::uint64_t seed,
                                      double tolerance = 1e-10);

struct GradientReport {
  double max_gradient_deviation = 0.0;
  double max_jacobian_deviation = 0.0;
  double max_deviation = 0.0;
  bool passed = true;
  double threshold = 1e-4;
  int worst_player = -1;
  Vector worst_x;
  Vector worst_theta;
};

/// Compares the supplied gradients and constraint Jacobians with central
/// differences at sampled points. Deviations are relative to
/// max(1, |reference|_inf).
GradientReport gradient_consistency_check(const GameSpec& spec, int num_points,
                                          std::uint64_t seed,
                                          double threshold = 1e-4);

}  // namespace scengame
