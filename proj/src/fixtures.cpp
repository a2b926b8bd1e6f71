#include "scengame/fixtures.hpp"

#include <algorithm>
#include <cmath>

namespace scengame::fixtures {

GameSpec decoupled_quadratic(const DecoupledQuadraticConfig& cfg) {
  if (cfg.num_players < 1 || cfg.decision_dim < 1) {
    throw Error("decoupled quadratic needs positive dimensions");
  }
  if (cfg.center_range.lo > cfg.center_range.hi) throw Error("center range has lo > hi");
  const int n = cfg.decision_dim;
  GameSpec s;
  s.num_players = cfg.num_players;
  s.decision_dim = n;
  s.param_dim = cfg.num_players * n;
  s.constraint_dims.assign(static_cast<std::size_t>(cfg.num_players), 0);
  s.constant_pseudogradient_jacobian = true;
  s.separable_constraints = true;
  s.affine_constraints = true;
  // |x_i - c_i| is at most the diameter of the union of the decision box
  // [-1, 1] and the centre range in every coordinate.
  const double span = std::max(1.0, cfg.center_range.hi) - std::min(-1.0, cfg.center_range.lo);
  s.objective_bound = 0.5 * n * span * span;
  s.objective = [n](const Vector& x, const Vector& th, int i) {
    return 0.5 * (x.segment(i * n, n) - th.segment(i * n, n)).squaredNorm();
  };
  s.objective_gradient = [n](const Vector& x, const Vector& th, int i) {
    return Vector(x.segment(i * n, n) - th.segment(i * n, n));
  };
  s.pseudogradient_jacobian = [](const Vector& x, const Vector&) {
    return Matrix(Matrix::Identity(x.size(), x.size()));
  };
  s.param_box.id = "decoupled_quadratic";
  s.param_box.add_block("centres", s.param_dim, cfg.center_range);
  s.validate();
  return s;
}

}  // namespace scengame::fixtures
