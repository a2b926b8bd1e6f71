#include "scengame/game.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

namespace scengame {

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

std::string format_point(const Vector& v) {
  std::string out = "[";
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (k) out += ", ";
    out += fmt::format("{:.6g}", v[k]);
  }
  return out + "]";
}

Vector draw_box(std::mt19937_64& rng, const std::vector<Interval>& coords) {
  Vector out(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t k = 0; k < coords.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] =
        coords[k].lo + (coords[k].hi - coords[k].lo) * unit_uniform(rng());
  }
  return out;
}

Vector draw_decision(std::mt19937_64& rng, const GameSpec& spec) {
  std::vector<Interval> box(static_cast<std::size_t>(spec.joint_dim()),
                            spec.decision_box);
  return draw_box(rng, box);
}

Vector draw_param(std::mt19937_64& rng, const GameSpec& spec) {
  if (spec.param_box.dim() == spec.param_dim) return draw_box(rng, spec.param_box.coords);
  std::vector<Interval> box(static_cast<std::size_t>(spec.param_dim), Interval{-1.0, 1.0});
  return draw_box(rng, box);
}

double eval_objective(const GameSpec& spec, const Vector& x, const Vector& theta,
                      int player) {
  const double f = spec.objective(x, theta, player);
  if (!std::isfinite(f)) {
    throw NonFiniteError(fmt::format("objective of player {} is not finite at x = {}",
                                     player, format_point(x)));
  }
  return f;
}

Vector eval_gradient(const GameSpec& spec, const Vector& x, const Vector& theta,
                     int player) {
  Vector g = spec.objective_gradient(x, theta, player);
  if (g.size() != spec.decision_dim) {
    throw DimensionError(fmt::format("gradient[{}]", player),
                         fmt::format("objective_gradient for player {} returned {} "
                                     "entries, expected {}",
                                     player, g.size(), spec.decision_dim));
  }
  if (!all_finite(g)) {
    throw NonFiniteError(fmt::format(
        "objective_gradient of player {} is not finite at x = {}", player,
        format_point(x)));
  }
  return g;
}

Vector eval_constraint(const GameSpec& spec, const Vector& x, const Vector& theta,
                       int player) {
  Vector h = spec.constraint(x, theta, player);
  if (h.size() != spec.constraint_dim(player)) {
    throw DimensionError(fmt::format("constraint[{}]", player),
                         fmt::format("constraint for player {} returned {} rows, "
                                     "expected {}",
                                     player, h.size(), spec.constraint_dim(player)));
  }
  if (!all_finite(h)) {
    throw NonFiniteError(fmt::format("constraint of player {} is not finite at x = {}",
                                     player, format_point(x)));
  }
  return h;
}

Matrix eval_constraint_jacobian(const GameSpec& spec, const Vector& x,
                                const Vector& theta, int player) {
  Matrix jac = spec.constraint_jacobian(x, theta, player);
  if (jac.rows() != spec.constraint_dim(player) || jac.cols() != spec.joint_dim()) {
    throw DimensionError(
        fmt::format("constraint_jacobian[{}]", player),
        fmt::format("constraint_jacobian for player {} is {}x{}, expected {}x{}",
                    player, jac.rows(), jac.cols(), spec.constraint_dim(player),
                    spec.joint_dim()));
  }
  if (!jac.allFinite()) {
    throw NonFiniteError(fmt::format(
        "constraint_jacobian of player {} is not finite at x = {}", player,
        format_point(x)));
  }
  return jac;
}

// J(x)' w for the stacked constraint.
Vector constraint_jacobian_transpose_times(const GameSpec& spec, const Vector& x,
                                           const Vector& theta, const Vector& weights) {
  Vector out = Vector::Zero(spec.joint_dim());
  for (int i = 0; i < spec.num_players; ++i) {
    const int rows = spec.constraint_dim(i);
    if (rows == 0) continue;
    out.noalias() += eval_constraint_jacobian(spec, x, theta, i).transpose() *
                     weights.segment(spec.constraint_offset(i), rows);
  }
  return out;
}

}  // namespace

int GameSpec::constraint_dim(int player) const {
  if (constraint_dims.empty()) return 0;
  return constraint_dims.at(static_cast<std::size_t>(player));
}

int GameSpec::total_constraints() const {
  int total = 0;
  for (int d : constraint_dims) total += d;
  return total;
}

int GameSpec::constraint_offset(int player) const {
  int offset = 0;
  for (int i = 0; i < player; ++i) offset += constraint_dim(i);
  return offset;
}

void GameSpec::validate() const {
  if (num_players <= 0) throw Error("game needs at least one player");
  if (decision_dim <= 0) throw Error("decision_dim must be positive");
  if (param_dim <= 0) throw Error("param_dim must be positive");
  if (!constraint_dims.empty() &&
      static_cast<int>(constraint_dims.size()) != num_players) {
    throw DimensionError("constraint_dims",
                         fmt::format("constraint_dims has {} entries for {} players",
                                     constraint_dims.size(), num_players));
  }
  for (int d : constraint_dims) {
    if (d < 0) throw DimensionError("constraint_dims", "negative constraint count");
  }
  if (!(objective_bound > 0.0)) throw Error("objective_bound must be positive");
  if (!objective || !objective_gradient) {
    throw Error("objective and objective_gradient callbacks are required");
  }
  if (total_constraints() > 0 && (!constraint || !constraint_jacobian)) {
    throw Error("constraint and constraint_jacobian callbacks are required when "
                "constraint rows are declared");
  }
  if (param_box.dim() != 0 && param_box.dim() != param_dim) {
    throw DimensionError("param_box", fmt::format("param_box has {} coordinates, "
                                                  "param_dim is {}",
                                                  param_box.dim(), param_dim));
  }
}

void check_joint_decision(const GameSpec& spec, const Vector& x,
                          const std::string& context) {
  const auto expected = static_cast<Eigen::Index>(spec.joint_dim());
  if (x.size() == expected) return;
  const auto n = static_cast<Eigen::Index>(spec.decision_dim);
  const Eigen::Index full_blocks = x.size() / n;
  std::string block;
  std::string detail;
  if (x.size() < expected) {
    block = fmt::format("player {}", full_blocks);
    detail = fmt::format("block of player {} has {} of {} entries", full_blocks,
                         x.size() - full_blocks * n, n);
  } else {
    block = fmt::format("player {}", spec.num_players);
    detail = fmt::format("{} trailing entries beyond the last player's block",
                         x.size() - expected);
  }
  throw DimensionError(block, fmt::format("{} has length {}, expected {} ({} players x {}): {}",
                                          context, x.size(), expected, spec.num_players,
                                          spec.decision_dim, detail));
}

void check_parameter(const GameSpec& spec, const Vector& theta) {
  if (theta.size() != spec.param_dim) {
    throw DimensionError("theta", fmt::format("parameter vector has length {}, expected {}",
                                              theta.size(), spec.param_dim));
  }
}

Vector pseudogradient(const GameSpec& spec, const Vector& x, const Vector& theta) {
  check_joint_decision(spec, x);
  check_parameter(spec, theta);
  Vector out(spec.joint_dim());
  for (int i = 0; i < spec.num_players; ++i) {
    out.segment(i * spec.decision_dim, spec.decision_dim) = eval_gradient(spec, x, theta, i);
  }
  return out;
}

double finite_difference_step(double value) {
  static const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  return base * std::max(1.0, std::abs(value));
}

Matrix pseudogradient_jacobian(const GameSpec& spec, const Vector& x,
                               const Vector& theta) {
  const int dim = spec.joint_dim();
  if (spec.pseudogradient_jacobian) {
    Matrix jac = spec.pseudogradient_jacobian(x, theta);
    if (jac.rows() != dim || jac.cols() != dim) {
      throw DimensionError("pseudogradient_jacobian",
                           fmt::format("pseudogradient_jacobian is {}x{}, expected {}x{}",
                                       jac.rows(), jac.cols(), dim, dim));
    }
    if (!jac.allFinite()) throw NonFiniteError("pseudogradient_jacobian is not finite");
    return jac;
  }
  Matrix jac(dim, dim);
  Vector probe = x;
  for (int k = 0; k < dim; ++k) {
    const double h = finite_difference_step(x[k]);
    probe[k] = x[k] + h;
    const Vector plus = pseudogradient(spec, probe, theta);
    probe[k] = x[k] - h;
    const Vector minus = pseudogradient(spec, probe, theta);
    probe[k] = x[k];
    jac.col(k) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

Vector joint_constraint(const GameSpec& spec, const Vector& x, const Vector& theta) {
  Vector out(spec.total_constraints());
  for (int i = 0; i < spec.num_players; ++i) {
    const int rows = spec.constraint_dim(i);
    if (rows == 0) continue;
    out.segment(spec.constraint_offset(i), rows) = eval_constraint(spec, x, theta, i);
  }
  return out;
}

Matrix joint_constraint_jacobian(const GameSpec& spec, const Vector& x,
                                 const Vector& theta) {
  Matrix out(spec.total_constraints(), spec.joint_dim());
  for (int i = 0; i < spec.num_players; ++i) {
    const int rows = spec.constraint_dim(i);
    if (rows == 0) continue;
    out.middleRows(spec.constraint_offset(i), rows) =
        eval_constraint_jacobian(spec, x, theta, i);
  }
  return out;
}

Matrix joint_constraint_curvature(const GameSpec& spec, const Vector& x,
                                  const Vector& theta, const Vector& weights) {
  const int dim = spec.joint_dim();
  Matrix out = Matrix::Zero(dim, dim);
  if (spec.total_constraints() == 0 || spec.affine_constraints) return out;
  if (spec.constraint_curvature) {
    for (int i = 0; i < spec.num_players; ++i) {
      const int rows = spec.constraint_dim(i);
      if (rows == 0) continue;
      const Vector w = weights.segment(spec.constraint_offset(i), rows);
      if (w.isZero(0.0)) continue;
      Matrix h = spec.constraint_curvature(x, theta, i, w);
      if (h.rows() != dim || h.cols() != dim) {
        throw DimensionError(fmt::format("constraint_curvature[{}]", i),
                             "constraint_curvature has the wrong shape");
      }
      out += h;
    }
    return out;
  }
  Vector probe = x;
  for (int k = 0; k < dim; ++k) {
    const double h = finite_difference_step(x[k]);
    probe[k] = x[k] + h;
    const Vector plus = constraint_jacobian_transpose_times(spec, probe, theta, weights);
    probe[k] = x[k] - h;
    const Vector minus = constraint_jacobian_transpose_times(spec, probe, theta, weights);
    probe[k] = x[k];
    out.col(k) = (plus - minus) / (2.0 * h);
  }
  return 0.5 * (out + out.transpose());
}

MonotonicityReport check_monotonicity(const GameSpec& spec, int num_pairs,
                                      std::uint64_t seed, double tolerance) {
  if (num_pairs < 1) throw Error("check_monotonicity needs num_pairs >= 1");
  std::mt19937_64 rng(seed);
  MonotonicityReport report;
  report.min_inner_product = std::numeric_limits<double>::infinity();
  for (int p = 0; p < num_pairs; ++p) {
    Vector x = draw_decision(rng, spec);
    Vector y = draw_decision(rng, spec);
    Vector theta = draw_param(rng, spec);
    const double inner =
        (x - y).dot(pseudogradient(spec, x, theta) - pseudogradient(spec, y, theta));
    if (inner < report.min_inner_product) {
      report.min_inner_product = inner;
      report.x = std::move(x);
      report.y = std::move(y);
      report.theta = std::move(theta);
    }
  }
  report.violated = report.min_inner_product < -tolerance;
  return report;
}

GradientReport gradient_consistency_check(const GameSpec& spec, int num_points,
                                          std::uint64_t seed, double threshold) {
  spec.validate();
  std::mt19937_64 rng(seed);
  GradientReport report;
  report.threshold = threshold;
  const int n = spec.decision_dim;
  const int dim = spec.joint_dim();

  auto note = [&](double dev, int player, const Vector& x, const Vector& theta) {
    if (dev > report.max_deviation) {
      report.max_deviation = dev;
      report.worst_player = player;
      report.worst_x = x;
      report.worst_theta = theta;
    }
  };

  for (int p = 0; p < num_points; ++p) {
    const Vector x = draw_decision(rng, spec);
    const Vector theta = draw_param(rng, spec);
    Vector probe = x;
    for (int i = 0; i < spec.num_players; ++i) {
      const Vector g = eval_gradient(spec, x, theta, i);
      Vector fd(n);
      for (int k = 0; k < n; ++k) {
        const int c = i * n + k;
        const double h = finite_difference_step(x[c]);
        probe[c] = x[c] + h;
        const double fp = eval_objective(spec, probe, theta, i);
        probe[c] = x[c] - h;
        const double fm = eval_objective(spec, probe, theta, i);
        probe[c] = x[c];
        fd[k] = (fp - fm) / (2.0 * h);
      }
      const double dev = (g - fd).lpNorm<Eigen::Infinity>() /
                         std::max(1.0, fd.lpNorm<Eigen::Infinity>());
      report.max_gradient_deviation = std::max(report.max_gradient_deviation, dev);
      note(dev, i, x, theta);

      const int rows = spec.constraint_dim(i);
      if (rows == 0) continue;
      const Matrix jac = eval_constraint_jacobian(spec, x, theta, i);
      Matrix fd_jac(rows, dim);
      for (int c = 0; c < dim; ++c) {
        const double h = finite_difference_step(x[c]);
        probe[c] = x[c] + h;
        const Vector hp = eval_constraint(spec, probe, theta, i);
        probe[c] = x[c] - h;
        const Vector hm = eval_constraint(spec, probe, theta, i);
        probe[c] = x[c];
        fd_jac.col(c) = (hp - hm) / (2.0 * h);
      }
      const double jdev = (jac - fd_jac).lpNorm<Eigen::Infinity>() /
                          std::max(1.0, fd_jac.lpNorm<Eigen::Infinity>());
      report.max_jacobian_deviation = std::max(report.max_jacobian_deviation, jdev);
      note(jdev, i, x, theta);
    }
  }
  report.passed = report.max_deviation <= threshold;
  return report;
}

}  // namespace scengame
