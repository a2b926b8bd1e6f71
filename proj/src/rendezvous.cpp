#include "scengame/rendezvous.hpp"

#include <fmt/format.h>

#include <cmath>
#include <memory>
#include <random>

namespace scengame::rendezvous {

namespace {

// Linear maps shared by every callback of one built game.
struct Model {
  int T = 0;
  int n = 0;       // decision entries per player, 2T
  Matrix phi;      // stacked A^t, 4(T+1) x 4
  Matrix gamma;    // stacked controllability map, 4(T+1) x 2T
  Matrix rel;      // row 2t + axis: d rel(t) / d x, 2(T+1) x 4T
};

std::shared_ptr<const Model> make_model(const RendezvousConfig& cfg) {
  auto m = std::make_shared<Model>();
  m->T = cfg.horizon;
  m->n = kControlDim * cfg.horizon;
  const Matrix A = dynamics_a(cfg.dt);
  const Matrix B = dynamics_b(cfg.dt);
  const int rows = kStateDim * (cfg.horizon + 1);
  m->phi = Matrix::Zero(rows, kStateDim);
  m->gamma = Matrix::Zero(rows, m->n);
  Matrix power = Matrix::Identity(kStateDim, kStateDim);
  for (int t = 0; t <= cfg.horizon; ++t) {
    m->phi.middleRows(t * kStateDim, kStateDim) = power;
    power = A * power;
  }
  // xi(t) = A^t xi(0) + sum_{s<t} A^(t-1-s) B u(s)
  for (int t = 1; t <= cfg.horizon; ++t) {
    m->gamma.middleRows(t * kStateDim, kStateDim) =
        A * m->gamma.middleRows((t - 1) * kStateDim, kStateDim);
    m->gamma.block(t * kStateDim, (t - 1) * kControlDim, kStateDim, kControlDim) = B;
  }
  m->rel = Matrix::Zero(2 * (cfg.horizon + 1), 2 * m->n);
  for (int t = 0; t <= cfg.horizon; ++t) {
    for (int axis = 0; axis < 2; ++axis) {
      const auto row = m->gamma.row(kStateDim * t + 2 * axis);
      m->rel.row(2 * t + axis).head(m->n) = row;
      m->rel.row(2 * t + axis).tail(m->n) = -row;
    }
  }
  return m;
}

Matrix cost_matrix(const Vector& theta, int player) {
  const int off = player == 0 ? layout::kP1 : layout::kP2;
  Matrix P(kStateDim, kStateDim);
  for (int r = 0; r < kStateDim; ++r) {
    for (int c = 0; c < kStateDim; ++c) P(r, c) = theta[off + kStateDim * r + c];
  }
  return Matrix::Identity(kStateDim, kStateDim) + P.transpose() * P;
}

Vector initial_state(const Vector& theta, int player) {
  return theta.segment(player == 0 ? layout::kXi1 : layout::kXi2, kStateDim);
}

// Stacked states xi(0..T) of one player.
Vector trajectory(const Model& m, const Vector& x, const Vector& theta, int player) {
  return m.phi * initial_state(theta, player) + m.gamma * x.segment(player * m.n, m.n);
}

// Relative position rel(t) = pos1(t) - pos2(t) for one axis (0: x, 1: y).
double relative(const Vector& xi1, const Vector& xi2, int t, int axis) {
  const int r = kStateDim * t + 2 * axis;
  return xi1[r] - xi2[r];
}

// d rel(t) / d x for one axis, as a length-2n row.
auto relative_gradient(const Model& m, int t, int axis) { return m.rel.row(2 * t + axis); }

double objective(const Model& m, const Vector& x, const Vector& theta, int i) {
  const Matrix Q = cost_matrix(theta, i);
  const Vector xi = trajectory(m, x, theta, i);
  double state_cost = 0.0;
  for (int t = 0; t <= m.T; ++t) {
    const Vector s = xi.segment(kStateDim * t, kStateDim);
    state_cost += 0.5 * s.dot(Q * s);
  }
  const double control_cost = 0.5 * x.segment(i * m.n, m.n).squaredNorm();
  return (state_cost + control_cost) / m.T;
}

Vector gradient(const Model& m, const Vector& x, const Vector& theta, int i) {
  const Matrix Q = cost_matrix(theta, i);
  const Vector xi = trajectory(m, x, theta, i);
  Vector g = x.segment(i * m.n, m.n);
  for (int t = 0; t <= m.T; ++t) {
    g.noalias() += m.gamma.middleRows(kStateDim * t, kStateDim).transpose() *
                   (Q * xi.segment(kStateDim * t, kStateDim));
  }
  return g / m.T;
}

Matrix pseudogradient_jac(const Model& m, const Vector& theta) {
  Matrix jac = Matrix::Zero(2 * m.n, 2 * m.n);
  for (int i = 0; i < kPlayers; ++i) {
    const Matrix Q = cost_matrix(theta, i);
    Matrix block = Matrix::Identity(m.n, m.n);
    for (int t = 1; t <= m.T; ++t) {
      const auto G = m.gamma.middleRows(kStateDim * t, kStateDim);
      block.noalias() += G.transpose() * Q * G;
    }
    jac.block(i * m.n, i * m.n, m.n, m.n) = block / m.T;
  }
  return jac;
}

Vector constraint(const Model& m, const Vector& x, const Vector& theta, int i) {
  const Vector xi1 = trajectory(m, x, theta, 0);
  const Vector xi2 = trajectory(m, x, theta, 1);
  const int T = m.T;
  Vector h(i == 0 ? 4 * T : 3 * T);
  int r = 0;
  if (i == 0) {
    for (int t = 1; t <= T; ++t) {
      for (int axis = 0; axis < 2; ++axis) {
        const double b = std::min(theta[layout::kB1 + axis], theta[layout::kB2 + axis]);
        h[r++] = relative(xi1, xi2, t, axis) - b;
      }
    }
  } else {
    for (int t = 1; t <= T; ++t) {
      const double rx = relative(xi1, xi2, t, 0);
      const double ry = relative(xi1, xi2, t, 1);
      h[r++] = rx * rx + ry * ry - 1.0;
    }
  }
  const auto u = x.segment(i * m.n, m.n);
  for (int k = 0; k < m.n; ++k) h[r++] = u[k] * u[k] - 1.0;
  return h;
}

Matrix constraint_jacobian(const Model& m, const Vector& x, const Vector& theta, int i) {
  const int T = m.T;
  Matrix J = Matrix::Zero(i == 0 ? 4 * T : 3 * T, 2 * m.n);
  int r = 0;
  if (i == 0) {
    for (int t = 1; t <= T; ++t) {
      for (int axis = 0; axis < 2; ++axis) J.row(r++) = relative_gradient(m, t, axis);
    }
  } else {
    const Vector xi1 = trajectory(m, x, theta, 0);
    const Vector xi2 = trajectory(m, x, theta, 1);
    for (int t = 1; t <= T; ++t) {
      J.row(r++) = 2.0 * relative(xi1, xi2, t, 0) * relative_gradient(m, t, 0) +
                   2.0 * relative(xi1, xi2, t, 1) * relative_gradient(m, t, 1);
    }
  }
  for (int k = 0; k < m.n; ++k) J(r++, i * m.n + k) = 2.0 * x[i * m.n + k];
  return J;
}

Matrix constraint_curvature(const Model& m, int i, const Vector& weights) {
  const int T = m.T;
  Matrix H = Matrix::Zero(2 * m.n, 2 * m.n);
  int r = 0;
  if (i == 0) {
    r = 2 * T;  // affine rows
  } else {
    for (int t = 1; t <= T; ++t) {
      const double w = weights[r++];
      if (w == 0.0) continue;
      for (int axis = 0; axis < 2; ++axis) {
        const auto g = relative_gradient(m, t, axis);
        H.noalias() += (2.0 * w) * g.transpose() * g;
      }
    }
  }
  for (int k = 0; k < m.n; ++k) H(i * m.n + k, i * m.n + k) += 2.0 * weights[r++];
  return H;
}

}  // namespace

void RendezvousConfig::validate() const {
  if (horizon < 1) throw Error("rendezvous horizon must be at least 1");
  if (!(dt > 0.0)) throw Error("rendezvous dt must be positive");
  if (!(objective_bound > 0.0)) throw Error("rendezvous objective_bound must be positive");
  for (const Interval* iv :
       {&pos_range_p1, &pos_range_p2, &vel_range, &p_entry_range, &b_entry_range}) {
    if (iv->lo > iv->hi) throw Error("rendezvous sampling range has lo > hi");
  }
}

Matrix dynamics_a(double dt) {
  Matrix A{{1.0, dt, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0}, {0.0, 0.0, 1.0, dt},
           {0.0, 0.0, 0.0, 1.0}};
  return A;
}

Matrix dynamics_b(double dt) {
  const double h = 0.5 * dt * dt;
  Matrix B{{h, 0.0}, {dt, 0.0}, {0.0, h}, {0.0, dt}};
  return B;
}

Matrix rollout(const RendezvousConfig& cfg, const Vector& initial, const Vector& controls) {
  cfg.validate();
  if (initial.size() != kStateDim) {
    throw DimensionError("initial_state", "initial state must have 4 entries");
  }
  if (controls.size() != kControlDim * cfg.horizon) {
    throw DimensionError("controls", fmt::format("expected {} control entries, got {}",
                                                 kControlDim * cfg.horizon,
                                                 controls.size()));
  }
  const Matrix A = dynamics_a(cfg.dt);
  const Matrix B = dynamics_b(cfg.dt);
  Matrix states(cfg.horizon + 1, kStateDim);
  Vector xi = initial;
  states.row(0) = xi.transpose();
  for (int t = 0; t < cfg.horizon; ++t) {
    xi = A * xi + B * controls.segment(kControlDim * t, kControlDim);
    states.row(t + 1) = xi.transpose();
  }
  return states;
}

Game build_game(const RendezvousConfig& cfg) {
  cfg.validate();
  const auto model = make_model(cfg);
  const int T = cfg.horizon;

  Game g;
  GameSpec& s = g.spec;
  s.num_players = kPlayers;
  s.decision_dim = kControlDim * T;
  s.param_dim = kParamDim;
  s.constraint_dims = {4 * T, 3 * T};
  s.objective_bound = cfg.objective_bound;
  s.constant_pseudogradient_jacobian = true;
  s.separable_constraints = false;
  s.objective = [model](const Vector& x, const Vector& th, int i) {
    return objective(*model, x, th, i);
  };
  s.objective_gradient = [model](const Vector& x, const Vector& th, int i) {
    return gradient(*model, x, th, i);
  };
  s.constraint = [model](const Vector& x, const Vector& th, int i) {
    return constraint(*model, x, th, i);
  };
  s.constraint_jacobian = [model](const Vector& x, const Vector& th, int i) {
    return constraint_jacobian(*model, x, th, i);
  };
  s.pseudogradient_jacobian = [model](const Vector&, const Vector& th) {
    return pseudogradient_jac(*model, th);
  };
  s.constraint_curvature = [model](const Vector&, const Vector&, int i, const Vector& w) {
    return constraint_curvature(*model, i, w);
  };
  s.decision_box = Interval{-1.0, 1.0};

  UniformBox& box = g.sampler;
  box.id = "rendezvous";
  box.add_block("P1", 16, cfg.p_entry_range);
  box.add_block("P2", 16, cfg.p_entry_range);
  box.add_block("b1", 2, cfg.b_entry_range);
  box.add_block("b2", 2, cfg.b_entry_range);
  for (const auto& [name, pos] :
       {std::pair{"xi1_0", cfg.pos_range_p1}, std::pair{"xi2_0", cfg.pos_range_p2}}) {
    box.blocks.push_back({name, kStateDim});
    box.coords.insert(box.coords.end(), {pos, cfg.vel_range, pos, cfg.vel_range});
  }
  s.param_box = box;
  s.validate();
  return g;
}

ObjectiveBoundReport verify_objective_bound(const RendezvousConfig& cfg, int num_samples,
                                            std::uint64_t seed) {
  const Game game = build_game(cfg);
  const GameSpec& spec = game.spec;
  ObjectiveBoundReport rep;
  rep.bound = cfg.objective_bound;

  std::mt19937_64 rng(seed);
  auto draw = [&](Interval iv) { return iv.lo + (iv.hi - iv.lo) * unit_uniform(rng()); };
  Vector x(spec.joint_dim());
  Vector theta(kParamDim);
  for (int k = 0; k < num_samples; ++k) {
    for (int c = 0; c < x.size(); ++c) x[c] = draw(Interval{-1.0, 1.0});
    for (int c = 0; c < kParamDim; ++c) theta[c] = draw(game.sampler.coords[c]);
    for (int i = 0; i < kPlayers; ++i) {
      rep.max_sampled = std::max(rep.max_sampled, std::abs(spec.objective(x, theta, i)));
    }
  }

  // f_i is convex in (u_i, xi_i(0)), so over a box its maximum sits at a
  // corner; P is held at its largest entries.
  theta.setZero();
  theta.segment(layout::kP1, 32).setConstant(cfg.p_entry_range.hi);
  const int n = spec.decision_dim;
  for (int i = 0; i < kPlayers; ++i) {
    const Interval pos = i == 0 ? cfg.pos_range_p1 : cfg.pos_range_p2;
    const int off = i == 0 ? layout::kXi1 : layout::kXi2;
    for (int corner = 0; corner < 4; ++corner) {
      theta[off] = corner & 1 ? pos.hi : pos.lo;
      theta[off + 2] = corner & 2 ? pos.hi : pos.lo;
      for (long mask = 0; mask < (1L << n); ++mask) {
        x.setZero();
        for (int k = 0; k < n; ++k) x[i * n + k] = (mask >> k) & 1 ? 1.0 : -1.0;
        rep.max_corner = std::max(rep.max_corner, std::abs(spec.objective(x, theta, i)));
      }
    }
  }
  rep.exceeded = std::max(rep.max_sampled, rep.max_corner) > rep.bound;
  return rep;
}

}  // namespace scengame::rendezvous
