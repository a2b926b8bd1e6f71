#pragma once

// Small games shared by the unit tests and the acceptance checks.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "scengame/certificates.hpp"
#include "scengame/game.hpp"
#include "scengame/rendezvous.hpp"

namespace scengame::testing {

// f_i = 1/2 |x_i|^2 for N players with n coordinates each, no constraints.
inline GameSpec identity_game(int players, int n) {
  GameSpec s;
  s.num_players = players;
  s.decision_dim = n;
  s.param_dim = 1;
  s.objective_bound = 1.0;
  s.affine_constraints = true;
  s.objective = [n](const Vector& x, const Vector&, int i) {
    return 0.5 * x.segment(i * n, n).squaredNorm();
  };
  s.objective_gradient = [n](const Vector& x, const Vector&, int i) {
    return Vector(x.segment(i * n, n));
  };
  s.validate();
  return s;
}

// f_1 = x_1 - x_2^2, f_2 = x_2 - x_1^2: F is constant (1, 1).
inline GameSpec constant_operator_game() {
  GameSpec s;
  s.num_players = 2;
  s.decision_dim = 1;
  s.param_dim = 1;
  s.objective_bound = 2.0;
  s.objective = [](const Vector& x, const Vector&, int i) {
    return x[i] - x[1 - i] * x[1 - i];
  };
  s.objective_gradient = [](const Vector&, const Vector&, int) {
    return Vector::Ones(1).eval();
  };
  s.validate();
  return s;
}

// f_1 = x_1 x_2, f_2 = -x_1 x_2: F(x) = (x_2, -x_1).
inline GameSpec bilinear_game() {
  GameSpec s;
  s.num_players = 2;
  s.decision_dim = 1;
  s.param_dim = 1;
  s.objective_bound = 1.0;
  s.objective = [](const Vector& x, const Vector&, int i) {
    return (i == 0 ? 1.0 : -1.0) * x[0] * x[1];
  };
  s.objective_gradient = [](const Vector& x, const Vector&, int i) {
    Vector g(1);
    g[0] = i == 0 ? x[1] : -x[0];
    return g;
  };
  s.validate();
  return s;
}

// Two scalar players, f_i = 1/2 (x_i - theta_i)^2, one shared row owned by
// player 1: x_1 + x_2 - theta_2 <= 0.
inline GameSpec shared_budget_game() {
  GameSpec s;
  s.num_players = 2;
  s.decision_dim = 1;
  s.param_dim = 3;
  s.constraint_dims = {1, 0};
  s.objective_bound = 2.0;
  s.affine_constraints = true;
  s.constant_pseudogradient_jacobian = true;
  s.objective = [](const Vector& x, const Vector& th, int i) {
    return 0.5 * (x[i] - th[i]) * (x[i] - th[i]);
  };
  s.objective_gradient = [](const Vector& x, const Vector& th, int i) {
    Vector g(1);
    g[0] = x[i] - th[i];
    return g;
  };
  s.constraint = [](const Vector& x, const Vector& th, int i) {
    Vector h(i == 0 ? 1 : 0);
    if (i == 0) h[0] = x[0] + x[1] - th[2];
    return h;
  };
  s.constraint_jacobian = [](const Vector&, const Vector&, int i) {
    Matrix j = Matrix::Zero(i == 0 ? 1 : 0, 2);
    if (i == 0) j.setOnes();
    return j;
  };
  s.param_box.id = "shared_budget";
  s.param_box.add_block("centres", 2, {0.2, 1.0});
  s.param_box.add_block("budget", 1, {0.3, 0.8});
  s.validate();
  return s;
}

inline ScenarioSet rendezvous_scenarios(const rendezvous::Game& game, int num_scenarios,
                                        std::uint64_t seed = 1) {
  return sample_scenarios(game.sampler, num_scenarios, derive_seed(seed, 1));
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("scengame_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace scengame::testing
