#pragma once

#include "scengame/game.hpp"
#include "scengame/sampling.hpp"

namespace scengame::fixtures {

// f_i(x; theta) = 1/2 |x_i - c_i(theta)|^2 with c_i(theta) = block i of theta,
// theta uniform on [lo, hi]^(N n). No constraints. The pseudogradient is
// x - theta, so the game is 1-strongly monotone and 1-Lipschitz and the
// scenario-game equilibrium is the mean of the sampled centres.
struct DecoupledQuadraticConfig {
  int num_players = 2;
  int decision_dim = 2;
  Interval center_range{-1.0, 1.0};
};

GameSpec decoupled_quadratic(const DecoupledQuadraticConfig& cfg);

}  // namespace scengame::fixtures
