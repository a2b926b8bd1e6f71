#pragma once

#include <cstdint>
#include <vector>

#include "scengame/game.hpp"
#include "scengame/sampling.hpp"

namespace scengame::rendezvous {

// Two spacecraft with double-integrator dynamics in the plane. State
// (x, vx, y, vy), control (ax, ay) per step, decision of player i is its
// control sequence u_i(0..T-1) laid out step-major.
//
// theta packing (d = 44):
//   [0, 16)   P1 row-major      [16, 32)  P2 row-major
//   [32, 34)  b1                [34, 36)  b2
//   [36, 40)  xi1(0) = (x, vx, y, vy)
//   [40, 44)  xi2(0)
//
// Constraint rows per scenario (35 for T = 5):
//   player 1: rel(t) - min(b1, b2) <= 0 for t = 1..T, x then y   (2T rows)
//             u1 entry^2 - 1 <= 0                                 (2T rows)
//   player 2: |rel(t)|^2 - 1 <= 0 for t = 1..T                    (T rows)
//             u2 entry^2 - 1 <= 0                                 (2T rows)
// with rel(t) = position of 1 minus position of 2. Requiring rel <= b1 and
// rel <= b2 is the same as rel <= min(b1, b2).
struct RendezvousConfig {
  int horizon = 5;
  double dt = 0.15;
  Interval pos_range_p1{-0.15, 0.0};
  Interval pos_range_p2{0.0, 0.15};
  Interval vel_range{0.0, 0.0};
  Interval p_entry_range{0.0, 1.0};
  Interval b_entry_range{0.0, 0.01};
  double objective_bound = 3.0;

  void validate() const;
};

inline constexpr int kPlayers = 2;
inline constexpr int kControlDim = 2;
inline constexpr int kStateDim = 4;
inline constexpr int kParamDim = 44;

namespace layout {
inline constexpr int kP1 = 0;
inline constexpr int kP2 = 16;
inline constexpr int kB1 = 32;
inline constexpr int kB2 = 34;
inline constexpr int kXi1 = 36;
inline constexpr int kXi2 = 40;
}  // namespace layout

Matrix dynamics_a(double dt);
Matrix dynamics_b(double dt);

/// States xi(0..T) (rows) for one player from initial state and controls.
Matrix rollout(const RendezvousConfig& cfg, const Vector& initial_state,
               const Vector& controls);

struct Game {
  GameSpec spec;
  UniformBox sampler;
};

Game build_game(const RendezvousConfig& cfg);

struct ObjectiveBoundReport {
  double max_sampled = 0.0;  // over random feasible controls and sampled theta
  double max_corner = 0.0;   // over control corners, P = all-ones, position corners
  double bound = 0.0;
  bool exceeded = false;
};

ObjectiveBoundReport verify_objective_bound(const RendezvousConfig& cfg, int num_samples,
                                            std::uint64_t seed);

}  // namespace scengame::rendezvous
