#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scengame/admm.hpp"
#include "scengame/fixtures.hpp"
#include "scengame/rendezvous.hpp"

namespace scengame::cli {

enum class ProblemKind { Rendezvous, DecoupledQuadratic };

/// Everything a CLI run reads from its configuration file. The file is INI:
///
///   [problem]      kind, S, seed, rendezvous or decoupled_quadratic fields
///   [admm]         rho, tol, max_iter, workers, max_wall_seconds, inner_*
///   [certificate]  eps, eps_tilde, D (0: use the game's objective bound)
///   [output]       dir, trace_timing
///   [sweep]        s_list, reference_max_s
///
/// Intervals are written "lo,hi". Unknown sections or keys are errors.
struct RunConfig {
  ProblemKind kind = ProblemKind::Rendezvous;
  int num_scenarios = 10;
  std::uint64_t seed = 1;
  rendezvous::RendezvousConfig rendezvous;
  fixtures::DecoupledQuadraticConfig quadratic;

  AdmmConfig admm;

  double eps = 0.05;
  double eps_tilde = 0.5;
  double objective_bound_override = 0.0;

  std::string output_dir = "out";
  bool trace_timing = false;

  std::vector<int> sweep_sizes{10, 50, 100};
  int reference_max_s = 10;

  void validate() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Writes every field, so parse_config(to_ini(c)) reproduces c.
std::string to_ini(const RunConfig& c);

const char* kind_name(ProblemKind kind);

/// Scenario stream derived from the root seed; every S uses the same stream,
/// so a smaller scenario set is a prefix of a larger one.
inline constexpr std::uint64_t kScenarioStream = 1;

}  // namespace scengame::cli
