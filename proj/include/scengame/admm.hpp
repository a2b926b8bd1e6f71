#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scengame/certificates.hpp"
#include "scengame/game.hpp"
#include "scengame/inner_solver.hpp"

namespace scengame {

/// ADMM iterate (w, x, lambda). Row j of w and lambda belongs to scenario j.
struct ConsensusState {
  ScenarioMatrix w;
  Vector x;
  ScenarioMatrix lambda;
  int iteration = 0;

  static ConsensusState zeros(int num_scenarios, int joint_dim);
  int num_scenarios() const { return static_cast<int>(w.rows()); }
};

/// An optimal triple z* = (w*, x*, lambda*) with w* = M x*.
struct ReferenceTriple {
  ScenarioMatrix w;
  Vector x;
  ScenarioMatrix lambda;
};

struct AdmmConfig {
  double rho = 5.0;
  double tol = 1e-8;  // on |w(k+1) - M x(k)|^2
  int max_iter = 5000;
  int workers = 0;    // 0: one per hardware thread
  InnerOptions inner;
  bool record_trace = true;
  double max_wall_seconds = 0.0;  // 0: no cap

  void validate() const;
};

struct TraceRow {
  int k = 0;
  double consensus_residual = 0.0;  // |w(k+1) - M x(k)|^2
  double dual_change = 0.0;         // |lambda(k+1) - lambda(k)|
  std::optional<double> lyapunov;   // V(k+1)
  int inner_iter_min = 0;
  double inner_iter_mean = 0.0;
  int inner_iter_max = 0;
  double phase_ms_inner = 0.0;
  double phase_ms_outer = 0.0;

  // Diagnostics kept in memory only.
  double inner_cpu_ms = 0.0;  // sum of the individual scenario solve times
  std::optional<double> primal_term;  // rho * |M (x(k+1) - x*)|^2
  double multiplier_imbalance = 0.0;  // |sum_j lambda^j(k+1)|_inf
  double lambda_inf_norm = 0.0;
  double max_constraint = 0.0;        // max_j max h(w^j(k+1); theta^j)
  double max_inner_stationarity = 0.0;
  double max_inner_feasibility = 0.0;
  double max_inner_complementarity = 0.0;
  double min_inner_multiplier = 0.0;
};

struct SolverTrace {
  std::vector<TraceRow> rows;
  std::optional<double> lyapunov_initial;  // V(0)

  /// CSV with the fixed header. Timing columns are left empty unless
  /// include_timing is set, so that traces of identical runs are
  /// byte-identical.
  void write_csv(std::ostream& out, bool include_timing) const;
};

enum class RunStatus { Converged, MaxIter, InnerFailure };
const char* status_name(RunStatus status);

struct InnerFailure {
  int scenario = -1;
  int iteration = -1;
  bool infeasible = false;
  std::string message;
};

/// Data of one completed outer iteration, handed to the step observer.
struct StepView {
  int k = 0;
  const Vector& x_prev;
  const ScenarioMatrix& lambda_prev;
  const ConsensusState& state;  // w(k+1), x(k+1), lambda(k+1)
  const std::vector<KKTPoint>& inner;
};

struct RunResult {
  Vector x;
  ConsensusState state;
  std::vector<KKTPoint> inner;  // last accepted inner point per scenario
  SolverTrace trace;
  RunStatus status = RunStatus::MaxIter;
  std::optional<InnerFailure> failure;
  int iterations = 0;
  double final_residual = 0.0;
  double vi_residual = 0.0;
  bool wall_cap_hit = false;
  double wall_ms = 0.0;
  double inner_cpu_ms = 0.0;  // summed scenario solve times
  double outer_ms = 0.0;      // consensus and dual phases
  int workers = 1;
};

struct RunOptions {
  std::optional<ConsensusState> init;
  const ReferenceTriple* reference = nullptr;
  std::function<void(const StepView&)> on_step;
};

RunResult run(const GameSpec& spec, const ScenarioSet& scenarios, const AdmmConfig& cfg,
              const RunOptions& options = {});

/// x_i = (1/S) sum_j (lambda_i^j / rho + w_i^j), pairwise over scenarios.
Vector consensus_update(const ConsensusState& state, double rho);

/// lambda^j += rho (w^j - x_new) for every scenario.
void dual_update(ConsensusState& state, const Vector& x_new, double rho);

/// sum_j |w^j - x_prev|^2.
double consensus_residual(const ConsensusState& state, const Vector& x_prev);

/// (1/rho) |lambda - lambda*|^2 + rho * S * |x - x*|^2.
double lyapunov(const ConsensusState& state, const ReferenceTriple& ref, double rho);

/// |sum_j lambda^j|_inf.
double multiplier_imbalance(const ScenarioMatrix& lambda);

struct ViResidual {
  double stationarity = 0.0;  // |F(w^j)/S + J^j' v^j + lambda^j| over all j
  double balance = 0.0;       // |sum_j lambda^j|
  double consensus = 0.0;     // rho |w - M x|
  double total = 0.0;         // largest of the three
};

/// Euclidean norms of the three blocks of the optimality operator at the
/// iterate; `multipliers[j]` are scenario j's inequality multipliers.
ViResidual vi_optimality_residual(const GameSpec& spec, const ScenarioSet& scenarios,
                                  const ConsensusState& state,
                                  const std::vector<Vector>& multipliers, double rho);

struct KeyInequality {
  double lhs = 0.0;  // (1/rho) (lambda(k+1) - lambda*)'(lambda(k+1) - lambda(k))
  double rhs = 0.0;  // rho (w(k+1) - w*)'(M x(k) - M x(k+1))
  bool holds = true;
};

/// Evaluates the per-step inequality linking the multiplier step to the
/// consensus step; holds iff lhs <= rhs + 1e-8 (1 + |rhs|).
KeyInequality key_inequality_check(const Vector& x_prev, const ScenarioMatrix& lambda_prev,
                                   const ConsensusState& next, const ReferenceTriple& ref,
                                   double rho);

/// 1 - 1 / (2 kappa^(0.5 + |e|)) with kappa = L/m and e = log_kappa(rho / sqrt(mL)).
/// kappa^(0.5 + |e|) is evaluated as sqrt(kappa) * max(r, 1/r), r = rho/sqrt(mL),
/// which is the same number and stays defined at kappa = 1.
double linear_rate_bound(double m, double L, double rho);

struct LinearRateReport {
  double bound = 0.0;
  double max_ratio = 0.0;          // over the steps that were checked
  std::vector<double> ratios;      // V(k+1)/V(k), one per trace row
  std::vector<int> exempted;       // rows with a binding constraint
  std::vector<int> violations;     // rows exceeding bound + tolerance
  std::vector<int> descent_violations;  // exempted rows failing the descent test
  bool passed = true;
};

/// Per-step contraction check on a trace recorded with a reference. Rows with
/// max_constraint >= -margin are exempted and checked against the descent
/// inequality V(k+1) <= V(k) - rho r_k instead.
LinearRateReport linear_rate_check(const SolverTrace& trace, double m, double L,
                                   double rho, double margin = 1e-6,
                                   double tolerance = 1e-9);

}  // namespace scengame
