#include "scengame/cli/commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "scengame/kernels.hpp"
#include "scengame/oracle.hpp"

namespace scengame::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path prepare_dir(const RunConfig& c) {
  fs::path dir(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError(fmt::format("cannot create output directory '{}': {}",
                                        c.output_dir, ec.message()));
  return dir;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << j.dump(2) << '\n';
}

void write_trace(const fs::path& path, const SolverTrace& trace, bool timing) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  trace.write_csv(out, timing);
}

std::vector<double> to_list(const Vector& v) { return {v.data(), v.data() + v.size()}; }

json run_summary(const RunConfig& c, int S, const RunResult& r) {
  json j;
  j["problem"] = kind_name(c.kind);
  j["S"] = S;
  j["seed"] = c.seed;
  j["status"] = status_name(r.status);
  j["iterations"] = r.iterations;
  j["final_consensus_residual"] = r.final_residual;
  j["vi_residual"] = r.vi_residual;
  j["wall_ms"] = r.wall_ms;
  j["inner_cpu_ms"] = r.inner_cpu_ms;
  j["outer_ms"] = r.outer_ms;
  j["workers"] = r.workers;
  j["wall_cap_hit"] = r.wall_cap_hit;
  j["simd"] = simd::isa_name(simd::active_isa());
  j["x"] = to_list(r.x);
  if (r.failure) {
    j["failure"] = {{"scenario", r.failure->scenario},
                    {"iteration", r.failure->iteration},
                    {"infeasible", r.failure->infeasible},
                    {"message", r.failure->message}};
  }
  return j;
}

AdmmConfig admm_config(const RunConfig& c) { return c.admm; }

}  // namespace

Problem build_problem(const RunConfig& c) {
  Problem p;
  if (c.kind == ProblemKind::Rendezvous) {
    auto g = rendezvous::build_game(c.rendezvous);
    p.spec = std::move(g.spec);
    p.sampler = std::move(g.sampler);
  } else {
    p.spec = fixtures::decoupled_quadratic(c.quadratic);
    p.sampler = p.spec.param_box;
  }
  return p;
}

ScenarioSet problem_scenarios(const RunConfig& c, const Problem& p, int num_scenarios) {
  return sample_scenarios(p.sampler, num_scenarios, derive_seed(c.seed, kScenarioStream));
}

CertificateQuery certificate_query(const RunConfig& c, const Problem& p) {
  CertificateQuery q;
  q.sample_size = c.num_scenarios;
  q.failure_prob = c.eps;
  q.objective_tol = c.eps_tilde;
  q.objective_bound =
      c.objective_bound_override > 0.0 ? c.objective_bound_override : p.spec.objective_bound;
  q.num_players = p.spec.num_players;
  q.decision_dim = p.spec.decision_dim;
  q.separable = p.spec.separable_constraints;
  return q;
}

int exit_code(RunStatus status) {
  switch (status) {
    case RunStatus::Converged:
      return kExitOk;
    case RunStatus::MaxIter:
      return kExitMaxIter;
    case RunStatus::InnerFailure:
      return kExitInnerFailure;
  }
  return kExitInnerFailure;
}

int cmd_certify(const RunConfig& c, std::ostream& log) {
  const Problem p = build_problem(c);
  const json report = certificate_report(certificate_query(c, p));
  const fs::path dir = prepare_dir(c);
  write_json(dir / "certificate.json", report);
  log << fmt::format("S = {}: delta (joint) = {:.6e}, exp term = {:.6e}, tail term = {:.6e}\n",
                     c.num_scenarios, report["delta_prop1"].get<double>(),
                     report["exp_term"].get<double>(), report["tail_term"].get<double>());
  return kExitOk;
}

int cmd_solve(const RunConfig& c, std::ostream& log) {
  const Problem p = build_problem(c);
  const ScenarioSet scenarios = problem_scenarios(c, p, c.num_scenarios);
  const RunResult r = run(p.spec, scenarios, admm_config(c));
  const fs::path dir = prepare_dir(c);
  write_trace(dir / "trace.csv", r.trace, c.trace_timing);
  write_json(dir / "summary.json", run_summary(c, c.num_scenarios, r));
  log << fmt::format("{} after {} iterations, consensus residual {:.3e}, vi residual {:.3e}\n",
                     status_name(r.status), r.iterations, r.final_residual, r.vi_residual);
  if (r.failure) log << "inner failure: " << r.failure->message << '\n';
  return exit_code(r.status);
}

int cmd_compare(const RunConfig& c, std::ostream& log) {
  using Clock = std::chrono::steady_clock;
  const Problem p = build_problem(c);
  const ScenarioSet scenarios = problem_scenarios(c, p, c.num_scenarios);

  const auto t0 = Clock::now();
  ReferenceSolution ref;
  try {
    ref = solve_centralized(p.spec, scenarios);
  } catch (const OracleSizeError& e) {
    log << e.what() << '\n';
    return kExitOracleRefused;
  }
  const double oracle_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

  const ReferenceTriple triple = ref.triple();
  RunOptions opts;
  opts.reference = &triple;
  const RunResult r = run(p.spec, scenarios, admm_config(c), opts);

  json j;
  j["problem"] = kind_name(c.kind);
  j["S"] = c.num_scenarios;
  j["seed"] = c.seed;
  j["status"] = status_name(r.status);
  j["iterations"] = r.iterations;
  j["deviation_inf"] = (r.x - ref.x_star).lpNorm<Eigen::Infinity>();
  j["admm_wall_ms"] = r.wall_ms;
  j["oracle_wall_ms"] = oracle_ms;
  j["oracle_iterations"] = ref.iterations;
  j["x_admm"] = to_list(r.x);
  j["x_oracle"] = to_list(ref.x_star);
  std::vector<double> series;
  if (r.trace.lyapunov_initial) series.push_back(*r.trace.lyapunov_initial);
  for (const auto& row : r.trace.rows) {
    if (row.lyapunov) series.push_back(*row.lyapunov);
  }
  j["lyapunov"] = series;
  if (c.kind == ProblemKind::DecoupledQuadratic) {
    Vector mean = Vector::Zero(p.spec.joint_dim());
    for (int s = 0; s < scenarios.size(); ++s) mean += scenarios[s];
    mean /= static_cast<double>(scenarios.size());
    j["closed_form_deviation_inf"] = (r.x - mean).lpNorm<Eigen::Infinity>();
    const Vector eg = extragradient_reference(p.spec, scenarios, 0.5, 2000);
    j["extragradient_deviation_inf"] = (r.x - eg).lpNorm<Eigen::Infinity>();
  }
  const fs::path dir = prepare_dir(c);
  write_trace(dir / "trace.csv", r.trace, c.trace_timing);
  write_json(dir / "comparison.json", j);
  log << fmt::format("{} after {} iterations; |x_admm - x_oracle|_inf = {:.3e}\n",
                     status_name(r.status), r.iterations, j["deviation_inf"].get<double>());
  return exit_code(r.status);
}

int cmd_sweep(const RunConfig& c, std::ostream& log) {
  const Problem p = build_problem(c);
  const fs::path dir = prepare_dir(c);
  std::ofstream csv(dir / "sweep.csv", std::ios::binary);
  if (!csv) throw Error("cannot write sweep.csv");
  csv << "S,iterations,wall_ms_sequential,wall_ms_parallel_estimate\n";
  int worst = kExitOk;
  for (int S : c.sweep_sizes) {
    const ScenarioSet scenarios = problem_scenarios(c, p, S);
    std::optional<ReferenceSolution> ref;
    if (S <= c.reference_max_s && centralized_rows(p.spec, S) <= kOracleRowBudget) {
      ref = solve_centralized(p.spec, scenarios);
    }
    RunOptions opts;
    ReferenceTriple triple;
    if (ref) {
      triple = ref->triple();
      opts.reference = &triple;
    }
    const RunResult r = run(p.spec, scenarios, admm_config(c), opts);
    const double sequential = r.inner_cpu_ms + r.outer_ms;
    const double parallel =
        r.inner_cpu_ms / std::min(S, std::max(1, r.workers)) + r.outer_ms;
    csv << fmt::format("{},{},{:.3f},{:.3f}\n", S, r.iterations, sequential, parallel);
    write_trace(dir / fmt::format("trace_S{}.csv", S), r.trace, c.trace_timing);
    json summary = run_summary(c, S, r);
    summary["reference"] = ref.has_value();
    write_json(dir / fmt::format("summary_S{}.json", S), summary);
    log << fmt::format("S = {}: {} after {} iterations ({:.0f} ms sequential)\n", S,
                       status_name(r.status), r.iterations, sequential);
    worst = std::max(worst, exit_code(r.status));
  }
  return worst;
}

}  // namespace scengame::cli
