#include "scengame/admm.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "scengame/kernels.hpp"
#include "scengame/worker_pool.hpp"

namespace scengame {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

double sum_of_squared_distances(const ScenarioMatrix& a, const double* b,
                                std::ptrdiff_t b_stride) {
  const int rows = static_cast<int>(a.rows());
  const int cols = static_cast<int>(a.cols());
  std::vector<double> per_row(static_cast<std::size_t>(rows));
  simd::kernels().row_squared_distance(a.data(), b, b_stride, rows, cols, per_row.data());
  return simd::pairwise_sum(per_row.data(), rows);
}

void check_state(const ConsensusState& s) {
  if (s.lambda.rows() != s.w.rows() || s.lambda.cols() != s.w.cols() ||
      s.x.size() != s.w.cols()) {
    throw DimensionError("state", fmt::format("inconsistent ADMM state: w {}x{}, lambda "
                                              "{}x{}, x {}",
                                              s.w.rows(), s.w.cols(), s.lambda.rows(),
                                              s.lambda.cols(), s.x.size()));
  }
}

void check_reference(const ConsensusState& s, const ReferenceTriple& ref) {
  if (ref.x.size() != s.x.size() || ref.lambda.rows() != s.lambda.rows() ||
      ref.lambda.cols() != s.lambda.cols() || ref.w.rows() != s.w.rows() ||
      ref.w.cols() != s.w.cols()) {
    throw DimensionError("reference", "reference triple does not match the ADMM state");
  }
}

std::string csv_number(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

ConsensusState ConsensusState::zeros(int num_scenarios, int joint_dim) {
  ConsensusState s;
  s.w = ScenarioMatrix::Zero(num_scenarios, joint_dim);
  s.lambda = ScenarioMatrix::Zero(num_scenarios, joint_dim);
  s.x = Vector::Zero(joint_dim);
  return s;
}

void AdmmConfig::validate() const {
  if (!(rho > 0.0)) throw Error("rho must be positive");
  if (!(tol > 0.0)) throw Error("tol must be positive");
  if (max_iter < 1) throw Error("max_iter must be at least 1");
  if (workers < 0) throw Error("workers must be non-negative");
  if (max_wall_seconds < 0.0) throw Error("max_wall_seconds must be non-negative");
}

const char* status_name(RunStatus status) {
  switch (status) {
    case RunStatus::Converged:
      return "Converged";
    case RunStatus::MaxIter:
      return "MaxIter";
    case RunStatus::InnerFailure:
      return "InnerFailure";
  }
  return "?";
}

void SolverTrace::write_csv(std::ostream& out, bool include_timing) const {
  out << "k,consensus_residual,dual_change,lyapunov,inner_iter_min,inner_iter_mean,"
         "inner_iter_max,phase_ms_inner,phase_ms_outer\n";
  for (const auto& r : rows) {
    out << r.k << ',' << csv_number(r.consensus_residual) << ','
        << csv_number(r.dual_change) << ','
        << (r.lyapunov ? csv_number(*r.lyapunov) : std::string()) << ','
        << r.inner_iter_min << ',' << csv_number(r.inner_iter_mean) << ','
        << r.inner_iter_max << ',';
    if (include_timing) {
      out << fmt::format("{:.3f},{:.3f}", r.phase_ms_inner, r.phase_ms_outer);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

Vector consensus_update(const ConsensusState& state, double rho) {
  check_state(state);
  const int rows = state.num_scenarios();
  const int cols = static_cast<int>(state.x.size());
  Vector x(cols);
  simd::kernels().sum_rows(state.lambda.data(), 1.0 / rho, state.w.data(), rows, cols,
                           x.data());
  return x / static_cast<double>(rows);
}

void dual_update(ConsensusState& state, const Vector& x_new, double rho) {
  check_state(state);
  if (x_new.size() != state.x.size()) {
    throw DimensionError("x_new", "consensus vector has the wrong length");
  }
  simd::kernels().dual_update(state.lambda.data(), state.w.data(), x_new.data(),
                              state.num_scenarios(), static_cast<int>(x_new.size()),
                              rho);
}

double consensus_residual(const ConsensusState& state, const Vector& x_prev) {
  if (x_prev.size() != state.w.cols()) {
    throw DimensionError("x_prev", "consensus vector has the wrong length");
  }
  return sum_of_squared_distances(state.w, x_prev.data(), 0);
}

double lyapunov(const ConsensusState& state, const ReferenceTriple& ref, double rho) {
  check_state(state);
  check_reference(state, ref);
  const double dual = sum_of_squared_distances(state.lambda, ref.lambda.data(),
                                               static_cast<std::ptrdiff_t>(ref.lambda.cols()));
  const double primal = (state.x - ref.x).squaredNorm();
  return dual / rho + rho * static_cast<double>(state.num_scenarios()) * primal;
}

double multiplier_imbalance(const ScenarioMatrix& lambda) {
  const int cols = static_cast<int>(lambda.cols());
  if (cols == 0) return 0.0;
  Vector sums(cols);
  simd::kernels().sum_rows(lambda.data(), 1.0, nullptr, static_cast<int>(lambda.rows()),
                           cols, sums.data());
  return sums.lpNorm<Eigen::Infinity>();
}

ViResidual vi_optimality_residual(const GameSpec& spec, const ScenarioSet& scenarios,
                                  const ConsensusState& state,
                                  const std::vector<Vector>& multipliers, double rho) {
  check_state(state);
  const int S = scenarios.size();
  if (state.num_scenarios() != S || static_cast<int>(multipliers.size()) != S) {
    throw DimensionError("scenarios", "state, scenarios and multipliers disagree on S");
  }
  const int m = spec.total_constraints();
  std::vector<double> stat_rows(static_cast<std::size_t>(S));
  for (int j = 0; j < S; ++j) {
    const Vector w = state.w.row(j).transpose();
    Vector r = pseudogradient(spec, w, scenarios[j]) / static_cast<double>(S) +
               state.lambda.row(j).transpose();
    if (m > 0) {
      r.noalias() += joint_constraint_jacobian(spec, w, scenarios[j]).transpose() *
                     multipliers[static_cast<std::size_t>(j)];
    }
    stat_rows[static_cast<std::size_t>(j)] = r.squaredNorm();
  }
  ViResidual out;
  out.stationarity = std::sqrt(simd::pairwise_sum(stat_rows.data(), S));
  const int cols = static_cast<int>(state.x.size());
  Vector sums(cols);
  simd::kernels().sum_rows(state.lambda.data(), 1.0, nullptr, S, cols, sums.data());
  out.balance = sums.norm();
  out.consensus = rho * std::sqrt(consensus_residual(state, state.x));
  out.total = std::max({out.stationarity, out.balance, out.consensus});
  return out;
}

KeyInequality key_inequality_check(const Vector& x_prev, const ScenarioMatrix& lambda_prev,
                                   const ConsensusState& next, const ReferenceTriple& ref,
                                   double rho) {
  check_state(next);
  check_reference(next, ref);
  KeyInequality out;
  out.lhs = ((next.lambda - ref.lambda).cwiseProduct(next.lambda - lambda_prev)).sum() / rho;
  const Vector dx = x_prev - next.x;
  double rhs = 0.0;
  for (Eigen::Index j = 0; j < next.w.rows(); ++j) {
    rhs += (next.w.row(j) - ref.w.row(j)).dot(dx.transpose());
  }
  out.rhs = rho * rhs;
  out.holds = out.lhs <= out.rhs + 1e-8 * (1.0 + std::abs(out.rhs));
  return out;
}

double linear_rate_bound(double m, double L, double rho) {
  if (!(m > 0.0) || !(L >= m) || !(rho > 0.0)) {
    throw Error("linear_rate_bound needs 0 < m <= L and rho > 0");
  }
  const double r = rho / std::sqrt(m * L);
  const double power = std::sqrt(L / m) * std::max(r, 1.0 / r);
  return 1.0 - 1.0 / (2.0 * power);
}

LinearRateReport linear_rate_check(const SolverTrace& trace, double m, double L,
                                   double rho, double margin, double tolerance) {
  LinearRateReport rep;
  rep.bound = linear_rate_bound(m, L, rho);
  if (!trace.lyapunov_initial) throw Error("linear_rate_check needs a trace with V(0)");
  double prev = *trace.lyapunov_initial;
  for (std::size_t k = 0; k < trace.rows.size(); ++k) {
    const TraceRow& row = trace.rows[k];
    if (!row.lyapunov) throw Error("linear_rate_check needs Lyapunov values on every row");
    const double v = *row.lyapunov;
    const double ratio = prev > 0.0 ? v / prev : 0.0;
    rep.ratios.push_back(ratio);
    const int idx = static_cast<int>(k);
    if (row.max_constraint >= -margin) {
      rep.exempted.push_back(idx);
      if (v - prev + rho * row.consensus_residual > 1e-8 * (1.0 + prev)) {
        rep.descent_violations.push_back(idx);
      }
    } else if (prev > 0.0) {
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      if (ratio > rep.bound + tolerance) rep.violations.push_back(idx);
    }
    prev = v;
  }
  rep.passed = rep.violations.empty() && rep.descent_violations.empty();
  return rep;
}

RunResult run(const GameSpec& spec, const ScenarioSet& scenarios, const AdmmConfig& cfg,
              const RunOptions& options) {
  spec.validate();
  cfg.validate();
  const int S = scenarios.size();
  if (S < 1) throw Error("run needs at least one scenario");
  const int dim = spec.joint_dim();
  const int m = spec.total_constraints();
  for (int j = 0; j < S; ++j) check_parameter(spec, scenarios[j]);

  const auto t_start = Clock::now();
  RunResult res;
  res.state = options.init ? *options.init : ConsensusState::zeros(S, dim);
  ConsensusState& st = res.state;
  check_state(st);
  if (st.num_scenarios() != S || st.x.size() != dim) {
    throw DimensionError("init", "initial state does not match the game and scenarios");
  }
  const ReferenceTriple* ref = options.reference;
  if (ref) {
    check_reference(st, *ref);
    res.trace.lyapunov_initial = lyapunov(st, *ref, cfg.rho);
  }

  WorkerPool pool(cfg.workers);
  res.workers = pool.size();

  std::vector<std::optional<KKTPoint>> warm(static_cast<std::size_t>(S));
  std::vector<KKTPoint> points(static_cast<std::size_t>(S));
  std::vector<double> solve_ms(static_cast<std::size_t>(S));
  std::vector<double> max_h(static_cast<std::size_t>(S));
  std::vector<std::optional<InnerFailure>> failures(static_cast<std::size_t>(S));
  const bool cache_jacobians = spec.constant_pseudogradient_jacobian;
  std::vector<Matrix> jacobians(cache_jacobians ? static_cast<std::size_t>(S) : 0);

  Vector x_prev;
  ScenarioMatrix lambda_prev;
  for (int k = 0; k < cfg.max_iter; ++k) {
    // Scenario phase: workers read x(k), lambda(k) and write slot j only.
    const auto t_inner = Clock::now();
    pool.parallel_for(S, [&](int j) {
      const auto t0 = Clock::now();
      const auto uj = static_cast<std::size_t>(j);
      ScenarioSubproblem p;
      p.spec = &spec;
      p.theta = scenarios[j];
      p.x_ref = st.x;
      p.lambda_ref = st.lambda.row(j).transpose();
      p.rho = cfg.rho;
      p.num_scenarios = S;
      if (cache_jacobians) {
        if (jacobians[uj].size() == 0) {
          jacobians[uj] = pseudogradient_jacobian(spec, st.x, p.theta);
        }
        p.pseudogradient_jacobian = &jacobians[uj];
      }
      failures[uj].reset();
      try {
        points[uj] = solve_subgame(p, warm[uj], cfg.inner);
        max_h[uj] = m > 0 ? joint_constraint(spec, points[uj].w, p.theta).maxCoeff()
                          : -std::numeric_limits<double>::infinity();
      } catch (const InfeasibleSubproblemError& e) {
        failures[uj] = InnerFailure{j, k, true, e.what()};
      } catch (const InnerSolveError& e) {
        failures[uj] = InnerFailure{j, k, false, e.what()};
      }
      solve_ms[uj] = elapsed_ms(t0);
    });
    const double inner_ms = elapsed_ms(t_inner);
    double inner_cpu = 0.0;
    for (double t : solve_ms) inner_cpu += t;
    res.inner_cpu_ms += inner_cpu;

    for (const auto& f : failures) {
      if (f) {
        res.status = RunStatus::InnerFailure;
        res.failure = f;
        break;
      }
    }
    if (res.failure) break;

    // Consensus and dual phases.
    const auto t_outer = Clock::now();
    x_prev = st.x;
    lambda_prev = st.lambda;
    for (int j = 0; j < S; ++j) {
      const auto& w = points[static_cast<std::size_t>(j)].w;
      if (!w.allFinite()) {
        throw NonFiniteError(fmt::format("scenario {} returned a non-finite w at "
                                         "iteration {}", j, k));
      }
      st.w.row(j) = w.transpose();
      warm[static_cast<std::size_t>(j)] = points[static_cast<std::size_t>(j)];
    }
    const Vector x_new = consensus_update(st, cfg.rho);
    const double residual = consensus_residual(st, x_prev);
    dual_update(st, x_new, cfg.rho);
    st.x = x_new;
    st.iteration = k + 1;
    if (!st.x.allFinite() || !st.lambda.allFinite()) {
      throw NonFiniteError(fmt::format("non-finite ADMM iterate at iteration {}", k));
    }
    res.outer_ms += elapsed_ms(t_outer);
    res.final_residual = residual;
    res.iterations = k + 1;

    if (cfg.record_trace) {
      TraceRow row;
      row.k = k;
      row.consensus_residual = residual;
      row.dual_change = std::sqrt(sum_of_squared_distances(
          st.lambda, lambda_prev.data(), static_cast<std::ptrdiff_t>(dim)));
      if (ref) {
        row.lyapunov = lyapunov(st, *ref, cfg.rho);
        row.primal_term =
            cfg.rho * static_cast<double>(S) * (st.x - ref->x).squaredNorm();
      }
      row.inner_iter_min = std::numeric_limits<int>::max();
      double iter_sum = 0.0;
      row.max_constraint = -std::numeric_limits<double>::infinity();
      row.min_inner_multiplier = std::numeric_limits<double>::infinity();
      for (int j = 0; j < S; ++j) {
        const KKTPoint& pt = points[static_cast<std::size_t>(j)];
        row.inner_iter_min = std::min(row.inner_iter_min, pt.iterations);
        row.inner_iter_max = std::max(row.inner_iter_max, pt.iterations);
        iter_sum += pt.iterations;
        row.max_constraint = std::max(row.max_constraint, max_h[static_cast<std::size_t>(j)]);
        row.max_inner_stationarity =
            std::max(row.max_inner_stationarity, pt.stationarity_residual);
        row.max_inner_feasibility =
            std::max(row.max_inner_feasibility, pt.feasibility_violation);
        row.max_inner_complementarity =
            std::max(row.max_inner_complementarity, pt.complementarity_residual);
        if (pt.v.size() > 0) {
          row.min_inner_multiplier = std::min(row.min_inner_multiplier, pt.v.minCoeff());
        }
      }
      row.inner_iter_mean = iter_sum / S;
      row.multiplier_imbalance = multiplier_imbalance(st.lambda);
      row.lambda_inf_norm = st.lambda.size() ? st.lambda.lpNorm<Eigen::Infinity>() : 0.0;
      row.phase_ms_inner = inner_ms;
      row.phase_ms_outer = elapsed_ms(t_outer);
      row.inner_cpu_ms = inner_cpu;
      res.trace.rows.push_back(row);
    }

    if (options.on_step) options.on_step(StepView{k, x_prev, lambda_prev, st, points});

    if (residual <= cfg.tol) {
      res.status = RunStatus::Converged;
      break;
    }
    if (cfg.max_wall_seconds > 0.0 && elapsed_ms(t_start) > 1000.0 * cfg.max_wall_seconds) {
      res.wall_cap_hit = true;
      break;
    }
  }

  res.x = st.x;
  res.inner = points;
  if (res.iterations > 0 && res.status != RunStatus::InnerFailure) {
    std::vector<Vector> v(static_cast<std::size_t>(S));
    for (int j = 0; j < S; ++j) v[static_cast<std::size_t>(j)] = points[static_cast<std::size_t>(j)].v;
    res.vi_residual = vi_optimality_residual(spec, scenarios, st, v, cfg.rho).total;
  }
  res.wall_ms = elapsed_ms(t_start);
  return res;
}

}  // namespace scengame
