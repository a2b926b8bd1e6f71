#pragma once

#include <iosfwd>

#include "scengame/certificates.hpp"
#include "scengame/cli/config.hpp"

namespace scengame::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;  // bad flags or configuration
inline constexpr int kExitMaxIter = 2;
inline constexpr int kExitInnerFailure = 3;
inline constexpr int kExitOracleRefused = 4;

struct Problem {
  GameSpec spec;
  UniformBox sampler;
};

Problem build_problem(const RunConfig& c);
ScenarioSet problem_scenarios(const RunConfig& c, const Problem& p, int num_scenarios);
CertificateQuery certificate_query(const RunConfig& c, const Problem& p);
int exit_code(RunStatus status);

// Each command writes its files into c.output_dir (created if missing) and
// prints a short human summary to `log`. The return value is the exit code.
int cmd_certify(const RunConfig& c, std::ostream& log);  // certificate.json
int cmd_solve(const RunConfig& c, std::ostream& log);    // trace.csv, summary.json
int cmd_compare(const RunConfig& c, std::ostream& log);  // comparison.json, trace.csv
int cmd_sweep(const RunConfig& c, std::ostream& log);    // sweep.csv, per-S files

}  // namespace scengame::cli
