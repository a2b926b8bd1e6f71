#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "scengame/game.hpp"
#include "scengame/sampling.hpp"
#include "scengame/types.hpp"

namespace scengame {

/// S i.i.d. parameter draws and the seed that reproduces them.
struct ScenarioSet {
  std::vector<Vector> scenarios;
  std::uint64_t seed = 0;
  std::string sampler_id;

  int size() const { return static_cast<int>(scenarios.size()); }
  const Vector& operator[](int j) const { return scenarios[static_cast<std::size_t>(j)]; }
};

/// Draws S scenarios from the box, scenario-major, coordinate order within a
/// scenario. Deterministic in (sampler, S, seed).
ScenarioSet sample_scenarios(const UniformBox& sampler, int num_scenarios,
                             std::uint64_t seed);

/// sum_{l=0}^{k_max} C(S, l) eps^l (1-eps)^(S-l), evaluated in log space.
double binomial_tail(long long num_samples, double eps, long long k_max);

/// Inputs of the sample-complexity certificates.
struct CertificateQuery {
  long long sample_size = 1;   // S
  double failure_prob = 0.05;  // eps, constraint violation level
  double objective_tol = 0.5;  // eps~, objective approximation accuracy
  double objective_bound = 1;  // D
  int num_players = 1;         // N
  int decision_dim = 1;        // n
  bool separable = false;      // constraints of player i depend on x_i only

  void validate() const;
};

enum class CertificateKind {
  Joint,      // union bound over the joint decision, tail up to N*n - 1
  Separable,  // per-player tails up to n - 1
};

/// 2 N exp(-S eps~^2 / (4 D^2)): the objective-accuracy term shared by both
/// certificates.
double certificate_exp_term(const CertificateQuery& q);

/// Constraint term of the joint certificate: binomial_tail(S, eps, N n - 1).
double joint_tail_term(const CertificateQuery& q);

/// Constraint term of the separable certificate: N binomial_tail(S, eps, n - 1).
double separable_tail_term(const CertificateQuery& q);

/// Failure probability delta of the joint certificate; both the objective and
/// the chance-constraint statements hold with probability >= 1 - delta.
double joint_certificate_delta(const CertificateQuery& q);

/// Tighter delta for games whose constraints are separable across players.
/// Throws CertificateError when q.separable is false.
double separable_certificate_delta(const CertificateQuery& q);

double certificate_delta(const CertificateQuery& q, CertificateKind kind);

/// Smallest S with delta(S) <= target_delta for the chosen certificate.
/// q.sample_size is ignored. Throws CertificateError when no S <= 1e8 works.
long long min_samples(double target_delta, const CertificateQuery& q,
                      CertificateKind kind);

inline constexpr long long kMaxCertificateSamples = 100'000'000;

/// JSON report {S, eps, eps_tilde, D, N, n, delta_prop1, delta_prop2?,
/// exp_term, tail_term}; delta_prop2 only for separable games.
nlohmann::json certificate_report(const CertificateQuery& q);

/// Mean of f_i over the scenarios in ascending scenario order.
double empirical_objective(const GameSpec& spec, const Vector& x,
                           const ScenarioSet& scenarios, int player);

}  // namespace scengame
