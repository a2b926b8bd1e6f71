#include "scengame/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

namespace scengame {

ScenarioSet sample_scenarios(const UniformBox& sampler, int num_scenarios,
                             std::uint64_t seed) {
  if (num_scenarios < 1) throw Error("sample_scenarios needs S >= 1");
  if (sampler.dim() == 0) throw Error("sampler has no coordinates");
  for (std::size_t k = 0; k < sampler.coords.size(); ++k) {
    const Interval& r = sampler.coords[k];
    if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
      throw Error(fmt::format("sampler '{}' coordinate {} has an empty range [{}, {}]",
                              sampler.id, k, r.lo, r.hi));
    }
  }
  std::mt19937_64 rng(seed);
  ScenarioSet set;
  set.seed = seed;
  set.sampler_id = sampler.id;
  set.scenarios.reserve(static_cast<std::size_t>(num_scenarios));
  for (int j = 0; j < num_scenarios; ++j) {
    Vector theta(sampler.dim());
    for (int k = 0; k < sampler.dim(); ++k) {
      const Interval& r = sampler.coords[static_cast<std::size_t>(k)];
      theta[k] = r.lo + (r.hi - r.lo) * unit_uniform(rng());
    }
    set.scenarios.push_back(std::move(theta));
  }
  return set;
}

double binomial_tail(long long num_samples, double eps, long long k_max) {
  if (num_samples < 0) throw CertificateError("binomial_tail needs S >= 0");
  if (!(eps > 0.0 && eps < 1.0)) throw CertificateError("binomial_tail needs eps in (0, 1)");
  if (k_max < 0) throw CertificateError("binomial_tail needs k_max >= 0");
  if (k_max > num_samples) {
    throw CertificateError(
        fmt::format("binomial_tail: k_max = {} exceeds S = {}", k_max, num_samples));
  }
  const double n = static_cast<double>(num_samples);
  const double log_eps = std::log(eps);
  const double log_keep = std::log1p(-eps);
  const double log_n_fact = std::lgamma(n + 1.0);

  std::vector<double> logs(static_cast<std::size_t>(k_max + 1));
  double peak = -std::numeric_limits<double>::infinity();
  for (long long l = 0; l <= k_max; ++l) {
    const double dl = static_cast<double>(l);
    const double log_term = log_n_fact - std::lgamma(dl + 1.0) - std::lgamma(n - dl + 1.0) +
                            dl * log_eps + (n - dl) * log_keep;
    logs[static_cast<std::size_t>(l)] = log_term;
    peak = std::max(peak, log_term);
  }
  // Neumaier-compensated sum of the rescaled terms.
  double sum = 0.0;
  double carry = 0.0;
  for (double log_term : logs) {
    const double term = std::exp(log_term - peak);
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      carry += (sum - t) + term;
    } else {
      carry += (term - t) + sum;
    }
    sum = t;
  }
  const double tail = std::exp(peak) * (sum + carry);
  return std::clamp(tail, 0.0, 1.0);
}

void CertificateQuery::validate() const {
  if (sample_size < 1) throw CertificateError("certificate needs S >= 1");
  if (!(failure_prob > 0.0 && failure_prob < 1.0)) {
    throw CertificateError("certificate needs eps in (0, 1)");
  }
  if (!(objective_tol > 0.0)) throw CertificateError("certificate needs eps_tilde > 0");
  if (!(objective_bound > 0.0)) throw CertificateError("certificate needs D > 0");
  if (num_players < 1 || decision_dim < 1) {
    throw CertificateError("certificate needs N >= 1 and n >= 1");
  }
}

double certificate_exp_term(const CertificateQuery& q) {
  q.validate();
  const double s = static_cast<double>(q.sample_size);
  return 2.0 * q.num_players *
         std::exp(-s * q.objective_tol * q.objective_tol /
                  (4.0 * q.objective_bound * q.objective_bound));
}

double joint_tail_term(const CertificateQuery& q) {
  q.validate();
  const long long k = std::min<long long>(
      static_cast<long long>(q.num_players) * q.decision_dim - 1, q.sample_size);
  return binomial_tail(q.sample_size, q.failure_prob, k);
}

double separable_tail_term(const CertificateQuery& q) {
  q.validate();
  const long long k = std::min<long long>(q.decision_dim - 1, q.sample_size);
  return q.num_players * binomial_tail(q.sample_size, q.failure_prob, k);
}

double joint_certificate_delta(const CertificateQuery& q) {
  return certificate_exp_term(q) + joint_tail_term(q);
}

double separable_certificate_delta(const CertificateQuery& q) {
  if (!q.separable) {
    throw CertificateError(
        "separable certificate requires each player's constraints to depend only on "
        "its own decision block");
  }
  return certificate_exp_term(q) + separable_tail_term(q);
}

double certificate_delta(const CertificateQuery& q, CertificateKind kind) {
  return kind == CertificateKind::Joint ? joint_certificate_delta(q)
                                        : separable_certificate_delta(q);
}

long long min_samples(double target_delta, const CertificateQuery& q,
                      CertificateKind kind) {
  if (!(target_delta > 0.0 && target_delta <= 1.0)) {
    throw CertificateError("min_samples needs a target delta in (0, 1]");
  }
  auto delta_at = [&](long long s) {
    CertificateQuery probe = q;
    probe.sample_size = s;
    return certificate_delta(probe, kind);
  };

  long long lo = 0;  // delta(lo) > target, or lo == 0
  long long hi = 1;
  while (delta_at(hi) > target_delta) {
    lo = hi;
    if (hi == kMaxCertificateSamples) {
      throw CertificateError(fmt::format(
          "no sample size up to {} reaches delta <= {:g}; delta({}) = {:.6g}",
          kMaxCertificateSamples, target_delta, kMaxCertificateSamples,
          delta_at(kMaxCertificateSamples)));
    }
    hi = std::min(hi * 2, kMaxCertificateSamples);
  }
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    if (delta_at(mid) <= target_delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  // The bracket assumes monotone decrease; step down while the predecessor
  // also satisfies the target.
  while (hi > 1 && delta_at(hi - 1) <= target_delta) --hi;
  return hi;
}

nlohmann::json certificate_report(const CertificateQuery& q) {
  q.validate();
  nlohmann::json out;
  out["S"] = q.sample_size;
  out["eps"] = q.failure_prob;
  out["eps_tilde"] = q.objective_tol;
  out["D"] = q.objective_bound;
  out["N"] = q.num_players;
  out["n"] = q.decision_dim;
  out["delta_prop1"] = joint_certificate_delta(q);
  if (q.separable) out["delta_prop2"] = separable_certificate_delta(q);
  out["exp_term"] = certificate_exp_term(q);
  out["tail_term"] = joint_tail_term(q);
  return out;
}

double empirical_objective(const GameSpec& spec, const Vector& x,
                           const ScenarioSet& scenarios, int player) {
  check_joint_decision(spec, x);
  if (player < 0 || player >= spec.num_players) {
    throw Error(fmt::format("player index {} out of range", player));
  }
  if (scenarios.size() == 0) throw Error("empirical_objective needs at least one scenario");
  double sum = 0.0;
  for (int j = 0; j < scenarios.size(); ++j) {
    check_parameter(spec, scenarios[j]);
    const double f = spec.objective(x, scenarios[j], player);
    if (!std::isfinite(f)) {
      throw NonFiniteError(
          fmt::format("objective of player {} is not finite in scenario {}", player, j));
    }
    sum += f;
  }
  return sum / static_cast<double>(scenarios.size());
}

}  // namespace scengame
