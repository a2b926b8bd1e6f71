#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "scengame/certificates.hpp"
#include "scengame/rendezvous.hpp"
#include "support.hpp"

using namespace scengame;

TEST_CASE("degenerate box gives zero scenarios") {
  UniformBox box;
  box.id = "zero";
  box.add_block("z", 4, {0.0, 0.0});
  const ScenarioSet set = sample_scenarios(box, 3, 1);
  REQUIRE(set.size() == 3);
  for (int j = 0; j < 3; ++j) CHECK(set[j].isZero(0.0));
}

TEST_CASE("unit box sample mean is within 4 sigma of 1/2") {
  UniformBox box;
  box.id = "unit";
  box.add_block("u", 5, {0.0, 1.0});
  const int s = 10000;
  const ScenarioSet set = sample_scenarios(box, s, 42);
  // sigma of the mean of U(0,1) draws: sqrt(1/12 / S).
  const double sigma = std::sqrt(1.0 / 12.0 / s);
  for (int c = 0; c < 5; ++c) {
    double mean = 0.0;
    for (int j = 0; j < s; ++j) mean += set[j][c];
    mean /= s;
    CHECK(std::abs(mean - 0.5) <= 4.0 * sigma);
  }
}

TEST_CASE("sampling is deterministic in the seed and prefix-stable") {
  const auto game = rendezvous::build_game({});
  const ScenarioSet a = sample_scenarios(game.sampler, 20, 7);
  const ScenarioSet b = sample_scenarios(game.sampler, 20, 7);
  const ScenarioSet c = sample_scenarios(game.sampler, 5, 7);
  for (int j = 0; j < 20; ++j) CHECK(a[j] == b[j]);
  for (int j = 0; j < 5; ++j) CHECK(a[j] == c[j]);
  CHECK_FALSE(sample_scenarios(game.sampler, 1, 8)[0] == a[0]);
}

TEST_CASE("binomial tail closed forms") {
  CHECK(binomial_tail(10, 0.5, 0) == doctest::Approx(1.0 / 1024.0).epsilon(1e-14));
  CHECK(binomial_tail(10, 0.5, 10) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(binomial_tail(10, 0.5, 11), CertificateError);
  CHECK_THROWS_AS(binomial_tail(10, 1.0, 1), CertificateError);
}

TEST_CASE("binomial tail matches exact rational arithmetic") {
  const double exact = testing::to_double(testing::exact_binomial_tail(20, 0.05, 3));
  CHECK(std::abs(binomial_tail(20, 0.05, 3) - exact) <= 1e-12 * exact);

  const double big = testing::to_double(testing::exact_binomial_tail(1000, 0.05, 9));
  CHECK(std::abs(binomial_tail(1000, 0.05, 9) - big) <= 1e-12 * big);
}

TEST_CASE("objective term of the rendezvous certificate") {
  CertificateQuery q;
  q.sample_size = 1000;
  q.objective_tol = 0.5;
  q.objective_bound = 3.0;
  q.num_players = 2;
  q.decision_dim = 10;
  const double term = certificate_exp_term(q);
  const double hp = testing::exp_term_50(1000, 0.5, 3.0, 2).convert_to<double>();
  CHECK(std::abs(term - hp) <= 1e-12 * hp);
  // Reported as 1 - 4.0e-3: rounded to two significant digits the term may
  // differ from 4.0e-3 by one unit in the second digit.
  const double rounded = std::round(term * 1e4) / 1e4;
  CHECK(rounded == doctest::Approx(3.9e-3));
  CHECK(std::abs(rounded - 4.0e-3) <= 1e-4 + 1e-12);
}

TEST_CASE("joint certificate shrinks with S beyond the binomial mode") {
  CertificateQuery q;
  q.failure_prob = 0.05;
  q.objective_tol = 0.5;
  q.objective_bound = 3.0;
  q.num_players = 2;
  q.decision_dim = 10;
  double prev = 2.0;
  for (long long s : {1000LL, 10000LL, 100000LL}) {
    q.sample_size = s;
    const double d = joint_certificate_delta(q);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("certificate reduces to one binomial term when the objective term vanishes") {
  CertificateQuery q;
  q.sample_size = 10;
  q.failure_prob = 0.5;
  q.objective_tol = 1e3;
  q.objective_bound = 1.0;
  q.num_players = 1;
  q.decision_dim = 1;
  CHECK(joint_certificate_delta(q) == doctest::Approx(1.0 / 1024.0).epsilon(1e-12));
}

TEST_CASE("separable certificate") {
  CertificateQuery q;
  q.sample_size = 1000;
  q.failure_prob = 0.05;
  q.objective_tol = 0.5;
  q.objective_bound = 3.0;
  q.num_players = 1;
  q.decision_dim = 4;
  q.separable = true;
  CHECK(separable_certificate_delta(q) == joint_certificate_delta(q));

  q.num_players = 2;
  q.decision_dim = 10;
  CHECK(separable_tail_term(q) == 2.0 * binomial_tail(1000, 0.05, 9));

  CertificateQuery joint = q;
  joint.separable = false;
  CHECK(certificate_exp_term(joint) == certificate_exp_term(q));
  CHECK_THROWS_AS(separable_certificate_delta(joint), CertificateError);
}

TEST_CASE("minimum sample size") {
  CertificateQuery q;
  q.failure_prob = 0.05;
  q.objective_tol = 0.5;
  q.objective_bound = 3.0;
  q.num_players = 2;
  q.decision_dim = 10;
  CertificateQuery tiny = q;
  tiny.num_players = 1;
  tiny.decision_dim = 1;
  tiny.objective_tol = 1e3;
  CHECK(min_samples(1.0, tiny, CertificateKind::Joint) == 1);

  q.sample_size = 1000;
  const double target = joint_certificate_delta(q);
  const long long s = min_samples(target, q, CertificateKind::Joint);
  CHECK(s <= 1000);
  CertificateQuery at = q;
  at.sample_size = s;
  CHECK(joint_certificate_delta(at) <= target);
  at.sample_size = s - 1;
  CHECK(joint_certificate_delta(at) > target);

  q.objective_bound = 1e9;
  CHECK_THROWS_AS(min_samples(1e-300, q, CertificateKind::Joint), CertificateError);
}

TEST_CASE("certificate report fields") {
  CertificateQuery q;
  q.sample_size = 1;
  q.num_players = 2;
  q.decision_dim = 10;
  q.objective_bound = 3.0;
  const auto j = certificate_report(q);
  CHECK(j.contains("delta_prop1"));
  CHECK_FALSE(j.contains("delta_prop2"));
  CHECK(j["delta_prop1"].get<double>() > 0.9);
  q.separable = true;
  CHECK(certificate_report(q).contains("delta_prop2"));
}

TEST_CASE("empirical objective") {
  const auto game = rendezvous::build_game({});
  const ScenarioSet set = testing::rendezvous_scenarios(game, 100, 3);
  Vector x = Vector::Constant(game.spec.joint_dim(), 0.3);

  ScenarioSet one;
  one.scenarios = {set[0]};
  CHECK(empirical_objective(game.spec, x, one, 1) == game.spec.objective(x, set[0], 1));

  GameSpec flat = testing::identity_game(1, 1);
  flat.objective = [](const Vector&, const Vector&, int) { return 2.5; };
  ScenarioSet many;
  for (int j = 0; j < 7; ++j) many.scenarios.push_back(Vector::Constant(1, j));
  CHECK(empirical_objective(flat, Vector::Zero(1), many, 0) == doctest::Approx(2.5));

  for (int i = 0; i < 2; ++i) {
    long double acc = 0.0L;
    for (const Vector& th : set.scenarios) acc += game.spec.objective(x, th, i);
    const double mean = static_cast<double>(acc / set.size());
    CHECK(std::abs(empirical_objective(game.spec, x, set, i) - mean) <= 1e-12);
  }
}
