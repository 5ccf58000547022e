#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "conreg/errors.hpp"
#include "conreg/learners.hpp"
#include "conreg/ordering.hpp"
#include "conreg/rng.hpp"
#include "conreg/sgd.hpp"
#include "conreg/tasks.hpp"

using namespace conreg;

namespace {

LsqProblem random_problem(std::uint64_t seed, int n, int d, int rank, bool unit_beta) {
  Rng rng(seed);
  Vector w_star(d);
  for (int i = 0; i < d; ++i) w_star(i) = rng.normal();
  std::vector<LsqComponent> components;
  for (int i = 0; i < n; ++i) {
    Matrix a(rank, d);
    for (int r = 0; r < rank; ++r)
      for (int c = 0; c < d; ++c) a(r, c) = rng.normal();
    if (unit_beta) a /= spectral_norm(a);
    LsqComponent comp;
    comp.b = a * w_star;
    comp.a = std::move(a);
    components.push_back(std::move(comp));
  }
  return make_lsq_problem(std::move(components), w_star);
}

}  // namespace

TEST_CASE("problem construction validates realizability and computes beta") {
  const LsqProblem p = random_problem(1, 5, 4, 2, true);
  CHECK(p.beta == doctest::Approx(1.0).epsilon(1e-9));
  for (int i = 0; i < p.size(); ++i) CHECK(component_loss(p, p.w_star, i) <= 1e-16);

  LsqComponent bad;
  bad.a = Matrix::Identity(2, 2);
  bad.b = Vector{{1, 1}};
  CHECK_THROWS_AS(make_lsq_problem({bad}, Vector::Zero(2)), not_realizable_error);
}

TEST_CASE("step size at or above 2/beta is rejected") {
  const LsqProblem p = random_problem(2, 3, 3, 1, true);
  CHECK_THROWS_AS(sgd_with_replacement(p, Vector::Zero(3), 2.0 / p.beta, 5, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(sgd_with_replacement(p, Vector::Zero(3), 2.5 / p.beta, 5, 0),
                  std::invalid_argument);
  CHECK_NOTHROW(sgd_with_replacement(p, Vector::Zero(3), 1.9 / p.beta, 5, 0));
}

TEST_CASE("single identity component: one unit step lands on w_star") {
  LsqComponent comp;
  comp.a = Matrix::Identity(3, 3);
  Vector w_star{{1, -2, 3}};
  comp.b = w_star;
  const LsqProblem p = make_lsq_problem({comp}, w_star);
  const SgdRun run = sgd_with_replacement(p, Vector::Zero(3), 1.0, 1, 0);
  CHECK((run.iterates.back() - w_star).norm() <= 1e-14);
}

TEST_CASE("tiny step sizes move the iterate proportionally") {
  const LsqProblem p = random_problem(3, 4, 4, 2, true);
  const double eta = 1e-6;
  Vector w0 = Vector::Zero(4);
  const SgdRun run = sgd_with_replacement(p, w0, eta, 1, 0);
  double max_b = 0.0;
  for (const auto& c : p.components) max_b = std::max(max_b, c.b.norm());
  CHECK((run.iterates.back() - w0).norm() <= eta * p.beta * (w0.norm() + max_b) + 1e-15);
}

TEST_CASE("unit-step SGD on the modified objective reproduces the Kaczmarz trajectory") {
  const TaskCollection c = gen_random_realizable(4, 4, 6, {1, 2}, {1, 3});
  const LsqProblem p = modified_objective_problem(c);
  CHECK(p.beta == doctest::Approx(1.0).epsilon(1e-9));

  const int steps = 30;
  const std::uint64_t seed = 12;
  const SgdRun sgd_run = sgd_with_replacement(p, Vector::Zero(6), 1.0, steps, seed);
  const Ordering o = sample_with_replacement(seed, 4, steps);
  const Trajectory kz = run(c, o, LearnerTag::kaczmarz);
  REQUIRE(sgd_run.sample_sequence == o.indices);
  for (std::size_t t = 0; t < kz.iterates.size(); ++t) {
    CHECK((sgd_run.iterates[t] - kz.iterates[t]).norm() <= 1e-9);
  }
}

TEST_CASE("regret: zero-loss start and frozen bound value") {
  const LsqProblem p = random_problem(5, 4, 4, 1, true);
  const SgdRun from_star = sgd_with_replacement(p, p.w_star, 1.0, 20, 3);
  const RegretCheck rc = regret_sum(from_star, p);
  CHECK(rc.regret <= 1e-16);
  CHECK(rc.bound == 0.0);  // D = 0 makes the bound collapse to zero
  CHECK(rc.pass);

  // eta = 1, beta = 1, D = 1: bound = 1 / (2 * 1 * (2 - 1)) = 0.5
  Vector w0 = p.w_star + Vector::Unit(4, 0);
  const SgdRun run = sgd_with_replacement(p, w0, 1.0, 100, 4);
  const RegretCheck rc2 = regret_sum(run, p);
  CHECK(rc2.bound == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rc2.regret <= 0.5 + 1e-12);
}

TEST_CASE("pathwise regret bound never violated across the step-size grid") {
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const LsqProblem p = random_problem(100 + trial, 6, 5, 2, true);
    Rng rng(trial);
    Vector w0(5);
    for (Index i = 0; i < 5; ++i) w0(i) = rng.normal();
    for (const double factor : {0.25, 0.5, 1.0, 1.5, 1.9}) {
      const SgdRun run = sgd_with_replacement(p, w0, factor / p.beta, 60, trial);
      const RegretCheck rc = regret_sum(run, p);
      CHECK(rc.pass);
      ++checked;
    }
  }
  CHECK(checked == 100);
}

TEST_CASE("descent lemma: a single component step never increases that component's loss") {
  Rng rng(77);
  const LsqProblem p = random_problem(6, 5, 4, 2, true);
  for (int trial = 0; trial < 200; ++trial) {
    Vector w(4);
    for (Index i = 0; i < 4; ++i) w(i) = rng.normal();
    const int i = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(p.size())));
    const double eta = 2.0 * rng.next_double() / p.beta;  // anywhere in (0, 2/beta)
    const Vector w_next = w - eta * component_gradient(p, w, i);
    CHECK(component_loss(p, w_next, i) <= component_loss(p, w, i) + 1e-12);
  }
}

TEST_CASE("gradient norm squared bounded by 2 beta f") {
  Rng rng(78);
  const LsqProblem p = random_problem(7, 5, 4, 2, true);
  for (int trial = 0; trial < 500; ++trial) {
    Vector w(4);
    for (Index i = 0; i < 4; ++i) w(i) = rng.normal();
    const int i = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(p.size())));
    const double g2 = component_gradient(p, w, i).squaredNorm();
    CHECK(g2 <= 2.0 * p.beta * p.beta * component_loss(p, w, i) * (1.0 + 1e-10) + 1e-12);
  }
}

TEST_CASE("gradient identity 2 f(w) = grad f(w) . (w - w_star)") {
  Rng rng(79);
  for (int trial = 0; trial < 1000; ++trial) {
    const LsqProblem p = random_problem(200 + trial % 10, 3, 4, 2, false);
    Vector w(4);
    for (Index i = 0; i < 4; ++i) w(i) = rng.normal();
    const int i = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(p.size())));
    const double lhs = 2.0 * component_loss(p, w, i);
    const double rhs = component_gradient(p, w, i).dot(w - p.w_star);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("without replacement: single component equals with-replacement step") {
  const LsqProblem p = random_problem(8, 1, 3, 1, true);
  const SgdRun wr = sgd_with_replacement(p, Vector::Zero(3), 0.7, 1, 5);
  const SgdRun wor = sgd_without_replacement(p, Vector::Zero(3), 0.7, 1, 5);
  CHECK((wr.iterates.back() - wor.iterates.back()).norm() <= 1e-15);
}

TEST_CASE("without replacement: deterministic permutation prefix, exhaustion error") {
  const LsqProblem p = random_problem(9, 6, 4, 1, true);
  const SgdRun a = sgd_without_replacement(p, Vector::Zero(4), 1.0, 6, 42);
  const SgdRun b = sgd_without_replacement(p, Vector::Zero(4), 1.0, 6, 42);
  CHECK(a.sample_sequence == b.sample_sequence);
  std::vector<int> sorted = a.sample_sequence;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5});
  CHECK_THROWS_AS(sgd_without_replacement(p, Vector::Zero(4), 1.0, 7, 42), std::invalid_argument);
}

TEST_CASE("without replacement: expected prefix-average loss at T=5 under the theorem bound") {
  // n = 6 rank-1 unit rows, eta = 1/beta = 1, D = 1.
  const LsqProblem p = random_problem(10, 6, 5, 1, true);
  const Vector w0 = p.w_star + Vector::Unit(5, 0);  // D = 1
  const int T = 5;
  const int seeds = 2000;
  double sum = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const SgdRun run = sgd_without_replacement(p, w0, 1.0, T, static_cast<std::uint64_t>(s));
    sum += prefix_average_loss(run, p, T - 1);
  }
  const double mean = sum / seeds;
  CHECK(mean <= 7.0 / std::pow(static_cast<double>(T), 0.25));
}

TEST_CASE("prefix average loss: zero at w_star, matches brute force") {
  const LsqProblem p = random_problem(11, 4, 4, 2, true);
  const SgdRun run = sgd_with_replacement(p, Vector::Zero(4), 1.0, 10, 9);
  double brute = 0.0;
  for (int t = 0; t <= 7; ++t) {
    brute += component_loss(p, run.iterates.back(), run.sample_sequence[static_cast<std::size_t>(t)]);
  }
  brute /= 8.0;
  CHECK(prefix_average_loss(run, p, 7) == doctest::Approx(brute).epsilon(1e-12));

  LsqComponent comp;
  comp.a = Matrix::Identity(2, 2);
  comp.b = Vector{{1, 1}};
  const LsqProblem single = make_lsq_problem({comp}, Vector{{1, 1}});
  const SgdRun exact = sgd_with_replacement(single, Vector::Zero(2), 1.0, 2, 0);
  CHECK(prefix_average_loss(exact, single, 1) <= 1e-16);
}

TEST_CASE("per-step loss is recomputable from the stored matrices") {
  const LsqProblem p = random_problem(12, 5, 4, 2, true);
  const SgdRun run = sgd_with_replacement(p, Vector::Zero(4), 0.9, 25, 31);
  for (int t = 0; t < run.steps(); ++t) {
    const double expected =
        component_loss(p, run.iterates[static_cast<std::size_t>(t)],
                       run.sample_sequence[static_cast<std::size_t>(t)]);
    CHECK(run.per_step_loss[static_cast<std::size_t>(t)] ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}
