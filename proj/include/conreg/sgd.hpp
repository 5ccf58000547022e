#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "conreg/linalg.hpp"

namespace conreg {

struct LsqComponent {
  Matrix a;
  Vector b;
};

// Realizable stochastic least squares problem: f(w; i) = 1/2 |A_i w - b_i|^2
// with uniform sampling over components, f_bar(w_star) = 0, and
// beta = max_i |A_i| (the individual smoothness constant).
struct LsqProblem {
  std::vector<LsqComponent> components;
  Vector w_star;
  double beta = 0.0;

  int size() const { return static_cast<int>(components.size()); }
};

// Validates realizability of every component and computes beta.
LsqProblem make_lsq_problem(std::vector<LsqComponent> components, Vector w_star);

struct TaskCollection;

// The modified objective of a task collection as an LsqProblem: components
// A_m = X_m^+ X_m, b_m = A_m w_star, so f(w; m) = 1/2 |X_m^+ X_m (w - w_star)|^2
// and beta = 1 for nonzero tasks. Unit-step SGD on it is the Kaczmarz method.
LsqProblem modified_objective_problem(const TaskCollection& c);

struct SgdRun {
  std::vector<Vector> iterates;          // length steps + 1
  std::vector<int> sample_sequence;      // length steps
  double eta = 0.0;
  double D = 0.0;                        // |w_0 - w_star|
  std::vector<double> per_step_loss;     // f(w_t; i_t), t = 0..steps-1
  std::vector<double> regret_partial_sums;

  int steps() const { return static_cast<int>(sample_sequence.size()); }
};

double component_loss(const LsqProblem& p, const Vector& w, int i);
Vector component_gradient(const LsqProblem& p, const Vector& w, int i);

// Population objective f_bar(w) = (1/n) sum_i f(w; i).
double mean_objective(const LsqProblem& p, const Vector& w);

// w_{t+1} <- w_t - eta grad f(w_t; i_t), i_t iid uniform. Requires the
// strict step-size range eta < 2/beta.
SgdRun sgd_with_replacement(const LsqProblem& p, const Vector& w0, double eta, int steps,
                            std::uint64_t seed);

// Same update along a prefix of a uniform random permutation (single pass).
SgdRun sgd_without_replacement(const LsqProblem& p, const Vector& w0, double eta, int steps,
                               std::uint64_t seed);

struct RegretCheck {
  double regret = 0.0;  // sum_t f(w_t; i_t)
  double bound = 0.0;   // D^2 / (2 eta (2 - eta beta)), pathwise
  bool pass = false;
};

RegretCheck regret_sum(const SgdRun& run, const LsqProblem& p);

// (1/(upto+1)) sum_{t=0..upto} f(w_final; pi_t); upto+1 <= steps.
double prefix_average_loss(const SgdRun& run, const LsqProblem& p, int upto);

// Run export: rows (t, i_t, step_loss, dist_sq).
void export_sgd_run_csv(const SgdRun& run, const LsqProblem& p, std::ostream& out);

}  // namespace conreg
