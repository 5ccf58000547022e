#pragma once

#include <utility>
#include <vector>

#include "conreg/learners.hpp"
#include "conreg/tasks.hpp"

namespace conreg {

// Aligned per-k evaluation series for one run.
struct MetricSeries {
  std::vector<long> k_values;
  std::vector<double> loss;
  std::vector<double> forgetting;
  std::vector<double> regret;
  std::vector<double> dist_sq;
};

// Mean half squared residual over all T tasks: (1/2T) sum_m |X_m w - y_m|^2.
double training_loss(const TaskCollection& c, const Vector& w);

// (1/2k) sum_{t=1..k} |X_tau(t) w_k - y_tau(t)|^2 over the realized ordering.
double forgetting(const TaskCollection& c, const Trajectory& traj, int k);

// (1/2k) sum_{t=1..k} |X_tau(t) w_{t-1} - y_tau(t)|^2 (loss of each iterate
// on its upcoming task).
double regret(const TaskCollection& c, const Trajectory& traj, int k);

// Per-run pair (F_tau(k), |X_tau(k) w_{k-1} - y_tau(k)|^2 + |w*|^2 R^2 / k);
// the inequality lhs <= rhs holds in expectation over orderings.
std::pair<double, double> bridge_forgetting_bound(const TaskCollection& c,
                                                  const Trajectory& traj, int k);

struct WorDecomposition {
  double loss = 0.0;             // L(w_k)
  double forgetting_term = 0.0;  // F_tau(k)
  double unseen_term = 0.0;      // |X_tau(k+1) w_k - y_tau(k+1)|^2 (0 at k = T)
};

// Without-replacement identity E[L(w_k)] = (k/T) E[F] + ((T-k)/(2T)) E[unseen].
WorDecomposition wor_loss_decomposition(const TaskCollection& c, const Trajectory& traj, int k);

MetricSeries evaluate_series(const TaskCollection& c, const Trajectory& traj,
                             const std::vector<long>& k_values);

}  // namespace conreg
