#include "conreg/metrics.hpp"

#include <stdexcept>

namespace conreg {

namespace {

void check_k(const Trajectory& traj, int k, const char* op) {
  if (k < 1 || k > traj.steps()) {
    throw std::out_of_range(std::string(op) + ": k outside trajectory range");
  }
}

// Squared residuals of w on every task, computed fresh from the matrices.
std::vector<double> task_residuals_sq(const TaskCollection& c, const Vector& w) {
  std::vector<double> r(c.tasks.size());
  for (std::size_t m = 0; m < c.tasks.size(); ++m) {
    r[m] = (c.tasks[m].x * w - c.tasks[m].y).squaredNorm();
  }
  return r;
}

}  // namespace

double training_loss(const TaskCollection& c, const Vector& w) {
  if (w.size() != c.dim) throw std::invalid_argument("training_loss: dimension mismatch");
  double sum = 0.0;
  for (const auto& t : c.tasks) sum += (t.x * w - t.y).squaredNorm();
  return sum / (2.0 * static_cast<double>(c.tasks.size()));
}

double forgetting(const TaskCollection& c, const Trajectory& traj, int k) {
  check_k(traj, k, "forgetting");
  const auto residuals = task_residuals_sq(c, traj.iterates[static_cast<std::size_t>(k)]);
  double sum = 0.0;
  for (int t = 1; t <= k; ++t) {
    sum += residuals[static_cast<std::size_t>(traj.ordering.indices[static_cast<std::size_t>(t - 1)])];
  }
  return sum / (2.0 * static_cast<double>(k));
}

double regret(const TaskCollection& c, const Trajectory& traj, int k) {
  check_k(traj, k, "regret");
  double sum = 0.0;
  for (int t = 1; t <= k; ++t) {
    const auto& task = c.tasks[static_cast<std::size_t>(traj.ordering.indices[static_cast<std::size_t>(t - 1)])];
    sum += (task.x * traj.iterates[static_cast<std::size_t>(t - 1)] - task.y).squaredNorm();
  }
  return sum / (2.0 * static_cast<double>(k));
}

std::pair<double, double> bridge_forgetting_bound(const TaskCollection& c,
                                                  const Trajectory& traj, int k) {
  check_k(traj, k, "bridge_forgetting_bound");
  const double lhs = forgetting(c, traj, k);
  const auto& last_task =
      c.tasks[static_cast<std::size_t>(traj.ordering.indices[static_cast<std::size_t>(k - 1)])];
  const double last_residual_sq =
      (last_task.x * traj.iterates[static_cast<std::size_t>(k - 1)] - last_task.y).squaredNorm();
  const TaskStats s = stats(c);
  const double rhs = last_residual_sq +
                     s.w_star_norm * s.w_star_norm * s.radius_R * s.radius_R /
                         static_cast<double>(k);
  return {lhs, rhs};
}

WorDecomposition wor_loss_decomposition(const TaskCollection& c, const Trajectory& traj, int k) {
  if (traj.ordering.policy != OrderingPolicy::without_replacement) {
    throw std::invalid_argument("wor_loss_decomposition: requires a without-replacement trajectory");
  }
  check_k(traj, k, "wor_loss_decomposition");
  const int T = c.num_tasks();
  if (k > T) throw std::out_of_range("wor_loss_decomposition: k > T");

  WorDecomposition d;
  d.loss = training_loss(c, traj.iterates[static_cast<std::size_t>(k)]);
  d.forgetting_term = forgetting(c, traj, k);
  if (k < T) {
    if (traj.steps() < k + 1 || traj.ordering.k < k + 1)
      throw std::out_of_range("wor_loss_decomposition: trajectory too short for unseen term at k");
    const auto& next_task =
        c.tasks[static_cast<std::size_t>(traj.ordering.indices[static_cast<std::size_t>(k)])];
    d.unseen_term =
        (next_task.x * traj.iterates[static_cast<std::size_t>(k)] - next_task.y).squaredNorm();
  }
  return d;
}

MetricSeries evaluate_series(const TaskCollection& c, const Trajectory& traj,
                             const std::vector<long>& k_values) {
  MetricSeries s;
  for (long k : k_values) {
    const int ki = static_cast<int>(k);
    s.k_values.push_back(k);
    s.loss.push_back(training_loss(c, traj.iterates[static_cast<std::size_t>(ki)]));
    s.forgetting.push_back(forgetting(c, traj, ki));
    s.regret.push_back(regret(c, traj, ki));
    s.dist_sq.push_back((traj.iterates[static_cast<std::size_t>(ki)] - c.w_star).squaredNorm());
  }
  return s;
}

}  // namespace conreg
