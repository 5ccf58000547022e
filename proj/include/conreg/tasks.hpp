#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "conreg/linalg.hpp"

namespace conreg {

// One linear regression task (X_m, y_m), X_m an n_m x d data matrix.
struct Task {
  Matrix x;
  Vector y;
};

// T jointly realizable tasks sharing dimension d, together with the
// minimum-norm joint solution of the stacked system.
struct TaskCollection {
  std::vector<Task> tasks;
  Index dim = 0;
  Vector w_star;
  double realizability_residual = 0.0;

  int num_tasks() const { return static_cast<int>(tasks.size()); }
};

struct TaskStats {
  double radius_R = 0.0;   // max_m |X_m| (spectral)
  double avg_rank = 0.0;   // mean numerical rank
  Index max_rank = 0;
  Index total_rows_N = 0;
  Index dim_d = 0;
  Index num_tasks_T = 0;
  double w_star_norm = 0.0;
};

// Validates dimensions and joint realizability; computes w_star from the
// stacked system. Throws conreg::not_realizable_error on inconsistent input.
TaskCollection build_collection(std::vector<Task> tasks);

// Random realizable instances: each X_m is a product of Gaussian factors with
// the requested numerical rank, y_m = X_m * (sampled ground truth). Ranks and
// row counts are drawn uniformly from the inclusive ranges.
TaskCollection gen_random_realizable(std::uint64_t seed, int T, int d,
                                     std::pair<int, int> rank_range,
                                     std::pair<int, int> row_range,
                                     double scale = 1.0);

// The adversarial two-direction construction: two rank-1 tasks whose row
// directions differ by angle_eps, cloned floor(T/2) times each (odd T gives
// the first direction one extra copy). Near-parallel directions make
// alternating projections slow.
TaskCollection gen_two_task_clone(std::uint64_t seed, int T, int d, double angle_eps);

TaskStats stats(const TaskCollection& c);

Matrix stacked_matrix(const TaskCollection& c);
Vector stacked_rhs(const TaskCollection& c);

// Rescales a collection so that radius R = 1 and |w_star| = 1 (used for the
// normalized bound comparisons). No-op on degenerate zero instances.
TaskCollection normalize_collection(const TaskCollection& c);

// JSON fixture format: {"dim": d, "tasks": [{rows, cols, x_entries, y_entries}]}.
void save_collection(const TaskCollection& c, std::ostream& out);
TaskCollection load_collection(std::istream& in);
void save_collection_file(const TaskCollection& c, const std::string& path);
TaskCollection load_collection_file(const std::string& path);

}  // namespace conreg
