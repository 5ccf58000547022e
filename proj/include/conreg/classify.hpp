#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "conreg/convex.hpp"

namespace conreg {

// A binary classification dataset: examples (x, y) with y in {-1, +1}.
struct ClassificationTask {
  std::vector<std::pair<Vector, int>> examples;
};

struct RegularizedConfig {
  double lambda = 1e-3;
  double inner_tol = 1e-8;       // gradient-norm stopping criterion
  long max_inner_iters = 100000;
};

// Margin constraint sets C_m = {w : y w.x >= 1 for all (x, y) in S_m}; a
// single example yields a halfspace, multiple examples a polyhedron.
std::vector<ConvexSet> max_margin_sets(const std::vector<ClassificationTask>& tasks);

// Sequential regularized classification: each step minimizes
//   sum_(x,y) exp(-y w.x) + (lambda/2) |w - w_prev|^2
// by gradient descent with backtracking, to gradient norm <= inner_tol.
Trajectory regularized_classification_run(const std::vector<ClassificationTask>& tasks,
                                          const RegularizedConfig& cfg, const Ordering& ordering,
                                          int k);

// One example per line: "label x_1 x_2 ... x_d", label in {+1, -1}; blank
// lines separate tasks.
std::vector<ClassificationTask> read_classification_tasks(std::istream& in);
std::vector<ClassificationTask> read_classification_tasks_file(const std::string& path);

}  // namespace conreg
