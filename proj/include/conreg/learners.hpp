#pragma once

#include <string>
#include <vector>

#include "conreg/linalg.hpp"
#include "conreg/ordering.hpp"
#include "conreg/tasks.hpp"

namespace conreg {

enum class LearnerTag { gd_inner, kaczmarz, modified_sgd, pocs, regularized_classification };

std::string to_string(LearnerTag tag);
LearnerTag learner_tag_from_string(const std::string& s);

enum class StepRule { inverse_sq_spectral_norm };

// Inner-loop gradient descent settings for the learn-to-convergence scheme.
struct InnerSolveConfig {
  StepRule step_rule = StepRule::inverse_sq_spectral_norm;
  double residual_tol = 1e-10;     // relative: stop at |Xw - y| <= tol * (1 + |y|)
  long max_inner_iters = 1000000;
};

// Iterate sequence w_0..w_k of a sequential learner plus per-step residuals
// on the task just processed.
struct Trajectory {
  std::vector<Vector> iterates;  // length k + 1
  Ordering ordering;
  LearnerTag learner_tag = LearnerTag::kaczmarz;
  std::vector<double> per_step_current_residual;  // length k

  int steps() const { return static_cast<int>(iterates.size()) - 1; }
};

// Per-task cached factors so a k-step run does one SVD per task, not per step.
struct TaskFactors {
  Matrix row_proj;   // X^+ X (d x d)
  Vector pinv_y;     // X^+ y
  double spec_norm = 0.0;
  double y_norm = 0.0;
};

std::vector<TaskFactors> factorize(const TaskCollection& c);

// One block Kaczmarz update: w - X^+ (X w - y). Solves the task exactly.
Vector kaczmarz_step(const Vector& w, const Task& task);

// Plain GD on 1/2 |Xw - y|^2 with step 1/|X|^2 from w until the residual
// tolerance is met. Equals the Kaczmarz update up to the stopping tolerance.
Vector gd_inner_step_to_convergence(const Vector& w, const Task& task,
                                    const InnerSolveConfig& cfg = {});

// Unit-step SGD on f_m(w) = 1/2 |X^+X (w - w_star)|^2.
Vector modified_sgd_step(const Vector& w, const Task& task, const Vector& w_star);

// Rank-1 normalized update w - (x.w - y)/|x|^2 * x.
Vector rank1_normalized_step(const Vector& w, const Vector& x_row, double y);

// Runs the chosen learner along the ordering. w0 defaults to the zero vector.
Trajectory run(const TaskCollection& c, const Ordering& ordering, LearnerTag tag,
               const InnerSolveConfig& cfg = {}, const Vector* w0 = nullptr);

// Trajectory CSV export: rows (t, task, dist_sq, current_residual).
void export_trajectory_csv(const TaskCollection& c, const Trajectory& traj, std::ostream& out);

}  // namespace conreg
