#include "conreg/learners.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "conreg/errors.hpp"

namespace conreg {

std::string to_string(LearnerTag tag) {
  switch (tag) {
    case LearnerTag::gd_inner: return "gd_inner";
    case LearnerTag::kaczmarz: return "kaczmarz";
    case LearnerTag::modified_sgd: return "modified_sgd";
    case LearnerTag::pocs: return "pocs";
    case LearnerTag::regularized_classification: return "regularized_classification";
  }
  return "unknown";
}

LearnerTag learner_tag_from_string(const std::string& s) {
  if (s == "gd_inner") return LearnerTag::gd_inner;
  if (s == "kaczmarz") return LearnerTag::kaczmarz;
  if (s == "modified_sgd") return LearnerTag::modified_sgd;
  if (s == "pocs") return LearnerTag::pocs;
  if (s == "regularized_classification") return LearnerTag::regularized_classification;
  throw std::invalid_argument("unknown learner tag: " + s);
}

namespace {

void check_dims(const Vector& w, const Task& task, const char* op) {
  if (w.size() != task.x.cols()) {
    std::ostringstream msg;
    msg << op << ": dimension mismatch, w has " << w.size() << " entries, task has "
        << task.x.cols() << " columns";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

std::vector<TaskFactors> factorize(const TaskCollection& c) {
  std::vector<TaskFactors> factors;
  factors.reserve(c.tasks.size());
  for (const auto& t : c.tasks) {
    const SvdFactors f = svd(t.x);
    TaskFactors tf;
    tf.row_proj = detail::row_projection_from(f);
    tf.pinv_y = detail::pinv_from(f) * t.y;
    tf.spec_norm = f.sigma.size() > 0 ? f.sigma(0) : 0.0;
    tf.y_norm = t.y.norm();
    factors.push_back(std::move(tf));
  }
  return factors;
}

Vector kaczmarz_step(const Vector& w, const Task& task) {
  check_dims(w, task, "kaczmarz_step");
  return w - pinv(task.x) * (task.x * w - task.y);
}

Vector gd_inner_step_to_convergence(const Vector& w, const Task& task,
                                    const InnerSolveConfig& cfg) {
  check_dims(w, task, "gd_inner_step_to_convergence");
  const double norm2 = spectral_norm(task.x);
  if (norm2 <= 0.0) return w;  // zero data matrix: loss already constant
  const double step = 1.0 / (norm2 * norm2);
  const double target = cfg.residual_tol * (1.0 + task.y.norm());

  Vector wt = w;
  Vector residual = task.x * wt - task.y;
  for (long it = 0; it < cfg.max_inner_iters; ++it) {
    if (residual.norm() <= target) return wt;
    wt -= step * (task.x.transpose() * residual);
    residual = task.x * wt - task.y;
  }
  if (residual.norm() <= target) return wt;
  std::ostringstream msg;
  msg << "gd_inner_step_to_convergence: residual " << residual.norm()
      << " above tolerance after " << cfg.max_inner_iters << " iterations";
  throw convergence_error(msg.str(), residual.norm(), cfg.max_inner_iters);
}

Vector modified_sgd_step(const Vector& w, const Task& task, const Vector& w_star) {
  check_dims(w, task, "modified_sgd_step");
  if (w_star.size() != w.size())
    throw std::invalid_argument("modified_sgd_step: w_star dimension mismatch");
  const Matrix proj = row_space_projection(task.x);
  // gradient of f_m at w: X^+X (w - w_star)
  return w - proj * (w - w_star);
}

Vector rank1_normalized_step(const Vector& w, const Vector& x_row, double y) {
  if (x_row.size() != w.size())
    throw std::invalid_argument("rank1_normalized_step: dimension mismatch");
  const double norm_sq = x_row.squaredNorm();
  if (norm_sq <= 0.0) throw std::invalid_argument("rank1_normalized_step: degenerate rank-1 task");
  return w - ((x_row.dot(w) - y) / norm_sq) * x_row;
}

Trajectory run(const TaskCollection& c, const Ordering& ordering, LearnerTag tag,
               const InnerSolveConfig& cfg, const Vector* w0) {
  if (ordering.T != c.num_tasks())
    throw std::invalid_argument("run: ordering.T does not match collection size");
  if (tag != LearnerTag::gd_inner && tag != LearnerTag::kaczmarz && tag != LearnerTag::modified_sgd)
    throw std::invalid_argument("run: learner tag not applicable to task collections");

  const std::vector<TaskFactors> factors =
      tag == LearnerTag::gd_inner ? std::vector<TaskFactors>{} : factorize(c);

  Trajectory traj;
  traj.ordering = ordering;
  traj.learner_tag = tag;
  traj.iterates.reserve(static_cast<std::size_t>(ordering.k) + 1);
  traj.per_step_current_residual.reserve(static_cast<std::size_t>(ordering.k));
  traj.iterates.push_back(w0 ? *w0 : Vector::Zero(c.dim));

  for (int t = 0; t < ordering.k; ++t) {
    const int m = ordering.indices[static_cast<std::size_t>(t)];
    const Task& task = c.tasks[static_cast<std::size_t>(m)];
    const Vector& w = traj.iterates.back();
    Vector next;
    try {
      switch (tag) {
        case LearnerTag::gd_inner:
          next = gd_inner_step_to_convergence(w, task, cfg);
          break;
        case LearnerTag::kaczmarz:
          next = w - factors[static_cast<std::size_t>(m)].row_proj * w +
                 factors[static_cast<std::size_t>(m)].pinv_y;
          break;
        case LearnerTag::modified_sgd:
          // gradient form X^+X w - X^+ y, identical update via cached factors
          next = w - (factors[static_cast<std::size_t>(m)].row_proj * w -
                      factors[static_cast<std::size_t>(m)].pinv_y);
          break;
        default:
          throw std::logic_error("unreachable");
      }
    } catch (const convergence_error& e) {
      std::ostringstream msg;
      msg << "run: step " << t + 1 << " (task " << m << "): " << e.what();
      throw convergence_error(msg.str(), e.last_residual(), e.iterations());
    }
    traj.per_step_current_residual.push_back((task.x * next - task.y).norm());
    traj.iterates.push_back(std::move(next));
  }
  return traj;
}

void export_trajectory_csv(const TaskCollection& c, const Trajectory& traj, std::ostream& out) {
  out << "t,task,dist_sq,current_residual\n";
  char buf[64];
  for (int t = 1; t <= traj.steps(); ++t) {
    const double dist_sq =
        (traj.iterates[static_cast<std::size_t>(t)] - c.w_star).squaredNorm();
    out << t << ',' << traj.ordering.indices[static_cast<std::size_t>(t - 1)] << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", dist_sq);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g",
                  traj.per_step_current_residual[static_cast<std::size_t>(t - 1)]);
    out << buf << '\n';
  }
}

}  // namespace conreg
