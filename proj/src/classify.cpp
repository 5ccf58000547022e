#include "conreg/classify.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "conreg/errors.hpp"

namespace conreg {

std::vector<ConvexSet> max_margin_sets(const std::vector<ClassificationTask>& tasks) {
  if (tasks.empty()) throw std::invalid_argument("max_margin_sets: no tasks");
  std::vector<ConvexSet> sets;
  sets.reserve(tasks.size());
  for (const auto& task : tasks) {
    if (task.examples.empty()) throw std::invalid_argument("max_margin_sets: empty task");
    std::vector<Halfspace> hs;
    hs.reserve(task.examples.size());
    for (const auto& [x, y] : task.examples) {
      if (y != 1 && y != -1) throw std::invalid_argument("max_margin_sets: label must be +1/-1");
      Halfspace h;
      h.a = static_cast<double>(y) * x;  // y w.x >= 1  <=>  (y x).w >= 1
      h.b = 1.0;
      hs.push_back(std::move(h));
    }
    if (hs.size() == 1) {
      sets.push_back(ConvexSet::halfspace(std::move(hs.front().a), hs.front().b));
    } else {
      sets.push_back(ConvexSet::polyhedron(std::move(hs)));
    }
  }
  return sets;
}

namespace {

double exp_objective(const ClassificationTask& task, const Vector& w, const Vector& anchor,
                     double lambda) {
  double val = 0.0;
  for (const auto& [x, y] : task.examples) val += std::exp(-static_cast<double>(y) * w.dot(x));
  return val + 0.5 * lambda * (w - anchor).squaredNorm();
}

Vector exp_gradient(const ClassificationTask& task, const Vector& w, const Vector& anchor,
                    double lambda) {
  Vector g = lambda * (w - anchor);
  for (const auto& [x, y] : task.examples) {
    g -= static_cast<double>(y) * std::exp(-static_cast<double>(y) * w.dot(x)) * x;
  }
  return g;
}

// Backtracking gradient descent on the strongly convex inner objective.
// Stops at the gradient tolerance, or when the objective decrease falls
// below double precision (the numerical minimizer).
Vector solve_inner(const ClassificationTask& task, const Vector& anchor,
                   const RegularizedConfig& cfg) {
  Vector w = anchor;
  double obj = exp_objective(task, w, anchor, cfg.lambda);
  for (long it = 0; it < cfg.max_inner_iters; ++it) {
    const Vector grad = exp_gradient(task, w, anchor, cfg.lambda);
    const double grad_norm = grad.norm();
    if (grad_norm <= cfg.inner_tol) return w;
    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      const Vector cand = w - step * grad;
      const double cand_obj = exp_objective(task, cand, anchor, cfg.lambda);
      // strict decrease required: at machine precision the sufficient-decrease
      // test passes vacuously with cand_obj == obj
      if (cand_obj < obj && cand_obj <= obj - 0.5 * step * grad_norm * grad_norm) {
        w = cand;
        obj = cand_obj;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return w;  // decrease below machine precision
  }
  const double final_grad = exp_gradient(task, w, anchor, cfg.lambda).norm();
  if (final_grad <= cfg.inner_tol) return w;
  std::ostringstream msg;
  msg << "regularized classification: inner solve gradient " << final_grad
      << " above tolerance after " << cfg.max_inner_iters << " iterations";
  throw convergence_error(msg.str(), final_grad, cfg.max_inner_iters);
}

}  // namespace

Trajectory regularized_classification_run(const std::vector<ClassificationTask>& tasks,
                                          const RegularizedConfig& cfg, const Ordering& ordering,
                                          int k) {
  if (!(cfg.lambda > 0.0))
    throw std::invalid_argument("regularized_classification_run: lambda > 0 required");
  if (ordering.T != static_cast<int>(tasks.size()))
    throw std::invalid_argument("regularized_classification_run: ordering.T mismatch");
  if (k < 1 || k > ordering.k)
    throw std::out_of_range("regularized_classification_run: k outside ordering range");

  const Index d = tasks.front().examples.front().first.size();
  Trajectory traj;
  traj.ordering = ordering;
  traj.learner_tag = LearnerTag::regularized_classification;
  traj.iterates.push_back(Vector::Zero(d));
  for (int t = 0; t < k; ++t) {
    const auto& task =
        tasks[static_cast<std::size_t>(ordering.indices[static_cast<std::size_t>(t)])];
    Vector next = solve_inner(task, traj.iterates.back(), cfg);
    traj.per_step_current_residual.push_back(
        exp_gradient(task, next, traj.iterates.back(), cfg.lambda).norm());
    traj.iterates.push_back(std::move(next));
  }
  return traj;
}

std::vector<ClassificationTask> read_classification_tasks(std::istream& in) {
  std::vector<ClassificationTask> tasks;
  ClassificationTask current;
  std::string line;
  Index d = -1;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      if (!current.examples.empty()) {
        tasks.push_back(std::move(current));
        current = {};
      }
      continue;
    }
    std::istringstream ls(line);
    double label = 0.0;
    if (!(ls >> label) || (label != 1.0 && label != -1.0))
      throw config_error("classification file: label must be +1 or -1: " + line);
    std::vector<double> coords;
    double v = 0.0;
    while (ls >> v) coords.push_back(v);
    if (coords.empty()) throw config_error("classification file: example without coordinates");
    if (d < 0) d = static_cast<Index>(coords.size());
    if (static_cast<Index>(coords.size()) != d)
      throw config_error("classification file: inconsistent dimension");
    current.examples.emplace_back(Eigen::Map<const Vector>(coords.data(), d),
                                  static_cast<int>(label));
  }
  if (!current.examples.empty()) tasks.push_back(std::move(current));
  if (tasks.empty()) throw config_error("classification file: no examples");
  return tasks;
}

std::vector<ClassificationTask> read_classification_tasks_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open for reading: " + path);
  return read_classification_tasks(in);
}

}  // namespace conreg
