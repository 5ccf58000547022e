#include "conreg/sgd.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "conreg/errors.hpp"
#include "conreg/ordering.hpp"
#include "conreg/tasks.hpp"

namespace conreg {

namespace {

void check_eta(double eta, double beta) {
  if (!(eta > 0.0) || !(eta < 2.0 / beta)) {
    std::ostringstream msg;
    msg << "step size outside guaranteed range: eta = " << eta << ", requires 0 < eta < 2/beta = "
        << 2.0 / beta;
    throw std::invalid_argument(msg.str());
  }
}

SgdRun run_sequence(const LsqProblem& p, const Vector& w0, double eta,
                    std::vector<int> sequence) {
  SgdRun run;
  run.eta = eta;
  run.D = (w0 - p.w_star).norm();
  run.sample_sequence = std::move(sequence);
  const int steps = static_cast<int>(run.sample_sequence.size());
  run.iterates.reserve(static_cast<std::size_t>(steps) + 1);
  run.per_step_loss.reserve(static_cast<std::size_t>(steps));
  run.regret_partial_sums.reserve(static_cast<std::size_t>(steps));
  run.iterates.push_back(w0);

  double regret_acc = 0.0;
  for (int t = 0; t < steps; ++t) {
    const int i = run.sample_sequence[static_cast<std::size_t>(t)];
    const Vector& w = run.iterates.back();
    const auto& comp = p.components[static_cast<std::size_t>(i)];
    const Vector residual = comp.a * w - comp.b;
    run.per_step_loss.push_back(0.5 * residual.squaredNorm());
    regret_acc += run.per_step_loss.back();
    run.regret_partial_sums.push_back(regret_acc);
    run.iterates.push_back(w - eta * (comp.a.transpose() * residual));
  }
  return run;
}

}  // namespace

LsqProblem make_lsq_problem(std::vector<LsqComponent> components, Vector w_star) {
  if (components.empty()) throw std::invalid_argument("make_lsq_problem: no components");
  LsqProblem p;
  p.w_star = std::move(w_star);
  for (auto& c : components) {
    if (c.a.cols() != p.w_star.size())
      throw std::invalid_argument("make_lsq_problem: component dimension mismatch");
    if (c.a.rows() != c.b.size())
      throw std::invalid_argument("make_lsq_problem: component rows/rhs mismatch");
    const double residual = (c.a * p.w_star - c.b).norm();
    if (residual > 1e-8 * (1.0 + c.b.norm())) {
      std::ostringstream msg;
      msg << "make_lsq_problem: component not realizable at w_star, residual " << residual;
      throw not_realizable_error(msg.str(), residual);
    }
    p.beta = std::max(p.beta, spectral_norm(c.a));
  }
  p.components = std::move(components);
  if (p.beta <= 0.0) throw std::invalid_argument("make_lsq_problem: all components zero");
  return p;
}

LsqProblem modified_objective_problem(const TaskCollection& c) {
  std::vector<LsqComponent> components;
  components.reserve(c.tasks.size());
  for (const auto& t : c.tasks) {
    LsqComponent comp;
    comp.a = row_space_projection(t.x);
    comp.b = comp.a * c.w_star;
    components.push_back(std::move(comp));
  }
  return make_lsq_problem(std::move(components), c.w_star);
}

double component_loss(const LsqProblem& p, const Vector& w, int i) {
  const auto& c = p.components[static_cast<std::size_t>(i)];
  return 0.5 * (c.a * w - c.b).squaredNorm();
}

Vector component_gradient(const LsqProblem& p, const Vector& w, int i) {
  const auto& c = p.components[static_cast<std::size_t>(i)];
  return c.a.transpose() * (c.a * w - c.b);
}

double mean_objective(const LsqProblem& p, const Vector& w) {
  double sum = 0.0;
  for (int i = 0; i < p.size(); ++i) sum += component_loss(p, w, i);
  return sum / static_cast<double>(p.size());
}

SgdRun sgd_with_replacement(const LsqProblem& p, const Vector& w0, double eta, int steps,
                            std::uint64_t seed) {
  check_eta(eta, p.beta);
  if (steps < 1) throw std::invalid_argument("sgd_with_replacement: steps >= 1 required");
  const Ordering o = sample_with_replacement(seed, p.size(), steps);
  return run_sequence(p, w0, eta, o.indices);
}

SgdRun sgd_without_replacement(const LsqProblem& p, const Vector& w0, double eta, int steps,
                               std::uint64_t seed) {
  check_eta(eta, p.beta);
  if (steps < 1) throw std::invalid_argument("sgd_without_replacement: steps >= 1 required");
  if (steps > p.size())
    throw std::invalid_argument("sgd_without_replacement: steps exceed component count");
  const Ordering o = sample_without_replacement(seed, p.size(), steps);
  return run_sequence(p, w0, eta, o.indices);
}

RegretCheck regret_sum(const SgdRun& run, const LsqProblem& p) {
  RegretCheck rc;
  for (double loss : run.per_step_loss) rc.regret += loss;
  rc.bound = run.D * run.D / (2.0 * run.eta * (2.0 - run.eta * p.beta));
  rc.pass = rc.regret <= rc.bound + 1e-12 * (1.0 + rc.bound);
  return rc;
}

double prefix_average_loss(const SgdRun& run, const LsqProblem& p, int upto) {
  if (upto < 0 || upto >= run.steps())
    throw std::out_of_range("prefix_average_loss: upto outside sample range");
  const Vector& w = run.iterates.back();
  double sum = 0.0;
  for (int t = 0; t <= upto; ++t) {
    sum += component_loss(p, w, run.sample_sequence[static_cast<std::size_t>(t)]);
  }
  return sum / static_cast<double>(upto + 1);
}

void export_sgd_run_csv(const SgdRun& run, const LsqProblem& p, std::ostream& out) {
  out << "t,component,step_loss,dist_sq\n";
  char buf[64];
  for (int t = 0; t < run.steps(); ++t) {
    const double dist_sq = (run.iterates[static_cast<std::size_t>(t)] - p.w_star).squaredNorm();
    out << t << ',' << run.sample_sequence[static_cast<std::size_t>(t)] << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", run.per_step_loss[static_cast<std::size_t>(t)]);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", dist_sq);
    out << buf << '\n';
  }
}

}  // namespace conreg
