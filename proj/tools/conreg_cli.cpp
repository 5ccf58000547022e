// Command-line harness: generates instances, runs seeded experiments, and
// compares empirical means against the closed-form bounds.
//
// Exit codes: 0 all checks pass, 1 bound-comparison failure, 2 configuration
// error, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "conreg/bounds.hpp"
#include "conreg/classify.hpp"
#include "conreg/convex.hpp"
#include "conreg/errors.hpp"
#include "conreg/harness.hpp"
#include "conreg/learners.hpp"
#include "conreg/metrics.hpp"
#include "conreg/parallel.hpp"
#include "conreg/qmap.hpp"
#include "conreg/rng.hpp"
#include "conreg/sgd.hpp"
#include "conreg/tasks.hpp"

namespace {

using namespace conreg;

constexpr int kExitPass = 0;
constexpr int kExitBoundFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::pair<int, int> parse_range(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    const int v = std::stoi(s);
    return {v, v};
  }
  return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
}

std::vector<long> parse_long_list(const std::string& s) {
  std::vector<long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stol(item));
  }
  if (out.empty()) throw config_error("empty list: " + s);
  return out;
}

std::ostream& open_or_stdout(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw config_error("cannot open for writing: " + path);
  return file;
}

// -------------------------------------------------------------------------
// gen

int cmd_gen(const std::string& kind, std::uint64_t seed, int T, int d, const std::string& rank,
            const std::string& rows, double scale, double angle, const std::string& out_path) {
  GeneratorSpec spec;
  spec.seed = seed;
  spec.T = T;
  spec.d = d;
  spec.scale = scale;
  spec.angle_eps = angle;
  spec.rank_range = parse_range(rank);
  spec.row_range = parse_range(rows);
  if (kind == "random") {
    spec.kind = GeneratorSpec::Kind::random;
  } else if (kind == "two_task_clone") {
    spec.kind = GeneratorSpec::Kind::two_task_clone;
  } else {
    throw config_error("gen: kind must be random or two_task_clone");
  }
  const TaskCollection c = instantiate(spec);
  if (out_path.empty()) {
    save_collection(c, std::cout);
  } else {
    save_collection_file(c, out_path);
  }
  const TaskStats s = stats(c);
  std::cerr << "generated T=" << c.num_tasks() << " d=" << c.dim << " R=" << s.radius_R
            << " r_bar=" << s.avg_rank << " |w*|=" << s.w_star_norm << "\n";
  return kExitPass;
}

// -------------------------------------------------------------------------
// run / sweep

int cmd_run(ExperimentConfig cfg) {
  const ExperimentResult result = run_experiment(cfg);
  for (const auto& row : result.aggregates) {
    std::cout << "k=" << row.k << " mean_loss=" << fmt(row.mean_loss)
              << " mean_forgetting=" << fmt(row.mean_forgetting);
    if (row.bound_loss) std::cout << " bound_loss=" << fmt(*row.bound_loss);
    if (row.bound_forgetting) std::cout << " bound_forgetting=" << fmt(*row.bound_forgetting);
    if (!row.theorem_tag.empty())
      std::cout << " [" << row.theorem_tag << ": " << (row.pass ? "pass" : "FAIL") << "]";
    std::cout << "\n";
  }
  return result.all_bounds_pass ? kExitPass : kExitBoundFailure;
}

// -------------------------------------------------------------------------
// bounds

int cmd_bounds(const std::string& collection_path, const std::string& k_list,
               const std::string& theorems, const std::string& out_path) {
  const TaskCollection c = load_collection_file(collection_path);
  const TaskStats s = stats(c);
  std::ofstream file;
  std::ostream& out = open_or_stdout(file, out_path);
  out << "theorem_tag,k,bound_loss,bound_forgetting,normalized_loss,normalized_forgetting\n";
  for (long k : parse_long_list(k_list)) {
    std::stringstream ss(theorems);
    std::string tag_name;
    while (std::getline(ss, tag_name, ',')) {
      const TheoremTag tag = theorem_tag_from_string(tag_name);
      BoundReport rep;
      switch (tag) {
        case TheoremTag::param_dep_wr: rep = bound_param_dep_wr(s, k); break;
        case TheoremTag::universal_wr: rep = bound_universal_wr(s.w_star_norm, s.radius_R, k); break;
        case TheoremTag::wor: rep = bound_wor(s, k); break;
        default:
          throw config_error("bounds: " + tag_name + " needs the sgd/pocs/classify subcommands");
      }
      out << tag_name << ',' << k << ',' << fmt(rep.loss_bound.value_or(0.0)) << ','
          << fmt(rep.forgetting_bound.value_or(0.0)) << ','
          << fmt(rep.normalized_loss_bound.value_or(0.0)) << ','
          << fmt(rep.normalized_forgetting_bound.value_or(0.0)) << '\n';
    }
  }
  return kExitPass;
}

// -------------------------------------------------------------------------
// qmap

int cmd_qmap(const QmapCheckConfig& cfg, const std::string& out_path) {
  const auto rows = run_qmap_checks(cfg);
  std::ofstream file;
  std::ostream& out = open_or_stdout(file, out_path);
  emit_qmap_report(rows, out);
  bool all_pass = true;
  for (const auto& r : rows) all_pass = all_pass && r.pass;
  std::cerr << (all_pass ? "qmap: all checks pass" : "qmap: FAILURES present") << " ("
            << rows.size() << " checks)\n";
  return all_pass ? kExitPass : kExitBoundFailure;
}

// -------------------------------------------------------------------------
// pocs

int cmd_pocs(std::uint64_t seed, int T, int d, const std::string& k_list, int num_seeds,
             const std::string& ordering, const std::string& out_path) {
  const PocsFamily fam = make_pocs_family(seed, T, d);
  const std::vector<long> ks = parse_long_list(k_list);
  const int k_max = static_cast<int>(ks.back());
  const OrderingPolicy policy = ordering_policy_from_string(ordering);
  if (policy == OrderingPolicy::without_replacement && k_max > T)
    throw config_error("pocs: without-replacement needs k <= number of sets");

  std::vector<std::vector<double>> residuals(ks.size(),
                                             std::vector<double>(static_cast<std::size_t>(num_seeds)));
  parallel_for(static_cast<std::size_t>(num_seeds), [&](std::size_t r) {
    const std::uint64_t s = seed + 1 + r;
    const Ordering o = policy == OrderingPolicy::with_replacement
                           ? sample_with_replacement(s, T, k_max)
                           : sample_without_replacement(s, T, k_max);
    const Trajectory traj = pocs_run(fam.sets, fam.w0, o);
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      residuals[ki][r] =
          pocs_residual(fam.sets, traj.iterates[static_cast<std::size_t>(ks[ki])]);
    }
  });

  std::ofstream file;
  std::ostream& out = open_or_stdout(file, out_path);
  out << "k,n,mean_residual,se_residual,bound,theorem_tag,pass\n";
  bool all_pass = true;
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    const MeanSe ms = mean_se(residuals[ki]);
    const double bound = bound_pocs(ks[ki], fam.d0_sq);
    const bool pass = ms.mean + 3.0 * ms.se <= bound;
    all_pass = all_pass && pass;
    out << ks[ki] << ',' << ms.n << ',' << fmt(ms.mean) << ',' << fmt(ms.se) << ',' << fmt(bound)
        << ",pocs," << (pass ? 1 : 0) << '\n';
  }
  return all_pass ? kExitPass : kExitBoundFailure;
}

// -------------------------------------------------------------------------
// classify

int cmd_classify(std::uint64_t seed, int T, int d, int max_examples,
                 const std::string& tasks_file, const std::string& k_list, int num_seeds,
                 const std::string& out_path) {
  const std::vector<ClassificationTask> tasks =
      tasks_file.empty() ? make_separable_tasks(seed, T, d, max_examples)
                         : read_classification_tasks_file(tasks_file);
  const std::vector<ConvexSet> sets = max_margin_sets(tasks);

  double radius = 0.0;
  for (const auto& task : tasks)
    for (const auto& [x, y] : task.examples) radius = std::max(radius, x.norm());

  const Vector w0 = Vector::Zero(sets.front().dim());
  const IntersectionResult inter = project_intersection(sets, w0);
  if (!inter.feasible)
    throw convergence_error("classify: tasks are not jointly separable within tolerance",
                            inter.worst_violation, inter.sweeps);
  const double w_star_norm = inter.point.norm();

  const std::vector<long> ks = parse_long_list(k_list);
  const int k_max = static_cast<int>(ks.back());
  const int actual_T = static_cast<int>(sets.size());

  std::vector<std::vector<double>> forgettings(ks.size(),
                                               std::vector<double>(static_cast<std::size_t>(num_seeds)));
  parallel_for(static_cast<std::size_t>(num_seeds), [&](std::size_t r) {
    const Ordering o = sample_with_replacement(seed + 1 + r, actual_T, k_max);
    const Trajectory traj = pocs_run(sets, w0, o);
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      forgettings[ki][r] = pocs_forgetting(sets, traj, static_cast<int>(ks[ki]));
    }
  });

  std::ofstream file;
  std::ostream& out = open_or_stdout(file, out_path);
  out << "k,n,mean_forgetting,se_forgetting,bound,theorem_tag,pass\n";
  bool all_pass = true;
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    const MeanSe ms = mean_se(forgettings[ki]);
    const double bound = bound_classification(ks[ki], w_star_norm, radius);
    const bool pass = ms.mean + 3.0 * ms.se <= bound;
    all_pass = all_pass && pass;
    out << ks[ki] << ',' << ms.n << ',' << fmt(ms.mean) << ',' << fmt(ms.se) << ',' << fmt(bound)
        << ",classification," << (pass ? 1 : 0) << '\n';
  }
  return all_pass ? kExitPass : kExitBoundFailure;
}

// -------------------------------------------------------------------------
// sgd

int cmd_sgd(std::uint64_t seed, int n, int d, int rank, const std::string& t_list,
            double eta_factor, bool wor, int num_seeds, const std::string& out_path) {
  const LsqProblem problem = make_unit_lsq_problem(seed, n, d, rank);
  const double eta = eta_factor / problem.beta;
  const std::vector<long> ts = parse_long_list(t_list);
  const Vector w0 = Vector::Zero(d);

  std::ofstream file;
  std::ostream& out = open_or_stdout(file, out_path);
  out << "T,n,mean_value,se_value,bound,theorem_tag,pass\n";
  bool all_pass = true;
  for (long T : ts) {
    if (wor && T > n - 1) throw config_error("sgd --wor requires T <= n-1");
    std::vector<double> values(static_cast<std::size_t>(num_seeds));
    parallel_for(static_cast<std::size_t>(num_seeds), [&](std::size_t r) {
      const std::uint64_t s = seed + 1 + r;
      if (wor) {
        const SgdRun run = sgd_without_replacement(problem, w0, eta, static_cast<int>(T), s);
        values[r] = prefix_average_loss(run, problem, static_cast<int>(T) - 1);
      } else {
        const SgdRun run = sgd_with_replacement(problem, w0, eta, static_cast<int>(T), s);
        values[r] = mean_objective(problem, run.iterates.back());
      }
    });
    const MeanSe ms = mean_se(values);
    const double bound = wor ? bound_sgd_wor(eta, problem.beta, 1.0, T)
                             : bound_sgd_last(eta, problem.beta, 1.0, T);
    const bool pass = ms.mean + 3.0 * ms.se <= bound;
    all_pass = all_pass && pass;
    out << T << ',' << ms.n << ',' << fmt(ms.mean) << ',' << fmt(ms.se) << ',' << fmt(bound)
        << ',' << (wor ? "sgd_wor" : "sgd_last") << ',' << (pass ? 1 : 0) << '\n';
  }
  return all_pass ? kExitPass : kExitBoundFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continual regression / Kaczmarz / POCS bound-verification harness"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "write a fixture collection");
  std::string gen_kind = "random", gen_rank = "1", gen_rows = "1", gen_out;
  std::uint64_t gen_seed = 0;
  int gen_T = 2, gen_d = 2;
  double gen_scale = 1.0, gen_angle = 0.1;
  gen->add_option("--kind", gen_kind, "random | two_task_clone");
  gen->add_option("--seed", gen_seed);
  gen->add_option("--tasks,-T", gen_T);
  gen->add_option("--dim,-d", gen_d);
  gen->add_option("--rank", gen_rank, "rank or lo:hi");
  gen->add_option("--rows", gen_rows, "rows or lo:hi");
  gen->add_option("--scale", gen_scale);
  gen->add_option("--angle", gen_angle);
  gen->add_option("--out", gen_out);

  // run
  auto* run_cmd = app.add_subcommand("run", "one experiment from a config file");
  std::string run_config, run_out, run_k, run_ordering, run_format;
  std::uint64_t run_seed = 0;
  int run_seeds = 0;
  bool run_normalize = false;
  run_cmd->add_option("--config", run_config)->required();
  run_cmd->add_option("--out", run_out);
  run_cmd->add_option("--seed", run_seed);
  run_cmd->add_option("--seeds", run_seeds);
  run_cmd->add_option("--k", run_k, "comma-separated k grid");
  run_cmd->add_option("--ordering", run_ordering, "wr | wor | cyclic");
  run_cmd->add_option("--format", run_format, "csv | json");
  run_cmd->add_flag("--normalize", run_normalize);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "k-grid x ordering-policy grid");
  std::string sweep_config, sweep_orderings = "wr,wor";
  sweep->add_option("--config", sweep_config)->required();
  sweep->add_option("--orderings", sweep_orderings, "comma-separated policies");

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "print bound tables for a collection");
  std::string bounds_collection, bounds_k = "4,16,64",
              bounds_theorems = "param_dep_wr,universal_wr", bounds_out;
  bounds_cmd->add_option("--collection", bounds_collection)->required();
  bounds_cmd->add_option("--k", bounds_k);
  bounds_cmd->add_option("--theorems", bounds_theorems);
  bounds_cmd->add_option("--out", bounds_out);

  // qmap
  auto* qmap_cmd = app.add_subcommand("qmap", "run the Q-map check suite");
  QmapCheckConfig qcfg;
  std::string qmap_n = "1,3,10,30", qmap_rank = "1:3", qmap_rows = "1:4", qmap_out;
  qmap_cmd->add_option("--seed", qcfg.seed);
  qmap_cmd->add_option("--collections", qcfg.collections);
  qmap_cmd->add_option("--tasks,-T", qcfg.T);
  qmap_cmd->add_option("--dim,-d", qcfg.d);
  qmap_cmd->add_option("--rank", qmap_rank);
  qmap_cmd->add_option("--rows", qmap_rows);
  qmap_cmd->add_option("--n", qmap_n, "polynomial exponents");
  qmap_cmd->add_flag("--second-moment", qcfg.include_second_moment);
  qmap_cmd->add_option("--out", qmap_out);

  // pocs
  auto* pocs_cmd = app.add_subcommand("pocs", "POCS residual vs universal rate");
  std::uint64_t pocs_seed = 0;
  int pocs_T = 64, pocs_d = 6, pocs_seeds = 2000;
  std::string pocs_k = "4,16,64", pocs_ordering = "wr", pocs_out;
  pocs_cmd->add_option("--seed", pocs_seed);
  pocs_cmd->add_option("--sets,-T", pocs_T);
  pocs_cmd->add_option("--dim,-d", pocs_d);
  pocs_cmd->add_option("--k", pocs_k);
  pocs_cmd->add_option("--seeds", pocs_seeds);
  pocs_cmd->add_option("--ordering", pocs_ordering);
  pocs_cmd->add_option("--out", pocs_out);

  // classify
  auto* cls_cmd = app.add_subcommand("classify", "max-margin projection forgetting vs bound");
  std::uint64_t cls_seed = 0;
  int cls_T = 10, cls_d = 8, cls_examples = 3, cls_seeds = 2000;
  std::string cls_k = "4,16,64", cls_file, cls_out;
  cls_cmd->add_option("--seed", cls_seed);
  cls_cmd->add_option("--tasks,-T", cls_T);
  cls_cmd->add_option("--dim,-d", cls_d);
  cls_cmd->add_option("--examples", cls_examples, "max examples per task");
  cls_cmd->add_option("--tasks-file", cls_file, "load tasks from delimited text");
  cls_cmd->add_option("--k", cls_k);
  cls_cmd->add_option("--seeds", cls_seeds);
  cls_cmd->add_option("--out", cls_out);

  // sgd
  auto* sgd_cmd = app.add_subcommand("sgd", "last-iterate SGD bounds");
  std::uint64_t sgd_seed = 0;
  int sgd_n = 10, sgd_d = 8, sgd_rank = 1, sgd_seeds = 2000;
  double sgd_eta_factor = 1.0;
  bool sgd_wor = false;
  std::string sgd_T = "4,16,64,256", sgd_out;
  sgd_cmd->add_option("--seed", sgd_seed);
  sgd_cmd->add_option("--components,-n", sgd_n);
  sgd_cmd->add_option("--dim,-d", sgd_d);
  sgd_cmd->add_option("--rank", sgd_rank);
  sgd_cmd->add_option("--T", sgd_T, "iteration counts");
  sgd_cmd->add_option("--eta-factor", sgd_eta_factor, "eta = factor / beta");
  sgd_cmd->add_flag("--wor", sgd_wor, "single-pass without replacement");
  sgd_cmd->add_option("--seeds", sgd_seeds);
  sgd_cmd->add_option("--out", sgd_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_gen(gen_kind, gen_seed, gen_T, gen_d, gen_rank, gen_rows, gen_scale, gen_angle,
                     gen_out);
    }
    if (run_cmd->parsed() || sweep->parsed()) {
      ExperimentConfig cfg =
          load_experiment_config_file(run_cmd->parsed() ? run_config : sweep_config);
      if (run_cmd->parsed()) {
        if (!run_out.empty()) cfg.output_path = run_out;
        if (run_cmd->count("--seed") > 0) cfg.base_seed = run_seed;
        if (run_seeds > 0) cfg.num_seeds = run_seeds;
        if (!run_k.empty()) cfg.k_grid = parse_long_list(run_k);
        if (!run_ordering.empty()) cfg.ordering_policy = ordering_policy_from_string(run_ordering);
        if (!run_format.empty()) cfg.format = run_format;
        if (run_normalize) cfg.normalize = true;
        return cmd_run(cfg);
      }
      // sweep: one run per ordering policy, outputs suffixed by policy name
      int exit_code = kExitPass;
      std::stringstream ss(sweep_orderings);
      std::string policy_name;
      while (std::getline(ss, policy_name, ',')) {
        ExperimentConfig c = cfg;
        c.ordering_policy = ordering_policy_from_string(policy_name);
        if (!c.output_path.empty()) c.output_path += "." + policy_name;
        std::cout << "== ordering " << policy_name << " ==\n";
        exit_code = std::max(exit_code, cmd_run(c));
      }
      return exit_code;
    }
    if (bounds_cmd->parsed()) {
      return cmd_bounds(bounds_collection, bounds_k, bounds_theorems, bounds_out);
    }
    if (qmap_cmd->parsed()) {
      qcfg.rank_range = parse_range(qmap_rank);
      qcfg.row_range = parse_range(qmap_rows);
      qcfg.poly_n.clear();
      for (long n : parse_long_list(qmap_n)) qcfg.poly_n.push_back(static_cast<int>(n));
      return cmd_qmap(qcfg, qmap_out);
    }
    if (pocs_cmd->parsed()) {
      return cmd_pocs(pocs_seed, pocs_T, pocs_d, pocs_k, pocs_seeds, pocs_ordering, pocs_out);
    }
    if (cls_cmd->parsed()) {
      return cmd_classify(cls_seed, cls_T, cls_d, cls_examples, cls_file, cls_k, cls_seeds,
                          cls_out);
    }
    if (sgd_cmd->parsed()) {
      return cmd_sgd(sgd_seed, sgd_n, sgd_d, sgd_rank, sgd_T, sgd_eta_factor, sgd_wor, sgd_seeds,
                     sgd_out);
    }
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::out_of_range& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const not_realizable_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const convergence_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalError;
  }
  return kExitConfigError;
}
