// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
//
// Every expectation-level comparison uses the shared protocol: empirical mean
// plus three standard errors must sit below the closed-form bound, with
// matched seeds wherever two estimators are compared against each other.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "conreg/bounds.hpp"
#include "conreg/classify.hpp"
#include "conreg/convex.hpp"
#include "conreg/harness.hpp"
#include "conreg/learners.hpp"
#include "conreg/metrics.hpp"
#include "conreg/ordering.hpp"
#include "conreg/parallel.hpp"
#include "conreg/qmap.hpp"
#include "conreg/rng.hpp"
#include "conreg/sgd.hpp"
#include "conreg/tasks.hpp"

namespace {

using namespace conreg;

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail = "") {
  std::printf("[%s] criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Pathwise invariant monitor (criterion 12), fed by criteria 1-5.

struct PathwiseMonitor {
  std::atomic<long> runs{0};
  std::atomic<long> contraction_violations{0};
  std::atomic<long> telescoping_violations{0};
  std::atomic<long> residual_violations{0};
  std::atomic<long> domination_violations{0};

  // Full continual-trajectory check: contraction of |w_t - w*|, displacement
  // telescoping, per-step block residual, and L_m <= R^2 f_m at every iterate.
  void check_trajectory(const TaskCollection& c, const std::vector<Matrix>& row_projs,
                        double radius_R, const Trajectory& traj) {
    runs.fetch_add(1, std::memory_order_relaxed);
    const double r_sq = radius_R * radius_R;

    double prev_dist = (traj.iterates.front() - c.w_star).norm();
    double displacement_sum = 0.0;
    for (int t = 1; t <= traj.steps(); ++t) {
      const Vector& w = traj.iterates[static_cast<std::size_t>(t)];
      const double dist = (w - c.w_star).norm();
      if (dist > prev_dist + 1e-12)
        contraction_violations.fetch_add(1, std::memory_order_relaxed);
      displacement_sum +=
          (traj.iterates[static_cast<std::size_t>(t - 1)] - w).squaredNorm();
      prev_dist = dist;

      const auto& task =
          c.tasks[static_cast<std::size_t>(traj.ordering.indices[static_cast<std::size_t>(t - 1)])];
      if (traj.per_step_current_residual[static_cast<std::size_t>(t - 1)] >
          1e-8 * (1.0 + task.y.norm()))
        residual_violations.fetch_add(1, std::memory_order_relaxed);
    }

    const double first = (traj.iterates.front() - c.w_star).squaredNorm();
    const double last = (traj.iterates.back() - c.w_star).squaredNorm();
    if (std::abs(displacement_sum - (first - last)) > 1e-8 * (1.0 + first))
      telescoping_violations.fetch_add(1, std::memory_order_relaxed);

    for (const auto& w : traj.iterates) {
      for (std::size_t m = 0; m < c.tasks.size(); ++m) {
        const double loss_m = 0.5 * (c.tasks[m].x * w - c.tasks[m].y).squaredNorm();
        const double f_m = 0.5 * (row_projs[m] * (w - c.w_star)).squaredNorm();
        if (loss_m > r_sq * f_m + 1e-12)
          domination_violations.fetch_add(1, std::memory_order_relaxed);
      }
    }
  }

  // Contraction-only check for plain SGD runs (eta < 2/beta keeps the
  // distance to w* non-increasing in the realizable quadratic case).
  void check_sgd_contraction(const LsqProblem& p, const SgdRun& run) {
    runs.fetch_add(1, std::memory_order_relaxed);
    double prev = (run.iterates.front() - p.w_star).norm();
    for (std::size_t t = 1; t < run.iterates.size(); ++t) {
      const double dist = (run.iterates[t] - p.w_star).norm();
      if (dist > prev + 1e-12) contraction_violations.fetch_add(1, std::memory_order_relaxed);
      prev = dist;
    }
  }

  long total_violations() const {
    return contraction_violations + telescoping_violations + residual_violations +
           domination_violations;
  }
};

PathwiseMonitor g_monitor;

std::vector<Matrix> row_projections(const TaskCollection& c) {
  std::vector<Matrix> projs;
  projs.reserve(c.tasks.size());
  for (const auto& t : c.tasks) projs.push_back(row_space_projection(t.x));
  return projs;
}

// ---------------------------------------------------------------------------
// 1. Reduction equivalence: inner-GD / Kaczmarz / modified-SGD trajectories
//    coincide to 1e-6 per coordinate on 50 random realizable collections.

void criterion_1() {
  const int collections = 50;
  const int steps = 50;
  std::atomic<long> mismatches{0};
  std::atomic<long> done{0};

  parallel_for(collections, [&](std::size_t i) {
    Rng rng(7000 + i);
    const int d = 4 + static_cast<int>(rng.uniform_index(17));   // <= 20
    const int T = 2 + static_cast<int>(rng.uniform_index(9));    // <= 10
    const int max_rank =
        1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(std::min(4, d))));
    const TaskCollection c =
        gen_random_realizable(9000 + i, T, d, {1, max_rank}, {1, max_rank + 2});
    const Ordering o = sample_with_replacement(100 + i, T, steps);

    InnerSolveConfig cfg;
    cfg.residual_tol = 1e-10;
    const Trajectory kz = run(c, o, LearnerTag::kaczmarz);
    const Trajectory gd = run(c, o, LearnerTag::gd_inner, cfg);
    const Trajectory ms = run(c, o, LearnerTag::modified_sgd);

    for (std::size_t t = 0; t < kz.iterates.size(); ++t) {
      if ((kz.iterates[t] - gd.iterates[t]).cwiseAbs().maxCoeff() > 1e-6 ||
          (kz.iterates[t] - ms.iterates[t]).cwiseAbs().maxCoeff() > 1e-6) {
        mismatches.fetch_add(1, std::memory_order_relaxed);
      }
    }

    const TaskStats s = stats(c);
    const auto projs = row_projections(c);
    g_monitor.check_trajectory(c, projs, s.radius_R, kz);
    g_monitor.check_trajectory(c, projs, s.radius_R, ms);
    done.fetch_add(1, std::memory_order_relaxed);
  });

  report(1, "reduction equivalence of the three learners", mismatches == 0 && done == collections,
         std::to_string(collections) + " collections, k=50, max coord diff <= 1e-6, " +
             std::to_string(mismatches.load()) + " mismatching iterates");
}

// ---------------------------------------------------------------------------
// 2. Pathwise regret bound, zero violations over 500 runs across the eta grid.

void criterion_2() {
  const double factors[] = {0.25, 0.5, 1.0, 1.5, 1.9};
  const int problems = 100;
  std::atomic<long> violations{0};

  parallel_for(problems, [&](std::size_t i) {
    const LsqProblem p = make_unit_lsq_problem(3000 + i, 6, 6, 1 + static_cast<int>(i % 3));
    Rng rng(500 + i);
    Vector w0(6);
    for (Index j = 0; j < 6; ++j) w0(j) = rng.normal();
    for (double factor : factors) {
      const SgdRun run = sgd_with_replacement(p, w0, factor / p.beta, 80, 40 + i);
      const RegretCheck rc = regret_sum(run, p);
      if (!rc.pass) violations.fetch_add(1, std::memory_order_relaxed);
      g_monitor.check_sgd_contraction(p, run);
    }
  });

  report(2, "pathwise SGD regret bound over the step-size grid", violations == 0,
         "500 runs, eta in {0.25,0.5,1,1.5,1.9}/beta, " + std::to_string(violations.load()) +
             " violations");
}

// ---------------------------------------------------------------------------
// Shared continual Monte-Carlo runner: mean loss/forgetting at the requested
// k values over seeded orderings.

struct ContinualStats {
  std::vector<MeanSe> loss;        // per k
  std::vector<MeanSe> forgetting;  // per k
};

ContinualStats continual_monte_carlo(const TaskCollection& c, OrderingPolicy policy,
                                     const std::vector<long>& k_values, int num_seeds,
                                     std::uint64_t base_seed, bool feed_monitor) {
  const int k_max = static_cast<int>(k_values.back());
  const TaskStats s = stats(c);
  const auto projs = row_projections(c);

  std::vector<std::vector<double>> losses(k_values.size(),
                                          std::vector<double>(static_cast<std::size_t>(num_seeds)));
  std::vector<std::vector<double>> forgettings = losses;

  parallel_for(static_cast<std::size_t>(num_seeds), [&](std::size_t r) {
    const std::uint64_t seed = base_seed + r;
    const Ordering o = policy == OrderingPolicy::with_replacement
                           ? sample_with_replacement(seed, c.num_tasks(), k_max)
                           : sample_without_replacement(seed, c.num_tasks(), k_max);
    const Trajectory traj = run(c, o, LearnerTag::kaczmarz);
    const MetricSeries ms = evaluate_series(c, traj, k_values);
    for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
      losses[ki][r] = ms.loss[ki];
      forgettings[ki][r] = ms.forgetting[ki];
    }
    if (feed_monitor) g_monitor.check_trajectory(c, projs, s.radius_R, traj);
  });

  ContinualStats out;
  for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
    out.loss.push_back(mean_se(losses[ki]));
    out.forgetting.push_back(mean_se(forgettings[ki]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// 3. Parameter-dependent with-replacement rate at d - r_bar in {2, 10, 25}.

void criterion_3() {
  struct InstanceSpec {
    std::uint64_t seed;
    int T, d, rank;
  };
  const InstanceSpec specs[] = {{11, 4, 6, 4}, {12, 5, 12, 2}, {13, 5, 30, 5}};
  const std::vector<long> ks = {4, 16, 64, 256};
  const int seeds = 2000;

  bool pass = true;
  std::string detail;
  for (const auto& spec : specs) {
    const TaskCollection c = gen_random_realizable(
        spec.seed, spec.T, spec.d, {spec.rank, spec.rank}, {spec.rank, spec.rank + 2});
    const TaskStats s = stats(c);
    const ContinualStats mc =
        continual_monte_carlo(c, OrderingPolicy::with_replacement, ks, seeds, 20000, true);
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      const BoundReport b = bound_param_dep_wr(s, ks[ki]);
      if (mc.loss[ki].mean + 3.0 * mc.loss[ki].se > *b.loss_bound) pass = false;
      if (mc.forgetting[ki].mean + 3.0 * mc.forgetting[ki].se > *b.forgetting_bound) pass = false;
    }
    detail += "d-r=" + fmt(static_cast<double>(s.dim_d) - s.avg_rank) + " ";
  }
  report(3, "parameter-dependent with-replacement rate", pass,
         detail + "k in {4,16,64,256}, 2000 seeds each");
}

// ---------------------------------------------------------------------------
// 4. Universal with-replacement rate, plus the near-parallel clone instance
//    exercising the bound away from zero.

void criterion_4() {
  const std::vector<long> ks = {16, 256, 2048};
  const int seeds = 2000;

  const TaskCollection c = normalize_collection(gen_random_realizable(21, 5, 10, {1, 3}, {1, 4}));
  const TaskStats s = stats(c);
  const ContinualStats mc =
      continual_monte_carlo(c, OrderingPolicy::with_replacement, ks, seeds, 30000, true);

  bool pass = true;
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    const BoundReport b = bound_universal_wr(s.w_star_norm, s.radius_R, ks[ki]);
    if (mc.loss[ki].mean + 3.0 * mc.loss[ki].se > *b.loss_bound) pass = false;
    if (mc.forgetting[ki].mean + 3.0 * mc.forgetting[ki].se > *b.forgetting_bound) pass = false;
  }

  // Near-parallel two-task clone: forgetting stays macroscopic at k = 64.
  const TaskCollection clone = gen_two_task_clone(22, 2, 2, 0.05);
  const TaskStats cs = stats(clone);
  const ContinualStats cmc =
      continual_monte_carlo(clone, OrderingPolicy::with_replacement, {64}, seeds, 31000, true);
  const double floor_value = 1e-3 * cs.w_star_norm * cs.w_star_norm * cs.radius_R * cs.radius_R;
  const bool nontrivial = cmc.forgetting[0].mean > floor_value;
  if (!nontrivial) pass = false;

  report(4, "universal with-replacement rate", pass,
         "k in {16,256,2048}; clone forgetting at k=64: " + fmt(cmc.forgetting[0].mean) + " > " +
             fmt(floor_value));
}

// ---------------------------------------------------------------------------
// 5. Without-replacement rate with T = 20.

void criterion_5() {
  const std::vector<long> ks = {2, 5, 10, 20};
  const int seeds = 2000;
  const TaskCollection c = gen_random_realizable(31, 20, 12, {1, 2}, {1, 3});
  const TaskStats s = stats(c);
  const ContinualStats mc =
      continual_monte_carlo(c, OrderingPolicy::without_replacement, ks, seeds, 40000, true);

  bool pass = true;
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    const BoundReport b = bound_wor(s, ks[ki]);
    if (mc.loss[ki].mean + 3.0 * mc.loss[ki].se > *b.loss_bound) pass = false;
    if (mc.forgetting[ki].mean + 3.0 * mc.forgetting[ki].se > *b.forgetting_bound) pass = false;
  }
  report(5, "without-replacement rate (T = 20)", pass, "k in {2,5,10,20}, 2000 permutation seeds");
}

// ---------------------------------------------------------------------------
// 6. Last-iterate SGD bound at eta = 1/beta and eta = 0.5/beta.

void criterion_6() {
  const LsqProblem p = make_unit_lsq_problem(41, 10, 8, 1);
  const std::vector<long> ts = {4, 16, 64, 256};
  const int seeds = 2000;
  const Vector w0 = Vector::Zero(8);

  bool pass = true;
  std::string detail;
  for (const double factor : {1.0, 0.5}) {
    const double eta = factor / p.beta;
    for (long T : ts) {
      std::vector<double> values(static_cast<std::size_t>(seeds));
      parallel_for(static_cast<std::size_t>(seeds), [&](std::size_t r) {
        const SgdRun run = sgd_with_replacement(p, w0, eta, static_cast<int>(T), 50000 + r);
        values[r] = mean_objective(p, run.iterates.back());
      });
      const MeanSe ms = mean_se(values);
      const double bound = bound_sgd_last(eta, p.beta, 1.0, T);
      if (ms.mean + 3.0 * ms.se > bound) {
        pass = false;
        detail += "fail at eta=" + fmt(eta) + ",T=" + std::to_string(T) + " ";
      }
    }
  }
  report(6, "last-iterate SGD bound (with replacement)", pass,
         detail.empty() ? "T in {4,16,64,256}, eta in {1, 0.5}/beta" : detail);
}

// ---------------------------------------------------------------------------
// 7. Without-replacement SGD: prefix-average loss under 7 beta D^2 / T^(1/4).

void criterion_7() {
  const LsqProblem p = make_unit_lsq_problem(51, 64, 10, 1);
  const std::vector<long> ts = {4, 16, 63};
  const int seeds = 2000;
  const Vector w0 = Vector::Zero(10);

  bool pass = true;
  std::string detail;
  for (long T : ts) {
    std::vector<double> values(static_cast<std::size_t>(seeds));
    parallel_for(static_cast<std::size_t>(seeds), [&](std::size_t r) {
      const SgdRun run =
          sgd_without_replacement(p, w0, 1.0 / p.beta, static_cast<int>(T), 60000 + r);
      values[r] = prefix_average_loss(run, p, static_cast<int>(T) - 1);
    });
    const MeanSe ms = mean_se(values);
    const double bound = 7.0 * p.beta / std::pow(static_cast<double>(T), 0.25);
    if (ms.mean + 3.0 * ms.se > bound) {
      pass = false;
      detail += "fail at T=" + std::to_string(T) + " ";
    }
  }
  report(7, "without-replacement SGD prefix-average bound", pass,
         detail.empty() ? "n=64 components, T in {4,16,63}" : detail);
}

// ---------------------------------------------------------------------------
// 8. Q-map suite on 100 random collections (exact eigenvalue route, d <= 8),
//    with a power-iteration cross-check on a subset.

void criterion_8() {
  const int collections = 100;
  const double e = std::exp(1.0);
  std::atomic<long> failures{0};

  parallel_for(collections, [&](std::size_t i) {
    Rng rng(800 + i);
    const int d = 4 + static_cast<int>(rng.uniform_index(5));  // 4..8
    const int T = 2 + static_cast<int>(rng.uniform_index(5));  // 2..6
    const int max_rank = std::max(1, d / 2);
    const TaskCollection c =
        gen_random_realizable(70000 + i, T, d, {1, max_rank}, {1, max_rank + 2});
    const TaskStats s = stats(c);
    const QOperator q = build_q(c);

    const auto spectrum = q_spectrum_dense(q);
    if (spectrum.front() < -1e-9 || spectrum.back() > 1.0 + 1e-9)
      failures.fetch_add(1, std::memory_order_relaxed);

    for (int n : {1, 3, 10, 30}) {
      if (q_operator_norm(q, n, true) > 1.0 / (e * n) + 1e-6)
        failures.fetch_add(1, std::memory_order_relaxed);
    }

    const double frob = q_row_projection_frobenius(q, c);
    const double frob_bound =
        std::min(std::sqrt(static_cast<double>(s.num_tasks_T) * s.avg_rank),
                 std::sqrt(std::max(0.0, static_cast<double>(s.dim_d) - s.avg_rank)));
    if (frob > frob_bound + 1e-6) failures.fetch_add(1, std::memory_order_relaxed);

    if (check_domination(c) < -1e-8) failures.fetch_add(1, std::memory_order_relaxed);

    // production power-iteration path cross-checked on a subset
    if (i % 10 == 0) {
      for (int n : {1, 3}) {
        const double power = q_operator_norm_power(q, n, true);
        const double dense = q_operator_norm_dense(q, n, true);
        if (power > 1.0 / (e * n) + 1e-6 || std::abs(power - dense) > 2e-3 * std::max(1.0, dense))
          failures.fetch_add(1, std::memory_order_relaxed);
      }
    }
  });

  report(8, "Q-map spectrum, polynomial norm, Frobenius and domination checks", failures == 0,
         "100 collections, n in {1,3,10,30}, " + std::to_string(failures.load()) + " failures");
}

// ---------------------------------------------------------------------------
// 9. POCS universal rate on certified families, both ordering policies.

void criterion_9() {
  const PocsFamily fam = make_pocs_family(61, 64, 6);
  const std::vector<long> ks = {4, 16, 64};
  const int seeds = 2000;
  const int T = static_cast<int>(fam.sets.size());

  bool pass = true;
  std::string detail = "d0^2=" + fmt(fam.d0_sq) + " ";
  for (const OrderingPolicy policy :
       {OrderingPolicy::with_replacement, OrderingPolicy::without_replacement}) {
    std::vector<std::vector<double>> residuals(ks.size(),
                                               std::vector<double>(static_cast<std::size_t>(seeds)));
    parallel_for(static_cast<std::size_t>(seeds), [&](std::size_t r) {
      const std::uint64_t seed = 80000 + r;
      const Ordering o = policy == OrderingPolicy::with_replacement
                             ? sample_with_replacement(seed, T, static_cast<int>(ks.back()))
                             : sample_without_replacement(seed, T, static_cast<int>(ks.back()));
      const Trajectory traj = pocs_run(fam.sets, fam.w0, o);
      for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        residuals[ki][r] = pocs_residual(fam.sets, traj.iterates[static_cast<std::size_t>(ks[ki])]);
      }
    });
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      const MeanSe ms = mean_se(residuals[ki]);
      if (ms.mean + 3.0 * ms.se > bound_pocs(ks[ki], fam.d0_sq)) {
        pass = false;
        detail += "fail " + to_string(policy) + " k=" + std::to_string(ks[ki]) + " ";
      }
    }
  }
  report(9, "POCS universal residual rate", pass, detail + "k in {4,16,64}, both policies");
}

// ---------------------------------------------------------------------------
// 10. Classification forgetting under the max-margin projection scheme.

void criterion_10() {
  const auto tasks = make_separable_tasks(71, 10, 8, 3);
  const auto sets = max_margin_sets(tasks);
  double radius = 0.0;
  for (const auto& task : tasks)
    for (const auto& [x, y] : task.examples) radius = std::max(radius, x.norm());

  const Vector w0 = Vector::Zero(8);
  const IntersectionResult inter = project_intersection(sets, w0);
  if (!inter.feasible) {
    report(10, "classification forgetting bound", false, "separability certificate failed");
    return;
  }
  const double w_star_norm = inter.point.norm();

  const std::vector<long> ks = {4, 16, 64};
  const int seeds = 2000;
  const int T = static_cast<int>(sets.size());
  std::vector<std::vector<double>> forgettings(ks.size(),
                                               std::vector<double>(static_cast<std::size_t>(seeds)));
  parallel_for(static_cast<std::size_t>(seeds), [&](std::size_t r) {
    const Ordering o = sample_with_replacement(90000 + r, T, static_cast<int>(ks.back()));
    const Trajectory traj = pocs_run(sets, w0, o);
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      forgettings[ki][r] = pocs_forgetting(sets, traj, static_cast<int>(ks[ki]));
    }
  });

  bool pass = true;
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    const MeanSe ms = mean_se(forgettings[ki]);
    if (ms.mean + 3.0 * ms.se > bound_classification(ks[ki], w_star_norm, radius)) pass = false;
  }
  report(10, "classification forgetting bound", pass,
         "T=10, d=8, |w*|=" + fmt(w_star_norm) + ", R=" + fmt(radius) + ", k in {4,16,64}");
}

// ---------------------------------------------------------------------------
// 11. Bridging results: with-replacement forgetting vs loss, and the
//     without-replacement loss decomposition identity (matched seeds).

void criterion_11() {
  bool pass = true;
  std::string detail;

  {
    const TaskCollection c = gen_two_task_clone(81, 4, 3, 0.15);
    const TaskStats s = stats(c);
    const double scale = s.w_star_norm * s.w_star_norm * s.radius_R * s.radius_R;
    const int seeds = 5000;
    for (const long k : {4L, 16L, 64L}) {
      std::vector<double> diffs(static_cast<std::size_t>(seeds));
      parallel_for(static_cast<std::size_t>(seeds), [&](std::size_t r) {
        const Ordering o = sample_with_replacement(100000 + r, c.num_tasks(), static_cast<int>(k));
        const Trajectory traj = run(c, o, LearnerTag::kaczmarz);
        const double f_k = forgetting(c, traj, static_cast<int>(k));
        const double loss_prev = training_loss(c, traj.iterates[static_cast<std::size_t>(k - 1)]);
        diffs[r] = f_k - 2.0 * loss_prev - scale / static_cast<double>(k);
      });
      const MeanSe ms = mean_se(diffs);
      if (ms.mean > 3.0 * ms.se) {
        pass = false;
        detail += "wr-bridge fail k=" + std::to_string(k) + " ";
      }
    }
  }

  {
    const TaskCollection c = gen_random_realizable(82, 10, 8, {1, 2}, {1, 3});
    const int T = 10;
    const int seeds = 5000;
    for (const int k : {1, 5, 10}) {
      std::vector<double> diffs(static_cast<std::size_t>(seeds));
      parallel_for(static_cast<std::size_t>(seeds), [&](std::size_t r) {
        const Ordering o = sample_without_replacement(110000 + r, T, T);
        const Trajectory traj = run(c, o, LearnerTag::kaczmarz);
        const WorDecomposition dec = wor_loss_decomposition(c, traj, k);
        const double reconstructed =
            (static_cast<double>(k) / T) * dec.forgetting_term +
            (static_cast<double>(T - k) / (2.0 * T)) * dec.unseen_term;
        diffs[r] = dec.loss - reconstructed;
      });
      const MeanSe ms = mean_se(diffs);
      if (std::abs(ms.mean) > 3.0 * ms.se + 1e-12) {
        pass = false;
        detail += "wor-identity fail k=" + std::to_string(k) + " ";
      }
    }
  }

  report(11, "forgetting/loss bridging results", pass,
         detail.empty() ? "wr bridge at k in {4,16,64}; wor identity at k in {1,5,10}" : detail);
}

// ---------------------------------------------------------------------------
// 12. Pathwise invariants accumulated across criteria 1-5.

void criterion_12() {
  const long violations = g_monitor.total_violations();
  report(12, "pathwise invariants across criteria 1-5", violations == 0,
         std::to_string(g_monitor.runs.load()) + " runs monitored: " +
             std::to_string(g_monitor.contraction_violations.load()) + " contraction, " +
             std::to_string(g_monitor.telescoping_violations.load()) + " telescoping, " +
             std::to_string(g_monitor.residual_violations.load()) + " residual, " +
             std::to_string(g_monitor.domination_violations.load()) + " domination violations");
}

}  // namespace

int main(int argc, char** argv) {
  // Optionally run a single criterion: acceptance <id>
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  const struct {
    int id;
    void (*fn)();
  } criteria[] = {{1, criterion_1}, {2, criterion_2},   {3, criterion_3}, {4, criterion_4},
                  {5, criterion_5}, {6, criterion_6},   {7, criterion_7}, {8, criterion_8},
                  {9, criterion_9}, {10, criterion_10}, {11, criterion_11}};

  try {
    for (const auto& c : criteria) {
      if (only == 0 || only == c.id) c.fn();
    }
    if (only == 0 || only == 12) criterion_12();
  } catch (const std::exception& e) {
    std::cerr << "acceptance suite aborted: " << e.what() << "\n";
    return 3;
  }

  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d criteria FAILED\n", g_failures);
  return 1;
}
