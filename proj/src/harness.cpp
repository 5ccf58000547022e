#include "conreg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "conreg/classify.hpp"
#include "conreg/convex.hpp"
#include "conreg/errors.hpp"
#include "conreg/parallel.hpp"
#include "conreg/qmap.hpp"
#include "conreg/rng.hpp"
#include "conreg/sgd.hpp"

namespace conreg {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string opt17(const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); }

GeneratorSpec::Kind generator_kind_from_string(const std::string& s) {
  if (s == "random") return GeneratorSpec::Kind::random;
  if (s == "two_task_clone") return GeneratorSpec::Kind::two_task_clone;
  if (s == "fixture") return GeneratorSpec::Kind::fixture;
  throw config_error("unknown generator kind: " + s);
}

}  // namespace

TaskCollection instantiate(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorSpec::Kind::random:
      return gen_random_realizable(spec.seed, spec.T, spec.d, spec.rank_range, spec.row_range,
                                   spec.scale);
    case GeneratorSpec::Kind::two_task_clone:
      return gen_two_task_clone(spec.seed, spec.T, spec.d, spec.angle_eps);
    case GeneratorSpec::Kind::fixture:
      return load_collection_file(spec.path);
  }
  throw config_error("instantiate: bad generator kind");
}

ExperimentConfig load_experiment_config(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    const auto& jg = j.at("generator");
    cfg.generator.kind = generator_kind_from_string(jg.at("kind").get<std::string>());
    if (jg.contains("seed")) cfg.generator.seed = jg.at("seed").get<std::uint64_t>();
    if (jg.contains("T")) cfg.generator.T = jg.at("T").get<int>();
    if (jg.contains("d")) cfg.generator.d = jg.at("d").get<int>();
    if (jg.contains("rank_range"))
      cfg.generator.rank_range = {jg.at("rank_range").at(0).get<int>(),
                                  jg.at("rank_range").at(1).get<int>()};
    if (jg.contains("row_range"))
      cfg.generator.row_range = {jg.at("row_range").at(0).get<int>(),
                                 jg.at("row_range").at(1).get<int>()};
    if (jg.contains("scale")) cfg.generator.scale = jg.at("scale").get<double>();
    if (jg.contains("angle_eps")) cfg.generator.angle_eps = jg.at("angle_eps").get<double>();
    if (jg.contains("path")) cfg.generator.path = jg.at("path").get<std::string>();

    cfg.ordering_policy = ordering_policy_from_string(j.at("ordering_policy").get<std::string>());
    if (j.contains("learner")) cfg.learner_tag = learner_tag_from_string(j.at("learner").get<std::string>());
    cfg.k_grid = j.at("k_grid").get<std::vector<long>>();
    cfg.num_seeds = j.value("num_seeds", 1);
    cfg.base_seed = j.value("base_seed", 0ULL);
    if (j.contains("bounds")) {
      for (const auto& tag : j.at("bounds")) {
        cfg.bounds.push_back(theorem_tag_from_string(tag.get<std::string>()));
      }
    }
    cfg.output_path = j.value("output_path", std::string());
    cfg.format = j.value("format", std::string("csv"));
    cfg.normalize = j.value("normalize", false);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config field error: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_experiment_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config: " + path);
  return load_experiment_config(in);
}

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe r;
  r.n = static_cast<int>(values.size());
  if (r.n == 0) return r;
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(r.n);
  if (r.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(ss / static_cast<double>(r.n - 1)) / std::sqrt(static_cast<double>(r.n));
  }
  return r;
}

namespace {

void validate_config(const ExperimentConfig& cfg, const TaskCollection& c) {
  if (cfg.k_grid.empty()) throw config_error("k_grid must be nonempty");
  if (!std::is_sorted(cfg.k_grid.begin(), cfg.k_grid.end()))
    throw config_error("k_grid must be ascending");
  if (cfg.k_grid.front() < 1) throw config_error("k_grid entries must be >= 1");
  if (cfg.num_seeds < 1) throw config_error("num_seeds >= 1 required");
  if (cfg.format != "csv" && cfg.format != "json") throw config_error("format must be csv or json");
  const long k_max = cfg.k_grid.back();
  if (cfg.ordering_policy == OrderingPolicy::without_replacement && k_max > c.num_tasks())
    throw config_error("without-replacement k_grid exceeds T");
  for (TheoremTag tag : cfg.bounds) {
    if (tag == TheoremTag::wor && cfg.ordering_policy != OrderingPolicy::without_replacement)
      throw config_error("wor bound requires without_replacement ordering");
    if ((tag == TheoremTag::param_dep_wr || tag == TheoremTag::universal_wr) &&
        cfg.ordering_policy != OrderingPolicy::with_replacement)
      throw config_error(to_string(tag) + " bound requires with_replacement ordering");
    if (tag == TheoremTag::sgd_last || tag == TheoremTag::sgd_wor || tag == TheoremTag::pocs ||
        tag == TheoremTag::classification)
      throw config_error(to_string(tag) + " is not a task-collection bound; use the dedicated subcommand");
  }
}

Ordering make_ordering(OrderingPolicy policy, std::uint64_t seed, int T, int k) {
  switch (policy) {
    case OrderingPolicy::with_replacement: return sample_with_replacement(seed, T, k);
    case OrderingPolicy::without_replacement: return sample_without_replacement(seed, T, k);
    case OrderingPolicy::cyclic: return cyclic_ordering(T, k);
    case OrderingPolicy::explicit_list:
      throw config_error("explicit orderings are not valid in seeded experiments");
  }
  throw config_error("bad ordering policy");
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  TaskCollection c = instantiate(cfg.generator);
  if (cfg.normalize) c = normalize_collection(c);
  validate_config(cfg, c);
  const TaskStats s = stats(c);
  const int k_max = static_cast<int>(cfg.k_grid.back());

  // Bound values per (tag, k); shared across seeds.
  struct BoundAtK {
    std::string tag;
    std::optional<double> loss;
    std::optional<double> forgetting;
  };
  std::vector<std::vector<BoundAtK>> bounds_per_k(cfg.k_grid.size());
  for (std::size_t ki = 0; ki < cfg.k_grid.size(); ++ki) {
    for (TheoremTag tag : cfg.bounds) {
      const long k = cfg.k_grid[ki];
      BoundReport rep;
      switch (tag) {
        case TheoremTag::param_dep_wr: rep = bound_param_dep_wr(s, k); break;
        case TheoremTag::universal_wr: rep = bound_universal_wr(s.w_star_norm, s.radius_R, k); break;
        case TheoremTag::wor: rep = bound_wor(s, k); break;
        default: throw config_error("unsupported bound tag in run_experiment");
      }
      bounds_per_k[ki].push_back({to_string(tag), rep.loss_bound, rep.forgetting_bound});
    }
  }

  std::vector<MetricSeries> series(static_cast<std::size_t>(cfg.num_seeds));
  parallel_for(static_cast<std::size_t>(cfg.num_seeds), [&](std::size_t r) {
    const std::uint64_t seed = cfg.base_seed + r;
    const Ordering o = make_ordering(cfg.ordering_policy, seed, c.num_tasks(), k_max);
    const Trajectory traj = run(c, o, cfg.learner_tag);
    series[r] = evaluate_series(c, traj, cfg.k_grid);
  });

  ExperimentResult result;
  for (std::size_t ki = 0; ki < cfg.k_grid.size(); ++ki) {
    for (std::size_t r = 0; r < series.size(); ++r) {
      const auto& ms = series[r];
      const auto emit_row = [&](const BoundAtK* b) {
        PerRunRow row;
        row.k = cfg.k_grid[ki];
        row.seed = cfg.base_seed + r;
        row.loss = ms.loss[ki];
        row.forgetting = ms.forgetting[ki];
        row.regret = ms.regret[ki];
        row.dist_sq = ms.dist_sq[ki];
        if (b) {
          row.bound_loss = b->loss;
          row.bound_forgetting = b->forgetting;
          row.theorem_tag = b->tag;
          row.pass = (!b->loss || row.loss <= *b->loss) &&
                     (!b->forgetting || row.forgetting <= *b->forgetting);
        }
        result.runs.push_back(std::move(row));
      };
      if (bounds_per_k[ki].empty()) {
        emit_row(nullptr);
      } else {
        for (const auto& b : bounds_per_k[ki]) emit_row(&b);
      }
    }

    std::vector<double> losses, forgettings;
    losses.reserve(series.size());
    forgettings.reserve(series.size());
    for (const auto& ms : series) {
      losses.push_back(ms.loss[ki]);
      forgettings.push_back(ms.forgetting[ki]);
    }
    const MeanSe ml = mean_se(losses);
    const MeanSe mf = mean_se(forgettings);
    const auto emit_agg = [&](const BoundAtK* b) {
      AggregateRow row;
      row.k = cfg.k_grid[ki];
      row.n = ml.n;
      row.mean_loss = ml.mean;
      row.se_loss = ml.se;
      row.mean_forgetting = mf.mean;
      row.se_forgetting = mf.se;
      if (b) {
        row.bound_loss = b->loss;
        row.bound_forgetting = b->forgetting;
        row.theorem_tag = b->tag;
        row.pass = (!b->loss || ml.mean + 3.0 * ml.se <= *b->loss) &&
                   (!b->forgetting || mf.mean + 3.0 * mf.se <= *b->forgetting);
        if (!row.pass) result.all_bounds_pass = false;
      }
      result.aggregates.push_back(std::move(row));
    };
    if (bounds_per_k[ki].empty()) {
      emit_agg(nullptr);
    } else {
      for (const auto& b : bounds_per_k[ki]) emit_agg(&b);
    }
  }

  if (!cfg.output_path.empty()) {
    emit_runs_file(result.runs, cfg.format, cfg.output_path);
    emit_aggregates_file(result.aggregates, cfg.format, cfg.output_path + ".agg");
  }
  return result;
}

void emit_runs(const std::vector<PerRunRow>& rows, const std::string& format, std::ostream& out) {
  if (format == "csv") {
    out << "k,seed,loss,forgetting,regret,dist_sq,bound_loss,bound_forgetting,theorem_tag,pass\n";
    for (const auto& r : rows) {
      out << r.k << ',' << r.seed << ',' << fmt17(r.loss) << ',' << fmt17(r.forgetting) << ','
          << fmt17(r.regret) << ',' << fmt17(r.dist_sq) << ',' << opt17(r.bound_loss) << ','
          << opt17(r.bound_forgetting) << ',' << r.theorem_tag << ',' << (r.pass ? 1 : 0) << '\n';
    }
  } else if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json j;
      j["k"] = r.k;
      j["seed"] = r.seed;
      j["loss"] = r.loss;
      j["forgetting"] = r.forgetting;
      j["regret"] = r.regret;
      j["dist_sq"] = r.dist_sq;
      if (r.bound_loss) j["bound_loss"] = *r.bound_loss;
      if (r.bound_forgetting) j["bound_forgetting"] = *r.bound_forgetting;
      j["theorem_tag"] = r.theorem_tag;
      j["pass"] = r.pass;
      arr.push_back(std::move(j));
    }
    out << arr.dump(2) << "\n";
  } else {
    throw config_error("emit_runs: format must be csv or json");
  }
}

void emit_aggregates(const std::vector<AggregateRow>& rows, const std::string& format,
                     std::ostream& out) {
  if (format == "csv") {
    out << "k,n,mean_loss,se_loss,mean_forgetting,se_forgetting,bound_loss,bound_forgetting,"
           "theorem_tag,pass\n";
    for (const auto& r : rows) {
      out << r.k << ',' << r.n << ',' << fmt17(r.mean_loss) << ',' << fmt17(r.se_loss) << ','
          << fmt17(r.mean_forgetting) << ',' << fmt17(r.se_forgetting) << ','
          << opt17(r.bound_loss) << ',' << opt17(r.bound_forgetting) << ',' << r.theorem_tag
          << ',' << (r.pass ? 1 : 0) << '\n';
    }
  } else if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json j;
      j["k"] = r.k;
      j["n"] = r.n;
      j["mean_loss"] = r.mean_loss;
      j["se_loss"] = r.se_loss;
      j["mean_forgetting"] = r.mean_forgetting;
      j["se_forgetting"] = r.se_forgetting;
      if (r.bound_loss) j["bound_loss"] = *r.bound_loss;
      if (r.bound_forgetting) j["bound_forgetting"] = *r.bound_forgetting;
      j["theorem_tag"] = r.theorem_tag;
      j["pass"] = r.pass;
      arr.push_back(std::move(j));
    }
    out << arr.dump(2) << "\n";
  } else {
    throw config_error("emit_aggregates: format must be csv or json");
  }
}

void emit_runs_file(const std::vector<PerRunRow>& rows, const std::string& format,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot open for writing: " + path);
  emit_runs(rows, format, out);
}

void emit_aggregates_file(const std::vector<AggregateRow>& rows, const std::string& format,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot open for writing: " + path);
  emit_aggregates(rows, format, out);
}

PocsFamily make_pocs_family(std::uint64_t seed, int T, int d) {
  Rng rng(seed);
  Vector c(d);
  for (int i = 0; i < d; ++i) c(i) = rng.normal();
  c *= 2.0 / c.norm();
  const double margin = 0.5;

  PocsFamily fam;
  fam.w0 = Vector::Zero(d);
  for (int m = 0; m < T; ++m) {
    const int kind = m % 3;
    if (kind == 0) {
      Vector a(d);
      for (int i = 0; i < d; ++i) a(i) = rng.normal();
      a.normalize();
      fam.sets.push_back(ConvexSet::halfspace(a, a.dot(c) - margin));
    } else if (kind == 1) {
      const double radius = 1.0 + rng.next_double();
      Vector offset(d);
      for (int i = 0; i < d; ++i) offset(i) = rng.normal();
      offset *= 0.3 * radius / offset.norm();
      fam.sets.push_back(ConvexSet::ball(c + offset, radius));
    } else {
      Vector lo(d), hi(d);
      for (int i = 0; i < d; ++i) {
        lo(i) = c(i) - margin - 0.5 - rng.next_double();
        hi(i) = c(i) + margin + 0.5 + rng.next_double();
      }
      fam.sets.push_back(ConvexSet::box(lo, hi));
    }
  }
  const IntersectionResult inter = project_intersection(fam.sets, fam.w0);
  if (!inter.feasible)
    throw convergence_error("pocs family: intersection certificate failed", inter.worst_violation,
                            inter.sweeps);
  fam.d0_sq = (fam.w0 - inter.point).squaredNorm();
  return fam;
}

std::vector<ClassificationTask> make_separable_tasks(std::uint64_t seed, int T, int d,
                                                     int max_examples) {
  Rng rng(seed);
  Vector u(d);
  for (int i = 0; i < d; ++i) u(i) = rng.normal();
  u.normalize();

  std::vector<ClassificationTask> tasks(static_cast<std::size_t>(T));
  for (auto& task : tasks) {
    const int n = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(max_examples)));
    while (static_cast<int>(task.examples.size()) < n) {
      Vector x(d);
      for (int i = 0; i < d; ++i) x(i) = rng.normal();
      x *= (1.0 + rng.next_double()) / x.norm();  // |x| in [1, 2)
      const double margin = u.dot(x);
      if (std::abs(margin) < 0.1) continue;  // keep the max-margin solution bounded
      task.examples.emplace_back(x, margin > 0.0 ? 1 : -1);
    }
  }
  return tasks;
}

LsqProblem make_unit_lsq_problem(std::uint64_t seed, int n, int d, int rank) {
  Rng rng(seed);
  Vector w_star(d);
  for (int i = 0; i < d; ++i) w_star(i) = rng.normal();
  w_star.normalize();  // w0 = 0 gives D = 1

  std::vector<LsqComponent> components;
  components.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Matrix a(rank, d);
    for (int r = 0; r < rank; ++r)
      for (int cidx = 0; cidx < d; ++cidx) a(r, cidx) = rng.normal();
    a /= spectral_norm(a);  // beta = 1, tight for every component
    LsqComponent comp;
    comp.b = a * w_star;
    comp.a = std::move(a);
    components.push_back(std::move(comp));
  }
  return make_lsq_problem(std::move(components), w_star);
}

std::vector<QmapCheckRow> run_qmap_checks(const QmapCheckConfig& cfg) {
  std::vector<QmapCheckRow> rows;
  const double e = std::exp(1.0);

  std::vector<std::vector<QmapCheckRow>> per_collection(static_cast<std::size_t>(cfg.collections));
  parallel_for(static_cast<std::size_t>(cfg.collections), [&](std::size_t i) {
    std::vector<QmapCheckRow>& local = per_collection[i];
    const TaskCollection c = gen_random_realizable(cfg.seed + i, cfg.T, cfg.d, cfg.rank_range,
                                                   cfg.row_range);
    const TaskStats s = stats(c);
    const QOperator q = build_q(c);

    if (cfg.d <= 8) {
      const auto spectrum = q_spectrum_dense(q);
      const double lo = spectrum.front();
      const double hi = spectrum.back();
      local.push_back({"q_spectrum_min", lo, -1e-9, lo >= -1e-9});
      local.push_back({"q_spectrum_max", hi, 1.0 + 1e-9, hi <= 1.0 + 1e-9});
    }

    for (int n : cfg.poly_n) {
      const double value = cfg.d <= 8 ? q_operator_norm_dense(q, n, true)
                                      : q_operator_norm(q, n, true);
      const double bound = 1.0 / (e * static_cast<double>(n)) + 1e-6;
      std::ostringstream name;
      name << "q_poly_norm_n" << n;
      local.push_back({name.str(), value, bound, value <= bound});
    }

    const double frob = q_row_projection_frobenius(q, c);
    const double frob_bound =
        std::min(std::sqrt(static_cast<double>(s.num_tasks_T) * s.avg_rank),
                 std::sqrt(std::max(0.0, static_cast<double>(s.dim_d) - s.avg_rank))) +
        1e-6;
    local.push_back({"q_row_projection_frobenius", frob, frob_bound, frob <= frob_bound});

    const double min_eig = check_domination(c);
    local.push_back({"domination_min_eigenvalue", min_eig, -1e-8, min_eig >= -1e-8});

    if (cfg.include_second_moment) {
      const auto sm = second_moment_recursion_check(c, OrderingPolicy::with_replacement,
                                                    cfg.second_moment_k, cfg.second_moment_seeds,
                                                    cfg.seed + 1000 * (i + 1));
      const double env = *std::max_element(sm.envelope.begin(), sm.envelope.end());
      local.push_back({"second_moment_recursion", sm.max_deviation, env, sm.pass});
    }
  });

  for (auto& local : per_collection) {
    for (auto& row : local) rows.push_back(std::move(row));
  }
  return rows;
}

void emit_qmap_report(const std::vector<QmapCheckRow>& rows, std::ostream& out) {
  out << "check,value,bound,pass\n";
  for (const auto& r : rows) {
    out << r.check << ',' << fmt17(r.value) << ',' << fmt17(r.bound) << ',' << (r.pass ? 1 : 0)
        << '\n';
  }
}

}  // namespace conreg
