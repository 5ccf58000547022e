#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "conreg/bounds.hpp"
#include "conreg/learners.hpp"
#include "conreg/metrics.hpp"
#include "conreg/ordering.hpp"
#include "conreg/tasks.hpp"

namespace conreg {

// Instance source for an experiment.
struct GeneratorSpec {
  enum class Kind { random, two_task_clone, fixture };
  Kind kind = Kind::random;
  std::uint64_t seed = 0;
  int T = 2;
  int d = 2;
  std::pair<int, int> rank_range{1, 1};
  std::pair<int, int> row_range{1, 1};
  double scale = 1.0;
  double angle_eps = 0.1;
  std::string path;  // fixture kind
};

TaskCollection instantiate(const GeneratorSpec& spec);

struct ExperimentConfig {
  GeneratorSpec generator;
  OrderingPolicy ordering_policy = OrderingPolicy::with_replacement;
  LearnerTag learner_tag = LearnerTag::kaczmarz;
  std::vector<long> k_grid;
  int num_seeds = 1;
  std::uint64_t base_seed = 0;
  std::vector<TheoremTag> bounds;
  std::string output_path;
  std::string format = "csv";  // csv | json
  bool normalize = false;
};

ExperimentConfig load_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config_file(const std::string& path);

// One measured run at one k (and one compared theorem when configured).
struct PerRunRow {
  long k = 0;
  std::uint64_t seed = 0;
  double loss = 0.0;
  double forgetting = 0.0;
  double regret = 0.0;
  double dist_sq = 0.0;
  std::optional<double> bound_loss;
  std::optional<double> bound_forgetting;
  std::string theorem_tag;
  bool pass = true;  // per-run comparison; expectation level lives in aggregates
};

struct AggregateRow {
  long k = 0;
  int n = 0;
  double mean_loss = 0.0;
  double se_loss = 0.0;
  double mean_forgetting = 0.0;
  double se_forgetting = 0.0;
  std::optional<double> bound_loss;
  std::optional<double> bound_forgetting;
  std::string theorem_tag;
  bool pass = true;  // mean + 3 SE under each configured bound
};

struct ExperimentResult {
  std::vector<PerRunRow> runs;        // sorted by (k, seed, tag)
  std::vector<AggregateRow> aggregates;
  bool all_bounds_pass = true;
};

// Deterministic given the config: run r uses ordering seed base_seed + r.
// Writes output_path (per-run rows) and output_path + ".agg" (aggregates)
// when output_path is nonempty.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

void emit_runs(const std::vector<PerRunRow>& rows, const std::string& format, std::ostream& out);
void emit_aggregates(const std::vector<AggregateRow>& rows, const std::string& format,
                     std::ostream& out);
void emit_runs_file(const std::vector<PerRunRow>& rows, const std::string& format,
                    const std::string& path);
void emit_aggregates_file(const std::vector<AggregateRow>& rows, const std::string& format,
                          const std::string& path);

// Sample mean and standard error (Bessel-corrected).
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  int n = 0;
};
MeanSe mean_se(const std::vector<double>& values);

// Experiment instance generators shared by the CLI and the acceptance suite.

struct PocsFamily {
  std::vector<class ConvexSet> sets;
  Vector w0;
  double d0_sq = 0.0;  // squared distance of w0 to the certified intersection
};

// Mixed halfspace/ball/box family, every set containing a margin ball around
// a common random point; w0 is the origin. Throws if the intersection
// certificate fails.
PocsFamily make_pocs_family(std::uint64_t seed, int T, int d);

// Jointly separable classification tasks: labels from a random ground-truth
// direction, example norms in [1, 2), margins bounded away from zero.
std::vector<struct ClassificationTask> make_separable_tasks(std::uint64_t seed, int T, int d,
                                                            int max_examples);

// Realizable least squares problem with every component normalized to unit
// spectral norm (beta = 1) and |w_star| = 1 (so w0 = 0 has D = 1).
struct LsqProblem make_unit_lsq_problem(std::uint64_t seed, int n, int d, int rank);

struct QmapCheckRow {
  std::string check;
  double value = 0.0;
  double bound = 0.0;
  bool pass = true;
};

struct QmapCheckConfig {
  std::uint64_t seed = 0;
  int collections = 100;
  int T = 4;
  int d = 6;
  std::pair<int, int> rank_range{1, 3};
  std::pair<int, int> row_range{1, 4};
  std::vector<int> poly_n{1, 3, 10, 30};
  bool include_second_moment = false;
  int second_moment_seeds = 2000;
  int second_moment_k = 8;
};

std::vector<QmapCheckRow> run_qmap_checks(const QmapCheckConfig& cfg);
void emit_qmap_report(const std::vector<QmapCheckRow>& rows, std::ostream& out);

}  // namespace conreg
