#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "conreg/errors.hpp"
#include "conreg/harness.hpp"

using namespace conreg;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.generator.kind = GeneratorSpec::Kind::random;
  cfg.generator.seed = 5;
  cfg.generator.T = 4;
  cfg.generator.d = 6;
  cfg.generator.rank_range = {1, 2};
  cfg.generator.row_range = {1, 3};
  cfg.ordering_policy = OrderingPolicy::with_replacement;
  cfg.learner_tag = LearnerTag::kaczmarz;
  cfg.k_grid = {4, 8};
  cfg.num_seeds = 40;
  cfg.base_seed = 100;
  cfg.bounds = {TheoremTag::universal_wr};
  return cfg;
}

}  // namespace

TEST_CASE("config parsing from json") {
  std::istringstream in(R"({
    "generator": {"kind": "random", "seed": 3, "T": 5, "d": 8,
                  "rank_range": [1, 3], "row_range": [2, 4], "scale": 2.0},
    "ordering_policy": "wor",
    "learner": "modified_sgd",
    "k_grid": [2, 5],
    "num_seeds": 10,
    "base_seed": 42,
    "bounds": ["wor"],
    "format": "json",
    "normalize": true
  })");
  const ExperimentConfig cfg = load_experiment_config(in);
  CHECK(cfg.generator.T == 5);
  CHECK(cfg.generator.scale == 2.0);
  CHECK(cfg.ordering_policy == OrderingPolicy::without_replacement);
  CHECK(cfg.learner_tag == LearnerTag::modified_sgd);
  CHECK(cfg.k_grid == std::vector<long>{2, 5});
  CHECK(cfg.base_seed == 42);
  CHECK(cfg.bounds.size() == 1);
  CHECK(cfg.normalize);
}

TEST_CASE("config errors carry the config_error type") {
  std::istringstream bad("{not json");
  CHECK_THROWS_AS(load_experiment_config(bad), config_error);
  std::istringstream missing(R"({"ordering_policy": "wr", "k_grid": [1]})");
  CHECK_THROWS_AS(load_experiment_config(missing), config_error);
}

TEST_CASE("run_experiment: single task collection has zero forgetting") {
  ExperimentConfig cfg = small_config();
  cfg.generator.T = 1;
  cfg.generator.rank_range = {2, 2};
  cfg.generator.row_range = {2, 3};
  cfg.num_seeds = 1;
  cfg.bounds.clear();
  const ExperimentResult result = run_experiment(cfg);
  for (const auto& row : result.runs) {
    CHECK(row.forgetting <= 1e-14);
  }
}

TEST_CASE("run_experiment is deterministic: byte-identical emitted CSV") {
  const ExperimentConfig cfg = small_config();
  const ExperimentResult a = run_experiment(cfg);
  const ExperimentResult b = run_experiment(cfg);
  std::ostringstream sa, sb, aa, ab;
  emit_runs(a.runs, "csv", sa);
  emit_runs(b.runs, "csv", sb);
  emit_aggregates(a.aggregates, "csv", aa);
  emit_aggregates(b.aggregates, "csv", ab);
  CHECK(sa.str() == sb.str());
  CHECK(aa.str() == ab.str());
}

TEST_CASE("run_experiment aggregates match a brute-force recomputation") {
  const ExperimentConfig cfg = small_config();
  const ExperimentResult result = run_experiment(cfg);
  for (const auto& agg : result.aggregates) {
    std::vector<double> losses;
    for (const auto& row : result.runs) {
      if (row.k == agg.k) losses.push_back(row.loss);
    }
    REQUIRE(static_cast<int>(losses.size()) == agg.n);
    double mean = 0.0;
    for (double v : losses) mean += v;
    mean /= static_cast<double>(losses.size());
    double ss = 0.0;
    for (double v : losses) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / (losses.size() - 1)) / std::sqrt(double(losses.size()));
    CHECK(agg.mean_loss == doctest::Approx(mean).epsilon(1e-12));
    CHECK(agg.se_loss == doctest::Approx(se).epsilon(1e-12));
  }
}

TEST_CASE("run_experiment: universal bound comparison passes on a random instance") {
  ExperimentConfig cfg = small_config();
  cfg.generator.d = 10;
  cfg.generator.T = 5;
  cfg.generator.rank_range = {1, 3};
  cfg.generator.row_range = {1, 4};
  cfg.normalize = true;
  cfg.k_grid = {16};
  cfg.num_seeds = 2000;
  const ExperimentResult result = run_experiment(cfg);
  CHECK(result.all_bounds_pass);
  REQUIRE(!result.aggregates.empty());
  CHECK(result.aggregates.front().theorem_tag == "universal_wr");
}

TEST_CASE("config validation rejects mismatched bound/policy pairs") {
  ExperimentConfig cfg = small_config();
  cfg.bounds = {TheoremTag::wor};
  CHECK_THROWS_AS(run_experiment(cfg), config_error);

  ExperimentConfig cfg2 = small_config();
  cfg2.ordering_policy = OrderingPolicy::without_replacement;
  cfg2.bounds = {TheoremTag::universal_wr};
  CHECK_THROWS_AS(run_experiment(cfg2), config_error);

  ExperimentConfig cfg3 = small_config();
  cfg3.k_grid = {8, 4};
  CHECK_THROWS_AS(run_experiment(cfg3), config_error);

  ExperimentConfig cfg4 = small_config();
  cfg4.ordering_policy = OrderingPolicy::without_replacement;
  cfg4.bounds.clear();
  cfg4.k_grid = {16};  // exceeds T = 4
  CHECK_THROWS_AS(run_experiment(cfg4), config_error);
}

TEST_CASE("emit: empty rows produce a header-only file") {
  std::ostringstream out;
  emit_runs({}, "csv", out);
  CHECK(out.str() ==
        "k,seed,loss,forgetting,regret,dist_sq,bound_loss,bound_forgetting,theorem_tag,pass\n");
}

TEST_CASE("emit: csv row round-trips") {
  PerRunRow row;
  row.k = 7;
  row.seed = 3;
  row.loss = 0.125;
  row.forgetting = 1.0 / 3.0;
  row.regret = 2.5;
  row.dist_sq = 0.875;
  row.bound_loss = 1.5;
  row.bound_forgetting = 2.75;
  row.theorem_tag = "universal_wr";
  row.pass = true;
  std::ostringstream out;
  emit_runs({row}, "csv", out);
  std::istringstream in(out.str());
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  std::stringstream fields(line);
  std::string field;
  std::vector<std::string> parsed;
  while (std::getline(fields, field, ',')) parsed.push_back(field);
  REQUIRE(parsed.size() == 10);
  CHECK(std::stol(parsed[0]) == 7);
  CHECK(std::stod(parsed[2]) == row.loss);
  CHECK(std::stod(parsed[3]) == row.forgetting);  // 17 significant digits round-trip
  CHECK(parsed[8] == "universal_wr");
  CHECK(parsed[9] == "1");
}

TEST_CASE("emit: json output parses as an array of objects") {
  PerRunRow row;
  row.k = 2;
  row.seed = 9;
  row.loss = 0.5;
  row.theorem_tag = "universal_wr";
  std::ostringstream out;
  emit_runs({row}, "json", out);
  const auto parsed = nlohmann::json::parse(out.str());
  REQUIRE(parsed.is_array());
  CHECK(parsed[0]["k"] == 2);
  CHECK(parsed[0]["seed"] == 9);
  CHECK(parsed[0]["loss"] == 0.5);
  CHECK(parsed[0]["theorem_tag"] == "universal_wr");
}

TEST_CASE("qmap check suite: random instances pass, reruns identical") {
  QmapCheckConfig cfg;
  cfg.seed = 1;
  cfg.collections = 5;
  cfg.T = 4;
  cfg.d = 6;
  cfg.poly_n = {1, 3};
  const auto rows = run_qmap_checks(cfg);
  CHECK(!rows.empty());
  for (const auto& r : rows) CHECK(r.pass);

  const auto rows2 = run_qmap_checks(cfg);
  REQUIRE(rows.size() == rows2.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].check == rows2[i].check);
    CHECK(rows[i].value == rows2[i].value);
  }
}

TEST_CASE("qmap check suite: full-rank single task is trivially zero") {
  QmapCheckConfig cfg;
  cfg.seed = 2;
  cfg.collections = 1;
  cfg.T = 1;
  cfg.d = 3;
  cfg.rank_range = {3, 3};
  cfg.row_range = {3, 4};
  cfg.poly_n = {1};
  const auto rows = run_qmap_checks(cfg);
  for (const auto& r : rows) {
    CHECK(r.pass);
    if (r.check == "q_poly_norm_n1" || r.check == "q_row_projection_frobenius") {
      CHECK(r.value <= 1e-10);
    }
  }
}

TEST_CASE("mean_se basics") {
  const MeanSe ms = mean_se({1.0, 2.0, 3.0, 4.0});
  CHECK(ms.mean == doctest::Approx(2.5));
  CHECK(ms.n == 4);
  // sample sd = sqrt(5/3), se = sd / 2
  CHECK(ms.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-12));
  CHECK(mean_se({}).n == 0);
  CHECK(mean_se({7.0}).se == 0.0);
}
