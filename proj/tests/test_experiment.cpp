#include <doctest.h>

#include <sstream>

#include "betreg/experiment.hpp"

using namespace betreg;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.seed = 404;
  cfg.replications = 3;
  cfg.estimators = {Estimator::Squared, Estimator::Log, Estimator::Betting};
  cfg.n_values = {50};
  cfg.generator.support_size = 5;
  cfg.generator.class_size = 5;
  cfg.generator.label_family = LabelFamily::Bernoulli;
  cfg.generator.f_star.lo = 0.2;
  cfg.generator.f_star.hi = 0.8;
  return cfg;
}

std::string records_to_string(const std::vector<ExperimentRecord>& records) {
  std::ostringstream out;
  write_records_csv(out, records);
  return out.str();
}

}  // namespace

TEST_CASE("zero replications produce a header-only CSV") {
  ExperimentConfig cfg = small_config();
  cfg.replications = 0;
  const ExperimentResult res = run_experiment(cfg);
  CHECK(res.records.empty());
  CHECK(records_to_string(res.records) == std::string(kRecordHeader) + "\n");
}

TEST_CASE("CSV schema") {
  CHECK(std::string(kRecordHeader) ==
        "replication,estimator,n,sigma2,first_order_q,mae,bound_rhs,objective,"
        "grid_slack,seed,wall_ms");
  const ExperimentResult res = run_experiment(small_config());
  const std::string csv = records_to_string(res.records);
  CHECK(csv.rfind(kRecordHeader, 0) == 0);
  // rows: 3 replications x 3 estimators + header + trailing newline
  std::size_t lines = 0;
  for (const char ch : csv) lines += (ch == '\n');
  CHECK(lines == 10);
}

TEST_CASE("records appear in replication-major, configured-estimator order") {
  const ExperimentConfig cfg = small_config();
  const ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.records.size() == 9);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t e = 0; e < 3; ++e) {
      const auto& rec = res.records[r * 3 + e];
      CHECK(rec.replication == r);
      CHECK(rec.estimator == cfg.estimators[e]);
      CHECK(rec.n == 50);
      CHECK(rec.mae >= 0.0);
      CHECK(rec.bound_rhs >= 0.0);
      CHECK(rec.grid_slack >= 0.0);
      CHECK(rec.wall_ms == 0);  // timing disabled by default
    }
  }
}

TEST_CASE("reruns are byte-identical regardless of worker count") {
  ExperimentConfig cfg = small_config();
  cfg.threads = 1;
  const std::string a = records_to_string(run_experiment(cfg).records);
  cfg.threads = 4;
  const std::string b = records_to_string(run_experiment(cfg).records);
  CHECK(a == b);
}

TEST_CASE("deterministic labels give exact recovery for the betting estimator") {
  ExperimentConfig cfg = small_config();
  cfg.estimators = {Estimator::Betting};
  cfg.replications = 5;
  cfg.generator.class_size = 2;
  cfg.generator.label_family = LabelFamily::Deterministic;
  const ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.records.size() == 5);
  for (const auto& rec : res.records) {
    CHECK(rec.mae == 0.0);
    CHECK(rec.objective == 0.0);
    CHECK(rec.sigma2 == 0.0);
  }
}

TEST_CASE("summary reports coverage and medians per estimator") {
  const ExperimentResult res = run_experiment(small_config());
  const auto& cells = res.summary.at("cells");
  REQUIRE(cells.size() == 1);
  for (const char* name : {"squared", "log", "betting"}) {
    const auto& e = cells[0].at("estimators").at(name);
    const double coverage = e.at("coverage").get<double>();
    CHECK(coverage >= 0.0);
    CHECK(coverage <= 1.0);
    CHECK(e.at("median_mae").get<double>() >= 0.0);
    CHECK(e.at("replications").get<std::size_t>() == 3);
  }
}

TEST_CASE("variance sweep produces one cell per scale with a shared class") {
  ExperimentConfig cfg = small_config();
  cfg.estimators = {Estimator::Betting};
  cfg.generator.label_family = LabelFamily::ThreePoint;
  cfg.variance_scales = {0.02, 0.4};
  const ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.summary.at("cells").size() == 2);
  const double lo = res.summary.at("cells")[0].at("sigma2").get<double>();
  const double hi = res.summary.at("cells")[1].at("sigma2").get<double>();
  CHECK(lo < hi);
  CHECK(res.summary.at("cells")[0].at("first_order_q").get<double>() ==
        res.summary.at("cells")[1].at("first_order_q").get<double>());
}

TEST_CASE("n sweeps produce per-cell summaries and monotonicity diagnostics") {
  ExperimentConfig cfg = small_config();
  cfg.estimators = {Estimator::Log};
  cfg.replications = 8;
  cfg.n_values = {20, 160};
  const ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.summary.at("cells").size() == 2);
  CHECK(res.records.size() == 16);
  CHECK(res.summary.at("median_mae_nonincreasing_in_n").contains("log"));
  // every record carries the n of its cell
  CHECK(res.records.front().n == 20);
  CHECK(res.records.back().n == 160);
}

TEST_CASE("config parses from JSON") {
  const auto j = nlohmann::json::parse(R"({
    "seed": 7, "delta": 0.05, "replications": 4,
    "estimators": ["log", "betting"],
    "n": [100, 200],
    "variance_scale": [0.1, 0.2],
    "grid": {"mode": "exact", "eps": 0.01},
    "record_timing": true,
    "instance": {
      "kind": "tabulated", "support_size": 7, "class_size": 9,
      "label_family": "threepoint", "perturbation_magnitudes": [0.01, 0.05],
      "f_star": {"mode": "constant", "value": 0.5}
    }
  })");
  const ExperimentConfig cfg = experiment_config_from_json(j);
  CHECK(cfg.seed == 7);
  CHECK(cfg.delta == 0.05);
  CHECK(cfg.replications == 4);
  REQUIRE(cfg.estimators.size() == 2);
  CHECK(cfg.estimators[0] == Estimator::Log);
  CHECK(cfg.n_values == std::vector<std::size_t>{100, 200});
  CHECK(cfg.variance_scales == std::vector<double>{0.1, 0.2});
  CHECK(cfg.grid.mode == GridMode::Exact);
  CHECK(cfg.grid.exact_eps.has_value());
  CHECK(cfg.record_timing);
  CHECK(cfg.generator.support_size == 7);
  CHECK(cfg.generator.class_size == 9);
  CHECK(cfg.generator.f_star.mode == FStarSpec::Mode::Constant);

  CHECK_THROWS_AS(
      experiment_config_from_json(nlohmann::json::parse(R"({"estimators": ["nope"]})")),
      std::invalid_argument);
}

TEST_CASE("linear instances fit over a capped cover") {
  ExperimentConfig cfg;
  cfg.seed = 2024;
  cfg.replications = 2;
  cfg.estimators = {Estimator::Betting};
  cfg.n_values = {40};
  cfg.linear_instance = true;
  cfg.linear_generator.dimension = 2;
  cfg.linear_generator.support_size = 6;
  cfg.linear_generator.label_family = LabelFamily::ThreePoint;
  cfg.cover_cap = 60;
  const ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.records.size() == 2);
  for (const auto& rec : res.records) {
    CHECK(rec.mae >= 0.0);
    CHECK(rec.bound_rhs > 0.0);  // linear-class bound
  }
  CHECK(res.summary.at("cells")[0].at("class_size").get<std::size_t>() <= 60);
}
