#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "betreg/bounds.hpp"
#include "betreg/solver.hpp"
#include "betreg/synthetic.hpp"

namespace betreg {

enum class Estimator { Squared, Log, Betting };

std::string to_string(Estimator e);
Estimator estimator_from_string(const std::string& name);

// One fitted replication. bound_rhs is the estimator's theoretical bound:
// first-order at worst-case q for squared, first-order at the instance's q
// for log, second-order (plus grid slack) for betting on tabulated instances
// and the linear-class bound on linear ones.
struct ExperimentRecord {
  std::size_t replication = 0;
  Estimator estimator = Estimator::Squared;
  std::size_t n = 0;
  double sigma2 = 0.0;
  double first_order_q = 0.0;
  double mae = 0.0;
  double bound_rhs = 0.0;
  double objective = 0.0;
  double grid_slack = 0.0;
  std::uint64_t seed = 0;
  std::int64_t wall_ms = 0;
};

inline constexpr const char* kRecordHeader =
    "replication,estimator,n,sigma2,first_order_q,mae,bound_rhs,objective,"
    "grid_slack,seed,wall_ms";

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);

struct ExperimentConfig {
  std::uint64_t seed = 0;
  double delta = 0.1;
  std::size_t replications = 1;
  std::vector<Estimator> estimators = {Estimator::Squared, Estimator::Log,
                                       Estimator::Betting};
  std::vector<std::size_t> n_values = {400};
  std::vector<double> variance_scales;  // empty = use the instance's scale
  GridSpec grid;
  bool record_timing = false;  // off keeps CSVs byte-reproducible
  int threads = 0;

  bool linear_instance = false;
  GeneratorConfig generator;              // tabulated instances
  LinearGeneratorConfig linear_generator; // linear instances
  double cover_eps = 0.0;                 // 0 = 1/n^2
  std::size_t cover_cap = 1000000;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

struct ExperimentResult {
  std::vector<ExperimentRecord> records;
  nlohmann::json summary;
};

// Replications run concurrently on derived seeds; records are emitted in
// (sweep cell, replication, estimator) order regardless of scheduling.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Property-suite options for the verify command.
struct VerifyOptions {
  std::vector<std::string> suites;  // empty = all
  std::uint64_t seed = 20240301;
  std::size_t fuzz_count = 1000000;
  std::size_t variance_models = 1000;
  std::size_t lipschitz_pairs = 50;
  std::size_t lipschitz_n = 100;
  std::size_t oracle_instances = 5;
  double gap_eps = 0.01;
};

// Runs the analytic invariant checks (structural zeros, domain safety, the
// variance upper bound, the sup-norm Lipschitz constant of L, grid-vs-oracle
// gaps, the two-point gap example); returns per-suite reports with measured
// margins and an overall flag.
nlohmann::json run_verify(const VerifyOptions& options);

}  // namespace betreg
