#include "betreg/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "betreg/io.hpp"
#include "betreg/parallel.hpp"

namespace betreg {

using nlohmann::json;

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::Squared: return "squared";
    case Estimator::Log: return "log";
    case Estimator::Betting: return "betting";
  }
  throw std::logic_error("unknown estimator");
}

Estimator estimator_from_string(const std::string& name) {
  if (name == "squared") return Estimator::Squared;
  if (name == "log") return Estimator::Log;
  if (name == "betting") return Estimator::Betting;
  throw std::invalid_argument("unknown estimator '" + name + "'");
}

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << kRecordHeader << "\n";
  for (const auto& r : records) {
    out << r.replication << ',' << to_string(r.estimator) << ',' << r.n << ','
        << format_double(r.sigma2) << ',' << format_double(r.first_order_q) << ','
        << format_double(r.mae) << ',' << format_double(r.bound_rhs) << ','
        << format_double(r.objective) << ',' << format_double(r.grid_slack) << ','
        << r.seed << ',' << r.wall_ms << "\n";
  }
}

namespace {

GridSpec grid_from_json(const json& j) {
  GridSpec spec;
  if (j.contains("mode")) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "exact") {
      spec.mode = GridMode::Exact;
    } else if (mode == "geometric") {
      spec.mode = GridMode::Geometric;
    } else {
      throw std::invalid_argument("grid mode must be exact or geometric");
    }
  }
  if (j.contains("eps") && !j.at("eps").is_null()) {
    spec.exact_eps = j.at("eps").get<double>();
  }
  if (j.contains("base")) spec.geometric_base = j.at("base").get<double>();
  if (j.contains("refine_rounds")) spec.refine_rounds = j.at("refine_rounds").get<int>();
  return spec;
}

LabelFamily family_from_string(const std::string& name) {
  if (name == "bernoulli") return LabelFamily::Bernoulli;
  if (name == "threepoint") return LabelFamily::ThreePoint;
  if (name == "deterministic") return LabelFamily::Deterministic;
  throw std::invalid_argument("unknown label family '" + name + "'");
}

GeneratorConfig generator_from_json(const json& j) {
  GeneratorConfig g;
  if (j.contains("support_size")) g.support_size = j.at("support_size").get<std::size_t>();
  if (j.contains("class_size")) g.class_size = j.at("class_size").get<std::size_t>();
  if (j.contains("weights") && !j.at("weights").is_string()) {
    g.weights = j.at("weights").get<std::vector<double>>();
  }
  if (j.contains("label_family")) {
    g.label_family = family_from_string(j.at("label_family").get<std::string>());
  }
  if (j.contains("variance_scale")) g.variance_scale = j.at("variance_scale").get<double>();
  if (j.contains("perturbation_magnitudes")) {
    g.perturbation_magnitudes =
        j.at("perturbation_magnitudes").get<std::vector<double>>();
  }
  if (j.contains("per_point_magnitudes")) {
    g.per_point_magnitudes = j.at("per_point_magnitudes").get<bool>();
  }
  if (j.contains("f_star")) {
    const auto& fj = j.at("f_star");
    const std::string mode = fj.at("mode").get<std::string>();
    if (mode == "constant") {
      g.f_star.mode = FStarSpec::Mode::Constant;
      g.f_star.value = fj.at("value").get<double>();
    } else if (mode == "uniform") {
      g.f_star.mode = FStarSpec::Mode::Uniform;
      if (fj.contains("lo")) g.f_star.lo = fj.at("lo").get<double>();
      if (fj.contains("hi")) g.f_star.hi = fj.at("hi").get<double>();
    } else {
      throw std::invalid_argument("f_star mode must be uniform or constant");
    }
  }
  if (j.contains("seed")) g.seed = j.at("seed").get<std::uint64_t>();
  return g;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig cfg;
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
  if (j.contains("replications")) cfg.replications = j.at("replications").get<std::size_t>();
  if (j.contains("estimators")) {
    cfg.estimators.clear();
    for (const auto& e : j.at("estimators")) {
      cfg.estimators.push_back(estimator_from_string(e.get<std::string>()));
    }
  }
  if (j.contains("n")) {
    cfg.n_values.clear();
    if (j.at("n").is_array()) {
      for (const auto& v : j.at("n")) cfg.n_values.push_back(v.get<std::size_t>());
    } else {
      cfg.n_values.push_back(j.at("n").get<std::size_t>());
    }
  }
  if (j.contains("variance_scale")) {
    if (j.at("variance_scale").is_array()) {
      cfg.variance_scales = j.at("variance_scale").get<std::vector<double>>();
    } else {
      cfg.variance_scales = {j.at("variance_scale").get<double>()};
    }
  }
  if (j.contains("grid")) cfg.grid = grid_from_json(j.at("grid"));
  if (j.contains("record_timing")) cfg.record_timing = j.at("record_timing").get<bool>();
  if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
  if (j.contains("instance")) {
    const auto& ij = j.at("instance");
    const std::string kind =
        ij.contains("kind") ? ij.at("kind").get<std::string>() : "tabulated";
    if (kind == "linear") {
      cfg.linear_instance = true;
      auto& lg = cfg.linear_generator;
      if (ij.contains("dimension")) lg.dimension = ij.at("dimension").get<std::size_t>();
      if (ij.contains("support_size")) lg.support_size = ij.at("support_size").get<std::size_t>();
      if (ij.contains("theta_norm")) lg.theta_norm = ij.at("theta_norm").get<double>();
      if (ij.contains("label_family")) {
        lg.label_family = family_from_string(ij.at("label_family").get<std::string>());
      }
      if (ij.contains("variance_scale")) lg.variance_scale = ij.at("variance_scale").get<double>();
      if (ij.contains("cover_eps")) cfg.cover_eps = ij.at("cover_eps").get<double>();
      if (ij.contains("cover_cap")) cfg.cover_cap = ij.at("cover_cap").get<std::size_t>();
    } else if (kind == "tabulated") {
      cfg.generator = generator_from_json(ij);
    } else {
      throw std::invalid_argument("instance kind must be tabulated or linear");
    }
  }
  return cfg;
}

namespace {

struct Cell {
  std::size_t n = 0;
  double variance_scale = 0.0;
  bool has_scale = false;
};

struct CellContext {
  SyntheticInstance instance;
  HypothesisClass fit_class;  // cover for linear instances, else the class
  double sigma2 = 0.0;
  double first_order_q = 0.0;
  double slack = 0.0;
  BoundInputs inputs;
  std::uint64_t base_seed = 0;
};

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return (v.size() % 2 == 1) ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.n_values.empty()) {
    throw std::invalid_argument("run_experiment: no sample sizes");
  }
  if (config.estimators.empty()) {
    throw std::invalid_argument("run_experiment: no estimators");
  }
  if (!(config.delta > 0.0 && config.delta < 1.0)) {
    throw std::invalid_argument("run_experiment: delta must lie in (0,1)");
  }

  std::vector<Cell> cells;
  for (const std::size_t n : config.n_values) {
    if (config.variance_scales.empty()) {
      cells.push_back({n, 0.0, false});
    } else {
      for (const double s : config.variance_scales) cells.push_back({n, s, true});
    }
  }

  ExperimentResult result;
  json cell_summaries = json::array();

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const Cell& cell = cells[ci];
    CellContext ctx;
    if (config.linear_instance) {
      LinearGeneratorConfig lg = config.linear_generator;
      if (cell.has_scale) lg.variance_scale = cell.variance_scale;
      ctx.instance = make_linear_instance(lg, config.seed);
      const double requested =
          config.cover_eps > 0.0
              ? config.cover_eps
              : 1.0 / (static_cast<double>(cell.n) * static_cast<double>(cell.n));
      double eps_used = requested;
      ctx.fit_class =
          linear_cover_capped(lg.dimension, requested, config.cover_cap, &eps_used);
    } else {
      GeneratorConfig g = config.generator;
      if (cell.has_scale) g.variance_scale = cell.variance_scale;
      ctx.instance = make_instance(g, config.seed);
      ctx.fit_class = ctx.instance.hypothesis_class;
    }
    ctx.sigma2 = ctx.instance.expected_sigma2();
    ctx.first_order_q = ctx.instance.expected_first_order();
    ctx.inputs = BoundInputs{cell.n, ctx.fit_class.size(), config.delta, std::nullopt};
    ctx.slack = grid_slack(build_grid(config.grid, cell.n));
    ctx.base_seed = splitmix64(config.seed ^ (0xC0FFEEULL + ci));

    const std::size_t R = config.replications;
    std::vector<std::vector<ExperimentRecord>> rows(R);
    std::vector<std::string> failures(R);
    parallel_for(R, config.threads, [&](std::size_t r) {
      const std::uint64_t ds_seed = replication_seed(ctx.base_seed, r);
      try {
      const Dataset data = sample_dataset(ctx.instance, cell.n, ds_seed);
      for (const Estimator est : config.estimators) {
        const auto t0 = std::chrono::steady_clock::now();
        FitReport report;
        switch (est) {
          case Estimator::Squared: report = fit_squared(ctx.fit_class, data); break;
          case Estimator::Log: report = fit_log(ctx.fit_class, data); break;
          case Estimator::Betting:
            report = fit_betting(ctx.fit_class, data, config.grid, 1);
            break;
        }
        const auto t1 = std::chrono::steady_clock::now();

        const Hypothesis& chosen = ctx.fit_class.members[report.chosen_index];
        const PopulationQuantities pq = population_quantities(
            chosen, ctx.instance.hypothesis_class, ctx.instance.space,
            ctx.instance.variance_per_point());

        ExperimentRecord rec;
        rec.replication = r;
        rec.estimator = est;
        rec.n = cell.n;
        rec.sigma2 = ctx.sigma2;
        rec.first_order_q = ctx.first_order_q;
        rec.mae = pq.mae;
        rec.objective = report.objective_value;
        rec.seed = ds_seed;
        switch (est) {
          case Estimator::Squared:
            rec.bound_rhs = first_order_bound(0.25, ctx.inputs);
            break;
          case Estimator::Log:
            rec.bound_rhs = first_order_bound(ctx.first_order_q, ctx.inputs);
            break;
          case Estimator::Betting:
            if (config.linear_instance) {
              rec.bound_rhs = linear_bound(ctx.sigma2, cell.n,
                                           config.linear_generator.dimension,
                                           config.delta);
            } else {
              rec.bound_rhs = second_order_bound(ctx.sigma2, ctx.inputs, 0.0) + ctx.slack;
            }
            rec.grid_slack = ctx.slack;
            break;
        }
        if (config.record_timing) {
          rec.wall_ms =
              std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
        }
        rows[r].push_back(rec);
      }
      } catch (const std::exception& e) {
        // flagged row per estimator (NaN metrics); the sweep keeps going
        failures[r] = e.what();
        rows[r].clear();
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (const Estimator est : config.estimators) {
          ExperimentRecord rec;
          rec.replication = r;
          rec.estimator = est;
          rec.n = cell.n;
          rec.sigma2 = ctx.sigma2;
          rec.first_order_q = ctx.first_order_q;
          rec.mae = nan;
          rec.bound_rhs = nan;
          rec.objective = nan;
          rec.seed = ds_seed;
          rows[r].push_back(rec);
        }
      }
    });

    json per_estimator = json::object();
    for (const Estimator est : config.estimators) {
      std::vector<double> maes;
      std::size_t covered = 0;
      std::size_t count = 0;
      for (const auto& rrows : rows) {
        for (const auto& rec : rrows) {
          if (rec.estimator != est) continue;
          ++count;
          if (!std::isnan(rec.mae)) maes.push_back(rec.mae);
          if (rec.mae <= rec.bound_rhs) ++covered;
        }
      }
      json ej;
      ej["replications"] = count;
      ej["coverage"] = count == 0 ? 1.0 : static_cast<double>(covered) / count;
      ej["median_mae"] = median(maes);
      per_estimator[to_string(est)] = std::move(ej);
    }
    json cj;
    cj["n"] = cell.n;
    if (cell.has_scale) cj["variance_scale"] = cell.variance_scale;
    cj["sigma2"] = ctx.sigma2;
    cj["first_order_q"] = ctx.first_order_q;
    cj["class_size"] = ctx.fit_class.size();
    cj["estimators"] = std::move(per_estimator);
    json failed = json::array();
    for (std::size_t r = 0; r < R; ++r) {
      if (!failures[r].empty()) {
        failed.push_back({{"replication", r}, {"error", failures[r]}});
      }
    }
    cj["failed_replications"] = std::move(failed);
    cell_summaries.push_back(std::move(cj));

    for (auto& rrows : rows) {
      for (auto& rec : rrows) result.records.push_back(rec);
    }
  }

  // monotonicity diagnostics along the n sweep: medians should not increase
  json monotone = json::object();
  if (config.n_values.size() > 1) {
    for (const Estimator est : config.estimators) {
      bool nonincreasing = true;
      double prev = std::numeric_limits<double>::infinity();
      for (const auto& cj : cell_summaries) {
        const double m = cj.at("estimators").at(to_string(est)).at("median_mae");
        if (m > prev + 1e-12) nonincreasing = false;
        prev = m;
      }
      monotone[to_string(est)] = nonincreasing;
    }
  }

  result.summary["cells"] = std::move(cell_summaries);
  result.summary["median_mae_nonincreasing_in_n"] = std::move(monotone);
  result.summary["delta"] = config.delta;
  result.summary["seed"] = config.seed;
  result.summary["replications"] = config.replications;
  return result;
}

}  // namespace betreg
