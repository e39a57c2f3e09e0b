// betreg: fit [0,1]-valued regression estimators (squared / log / betting
// min-max), generate synthetic instances, run replication sweeps against the
// closed-form bounds, and check the library's analytic invariants.
//
// Exit codes: 0 success, 1 failed verification, 2 malformed input files,
// 3 infeasible flags.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "betreg/experiment.hpp"
#include "betreg/io.hpp"
#include "betreg/parallel.hpp"

namespace {

using betreg::io_error;
using nlohmann::json;

constexpr int kExitBadInput = 2;
constexpr int kExitBadFlags = 3;

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;  // +inf log losses serialize as null
}

void emit(const json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw io_error("cannot write " + out_path);
    out << text;
  }
}

struct FitArgs {
  std::string estimator = "betting";
  std::string grid = "geometric";
  double eps = 0.0;
  double base = 2.0;
  int refine_rounds = 2;
  std::string class_path;
  std::string data_path;
  std::string out_path;
  int threads = 0;
};

int cmd_fit(const FitArgs& args) {
  const betreg::TabulatedClassFile file = betreg::load_class_file(args.class_path);
  const betreg::Dataset data = betreg::load_dataset_csv(args.data_path, &file.space);

  betreg::GridSpec spec;
  spec.mode = (args.grid == "exact") ? betreg::GridMode::Exact
                                     : betreg::GridMode::Geometric;
  if (args.eps > 0.0) spec.exact_eps = args.eps;
  spec.geometric_base = args.base;
  spec.refine_rounds = args.refine_rounds;

  const betreg::Estimator est = betreg::estimator_from_string(args.estimator);
  betreg::FitReport report;
  double slack = 0.0;
  switch (est) {
    case betreg::Estimator::Squared:
      report = betreg::fit_squared(file.hypothesis_class, data);
      break;
    case betreg::Estimator::Log:
      report = betreg::fit_log(file.hypothesis_class, data);
      break;
    case betreg::Estimator::Betting: {
      report = betreg::fit_betting(file.hypothesis_class, data, spec,
                                   betreg::resolve_threads(args.threads));
      slack = betreg::grid_slack(betreg::build_grid(spec, data.size()));
      break;
    }
  }

  json j;
  j["estimator"] = args.estimator;
  j["chosen_index"] = report.chosen_index;
  j["objective_value"] = finite_or_null(report.objective_value);
  json per = json::array();
  for (const double v : report.per_candidate_objectives) per.push_back(finite_or_null(v));
  j["per_candidate_objectives"] = std::move(per);
  if (report.inner_witness) {
    j["inner_witness"] = {{"h_index", report.inner_witness->h_index},
                          {"phi", report.inner_witness->phi},
                          {"c", report.inner_witness->c}};
  }
  j["grid_slack"] = slack;
  j["degenerate"] = report.degenerate;
  emit(j, args.out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"[0,1]-valued regression via squared, log, and betting losses"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "fit one estimator on a class + dataset");
  fit->add_option("--estimator", fit_args.estimator, "squared | log | betting")
      ->check(CLI::IsMember({"squared", "log", "betting"}));
  fit->add_option("--grid", fit_args.grid, "exact | geometric")
      ->check(CLI::IsMember({"exact", "geometric"}));
  fit->add_option("--eps", fit_args.eps, "exact grid step (default 1/(4n))");
  fit->add_option("--base", fit_args.base, "geometric grid base");
  fit->add_option("--refine-rounds", fit_args.refine_rounds, "geometric refinement rounds");
  fit->add_option("--class", fit_args.class_path, "tabulated class JSON")->required();
  fit->add_option("--data", fit_args.data_path, "dataset CSV")->required();
  fit->add_option("--out", fit_args.out_path, "output path (default stdout)");
  fit->add_option("--threads", fit_args.threads, "worker cap (0 = BETTING_THREADS/auto)");

  std::string exp_config;
  std::string exp_out_csv;
  std::string exp_out_summary;
  auto* exp = app.add_subcommand("experiment", "replication sweep from a JSON config");
  exp->add_option("--config", exp_config, "experiment config JSON")->required();
  exp->add_option("--out", exp_out_csv, "records CSV path (default stdout)");
  exp->add_option("--summary", exp_out_summary, "summary JSON path");

  betreg::VerifyOptions vopt;
  std::vector<std::string> vsuites;
  auto* ver = app.add_subcommand("verify", "run analytic property suites");
  ver->add_option("--suite", vsuites,
                  "structural | domain | variance-bound | lipschitz | oracle | gap "
                  "(repeatable; default all)");
  ver->add_option("--seed", vopt.seed, "suite RNG seed");
  ver->add_option("--fuzz-count", vopt.fuzz_count, "domain-safety tuples");
  ver->add_option("--variance-models", vopt.variance_models, "label models for the variance-bound audit");
  ver->add_option("--lipschitz-pairs", vopt.lipschitz_pairs, "tabulated pairs");
  ver->add_option("--oracle-instances", vopt.oracle_instances, "grid-vs-oracle instances");
  ver->add_option("--gap-eps", vopt.gap_eps, "gap example eps");
  std::string ver_out;
  ver->add_option("--out", ver_out, "report path (default stdout)");

  std::string synth_config;
  std::string synth_class_out;
  std::string synth_data_out;
  std::size_t synth_n = 0;
  std::uint64_t synth_seed = 0;
  bool synth_seed_set = false;
  auto* synth = app.add_subcommand("synth", "emit a synthetic instance to files");
  synth->add_option("--config", synth_config, "generator config JSON")->required();
  synth->add_option("--out-class", synth_class_out, "instance JSON path")->required();
  synth->add_option("--out-data", synth_data_out, "optional dataset CSV path");
  synth->add_option("--n", synth_n, "dataset size for --out-data");
  synth
      ->add_option_function<std::uint64_t>(
          "--seed",
          [&](const std::uint64_t s) {
            synth_seed = s;
            synth_seed_set = true;
          },
          "override the config seed")
      ->expected(1);

  std::string bound_kind;
  double bound_q = 0.0;
  double bound_sigma2 = 0.0;
  double bound_delta_L = 0.0;
  std::size_t bound_n = 0;
  std::size_t bound_class_size = 1;
  std::size_t bound_d = 1;
  double bound_delta = 0.1;
  auto* bnd = app.add_subcommand("bounds", "evaluate a bound right-hand side");
  bnd->add_option("--bound", bound_kind, "first | second | linear")
      ->required()
      ->check(CLI::IsMember({"first", "second", "linear"}));
  bnd->add_option("--q", bound_q, "E[f*(1-f*)] (first)");
  bnd->add_option("--sigma2", bound_sigma2, "E[sigma_x^2] (second/linear)");
  bnd->add_option("--delta-L", bound_delta_L, "excess betting loss (second)");
  bnd->add_option("--n", bound_n, "sample count")->required();
  bnd->add_option("--class-size", bound_class_size, "|F| (first/second)");
  bnd->add_option("--d", bound_d, "dimension (linear)");
  bnd->add_option("--delta", bound_delta, "confidence parameter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitBadFlags;
  }

  try {
    if (fit->parsed()) return cmd_fit(fit_args);

    if (exp->parsed()) {
      std::ifstream in(exp_config);
      if (!in) throw io_error("cannot open " + exp_config);
      json cj;
      try {
        in >> cj;
      } catch (const json::exception& e) {
        throw io_error(exp_config + ": " + std::string(e.what()));
      }
      betreg::ExperimentConfig cfg;
      try {
        cfg = betreg::experiment_config_from_json(cj);
      } catch (const std::exception& e) {
        throw io_error(exp_config + ": " + std::string(e.what()));
      }
      const betreg::ExperimentResult result = betreg::run_experiment(cfg);
      if (exp_out_csv.empty() || exp_out_csv == "-") {
        betreg::write_records_csv(std::cout, result.records);
      } else {
        std::ofstream out(exp_out_csv, std::ios::binary);
        if (!out) throw io_error("cannot write " + exp_out_csv);
        betreg::write_records_csv(out, result.records);
      }
      if (!exp_out_summary.empty()) emit(result.summary, exp_out_summary);
      return 0;
    }

    if (ver->parsed()) {
      vopt.suites = vsuites;
      const json report = betreg::run_verify(vopt);
      emit(report, ver_out);
      return report.at("all_passed").get<bool>() ? 0 : 1;
    }

    if (synth->parsed()) {
      std::ifstream in(synth_config);
      if (!in) throw io_error("cannot open " + synth_config);
      json cj;
      try {
        in >> cj;
      } catch (const json::exception& e) {
        throw io_error(synth_config + ": " + std::string(e.what()));
      }
      betreg::ExperimentConfig wrapper;  // reuse the instance parser
      json instance_json = cj.contains("instance") ? cj.at("instance") : cj;
      betreg::GeneratorConfig gen;
      try {
        json wrapped;
        wrapped["instance"] = instance_json;
        wrapper = betreg::experiment_config_from_json(wrapped);
        gen = wrapper.generator;
      } catch (const std::exception& e) {
        throw io_error(synth_config + ": " + std::string(e.what()));
      }
      const std::uint64_t seed = synth_seed_set ? synth_seed : gen.seed;
      const betreg::SyntheticInstance inst = betreg::make_instance(gen, seed);
      betreg::save_instance_file(synth_class_out, inst);
      if (!synth_data_out.empty()) {
        if (synth_n == 0) {
          std::cerr << "synth: --out-data requires --n >= 1\n";
          return kExitBadFlags;
        }
        const betreg::Dataset data =
            betreg::sample_dataset(inst, synth_n, betreg::replication_seed(seed, 0));
        betreg::save_dataset_csv(synth_data_out, data);
      }
      return 0;
    }

    if (bnd->parsed()) {
      betreg::BoundInputs inputs{bound_n, bound_class_size, bound_delta, std::nullopt};
      json j;
      j["bound"] = bound_kind;
      j["n"] = bound_n;
      j["delta"] = bound_delta;
      if (bound_kind == "first") {
        j["class_size"] = bound_class_size;
        j["q"] = bound_q;
        j["value"] = betreg::first_order_bound(bound_q, inputs);
      } else if (bound_kind == "second") {
        j["class_size"] = bound_class_size;
        j["sigma2"] = bound_sigma2;
        j["delta_L"] = bound_delta_L;
        j["value"] = betreg::second_order_bound(bound_sigma2, inputs, bound_delta_L);
      } else {
        j["d"] = bound_d;
        j["sigma2"] = bound_sigma2;
        j["value"] = betreg::linear_bound(bound_sigma2, bound_n, bound_d, bound_delta);
      }
      emit(j, "");
      return 0;
    }
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadFlags;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadFlags;
}
