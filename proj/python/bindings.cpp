#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "betreg/experiment.hpp"
#include "betreg/io.hpp"

namespace py = pybind11;
using namespace betreg;

namespace {

GridSpec make_grid_spec(const std::string& mode, std::optional<double> eps,
                        double base, int refine_rounds) {
  GridSpec spec;
  if (mode == "exact") {
    spec.mode = GridMode::Exact;
  } else if (mode == "geometric") {
    spec.mode = GridMode::Geometric;
  } else {
    throw std::invalid_argument("grid mode must be 'exact' or 'geometric'");
  }
  spec.exact_eps = eps;
  spec.geometric_base = base;
  spec.refine_rounds = refine_rounds;
  return spec;
}

Dataset dataset_from_rows(
    const std::vector<std::vector<double>>& features, const std::vector<double>& y,
    const std::optional<std::vector<std::size_t>>& support_index) {
  if (features.size() != y.size()) {
    throw std::invalid_argument("features and labels differ in length");
  }
  if (support_index && support_index->size() != y.size()) {
    throw std::invalid_argument("support_index length mismatch");
  }
  std::vector<DataPoint> pts;
  pts.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    DataPoint p;
    p.features = features[i];
    p.y = y[i];
    if (support_index) p.support_index = (*support_index)[i];
    pts.push_back(std::move(p));
  }
  return Dataset(std::move(pts));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "regression with [0,1]-valued labels: squared/log ERM and the "
            "betting min-max estimator, with explicit-constant bounds";

  py::class_<Tabulated>(m, "Tabulated")
      .def(py::init<std::vector<double>>(), py::arg("values"))
      .def_readonly("values", &Tabulated::values);

  py::class_<Linear>(m, "Linear")
      .def(py::init<std::vector<double>>(), py::arg("theta"))
      .def_readonly("theta", &Linear::theta);

  py::class_<DataPoint>(m, "DataPoint")
      .def(py::init([](std::vector<double> features, double y,
                       std::optional<std::size_t> support_index) {
             DataPoint p;
             p.features = std::move(features);
             p.y = y;
             p.support_index = support_index;
             return p;
           }),
           py::arg("features"), py::arg("y"), py::arg("support_index") = py::none())
      .def_readonly("features", &DataPoint::features)
      .def_readonly("y", &DataPoint::y)
      .def_readonly("support_index", &DataPoint::support_index);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<std::vector<DataPoint>>(), py::arg("points"))
      .def(py::init(&dataset_from_rows), py::arg("features"), py::arg("y"),
           py::arg("support_index") = py::none())
      .def("__len__", &Dataset::size)
      .def_property_readonly("feature_dim", &Dataset::feature_dim)
      .def_property_readonly("fully_indexed", &Dataset::fully_indexed)
      .def("points", &Dataset::points);

  py::class_<FiniteSupport>(m, "FiniteSupport")
      .def(py::init([](std::vector<std::vector<double>> points,
                       std::vector<double> weights) {
             FiniteSupport s{std::move(points), std::move(weights)};
             validate(s);
             return s;
           }),
           py::arg("points"), py::arg("weights"))
      .def_readonly("points", &FiniteSupport::points)
      .def_readonly("weights", &FiniteSupport::weights);

  py::class_<HypothesisClass>(m, "HypothesisClass")
      .def(py::init([](std::vector<Hypothesis> members,
                       std::optional<std::size_t> star_index) {
             HypothesisClass cls{std::move(members), star_index};
             validate(cls);
             return cls;
           }),
           py::arg("members"), py::arg("star_index") = py::none())
      .def_readonly("members", &HypothesisClass::members)
      .def_readonly("star_index", &HypothesisClass::star_index)
      .def("__len__", &HypothesisClass::size);

  m.def("clip", &clip, py::arg("v"), py::arg("lo"), py::arg("hi"));
  m.def("evaluate", &evaluate, py::arg("hypothesis"), py::arg("point"));
  m.def("evaluate_on_support", &evaluate_on_support, py::arg("hypothesis"),
        py::arg("space"), py::arg("index"));

  m.def("squared_loss", &squared_loss, py::arg("f"), py::arg("dataset"));
  m.def(
      "log_loss",
      [](const Hypothesis& f, const Dataset& d) { return log_loss(f, d).value; },
      py::arg("f"), py::arg("dataset"),
      "mean log loss; +inf when some point diverges");
  m.def("betting_term", &betting_term, py::arg("y"), py::arg("f_x"), py::arg("h_x"),
        py::arg("phi"), py::arg("c"));
  m.def("betting_H", &betting_H, py::arg("h"), py::arg("f"), py::arg("dataset"),
        py::arg("phi"), py::arg("c"));

  py::class_<BettingGrid>(m, "BettingGrid")
      .def_readonly("phi_values", &BettingGrid::phi_values)
      .def_readonly("c_values", &BettingGrid::c_values)
      .def_readonly("phi_bar", &BettingGrid::phi_bar)
      .def_property_readonly("slack", &grid_slack);

  m.def(
      "build_grid",
      [](std::size_t n, const std::string& mode, std::optional<double> eps,
         double base, int refine_rounds) {
        return build_grid(make_grid_spec(mode, eps, base, refine_rounds), n);
      },
      py::arg("n"), py::arg("mode") = "geometric", py::arg("eps") = py::none(),
      py::arg("base") = 2.0, py::arg("refine_rounds") = 2);

  py::class_<InnerWitness>(m, "InnerWitness")
      .def_readonly("h_index", &InnerWitness::h_index)
      .def_readonly("phi", &InnerWitness::phi)
      .def_readonly("c", &InnerWitness::c);

  py::class_<InnerMaxResult>(m, "InnerMaxResult")
      .def_readonly("value", &InnerMaxResult::value)
      .def_readonly("witness", &InnerMaxResult::witness);

  m.def("inner_max", &inner_max, py::arg("f"), py::arg("hypothesis_class"),
        py::arg("dataset"), py::arg("grid"));

  py::class_<FitReport>(m, "FitReport")
      .def_readonly("chosen_index", &FitReport::chosen_index)
      .def_readonly("objective_value", &FitReport::objective_value)
      .def_readonly("inner_witness", &FitReport::inner_witness)
      .def_readonly("per_candidate_objectives", &FitReport::per_candidate_objectives)
      .def_readonly("degenerate", &FitReport::degenerate);

  m.def(
      "fit_betting",
      [](const HypothesisClass& F, const Dataset& D, const std::string& mode,
         std::optional<double> eps, double base, int refine_rounds, int threads) {
        return fit_betting(F, D, make_grid_spec(mode, eps, base, refine_rounds),
                           threads);
      },
      py::arg("hypothesis_class"), py::arg("dataset"), py::arg("grid") = "geometric",
      py::arg("eps") = py::none(), py::arg("base") = 2.0,
      py::arg("refine_rounds") = 2, py::arg("threads") = 1);
  m.def("fit_squared", &fit_squared, py::arg("hypothesis_class"), py::arg("dataset"));
  m.def("fit_log", &fit_log, py::arg("hypothesis_class"), py::arg("dataset"));

  m.def("linear_cover", &linear_cover, py::arg("d"), py::arg("eps"),
        py::arg("max_members") = 1000000);
  m.def(
      "linear_cover_capped",
      [](std::size_t d, double eps, std::size_t max_members) {
        double eps_used = eps;
        HypothesisClass cover = linear_cover_capped(d, eps, max_members, &eps_used);
        return py::make_tuple(std::move(cover), eps_used);
      },
      py::arg("d"), py::arg("eps"), py::arg("max_members") = 1000000,
      "returns (cover, eps_used)");
  m.def("oracle_inner_max", &oracle_inner_max, py::arg("f"),
        py::arg("hypothesis_class"), py::arg("dataset"), py::arg("fine_eps"),
        py::arg("max_cells") = std::size_t{400000000});

  m.def(
      "first_order_bound",
      [](double q, std::size_t n, std::size_t class_size, double delta) {
        return first_order_bound(q, BoundInputs{n, class_size, delta, std::nullopt});
      },
      py::arg("q"), py::arg("n"), py::arg("class_size"), py::arg("delta"));
  m.def(
      "second_order_bound",
      [](double sigma2, std::size_t n, std::size_t class_size, double delta,
         double delta_L) {
        return second_order_bound(sigma2, BoundInputs{n, class_size, delta, std::nullopt},
                                  delta_L);
      },
      py::arg("sigma2"), py::arg("n"), py::arg("class_size"), py::arg("delta"),
      py::arg("delta_L") = 0.0);
  m.def("linear_bound", &linear_bound, py::arg("sigma2"), py::arg("n"), py::arg("d"),
        py::arg("delta"));
  m.def("gap_example", &gap_example, py::arg("eps"));

  py::class_<PopulationQuantities>(m, "PopulationQuantities")
      .def_readonly("first_order_q", &PopulationQuantities::first_order_q)
      .def_readonly("second_order_q", &PopulationQuantities::second_order_q)
      .def_readonly("mae", &PopulationQuantities::mae);

  m.def("population_quantities", &population_quantities, py::arg("f"),
        py::arg("hypothesis_class"), py::arg("space"), py::arg("variance_per_point"));

  py::class_<Bernoulli>(m, "Bernoulli")
      .def(py::init<double>(), py::arg("mean"))
      .def_readonly("mean", &Bernoulli::mean);
  py::class_<ThreePoint>(m, "ThreePoint")
      .def(py::init<double, double, double>(), py::arg("mean"), py::arg("offset"),
           py::arg("tail_prob"))
      .def_readonly("mean", &ThreePoint::mean)
      .def_readonly("offset", &ThreePoint::offset)
      .def_readonly("tail_prob", &ThreePoint::tail_prob);
  py::class_<Deterministic>(m, "Deterministic")
      .def(py::init<double>(), py::arg("mean"))
      .def_readonly("mean", &Deterministic::mean);

  m.def("label_mean", [](const LabelModel& model) { return mean(model); },
        py::arg("model"));
  m.def("conditional_variance", &conditional_variance, py::arg("model"));
  m.def("bernoulli_variance_bound", &bernoulli_variance_bound, py::arg("model"));
  m.def("support_distribution", &support_distribution, py::arg("model"));

  py::class_<SyntheticInstance>(m, "SyntheticInstance")
      .def_readonly("hypothesis_class", &SyntheticInstance::hypothesis_class)
      .def_readonly("space", &SyntheticInstance::space)
      .def_readonly("labels", &SyntheticInstance::labels)
      .def_readonly("seed", &SyntheticInstance::seed)
      .def("variance_per_point", &SyntheticInstance::variance_per_point)
      .def_property_readonly("expected_sigma2", &SyntheticInstance::expected_sigma2)
      .def_property_readonly("expected_first_order",
                             &SyntheticInstance::expected_first_order);

  m.def(
      "make_instance",
      [](std::size_t support_size, std::size_t class_size,
         const std::string& label_family, double variance_scale,
         std::vector<double> perturbation_magnitudes, bool per_point_magnitudes,
         std::optional<double> f_star_constant, double f_star_lo, double f_star_hi,
         std::vector<double> weights, std::uint64_t seed) {
        GeneratorConfig cfg;
        cfg.support_size = support_size;
        cfg.class_size = class_size;
        if (label_family == "bernoulli") {
          cfg.label_family = LabelFamily::Bernoulli;
        } else if (label_family == "threepoint") {
          cfg.label_family = LabelFamily::ThreePoint;
        } else if (label_family == "deterministic") {
          cfg.label_family = LabelFamily::Deterministic;
        } else {
          throw std::invalid_argument("unknown label family '" + label_family + "'");
        }
        cfg.variance_scale = variance_scale;
        if (!perturbation_magnitudes.empty()) {
          cfg.perturbation_magnitudes = std::move(perturbation_magnitudes);
        }
        cfg.per_point_magnitudes = per_point_magnitudes;
        if (f_star_constant) {
          cfg.f_star.mode = FStarSpec::Mode::Constant;
          cfg.f_star.value = *f_star_constant;
        } else {
          cfg.f_star.lo = f_star_lo;
          cfg.f_star.hi = f_star_hi;
        }
        cfg.weights = std::move(weights);
        cfg.seed = seed;
        return make_instance(cfg, seed);
      },
      py::arg("support_size") = 10, py::arg("class_size") = 20,
      py::arg("label_family") = "bernoulli", py::arg("variance_scale") = 0.1,
      py::arg("perturbation_magnitudes") = std::vector<double>{},
      py::arg("per_point_magnitudes") = false,
      py::arg("f_star_constant") = py::none(), py::arg("f_star_lo") = 0.1,
      py::arg("f_star_hi") = 0.9, py::arg("weights") = std::vector<double>{},
      py::arg("seed") = 0);

  m.def("sample_dataset", &sample_dataset, py::arg("instance"), py::arg("n"),
        py::arg("seed"));
  m.def("replication_seed", &replication_seed, py::arg("base"), py::arg("replication"));

  m.def("load_class_file", [](const std::string& path) {
    TabulatedClassFile f = load_class_file(path);
    return py::make_tuple(std::move(f.space), std::move(f.hypothesis_class));
  });
  m.def("save_class_file", &save_class_file, py::arg("path"), py::arg("space"),
        py::arg("hypothesis_class"));
  m.def("load_instance_file", &load_instance_file, py::arg("path"));
  m.def("save_instance_file", &save_instance_file, py::arg("path"), py::arg("instance"));
  m.def(
      "load_dataset_csv",
      [](const std::string& path, const std::optional<FiniteSupport>& space) {
        return load_dataset_csv(path, space ? &*space : nullptr);
      },
      py::arg("path"), py::arg("space") = py::none());
  m.def("save_dataset_csv", &save_dataset_csv, py::arg("path"), py::arg("dataset"));

  m.def(
      "run_experiment_json",
      [](const std::string& config_json) {
        const ExperimentConfig cfg =
            experiment_config_from_json(nlohmann::json::parse(config_json));
        const ExperimentResult res = run_experiment(cfg);
        std::ostringstream csv;
        write_records_csv(csv, res.records);
        return py::make_tuple(csv.str(), res.summary.dump());
      },
      py::arg("config_json"), "returns (records_csv, summary_json)");

  m.def(
      "run_verify_json",
      [](std::vector<std::string> suites, std::uint64_t seed, std::size_t fuzz_count,
         std::size_t variance_models, std::size_t lipschitz_pairs,
         std::size_t oracle_instances, double gap_eps) {
        VerifyOptions opt;
        opt.suites = std::move(suites);
        opt.seed = seed;
        opt.fuzz_count = fuzz_count;
        opt.variance_models = variance_models;
        opt.lipschitz_pairs = lipschitz_pairs;
        opt.oracle_instances = oracle_instances;
        opt.gap_eps = gap_eps;
        return run_verify(opt).dump();
      },
      py::arg("suites") = std::vector<std::string>{}, py::arg("seed") = 20240301,
      py::arg("fuzz_count") = 100000, py::arg("variance_models") = 1000,
      py::arg("lipschitz_pairs") = 20, py::arg("oracle_instances") = 3,
      py::arg("gap_eps") = 0.01, "returns the verification report as JSON");
}
