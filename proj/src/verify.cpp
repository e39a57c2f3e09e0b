#include <algorithm>
#include <cmath>
#include <limits>

#include "betreg/experiment.hpp"
#include "betreg/io.hpp"

namespace betreg {

using nlohmann::json;

namespace {

bool wants(const VerifyOptions& opt, const char* name) {
  if (opt.suites.empty()) return true;
  return std::find(opt.suites.begin(), opt.suites.end(), name) != opt.suites.end();
}

// H(f,f)=0, H(.,.,0,.)=0, H(.,.,.,0)=0 and L(f) >= 0, all exact.
json structural_suite(const VerifyOptions& opt) {
  double worst = 0.0;
  double min_inner = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 5; ++i) {
    GeneratorConfig g;
    g.support_size = 4;
    g.class_size = 4;
    g.label_family = LabelFamily::Bernoulli;
    const SyntheticInstance inst = make_instance(g, opt.seed + i);
    const Dataset data = sample_dataset(inst, 20, opt.seed + 100 + i);
    const auto& F = inst.hypothesis_class;
    Rng rng(opt.seed + 200 + i);
    for (const auto& f : F.members) {
      const double phi = rng.uniform(0.0, data.size() / 4.0);
      const double c = rng.uniform(0.0, 0.25);
      worst = std::max(worst, std::abs(betting_H(f, f, data, phi, c)));
      for (const auto& h : F.members) {
        worst = std::max(worst, std::abs(betting_H(h, f, data, 0.0, c)));
        worst = std::max(worst, std::abs(betting_H(h, f, data, phi, 0.0)));
      }
      const BettingGrid grid = build_grid(GridSpec{}, data.size());
      min_inner = std::min(min_inner, inner_max(f, F, data, grid).value);
    }
  }
  json r;
  r["max_abs_structural_zero"] = worst;
  r["min_inner_max"] = min_inner;
  r["passed"] = (worst == 0.0) && (min_inner >= 0.0);
  return r;
}

// The log argument 1 + (y - f_x) clip(phi(h_x - f_x), [-c,c]) stays >= 3/4.
json domain_suite(const VerifyOptions& opt) {
  Rng rng(opt.seed);
  double min_arg = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < opt.fuzz_count; ++i) {
    const double y = rng.uniform();
    const double fx = rng.uniform();
    const double hx = rng.uniform();
    const double phi = rng.uniform(0.0, 100.0);
    const double c = rng.uniform(0.0, 0.25);
    const double arg = 1.0 + (y - fx) * clip(phi * (hx - fx), -c, c);
    min_arg = std::min(min_arg, arg);
    betting_term(y, fx, hx, phi, c);  // must not throw either
  }
  json r;
  r["tuples"] = opt.fuzz_count;
  r["min_log_argument"] = min_arg;
  r["passed"] = min_arg >= 0.75;
  return r;
}

// Var(Y) <= m(1-m) for m = E[Y], equality exactly on Bernoulli-distributed
// labels; closed-form moments agree with support enumeration.
json variance_bound_suite(const VerifyOptions& opt) {
  Rng rng(opt.seed);
  double worst_violation = -std::numeric_limits<double>::infinity();
  double worst_equality = 0.0;
  double worst_strict = std::numeric_limits<double>::infinity();
  double worst_moment = 0.0;
  bool ok = true;
  for (std::size_t i = 0; i < opt.variance_models; ++i) {
    LabelModel model;
    switch (i % 3) {
      case 0:
        model = Bernoulli{rng.uniform()};
        break;
      case 1: {
        const double m = rng.uniform(0.05, 0.95);
        const double a = rng.uniform(0.0, 0.95 * std::min(m, 1.0 - m));
        const double p = rng.uniform(0.05, 0.5);
        model = ThreePoint{m, a, p};
        break;
      }
      default:
        model = Deterministic{rng.uniform(0.01, 0.99)};
        break;
    }
    const double var = conditional_variance(model);
    const double proxy = bernoulli_variance_bound(model);

    // enumeration oracle for both moments
    double mean_enum = 0.0;
    double second = 0.0;
    for (const auto& [v, p] : support_distribution(model)) {
      mean_enum += p * v;
      second += p * v * v;
    }
    const double var_enum = second - mean_enum * mean_enum;
    worst_moment = std::max({worst_moment, std::abs(mean_enum - mean(model)),
                             std::abs(var_enum - var)});

    worst_violation = std::max(worst_violation, var - proxy);
    if (is_bernoulli_distributed(model)) {
      worst_equality = std::max(worst_equality, std::abs(proxy - var));
    } else {
      worst_strict = std::min(worst_strict, proxy - var);
    }
  }
  ok = ok && worst_violation <= 1e-15;
  ok = ok && worst_equality <= 1e-12;
  ok = ok && worst_strict > 1e-12;
  ok = ok && worst_moment <= 1e-12;
  json r;
  r["models"] = opt.variance_models;
  r["max_variance_minus_bound"] = worst_violation;
  r["max_bernoulli_equality_gap"] = worst_equality;
  r["min_non_bernoulli_strict_gap"] = worst_strict;
  r["max_moment_enumeration_gap"] = worst_moment;
  r["passed"] = ok;
  return r;
}

// |L(f) - L(f')| <= (4/3) n ||f - f'||_inf on a shared grid.
json lipschitz_suite(const VerifyOptions& opt) {
  Rng rng(opt.seed);
  const std::size_t support = 8;
  const std::size_t n = opt.lipschitz_n;
  GridSpec spec;
  spec.mode = GridMode::Exact;
  spec.exact_eps = 0.1;
  const BettingGrid grid = build_grid(spec, n);
  const double constant = (4.0 / 3.0) * static_cast<double>(n);

  double max_ratio = 0.0;
  std::size_t violations = 0;
  for (std::size_t pair = 0; pair < opt.lipschitz_pairs; ++pair) {
    std::vector<DataPoint> pts;
    pts.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
      DataPoint p;
      p.features = {0.0};
      p.support_index = rng.index(support);
      p.y = rng.uniform();
      pts.push_back(std::move(p));
    }
    const Dataset data(std::move(pts));

    auto random_tab = [&] {
      std::vector<double> v(support);
      for (auto& x : v) x = rng.uniform();
      return v;
    };
    const std::vector<double> fv = random_tab();
    // spread the sup distances down to 1e-3 so small perturbations are covered
    const double scale = std::pow(10.0, rng.uniform(-3.0, -0.5));
    std::vector<double> gv(support);
    double sup = 0.0;
    for (std::size_t k = 0; k < support; ++k) {
      gv[k] = clip(fv[k] + scale * rng.uniform(-1.0, 1.0), 0.0, 1.0);
      sup = std::max(sup, std::abs(gv[k] - fv[k]));
    }
    HypothesisClass F;
    F.members = {Tabulated{fv}, Tabulated{gv}, Tabulated{random_tab()}};

    const double lf = inner_max(F.members[0], F, data, grid).value;
    const double lg = inner_max(F.members[1], F, data, grid).value;
    if (sup == 0.0) continue;
    const double ratio = std::abs(lf - lg) / (constant * sup);
    max_ratio = std::max(max_ratio, ratio);
    if (std::abs(lf - lg) > constant * sup + 1e-12) ++violations;
  }
  json r;
  r["pairs"] = opt.lipschitz_pairs;
  r["n"] = n;
  r["max_ratio_vs_lipschitz_bound"] = max_ratio;
  r["violations"] = violations;
  r["passed"] = violations == 0;
  return r;
}

// Geometric grid tracks the exact grid at eps = 1/(4n) within the certified
// slack, and the exact grid tracks a 4x finer oracle.
json oracle_suite(const VerifyOptions& opt) {
  const std::size_t n = 50;
  const double eps = 1.0 / (4.0 * static_cast<double>(n));
  const double geo_tol = (4.0 / 3.0) * (eps + eps);
  const double fine_tol = (4.0 / 3.0) * (eps / 4.0 * 2.0);

  GridSpec exact_spec;
  exact_spec.mode = GridMode::Exact;
  exact_spec.exact_eps = eps;
  const BettingGrid exact_grid = build_grid(exact_spec, n);
  const BettingGrid geo_grid = build_grid(GridSpec{}, n);

  double max_geo_gap = 0.0;
  double max_fine_gap = -std::numeric_limits<double>::infinity();
  double min_fine_gap = std::numeric_limits<double>::infinity();
  std::size_t failures = 0;
  for (std::size_t i = 0; i < opt.oracle_instances; ++i) {
    GeneratorConfig g;
    g.support_size = 5;
    g.class_size = 5;
    g.label_family = LabelFamily::Bernoulli;
    g.perturbation_magnitudes = {0.02, 0.05, 0.1, 0.2};
    const SyntheticInstance inst = make_instance(g, opt.seed + 31 * i);
    const Dataset data = sample_dataset(inst, n, opt.seed + 17 + i);
    const auto& F = inst.hypothesis_class;
    const Hypothesis& f = F.members[i % F.size()];

    const double geo = inner_max(f, F, data, geo_grid).value;
    const double exact = inner_max(f, F, data, exact_grid).value;
    const double fine = oracle_inner_max(f, F, data, eps / 4.0);

    max_geo_gap = std::max(max_geo_gap, std::abs(geo - exact));
    max_fine_gap = std::max(max_fine_gap, fine - exact);
    min_fine_gap = std::min(min_fine_gap, fine - exact);
    if (std::abs(geo - exact) > geo_tol || fine - exact > fine_tol ||
        fine - exact < -1e-12) {
      ++failures;
    }
  }
  json r;
  r["instances"] = opt.oracle_instances;
  r["n"] = n;
  r["geo_tolerance"] = geo_tol;
  r["fine_tolerance"] = fine_tol;
  r["max_abs_geometric_vs_exact"] = max_geo_gap;
  r["max_fine_minus_exact"] = max_fine_gap;
  r["min_fine_minus_exact"] = min_fine_gap;
  r["failures"] = failures;
  r["passed"] = failures == 0;
  return r;
}

json gap_suite(const VerifyOptions& opt) {
  const auto [lhs, rhs] = gap_example(opt.gap_eps);
  json r;
  r["eps"] = opt.gap_eps;
  r["lhs"] = lhs;
  r["rhs"] = rhs;
  r["passed"] = std::abs(lhs - opt.gap_eps) <= 1e-12 &&
                std::abs(rhs - 0.5) <= 1e-12 && lhs <= rhs;
  return r;
}

}  // namespace

json run_verify(const VerifyOptions& options) {
  json suites = json::object();
  if (wants(options, "structural")) suites["structural"] = structural_suite(options);
  if (wants(options, "domain")) suites["domain"] = domain_suite(options);
  if (wants(options, "variance-bound")) suites["variance-bound"] = variance_bound_suite(options);
  if (wants(options, "lipschitz")) suites["lipschitz"] = lipschitz_suite(options);
  if (wants(options, "oracle")) suites["oracle"] = oracle_suite(options);
  if (wants(options, "gap")) suites["gap"] = gap_suite(options);

  bool all = true;
  for (const auto& [name, suite] : suites.items()) {
    all = all && suite.at("passed").get<bool>();
  }
  json out;
  out["suites"] = std::move(suites);
  out["all_passed"] = all;
  return out;
}

}  // namespace betreg
