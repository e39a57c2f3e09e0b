#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <map>

#include "betreg/synthetic.hpp"

using namespace betreg;

TEST_CASE("closed-form variances") {
  CHECK(conditional_variance(Bernoulli{0.3}) == doctest::Approx(0.21).epsilon(1e-14));
  CHECK(conditional_variance(ThreePoint{0.5, 0.25, 0.08}) ==
        doctest::Approx(0.01).epsilon(1e-14));
  CHECK(conditional_variance(ThreePoint{0.5, 0.1, 0.5}) ==
        doctest::Approx(0.01).epsilon(1e-14));
  CHECK(conditional_variance(Deterministic{0.73}) == 0.0);
}

TEST_CASE("support enumeration matches the closed forms") {
  const LabelModel models[] = {Bernoulli{0.3}, ThreePoint{0.5, 0.25, 0.08},
                               ThreePoint{0.4, 0.2, 0.31}, Deterministic{0.6}};
  for (const auto& model : models) {
    double m1 = 0.0, m2 = 0.0, total = 0.0;
    for (const auto& [v, p] : support_distribution(model)) {
      m1 += p * v;
      m2 += p * v * v;
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m1 == doctest::Approx(mean(model)).epsilon(1e-13));
    CHECK(m2 - m1 * m1 ==
          doctest::Approx(conditional_variance(model)).epsilon(1e-13));
  }
}

TEST_CASE("variance never exceeds the bernoulli bound, equality iff bernoulli") {
  Rng rng(1234);
  for (int i = 0; i < 200; ++i) {
    LabelModel model;
    if (i % 3 == 0) {
      model = Bernoulli{rng.uniform()};
    } else if (i % 3 == 1) {
      const double m = rng.uniform(0.1, 0.9);
      model = ThreePoint{m, rng.uniform(0.0, 0.9 * std::min(m, 1.0 - m)),
                         rng.uniform(0.05, 0.5)};
    } else {
      model = Deterministic{rng.uniform(0.05, 0.95)};
    }
    const double var = conditional_variance(model);
    const double bound = bernoulli_variance_bound(model);
    CHECK(var <= bound + 1e-15);
    if (is_bernoulli_distributed(model)) {
      CHECK(std::abs(var - bound) <= 1e-12);
    } else {
      CHECK(bound - var > 1e-12);
    }
  }
  // a three-point with full offset and p = 1/2 is a bernoulli in disguise
  CHECK(is_bernoulli_distributed(ThreePoint{0.5, 0.5, 0.5}));
}

TEST_CASE("label model validation") {
  CHECK_THROWS_AS(validate(LabelModel{Bernoulli{1.2}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(LabelModel{ThreePoint{0.2, 0.3, 0.4}}),
                  std::invalid_argument);  // support leaves [0,1]
  CHECK_THROWS_AS(validate(LabelModel{ThreePoint{0.5, 0.1, 0.7}}),
                  std::invalid_argument);  // tail prob beyond 1/2
  CHECK_NOTHROW(validate(LabelModel{ThreePoint{0.5, 0.5, 0.5}}));
}

TEST_CASE("make_instance honors the label family") {
  GeneratorConfig cfg;
  cfg.support_size = 6;
  cfg.class_size = 4;

  SUBCASE("deterministic labels have zero variance") {
    cfg.label_family = LabelFamily::Deterministic;
    const SyntheticInstance inst = make_instance(cfg, 5);
    for (const auto& m : inst.labels) CHECK(conditional_variance(m) == 0.0);
    CHECK(inst.expected_sigma2() == 0.0);
  }

  SUBCASE("bernoulli labels sit at the variance bound's equality case") {
    cfg.label_family = LabelFamily::Bernoulli;
    const SyntheticInstance inst = make_instance(cfg, 5);
    for (std::size_t k = 0; k < inst.labels.size(); ++k) {
      const double m = mean(inst.labels[k]);
      CHECK(conditional_variance(inst.labels[k]) ==
            doctest::Approx(m * (1.0 - m)).epsilon(1e-14));
    }
    CHECK(inst.expected_sigma2() ==
          doctest::Approx(inst.expected_first_order()).epsilon(1e-13));
  }

  SUBCASE("threepoint labels scale the bernoulli variance") {
    cfg.label_family = LabelFamily::ThreePoint;
    cfg.variance_scale = 0.1;
    cfg.f_star.lo = 0.2;
    cfg.f_star.hi = 0.8;
    const SyntheticInstance inst = make_instance(cfg, 5);
    for (std::size_t k = 0; k < inst.labels.size(); ++k) {
      const double m = mean(inst.labels[k]);
      CHECK(conditional_variance(inst.labels[k]) ==
            doctest::Approx(0.1 * m * (1.0 - m)).epsilon(1e-12));
    }
  }
}

TEST_CASE("realizability: label means equal f* exactly") {
  GeneratorConfig cfg;
  cfg.support_size = 8;
  cfg.class_size = 6;
  cfg.label_family = LabelFamily::ThreePoint;
  const SyntheticInstance inst = make_instance(cfg, 42);
  const auto& star = inst.hypothesis_class.members[*inst.hypothesis_class.star_index];
  for (std::size_t k = 0; k < inst.labels.size(); ++k) {
    CHECK(mean(inst.labels[k]) == evaluate_on_support(star, inst.space, k));
  }
}

TEST_CASE("the class is shared across noise regimes") {
  GeneratorConfig lo;
  lo.support_size = 5;
  lo.class_size = 6;
  lo.label_family = LabelFamily::ThreePoint;
  lo.variance_scale = 0.01;
  GeneratorConfig hi = lo;
  hi.variance_scale = 0.9;

  const SyntheticInstance a = make_instance(lo, 17);
  const SyntheticInstance b = make_instance(hi, 17);
  REQUIRE(a.hypothesis_class.size() == b.hypothesis_class.size());
  for (std::size_t i = 0; i < a.hypothesis_class.size(); ++i) {
    CHECK(std::get<Tabulated>(a.hypothesis_class.members[i]).values ==
          std::get<Tabulated>(b.hypothesis_class.members[i]).values);
  }
  CHECK(a.space.points == b.space.points);
  CHECK(a.expected_sigma2() < b.expected_sigma2());
}

TEST_CASE("infeasible three-point offsets are rejected") {
  CHECK_THROWS_AS(validate(LabelModel{ThreePoint{0.1, 0.2, 0.5}}),
                  std::invalid_argument);
}

TEST_CASE("sampling is deterministic in (instance, n, seed)") {
  GeneratorConfig cfg;
  cfg.support_size = 4;
  cfg.class_size = 3;
  cfg.label_family = LabelFamily::ThreePoint;
  const SyntheticInstance inst = make_instance(cfg, 8);

  const Dataset a = sample_dataset(inst, 64, 123);
  const Dataset b = sample_dataset(inst, 64, 123);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].y == b[i].y);
    CHECK(a[i].features == b[i].features);
    CHECK(*a[i].support_index == *b[i].support_index);
  }
  const Dataset c = sample_dataset(inst, 64, 124);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) any_diff = any_diff || a[i].y != c[i].y;
  CHECK(any_diff);
}

TEST_CASE("deterministic instances reproduce f* in every label") {
  GeneratorConfig cfg;
  cfg.support_size = 5;
  cfg.class_size = 2;
  cfg.label_family = LabelFamily::Deterministic;
  const SyntheticInstance inst = make_instance(cfg, 9);
  const auto& star = inst.hypothesis_class.members[0];
  const Dataset d = sample_dataset(inst, 100, 10);
  for (const auto& p : d.points()) {
    CHECK(p.y == evaluate(star, p));
  }
}

TEST_CASE("empirical label means converge at the CLT rate") {
  // fixed seeds make this deterministic; 3 sigma would flake roughly once in
  // 370 fresh seeds
  GeneratorConfig cfg;
  cfg.support_size = 3;
  cfg.class_size = 2;
  cfg.label_family = LabelFamily::Bernoulli;
  cfg.f_star.lo = 0.3;
  cfg.f_star.hi = 0.7;
  const SyntheticInstance inst = make_instance(cfg, 300);
  const Dataset d = sample_dataset(inst, 6000, 301);

  std::map<std::size_t, std::pair<double, double>> acc;  // idx -> (sum, count)
  for (const auto& p : d.points()) {
    acc[*p.support_index].first += p.y;
    acc[*p.support_index].second += 1.0;
  }
  for (const auto& [k, sc] : acc) {
    const double expected = mean(inst.labels[k]);
    const double sigma = std::sqrt(conditional_variance(inst.labels[k]));
    const double observed = sc.first / sc.second;
    CHECK(std::abs(observed - expected) <= 3.0 * sigma / std::sqrt(sc.second));
  }
}

TEST_CASE("sampled support frequencies follow the weights") {
  GeneratorConfig cfg;
  cfg.support_size = 4;
  cfg.class_size = 2;
  cfg.weights = {0.1, 0.2, 0.3, 0.4};
  const SyntheticInstance inst = make_instance(cfg, 55);
  const Dataset d = sample_dataset(inst, 8000, 56);
  std::vector<double> counts(4, 0.0);
  for (const auto& p : d.points()) counts[*p.support_index] += 1.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const double w = cfg.weights[k];
    const double se = std::sqrt(w * (1.0 - w) / 8000.0);
    CHECK(std::abs(counts[k] / 8000.0 - w) <= 3.0 * se);
  }
}

TEST_CASE("linear instances are realizable and in range") {
  LinearGeneratorConfig cfg;
  cfg.dimension = 2;
  cfg.support_size = 12;
  cfg.theta_norm = 0.45;
  cfg.label_family = LabelFamily::ThreePoint;
  cfg.variance_scale = 0.1;
  const SyntheticInstance inst = make_linear_instance(cfg, 7);

  const auto& star = inst.hypothesis_class.members[0];
  CHECK(l2_norm(std::get<Linear>(star).theta) == doctest::Approx(0.45).epsilon(1e-12));
  for (std::size_t k = 0; k < inst.space.points.size(); ++k) {
    CHECK(l2_norm(inst.space.points[k]) <= 1.0);
    const double m = evaluate_on_support(star, inst.space, k);
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
    CHECK(mean(inst.labels[k]) == m);
  }
  const Dataset d = sample_dataset(inst, 50, 8);
  CHECK(d.fully_indexed());
}
