#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "betreg/hypothesis.hpp"
#include "betreg/rng.hpp"

namespace betreg {

// Conditional label distributions with closed-form mean and variance.
// Bernoulli on {0,1}; ThreePoint on {m-a, m, m+a} with probabilities
// (p, 1-2p, p), giving mean m and variance 2 p a^2; Deterministic is a point
// mass at m.
struct Bernoulli {
  double mean = 0.5;
};

struct ThreePoint {
  double mean = 0.5;
  double offset = 0.0;     // a
  double tail_prob = 0.5;  // p
};

struct Deterministic {
  double mean = 0.5;
};

using LabelModel = std::variant<Bernoulli, ThreePoint, Deterministic>;

void validate(const LabelModel& model);

double mean(const LabelModel& model);
double conditional_variance(const LabelModel& model);

// m(1 - m) for m = E[Y]: the variance a Bernoulli with the same mean would
// have, and the tightest distribution-free bound on Var(Y) for Y in [0,1].
double bernoulli_variance_bound(const LabelModel& model);

// true when the model's support is contained in {0,1}
bool is_bernoulli_distributed(const LabelModel& model);

// (value, probability) pairs; enumeration oracle for moment checks
std::vector<std::pair<double, double>> support_distribution(const LabelModel& model);

double sample_label(const LabelModel& model, Rng& rng);

enum class LabelFamily { Bernoulli, ThreePoint, Deterministic };

// How f* values are laid down over the support.
struct FStarSpec {
  enum class Mode { Uniform, Constant } mode = Mode::Uniform;
  double lo = 0.1;
  double hi = 0.9;
  double value = 0.5;  // Constant mode
};

struct GeneratorConfig {
  std::size_t support_size = 10;
  std::size_t class_size = 20;
  std::vector<double> weights;  // empty = uniform
  LabelFamily label_family = LabelFamily::Bernoulli;
  // threepoint: sigma_x^2 = variance_scale * f*(x)(1 - f*(x)), capped at the
  // largest offset keeping the support inside [0,1]
  double variance_scale = 0.1;
  std::vector<double> perturbation_magnitudes = {0.01, 0.02, 0.05, 0.1};
  // false: alternative j uses magnitudes[(j-1) % size] at every point;
  // true: each point draws its own magnitude from the set
  bool per_point_magnitudes = false;
  FStarSpec f_star;
  std::uint64_t seed = 0;
};

// Realizable instance: finite-support marginal, class with f* at index 0,
// and one label model per support point whose mean equals f*(x) exactly.
struct SyntheticInstance {
  HypothesisClass hypothesis_class;
  FiniteSupport space;
  std::vector<LabelModel> labels;
  std::uint64_t seed = 0;

  std::vector<double> variance_per_point() const;
  double expected_sigma2() const;       // E_x[sigma_x^2]
  double expected_first_order() const;  // E_x[f*(x)(1-f*(x))]
};

// Deterministic in (config, seed). The class does not depend on the label
// family or the variance scale, so noise regimes can share one class.
SyntheticInstance make_instance(const GeneratorConfig& config, std::uint64_t seed);

// Linear-class instance: support points sampled in the unit ball and a star
// parameter vector of the requested norm; class = { f* } with star 0.
struct LinearGeneratorConfig {
  std::size_t dimension = 2;
  std::size_t support_size = 10;
  double theta_norm = 0.45;  // <= 1/2
  LabelFamily label_family = LabelFamily::ThreePoint;
  double variance_scale = 0.1;
};

SyntheticInstance make_linear_instance(const LinearGeneratorConfig& config,
                                       std::uint64_t seed);

// n i.i.d. draws: support point by weight, label by that point's model.
// Byte-reproducible for fixed (instance, n, seed).
Dataset sample_dataset(const SyntheticInstance& inst, std::size_t n,
                       std::uint64_t seed);

}  // namespace betreg
