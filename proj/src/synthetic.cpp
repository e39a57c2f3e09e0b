#include "betreg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace betreg {

namespace {

void check_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " outside [0,1]");
  }
}

LabelModel model_for(LabelFamily family, double variance_scale, double m) {
  switch (family) {
    case LabelFamily::Bernoulli:
      return Bernoulli{m};
    case LabelFamily::Deterministic:
      return Deterministic{m};
    case LabelFamily::ThreePoint: {
      // sigma^2 = 2 p a^2 with p = 1/2, so a = sqrt(scale * m(1-m)); the
      // offset is capped so the support stays inside [0,1]
      double a = std::sqrt(std::max(0.0, variance_scale * m * (1.0 - m)));
      a = std::min(a, std::min(m, 1.0 - m));
      return ThreePoint{m, a, 0.5};
    }
  }
  throw std::logic_error("model_for: unknown family");
}

}  // namespace

void validate(const LabelModel& model) {
  if (const auto* b = std::get_if<Bernoulli>(&model)) {
    check_unit_interval(b->mean, "Bernoulli mean");
  } else if (const auto* t = std::get_if<ThreePoint>(&model)) {
    check_unit_interval(t->mean, "ThreePoint mean");
    if (!(t->offset >= 0.0)) {
      throw std::invalid_argument("ThreePoint offset must be >= 0");
    }
    if (t->mean - t->offset < -1e-15 || t->mean + t->offset > 1.0 + 1e-15) {
      throw std::invalid_argument("ThreePoint support leaves [0,1]");
    }
    if (!(t->tail_prob >= 0.0 && t->tail_prob <= 0.5)) {
      throw std::invalid_argument("ThreePoint tail_prob outside [0, 1/2]");
    }
  } else {
    check_unit_interval(std::get<Deterministic>(model).mean, "Deterministic mean");
  }
}

double mean(const LabelModel& model) {
  return std::visit([](const auto& m) { return m.mean; }, model);
}

double conditional_variance(const LabelModel& model) {
  if (const auto* b = std::get_if<Bernoulli>(&model)) {
    return b->mean * (1.0 - b->mean);
  }
  if (const auto* t = std::get_if<ThreePoint>(&model)) {
    return 2.0 * t->tail_prob * t->offset * t->offset;
  }
  return 0.0;
}

double bernoulli_variance_bound(const LabelModel& model) {
  const double m = mean(model);
  return m * (1.0 - m);
}

bool is_bernoulli_distributed(const LabelModel& model) {
  for (const auto& [value, prob] : support_distribution(model)) {
    if (prob > 0.0 && value != 0.0 && value != 1.0) return false;
  }
  return true;
}

std::vector<std::pair<double, double>> support_distribution(const LabelModel& model) {
  validate(model);
  if (const auto* b = std::get_if<Bernoulli>(&model)) {
    return {{0.0, 1.0 - b->mean}, {1.0, b->mean}};
  }
  if (const auto* t = std::get_if<ThreePoint>(&model)) {
    return {{t->mean - t->offset, t->tail_prob},
            {t->mean, 1.0 - 2.0 * t->tail_prob},
            {t->mean + t->offset, t->tail_prob}};
  }
  return {{std::get<Deterministic>(model).mean, 1.0}};
}

double sample_label(const LabelModel& model, Rng& rng) {
  if (const auto* b = std::get_if<Bernoulli>(&model)) {
    return rng.uniform() < b->mean ? 1.0 : 0.0;
  }
  if (const auto* t = std::get_if<ThreePoint>(&model)) {
    const double u = rng.uniform();
    if (u < t->tail_prob) return t->mean - t->offset;
    if (u < 2.0 * t->tail_prob) return t->mean + t->offset;
    return t->mean;
  }
  return std::get<Deterministic>(model).mean;
}

std::vector<double> SyntheticInstance::variance_per_point() const {
  std::vector<double> v;
  v.reserve(labels.size());
  for (const auto& m : labels) v.push_back(conditional_variance(m));
  return v;
}

double SyntheticInstance::expected_sigma2() const {
  double s = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    s += space.weights[k] * conditional_variance(labels[k]);
  }
  return s;
}

double SyntheticInstance::expected_first_order() const {
  double s = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const double m = mean(labels[k]);
    s += space.weights[k] * m * (1.0 - m);
  }
  return s;
}

SyntheticInstance make_instance(const GeneratorConfig& config, std::uint64_t seed) {
  if (config.support_size < 1 || config.class_size < 1) {
    throw std::invalid_argument("make_instance: empty support or class");
  }
  if (config.perturbation_magnitudes.empty() && config.class_size > 1) {
    throw std::invalid_argument("make_instance: no perturbation magnitudes");
  }
  Rng rng(seed);

  SyntheticInstance inst;
  inst.seed = seed;
  // draw order is fixed: support features, f*, then alternatives; label
  // models consume no randomness so noise regimes share the class
  inst.space.points.reserve(config.support_size);
  for (std::size_t k = 0; k < config.support_size; ++k) {
    inst.space.points.push_back({rng.uniform()});
  }
  if (config.weights.empty()) {
    inst.space.weights.assign(config.support_size,
                              1.0 / static_cast<double>(config.support_size));
  } else {
    if (config.weights.size() != config.support_size) {
      throw std::invalid_argument("make_instance: weights size mismatch");
    }
    inst.space.weights = config.weights;
  }
  validate(inst.space);

  std::vector<double> star(config.support_size);
  for (auto& v : star) {
    v = (config.f_star.mode == FStarSpec::Mode::Constant)
            ? config.f_star.value
            : rng.uniform(config.f_star.lo, config.f_star.hi);
    check_unit_interval(v, "f* value");
  }

  inst.hypothesis_class.members.push_back(Tabulated{star});
  inst.hypothesis_class.star_index = 0;
  const auto& mags = config.perturbation_magnitudes;
  for (std::size_t j = 1; j < config.class_size; ++j) {
    std::vector<double> values(config.support_size);
    const double mag = mags[(j - 1) % mags.size()];
    for (std::size_t k = 0; k < config.support_size; ++k) {
      const double m = config.per_point_magnitudes ? mags[rng.index(mags.size())] : mag;
      values[k] = clip(star[k] + rng.sign() * m, 0.0, 1.0);
    }
    inst.hypothesis_class.members.push_back(Tabulated{std::move(values)});
  }
  validate(inst.hypothesis_class);

  inst.labels.reserve(config.support_size);
  for (std::size_t k = 0; k < config.support_size; ++k) {
    LabelModel model = model_for(config.label_family, config.variance_scale, star[k]);
    validate(model);
    inst.labels.push_back(std::move(model));
  }
  return inst;
}

SyntheticInstance make_linear_instance(const LinearGeneratorConfig& config,
                                       std::uint64_t seed) {
  if (config.dimension < 1 || config.support_size < 1) {
    throw std::invalid_argument("make_linear_instance: bad dimensions");
  }
  if (!(config.theta_norm >= 0.0 && config.theta_norm <= 0.5)) {
    throw std::invalid_argument("make_linear_instance: theta_norm outside [0, 1/2]");
  }
  Rng rng(seed);

  auto draw_in_ball = [&](double radius) {
    std::vector<double> x(config.dimension);
    for (;;) {
      double norm2 = 0.0;
      for (auto& xi : x) {
        xi = rng.uniform(-1.0, 1.0);
        norm2 += xi * xi;
      }
      if (norm2 <= 1.0) {
        for (auto& xi : x) xi *= radius;
        return x;
      }
    }
  };

  SyntheticInstance inst;
  inst.seed = seed;

  std::vector<double> theta(config.dimension);
  double norm = 0.0;
  while (norm == 0.0) {
    double norm2 = 0.0;
    for (auto& t : theta) {
      t = rng.normal();
      norm2 += t * t;
    }
    norm = std::sqrt(norm2);
  }
  for (auto& t : theta) t *= config.theta_norm / norm;

  inst.hypothesis_class.members.push_back(Linear{theta});
  inst.hypothesis_class.star_index = 0;

  inst.space.points.reserve(config.support_size);
  inst.space.weights.assign(config.support_size,
                            1.0 / static_cast<double>(config.support_size));
  for (std::size_t k = 0; k < config.support_size; ++k) {
    inst.space.points.push_back(draw_in_ball(1.0));
  }
  validate(inst.space);

  inst.labels.reserve(config.support_size);
  for (std::size_t k = 0; k < config.support_size; ++k) {
    const double m = evaluate_on_support(inst.hypothesis_class.members[0],
                                         inst.space, k);
    LabelModel model = model_for(config.label_family, config.variance_scale, m);
    validate(model);
    inst.labels.push_back(std::move(model));
  }
  return inst;
}

Dataset sample_dataset(const SyntheticInstance& inst, std::size_t n,
                       std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_dataset: n must be >= 1");
  validate(inst.space);
  Rng rng(seed);
  std::vector<DataPoint> points;
  points.reserve(n);
  const std::size_t support = inst.space.points.size();
  for (std::size_t t = 0; t < n; ++t) {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t k = support - 1;  // guard against rounding past the last cell
    for (std::size_t i = 0; i < support; ++i) {
      acc += inst.space.weights[i];
      if (u < acc) {
        k = i;
        break;
      }
    }
    DataPoint p;
    p.features = inst.space.points[k];
    p.support_index = k;
    p.y = sample_label(inst.labels[k], rng);
    points.push_back(std::move(p));
  }
  return Dataset(std::move(points));
}

}  // namespace betreg
