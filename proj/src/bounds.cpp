#include "betreg/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "betreg/rng.hpp"

namespace betreg {

void validate(const BoundInputs& in) {
  if (in.n < 1) throw std::invalid_argument("BoundInputs: n must be >= 1");
  if (in.class_size < 1) {
    throw std::invalid_argument("BoundInputs: class_size must be >= 1");
  }
  if (!(in.delta > 0.0 && in.delta < 1.0)) {
    throw std::invalid_argument("BoundInputs: delta must lie in (0,1)");
  }
}

double first_order_bound(double q, const BoundInputs& in) {
  validate(in);
  if (!(q >= 0.0 && q <= 0.25)) {
    throw std::invalid_argument("first_order_bound: q outside [0, 1/4]");
  }
  const double n = static_cast<double>(in.n);
  const double lt = std::log(static_cast<double>(in.class_size) / in.delta);
  return 8.0 * std::sqrt(q * lt / n) + 4.0 * lt / n;
}

double second_order_bound(double sigma2, const BoundInputs& in, double delta_L) {
  validate(in);
  if (!(sigma2 >= 0.0 && sigma2 <= 0.25)) {
    throw std::invalid_argument("second_order_bound: sigma2 outside [0, 1/4]");
  }
  const double n = static_cast<double>(in.n);
  const double lt = std::log(48.0 * static_cast<double>(in.class_size) *
                             in.phi_bar() * n * n / in.delta);
  const double inner = 2.0 / n * lt + std::max(delta_L, 0.0);
  return std::sqrt(25.0 / 12.0 * sigma2 * inner) + 6.0 / n * lt +
         2.5 * delta_L;
}

double linear_bound(double sigma2, std::size_t n, std::size_t d, double delta) {
  if (n < 1 || d < 1) {
    throw std::invalid_argument("linear_bound: n and d must be >= 1");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("linear_bound: delta must lie in (0,1)");
  }
  if (!(sigma2 >= 0.0 && sigma2 <= 0.25)) {
    throw std::invalid_argument("linear_bound: sigma2 outside [0, 1/4]");
  }
  const double nn = static_cast<double>(n);
  const double dn = static_cast<double>(d) / nn;
  const double lt = std::log(48.0 * std::pow(nn, 5.0) / delta);
  return std::sqrt(25.0 / 3.0 * sigma2 * dn * lt) + 12.0 * dn * lt;
}

PopulationQuantities population_quantities(
    const Hypothesis& f, const HypothesisClass& cls, const FiniteSupport& space,
    const std::vector<double>& variance_per_point) {
  validate(space);
  validate(cls);
  if (!cls.star_index.has_value()) {
    throw std::invalid_argument("population_quantities: class lacks a star index");
  }
  if (variance_per_point.size() != space.points.size()) {
    throw std::invalid_argument(
        "population_quantities: variance map does not cover the support");
  }
  const Hypothesis& star = cls.members[*cls.star_index];
  PopulationQuantities q;
  for (std::size_t k = 0; k < space.points.size(); ++k) {
    const double w = space.weights[k];
    const double fs = evaluate_on_support(star, space, k);
    const double fv = evaluate_on_support(f, space, k);
    q.first_order_q += w * fs * (1.0 - fs);
    q.second_order_q += w * variance_per_point[k];
    q.mae += w * std::abs(fv - fs);
  }
  return q;
}

double mae_monte_carlo(const Hypothesis& f, const Hypothesis& f_star,
                       std::size_t dimension, std::size_t samples,
                       std::uint64_t seed) {
  if (dimension < 1 || samples < 1) {
    throw std::invalid_argument("mae_monte_carlo: dimension and samples >= 1");
  }
  Rng rng(seed);
  double sum = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    DataPoint p;
    p.features.resize(dimension);
    for (;;) {  // rejection sample the unit ball
      double norm2 = 0.0;
      for (auto& x : p.features) {
        x = rng.uniform(-1.0, 1.0);
        norm2 += x * x;
      }
      if (norm2 <= 1.0) break;
    }
    sum += std::abs(evaluate(f, p) - evaluate(f_star, p));
  }
  return sum / static_cast<double>(samples);
}

std::pair<double, double> gap_example(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) {
    throw std::invalid_argument("gap_example: eps must lie in (0, 1/2)");
  }
  const double values[2] = {eps, 1.0 - eps};
  const double probs[2] = {0.5, 0.5};
  double lhs = 0.0;   // E[Y ^ (1-Y)]
  double mean = 0.0;  // E[Y]
  for (int i = 0; i < 2; ++i) {
    lhs += probs[i] * std::min(values[i], 1.0 - values[i]);
    mean += probs[i] * values[i];
  }
  return {lhs, std::min(mean, 1.0 - mean)};
}

}  // namespace betreg
