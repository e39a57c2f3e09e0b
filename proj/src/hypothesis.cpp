#include "betreg/hypothesis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace betreg {

namespace {
constexpr double kRoundingTol = 1e-12;
}

double clip(double v, double lo, double hi) {
  if (lo > hi) {
    throw std::invalid_argument("clip: lo > hi");
  }
  return std::max(std::min(v, hi), lo);
}

Dataset::Dataset(std::vector<DataPoint> points) : points_(std::move(points)) {
  if (points_.empty()) {
    throw std::invalid_argument("Dataset: needs at least one point");
  }
  dim_ = points_.front().features.size();
  indexed_ = true;
  for (const auto& p : points_) {
    if (p.features.size() != dim_) {
      throw std::invalid_argument("Dataset: inconsistent feature dimensions");
    }
    if (!(p.y >= 0.0 && p.y <= 1.0)) {
      throw std::invalid_argument("Dataset: label outside [0,1]");
    }
    if (!p.support_index.has_value()) indexed_ = false;
  }
}

void validate(const FiniteSupport& space) {
  if (space.points.empty()) {
    throw std::invalid_argument("FiniteSupport: empty support");
  }
  if (space.points.size() != space.weights.size()) {
    throw std::invalid_argument("FiniteSupport: points/weights size mismatch");
  }
  const std::size_t dim = space.points.front().size();
  double total = 0.0;
  for (std::size_t k = 0; k < space.points.size(); ++k) {
    if (space.points[k].size() != dim) {
      throw std::invalid_argument("FiniteSupport: inconsistent dimensions");
    }
    if (space.weights[k] < 0.0) {
      throw std::invalid_argument("FiniteSupport: negative weight");
    }
    total += space.weights[k];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("FiniteSupport: weights sum to " + std::to_string(total));
  }
}

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void validate(const Hypothesis& h) {
  if (const auto* tab = std::get_if<Tabulated>(&h)) {
    for (double v : tab->values) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("Tabulated: value outside [0,1]");
      }
    }
  } else {
    const auto& lin = std::get<Linear>(h);
    if (lin.theta.empty()) {
      throw std::invalid_argument("Linear: empty parameter vector");
    }
    if (l2_norm(lin.theta) > 0.5 + kRoundingTol) {
      throw std::invalid_argument("Linear: ||theta|| exceeds 1/2");
    }
  }
}

double evaluate(const Hypothesis& h, const DataPoint& x) {
  if (const auto* tab = std::get_if<Tabulated>(&h)) {
    if (!x.support_index.has_value()) {
      throw std::invalid_argument("evaluate: tabulated hypothesis needs a support index");
    }
    const std::size_t k = *x.support_index;
    if (k >= tab->values.size()) {
      throw std::out_of_range("evaluate: unknown support point " + std::to_string(k));
    }
    return tab->values[k];
  }
  const auto& lin = std::get<Linear>(h);
  if (lin.theta.size() != x.features.size()) {
    throw std::invalid_argument("evaluate: feature dimension mismatch");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < lin.theta.size(); ++i) {
    dot += lin.theta[i] * x.features[i];
  }
  double p = dot + 0.5;
  if (p < 0.0 || p > 1.0) {
    if (p < -kRoundingTol || p > 1.0 + kRoundingTol) {
      throw std::domain_error("evaluate: linear prediction outside [0,1]");
    }
    p = clip(p, 0.0, 1.0);
  }
  return p;
}

double evaluate_on_support(const Hypothesis& h, const FiniteSupport& space,
                           std::size_t index) {
  if (index >= space.points.size()) {
    throw std::out_of_range("evaluate_on_support: index out of range");
  }
  DataPoint p;
  p.features = space.points[index];
  p.support_index = index;
  return evaluate(h, p);
}

void validate(const HypothesisClass& cls) {
  if (cls.members.empty()) {
    throw std::invalid_argument("HypothesisClass: empty class");
  }
  for (const auto& m : cls.members) validate(m);
  if (cls.star_index && *cls.star_index >= cls.members.size()) {
    throw std::invalid_argument("HypothesisClass: star_index out of range");
  }
}

}  // namespace betreg
