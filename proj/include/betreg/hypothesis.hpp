#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

namespace betreg {

// max(min(v, hi), lo). Requires lo <= hi.
double clip(double v, double lo, double hi);

// One observation. `support_index` is set when the sample was drawn from (or
// matched against) a finite-support instance space; tabulated hypotheses are
// evaluated through it rather than through float-keyed feature lookup.
struct DataPoint {
  std::vector<double> features;
  double y = 0.0;
  std::optional<std::size_t> support_index;
};

// Immutable sample of (feature vector, label in [0,1]) pairs.
// Invariants checked at construction: n >= 1, labels in [0,1], equal dims.
class Dataset {
 public:
  explicit Dataset(std::vector<DataPoint> points);

  std::size_t size() const { return points_.size(); }
  const DataPoint& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<DataPoint>& points() const { return points_; }
  std::size_t feature_dim() const { return dim_; }
  // true when every point carries a support index
  bool fully_indexed() const { return indexed_; }

 private:
  std::vector<DataPoint> points_;
  std::size_t dim_ = 0;
  bool indexed_ = false;
};

// Discrete marginal over feature vectors. Weights are nonnegative and sum to
// one within 1e-12.
struct FiniteSupport {
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
};

// Unit euclidean ball in d dimensions.
struct Ball {
  std::size_t dimension = 1;
};

using InstanceSpace = std::variant<FiniteSupport, Ball>;

void validate(const FiniteSupport& space);

// Predictor tabulated over a finite support; values[k] is the prediction at
// support point k, each in [0,1].
struct Tabulated {
  std::vector<double> values;
};

// x -> x.theta + 1/2 with ||theta||_2 <= 1/2, so predictions stay in [0,1]
// over the unit ball.
struct Linear {
  std::vector<double> theta;
};

using Hypothesis = std::variant<Tabulated, Linear>;

void validate(const Hypothesis& h);

double l2_norm(const std::vector<double>& v);

// Prediction of h at x. Tabulated requires x.support_index; Linear requires a
// matching feature dimension. Linear results that drift out of [0,1] by at
// most 1e-12 are clamped, anything further is an error.
double evaluate(const Hypothesis& h, const DataPoint& x);

// Prediction at support point `index` of `space`.
double evaluate_on_support(const Hypothesis& h, const FiniteSupport& space,
                           std::size_t index);

// Finite ordered class; star_index, when set, marks the true regression
// function f* (realizability). Solvers never read it.
struct HypothesisClass {
  std::vector<Hypothesis> members;
  std::optional<std::size_t> star_index;

  std::size_t size() const { return members.size(); }
};

void validate(const HypothesisClass& cls);

}  // namespace betreg
