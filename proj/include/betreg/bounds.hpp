#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "betreg/hypothesis.hpp"

namespace betreg {

// Problem-level quantities every bound consumes. phi_bar is pinned to n/4.
struct BoundInputs {
  std::size_t n = 1;
  std::size_t class_size = 1;
  double delta = 0.1;
  std::optional<std::size_t> dimension;

  double phi_bar() const { return static_cast<double>(n) / 4.0; }
};

void validate(const BoundInputs& in);

// Population quantities over a finite-support marginal, all exact sums:
// first_order_q = E_x[f*(x)(1 - f*(x))], second_order_q = E_x[sigma_x^2],
// mae = E_x|f(x) - f*(x)|. Always 0 <= second_order_q <= first_order_q <= 1/4.
struct PopulationQuantities {
  double first_order_q = 0.0;
  double second_order_q = 0.0;
  double mae = 0.0;
};

// First-order (log loss ERM) high-probability bound:
// 8 sqrt(q ln(|F|/delta) / n) + 4 ln(|F|/delta) / n, for q = E[f*(1-f*)].
double first_order_bound(double q, const BoundInputs& in);

// Second-order (betting) bound with explicit constants:
// sqrt(25/12 sigma2 (2/n ln(48|F| phi_bar n^2/delta) + max(delta_L, 0)))
//   + 6/n ln(48|F| phi_bar n^2/delta) + 5/2 delta_L.
// Callers pass delta_L = 0 for the minimizer.
double second_order_bound(double sigma2, const BoundInputs& in, double delta_L);

// Linear-class bound:
// sqrt(25/3 sigma2 (d/n) ln(48 n^5/delta)) + 12 (d/n) ln(48 n^5/delta).
double linear_bound(double sigma2, std::size_t n, std::size_t d, double delta);

// Exact expectations over the finite support. variance_per_point[k] is
// sigma_x^2 at support point k and must cover every point.
PopulationQuantities population_quantities(
    const Hypothesis& f, const HypothesisClass& cls, const FiniteSupport& space,
    const std::vector<double>& variance_per_point);

// Monte Carlo variant for ball instance spaces: x uniform on the unit ball,
// seeded and reported with its sample count by the caller.
double mae_monte_carlo(const Hypothesis& f, const Hypothesis& f_star,
                       std::size_t dimension, std::size_t samples,
                       std::uint64_t seed);

// Two-point gap distribution P(Y=eps) = P(Y=1-eps) = 1/2: returns
// (E[Y ^ (1-Y)], E[Y] ^ E[1-Y]) = (eps, 1/2), both computed from the
// distribution rather than hard-coded.
std::pair<double, double> gap_example(double eps);

}  // namespace betreg
