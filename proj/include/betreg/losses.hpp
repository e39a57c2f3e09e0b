#pragma once

#include <vector>

#include "betreg/hypothesis.hpp"

namespace betreg {

// Search lattice over the perturbation scale phi in [0, phi_bar] and the
// clipping threshold c in [0, 1/4], with phi_bar = n/4 for the dataset it was
// built for. Both axes contain 0 (so the maximized objective is >= 0) and
// their interval endpoints.
struct BettingGrid {
  std::vector<double> phi_values;
  std::vector<double> c_values;
  double phi_bar = 0.0;
  // nominal per-axis resolution backing the reported grid slack
  double eps_phi = 0.0;
  double eps_c = 0.0;
  // local subdivision rounds applied around the incumbent during inner_max
  int refine_rounds = 0;
};

void validate(const BettingGrid& grid);

// Certified gap (4/3)(eps_phi + eps_c) between the grid maximum and the
// continuous maximum of the betting objective.
double grid_slack(const BettingGrid& grid);

// Mean loss that may diverge: log loss is +infinity whenever some point puts
// positive mass on a zero-probability prediction.
struct ExtendedLoss {
  double value = 0.0;

  bool finite() const;
  static ExtendedLoss infinite();
};

// (1/n) sum over D of (1/2)(f(x) - y)^2, in [0, 1/2].
double squared_loss(const Hypothesis& f, const Dataset& d);

// (1/n) sum over D of y ln(1/f_x) + (1-y) ln(1/(1-f_x)), with the
// conventions 0*ln(1/0) = 0 and y*ln(1/0) = +infinity for y > 0.
ExtendedLoss log_loss(const Hypothesis& f, const Dataset& d);

// ln(1 + (y - f_x) * clip(phi*(h_x - f_x), [-c, c])). The log argument is
// always >= 3/4 since |y - f_x| <= 1 and the clipped factor is in [-1/4, 1/4].
double betting_term(double y, double f_x, double h_x, double phi, double c);

// H_{phi,c}(h, f): sum of betting terms over D in dataset order
// (deterministic left-to-right summation). Callers divide by n.
double betting_H(const Hypothesis& h, const Hypothesis& f, const Dataset& d,
                 double phi, double c);

}  // namespace betreg
