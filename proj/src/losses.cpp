#include "betreg/losses.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace betreg {

namespace {

constexpr double kArgTol = 1e-12;

void check_unit(double v, const char* name) {
  if (!(v >= -kArgTol && v <= 1.0 + kArgTol)) {
    throw std::domain_error(std::string("betting_term: ") + name + " outside [0,1]");
  }
}

}  // namespace

void validate(const BettingGrid& grid) {
  auto check_axis = [](const std::vector<double>& vals, double hi, const char* name) {
    if (vals.empty() || vals.front() != 0.0) {
      throw std::invalid_argument(std::string("BettingGrid: ") + name + " must start at 0");
    }
    for (std::size_t i = 1; i < vals.size(); ++i) {
      if (vals[i] <= vals[i - 1]) {
        throw std::invalid_argument(std::string("BettingGrid: ") + name + " not sorted");
      }
    }
    if (vals.back() > hi + kArgTol) {
      throw std::invalid_argument(std::string("BettingGrid: ") + name + " exceeds range");
    }
  };
  if (grid.phi_bar <= 0.0) {
    throw std::invalid_argument("BettingGrid: phi_bar must be positive");
  }
  check_axis(grid.phi_values, grid.phi_bar, "phi_values");
  check_axis(grid.c_values, 0.25, "c_values");
}

double grid_slack(const BettingGrid& grid) {
  return (4.0 / 3.0) * (grid.eps_phi + grid.eps_c);
}

bool ExtendedLoss::finite() const { return std::isfinite(value); }

ExtendedLoss ExtendedLoss::infinite() {
  return ExtendedLoss{std::numeric_limits<double>::infinity()};
}

double squared_loss(const Hypothesis& f, const Dataset& d) {
  double sum = 0.0;
  for (const auto& p : d.points()) {
    const double r = evaluate(f, p) - p.y;
    sum += 0.5 * r * r;
  }
  return sum / static_cast<double>(d.size());
}

ExtendedLoss log_loss(const Hypothesis& f, const Dataset& d) {
  double sum = 0.0;
  for (const auto& p : d.points()) {
    const double fx = evaluate(f, p);
    // y ln(1/f_x): zero mass on a zero prediction contributes nothing
    if (p.y > 0.0) {
      if (fx == 0.0) return ExtendedLoss::infinite();
      sum += p.y * std::log(1.0 / fx);
    }
    if (p.y < 1.0) {
      if (fx == 1.0) return ExtendedLoss::infinite();
      sum += (1.0 - p.y) * std::log(1.0 / (1.0 - fx));
    }
  }
  return ExtendedLoss{sum / static_cast<double>(d.size())};
}

double betting_term(double y, double f_x, double h_x, double phi, double c) {
  check_unit(y, "y");
  check_unit(f_x, "f_x");
  check_unit(h_x, "h_x");
  if (!(phi >= 0.0)) {
    throw std::domain_error("betting_term: phi must be >= 0");
  }
  if (!(c >= 0.0 && c <= 0.25 + kArgTol)) {
    throw std::domain_error("betting_term: c outside [0, 1/4]");
  }
  const double bet = clip(phi * (h_x - f_x), -c, c);
  return std::log1p((y - f_x) * bet);
}

double betting_H(const Hypothesis& h, const Hypothesis& f, const Dataset& d,
                 double phi, double c) {
  if (phi > d.size() / 4.0 + kArgTol) {
    throw std::domain_error("betting_H: phi exceeds phi_bar = n/4");
  }
  double sum = 0.0;
  for (const auto& p : d.points()) {
    sum += betting_term(p.y, evaluate(f, p), evaluate(h, p), phi, c);
  }
  return sum;
}

}  // namespace betreg
