#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "betreg/hypothesis.hpp"
#include "betreg/losses.hpp"

namespace betreg {

enum class GridMode { Exact, Geometric };

// How to discretize the continuous max over (phi, c). Exact mode lays an
// arithmetic lattice with step exact_eps (default 1/(4n)); geometric mode
// covers [1/(4n), phi_bar] and [1/(4n), 1/4] with powers of the base and
// sharpens around the incumbent with refine_rounds of local subdivision.
struct GridSpec {
  GridMode mode = GridMode::Geometric;
  std::optional<double> exact_eps;
  double geometric_base = 2.0;
  int refine_rounds = 2;
};

BettingGrid build_grid(const GridSpec& spec, std::size_t n);

struct InnerWitness {
  std::size_t h_index = 0;
  double phi = 0.0;
  double c = 0.0;
};

struct InnerMaxResult {
  double value = 0.0;
  InnerWitness witness;
};

// L(f) over the grid: max over h in F and (phi, c) in the grid of
// (1/n) H_{phi,c}(h, f). The witness is the first maximizer in
// (h index, phi ascending, c ascending) scan order; grid refinement points
// replace it only on a strict improvement.
InnerMaxResult inner_max(const Hypothesis& f, const HypothesisClass& F,
                         const Dataset& D, const BettingGrid& grid);

struct FitReport {
  std::size_t chosen_index = 0;
  double objective_value = 0.0;
  std::optional<InnerWitness> inner_witness;  // betting fits only
  std::vector<double> per_candidate_objectives;
  bool degenerate = false;  // log loss: every candidate diverged
};

// Min-max betting estimator: argmin over f in F of inner_max(f, F, D, grid),
// ties to the lowest index. Candidate evaluations may run on `threads`
// workers; the report does not depend on the worker count.
FitReport fit_betting(const HypothesisClass& F, const Dataset& D,
                      const GridSpec& spec, int threads = 1);

// ERM baselines: exhaustive argmin of the mean loss, ties to the lowest
// index. Infinite log losses compare above any finite value; if every
// candidate diverges the report is flagged degenerate.
FitReport fit_squared(const HypothesisClass& F, const Dataset& D);
FitReport fit_log(const HypothesisClass& F, const Dataset& D);

// Constructive sup-norm eps-cover of the linear class over the unit ball:
// axis-aligned lattice with spacing eps/sqrt(d) on ||theta||_2 <= 1/2,
// lattice points within half a cell outside projected back to the sphere.
// Throws when the lattice would exceed max_members.
HypothesisClass linear_cover(std::size_t d, double eps,
                             std::size_t max_members = 1000000);

// Doubles eps until the lattice fits under max_members; reports the spacing
// actually used.
HypothesisClass linear_cover_capped(std::size_t d, double eps,
                                    std::size_t max_members,
                                    double* eps_used = nullptr);

// Exact-mode inner max at resolution fine_eps; verification oracle used by
// tests to bound grid suboptimality. Refuses lattices above the cell cap.
double oracle_inner_max(const Hypothesis& f, const HypothesisClass& F,
                        const Dataset& D, double fine_eps,
                        std::size_t max_cells = 400000000);

}  // namespace betreg
