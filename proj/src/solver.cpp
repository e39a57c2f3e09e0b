#include "betreg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "betreg/parallel.hpp"

namespace betreg {

namespace {

std::vector<double> arithmetic_axis(double range, double eps) {
  std::vector<double> v;
  const auto kmax = static_cast<std::size_t>(std::floor(range / eps + 1e-9));
  v.reserve(kmax + 2);
  for (std::size_t k = 0; k <= kmax; ++k) {
    v.push_back(std::min(static_cast<double>(k) * eps, range));
  }
  if (v.back() != range) {
    if (v.size() >= 2 && range - v.back() < 0.5 * eps) {
      v.back() = range;  // snap a near-endpoint last step, keep the 0 anchor
    } else {
      v.push_back(range);
    }
  }
  return v;
}

std::vector<double> geometric_axis(double top, double cutoff, double base) {
  std::vector<double> v{0.0};
  for (double val = top; val >= cutoff * (1.0 - 1e-12); val /= base) {
    v.push_back(val);
  }
  std::sort(v.begin(), v.end());
  return v;
}

// Dataset compressed for grid sweeps: unique (support point, label) pairs
// with multiplicities, plus every class member evaluated once per site.
// Falls back to one site per data point when support indices are absent.
struct Prepared {
  std::vector<std::vector<double>> vals;  // [member][site]
  std::vector<std::size_t> site_index;    // group -> site
  std::vector<double> site_y;             // group -> label
  std::vector<double> weight;             // group -> multiplicity
  std::vector<DataPoint> reps;            // site -> representative point
  double n = 0.0;
};

Prepared prepare(const HypothesisClass& F, const Dataset& D) {
  Prepared p;
  p.n = static_cast<double>(D.size());
  if (D.fully_indexed()) {
    std::map<std::size_t, std::size_t> site_of;  // support index -> site
    std::map<std::pair<std::size_t, double>, double> counts;
    for (const auto& pt : D.points()) {
      site_of.emplace(*pt.support_index, 0);
      counts[{*pt.support_index, pt.y}] += 1.0;
    }
    std::size_t next = 0;
    for (auto& [si, slot] : site_of) slot = next++;
    p.reps.resize(site_of.size());
    for (const auto& pt : D.points()) {
      p.reps[site_of[*pt.support_index]] = pt;
    }
    for (const auto& [key, cnt] : counts) {
      p.site_index.push_back(site_of[key.first]);
      p.site_y.push_back(key.second);
      p.weight.push_back(cnt);
    }
  } else {
    for (std::size_t i = 0; i < D.size(); ++i) {
      p.reps.push_back(D[i]);
      p.site_index.push_back(i);
      p.site_y.push_back(D[i].y);
      p.weight.push_back(1.0);
    }
  }
  p.vals.resize(F.size());
  for (std::size_t m = 0; m < F.size(); ++m) {
    p.vals[m].reserve(p.reps.size());
    for (const auto& rep : p.reps) {
      p.vals[m].push_back(evaluate(F.members[m], rep));
    }
  }
  return p;
}

std::vector<double> candidate_row(const Hypothesis& f, const Prepared& prep) {
  std::vector<double> row;
  row.reserve(prep.reps.size());
  for (const auto& rep : prep.reps) row.push_back(evaluate(f, rep));
  return row;
}

struct ActiveGroup {
  double w = 0.0;    // y - f_x
  double d = 0.0;    // h_x - f_x
  double cnt = 0.0;  // multiplicity
};

// Groups contributing nonzero terms for this (h, f) pair, and the smallest
// nonzero |d| (saturation scale: for phi >= c_max/dmin every clip saturates
// and the objective no longer depends on phi).
struct ActiveSet {
  std::vector<ActiveGroup> groups;
  double dmin = std::numeric_limits<double>::infinity();
};

ActiveSet build_active(const Prepared& prep, const std::vector<double>& fvals,
                       const std::vector<double>& hvals) {
  ActiveSet a;
  for (std::size_t g = 0; g < prep.site_index.size(); ++g) {
    const std::size_t s = prep.site_index[g];
    const double w = prep.site_y[g] - fvals[s];
    const double d = hvals[s] - fvals[s];
    if (w == 0.0 || d == 0.0) continue;
    a.groups.push_back({w, d, prep.weight[g]});
    a.dmin = std::min(a.dmin, std::abs(d));
  }
  return a;
}

double eval_objective(const ActiveSet& act, double phi, double c, double n) {
  double s = 0.0;
  for (const auto& g : act.groups) {
    double b = phi * g.d;
    if (b > c) {
      b = c;
    } else if (b < -c) {
      b = -c;
    }
    s += g.cnt * std::log1p(g.w * b);
  }
  return s / n;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (!(hi > lo)) return {lo};
  std::vector<double> v;
  v.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    v.push_back(lo + (hi - lo) * static_cast<double>(i) /
                         static_cast<double>(count - 1));
  }
  return v;
}

// Bracket around x in a sorted axis: the neighbouring grid values.
std::pair<double, double> bracket(const std::vector<double>& axis, double x) {
  auto it = std::lower_bound(axis.begin(), axis.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - axis.begin());
  const double lo = (i == 0) ? axis.front() : axis[i - 1];
  const double hi = (i + 1 >= axis.size()) ? axis.back()
                                           : axis[std::min(i + 1, axis.size() - 1)];
  return {lo, hi};
}

constexpr std::size_t kRefinePoints = 13;
constexpr std::size_t kRefineTopK = 8;

InnerMaxResult inner_max_core(const Prepared& prep,
                              const std::vector<double>& fvals,
                              const HypothesisClass& F,
                              const BettingGrid& grid) {
  const double c_max = grid.c_values.back();
  InnerMaxResult best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<double> per_h_best(F.size(),
                                 -std::numeric_limits<double>::infinity());

  for (std::size_t h = 0; h < F.size(); ++h) {
    const ActiveSet act = build_active(prep, fvals, prep.vals[h]);
    const double sat = act.groups.empty() ? 0.0 : c_max / act.dmin;
    for (const double phi : grid.phi_values) {
      for (const double c : grid.c_values) {
        const double v = eval_objective(act, phi, c, prep.n);
        if (v > per_h_best[h]) per_h_best[h] = v;
        if (v > best.value) {
          best.value = v;
          best.witness = {h, phi, c};
        }
      }
      if (phi >= sat) break;  // later rows repeat this one exactly
    }
  }

  if (grid.refine_rounds > 0) {
    std::vector<std::size_t> order(F.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return per_h_best[a] > per_h_best[b];
    });
    order.resize(std::min(order.size(), kRefineTopK));
    std::sort(order.begin(), order.end());

    std::vector<ActiveSet> acts;
    acts.reserve(order.size());
    for (const std::size_t h : order) {
      acts.push_back(build_active(prep, fvals, prep.vals[h]));
    }

    auto [plo, phi_hi] = bracket(grid.phi_values, best.witness.phi);
    auto [clo, c_hi] = bracket(grid.c_values, best.witness.c);
    for (int round = 0; round < grid.refine_rounds; ++round) {
      const auto phi_pts = linspace(plo, phi_hi, kRefinePoints);
      const auto c_pts = linspace(clo, c_hi, kRefinePoints);
      for (std::size_t i = 0; i < order.size(); ++i) {
        const ActiveSet& act = acts[i];
        const double sat = act.groups.empty() ? 0.0 : c_max / act.dmin;
        for (const double phi : phi_pts) {
          for (const double c : c_pts) {
            const double v = eval_objective(act, phi, c, prep.n);
            if (v > best.value) {
              best.value = v;
              best.witness = {order[i], phi, c};
            }
          }
          if (phi >= sat) break;
        }
      }
      const double pstep = (phi_hi - plo) / static_cast<double>(kRefinePoints - 1);
      const double cstep = (c_hi - clo) / static_cast<double>(kRefinePoints - 1);
      if (pstep <= 0.0 && cstep <= 0.0) break;
      plo = std::max(0.0, best.witness.phi - pstep);
      phi_hi = std::min(grid.phi_bar, best.witness.phi + pstep);
      clo = std::max(0.0, best.witness.c - cstep);
      c_hi = std::min(0.25, best.witness.c + cstep);
    }
  }
  return best;
}

FitReport argmin_report(std::vector<double> objectives) {
  FitReport r;
  r.per_candidate_objectives = std::move(objectives);
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.per_candidate_objectives.size(); ++i) {
    if (r.per_candidate_objectives[i] < r.per_candidate_objectives[best]) {
      best = i;
    }
  }
  r.chosen_index = best;
  r.objective_value = r.per_candidate_objectives[best];
  return r;
}

}  // namespace

BettingGrid build_grid(const GridSpec& spec, std::size_t n) {
  if (n < 1) {
    throw std::invalid_argument("build_grid: n must be >= 1");
  }
  const double phi_bar = static_cast<double>(n) / 4.0;
  BettingGrid g;
  g.phi_bar = phi_bar;
  if (spec.mode == GridMode::Exact) {
    const double eps = spec.exact_eps.value_or(1.0 / (4.0 * static_cast<double>(n)));
    if (!(eps > 0.0)) {
      throw std::invalid_argument("build_grid: exact_eps must be positive");
    }
    g.phi_values = arithmetic_axis(phi_bar, eps);
    g.c_values = arithmetic_axis(0.25, eps);
    g.eps_phi = std::min(eps, phi_bar);
    g.eps_c = std::min(eps, 0.25);
    g.refine_rounds = 0;
  } else {
    if (!(spec.geometric_base > 1.0)) {
      throw std::invalid_argument("build_grid: geometric_base must exceed 1");
    }
    if (spec.refine_rounds < 0) {
      throw std::invalid_argument("build_grid: refine_rounds must be >= 0");
    }
    const double cutoff = 1.0 / (4.0 * static_cast<double>(n));
    g.phi_values = geometric_axis(phi_bar, cutoff, spec.geometric_base);
    g.c_values = geometric_axis(0.25, cutoff, spec.geometric_base);
    // nominal resolution this mode emulates; certified empirically against
    // the exact grid at the same eps
    g.eps_phi = cutoff;
    g.eps_c = std::min(cutoff, 0.25);
    g.refine_rounds = spec.refine_rounds;
  }
  validate(g);
  return g;
}

InnerMaxResult inner_max(const Hypothesis& f, const HypothesisClass& F,
                         const Dataset& D, const BettingGrid& grid) {
  validate(F);
  validate(grid);
  if (std::abs(grid.phi_bar - static_cast<double>(D.size()) / 4.0) > 1e-9) {
    throw std::invalid_argument("inner_max: grid was built for a different n");
  }
  const Prepared prep = prepare(F, D);
  return inner_max_core(prep, candidate_row(f, prep), F, grid);
}

FitReport fit_betting(const HypothesisClass& F, const Dataset& D,
                      const GridSpec& spec, int threads) {
  validate(F);
  const BettingGrid grid = build_grid(spec, D.size());
  const Prepared prep = prepare(F, D);
  std::vector<InnerMaxResult> results(F.size());
  parallel_for(F.size(), threads, [&](std::size_t i) {
    results[i] = inner_max_core(prep, prep.vals[i], F, grid);
  });
  std::vector<double> objectives;
  objectives.reserve(results.size());
  for (const auto& r : results) objectives.push_back(r.value);
  FitReport report = argmin_report(std::move(objectives));
  report.inner_witness = results[report.chosen_index].witness;
  return report;
}

FitReport fit_squared(const HypothesisClass& F, const Dataset& D) {
  validate(F);
  std::vector<double> obj;
  obj.reserve(F.size());
  for (const auto& m : F.members) obj.push_back(squared_loss(m, D));
  return argmin_report(std::move(obj));
}

FitReport fit_log(const HypothesisClass& F, const Dataset& D) {
  validate(F);
  std::vector<double> obj;
  obj.reserve(F.size());
  bool any_finite = false;
  for (const auto& m : F.members) {
    const ExtendedLoss l = log_loss(m, D);
    any_finite = any_finite || l.finite();
    obj.push_back(l.value);
  }
  FitReport r = argmin_report(std::move(obj));
  r.degenerate = !any_finite;
  return r;
}

namespace {

// Lexicographic lattice walk over [-kmax, kmax]^d; returns false when the
// member budget is exhausted.
bool build_lattice(std::size_t d, double eps, std::size_t max_members,
                   std::vector<Hypothesis>* out) {
  const double spacing = eps / std::sqrt(static_cast<double>(d));
  const auto kmax = static_cast<long>(std::floor(0.5 / spacing)) + 1;
  const double box = std::pow(2.0 * static_cast<double>(kmax) + 1.0,
                              static_cast<double>(d));
  if (box > 50.0 * static_cast<double>(max_members)) return false;

  std::vector<long> k(d, -kmax);
  std::vector<double> theta(d);
  for (;;) {
    double norm2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      theta[i] = static_cast<double>(k[i]) * spacing;
      norm2 += theta[i] * theta[i];
    }
    const double norm = std::sqrt(norm2);
    if (norm <= 0.5) {
      if (out->size() >= max_members) return false;
      out->push_back(Linear{theta});
    } else if (norm <= 0.5 + 0.5 * eps + 1e-15) {
      if (out->size() >= max_members) return false;
      std::vector<double> projected(theta);
      for (double& t : projected) t *= 0.5 / norm;
      out->push_back(Linear{std::move(projected)});
    }
    std::size_t axis = d;
    while (axis > 0 && k[axis - 1] == kmax) {
      k[axis - 1] = -kmax;
      --axis;
    }
    if (axis == 0) break;
    ++k[axis - 1];
  }
  return true;
}

}  // namespace

HypothesisClass linear_cover(std::size_t d, double eps, std::size_t max_members) {
  if (d < 1 || d > 3) {
    throw std::invalid_argument("linear_cover: d must be in {1,2,3}");
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("linear_cover: eps must be positive");
  }
  HypothesisClass cls;
  if (!build_lattice(d, eps, max_members, &cls.members)) {
    throw std::length_error("linear_cover: cover size exceeds the cap");
  }
  return cls;
}

HypothesisClass linear_cover_capped(std::size_t d, double eps,
                                    std::size_t max_members, double* eps_used) {
  if (d < 1 || d > 3) {
    throw std::invalid_argument("linear_cover: d must be in {1,2,3}");
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("linear_cover: eps must be positive");
  }
  for (int attempt = 0; attempt < 128; ++attempt) {
    HypothesisClass cls;
    if (build_lattice(d, eps, max_members, &cls.members)) {
      if (eps_used != nullptr) *eps_used = eps;
      return cls;
    }
    eps *= 2.0;
  }
  throw std::length_error("linear_cover_capped: could not fit under the cap");
}

double oracle_inner_max(const Hypothesis& f, const HypothesisClass& F,
                        const Dataset& D, double fine_eps,
                        std::size_t max_cells) {
  if (!(fine_eps > 0.0)) {
    throw std::invalid_argument("oracle_inner_max: fine_eps must be positive");
  }
  const double cells = (static_cast<double>(D.size()) / 4.0 / fine_eps + 2.0) *
                       (0.25 / fine_eps + 2.0);
  if (cells > static_cast<double>(max_cells)) {
    throw std::length_error("oracle_inner_max: grid exceeds the resource cap");
  }
  GridSpec spec;
  spec.mode = GridMode::Exact;
  spec.exact_eps = fine_eps;
  return inner_max(f, F, D, build_grid(spec, D.size())).value;
}

}  // namespace betreg
