#pragma once

#include <utility>
#include <vector>

#include "seqest/coverage.hpp"
#include "seqest/plan.hpp"

namespace seqest {

struct VerificationGrid {
    enum class Provenance { QPlus, QMinus, Uniform, UserSupplied };
    std::vector<double> points;  // sorted, deduplicated, inside the open domain
    Provenance provenance = Provenance::UserSupplied;
};

// The lattice grids of the double-decision-variable sufficiency conditions
// for the absolute binomial scheme:
//   Q+ = { k/n_ell + eps in (0, 1/2) } u {1/2},
//   Q- = { k/n_ell - eps in (0, 1/2) } u {1/2}.
std::pair<VerificationGrid, VerificationGrid> build_q_grids(const StageSchedule& plan, double eps);

struct TuneStep {
    double zeta = 0.0;
    double min_coverage = 0.0;
    bool feasible = false;
};

struct TuneResult {
    double zeta_star = 0.0;
    StageSchedule plan;                      // rebuilt at zeta_star
    std::vector<CoverageReport> certificate; // one report per grid point, grid order
    std::vector<TuneStep> transcript;
};

// Largest zeta (up to relative tolerance tol) whose rebuilt plan keeps exact
// coverage >= 1 - delta at every grid point, found by bisection over
// (theorem default, 1]. The result is never below the theorem default; if
// even the default fails the grid, a std::runtime_error reports it, since
// the theorems guarantee the default. Open-ended modes are rejected: their
// builders do not admit zeta beyond the theorem bound. Deterministic: equal
// inputs reproduce zeta_star bit-exactly.
TuneResult tune_zeta(const PrecisionGoal& goal, double rho, const VerificationGrid& grid, double tol = 1e-4,
                     int threads = 1);

// Default verification grid for modes without a Q-grid construction:
// 999 evenly spaced points (binomial: on (0,1); Poisson: log-spaced on
// [0.1, 10]; inverse binomial: on [0.05, 0.95]) plus every stage lattice
// point mapped through the criterion brackets. For the absolute binomial
// mode it is the union of the two Q grids.
VerificationGrid default_tuner_grid(const PrecisionGoal& goal, double rho);

}  // namespace seqest
