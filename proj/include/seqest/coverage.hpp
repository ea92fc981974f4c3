#pragma once

#include <cstdint>
#include <vector>

#include "seqest/plan.hpp"

namespace seqest {

// Exact operating characteristics of a plan at one parameter point.
//
// `coverage` is the probability that the terminal estimate satisfies the
// scheme's precision event (strict or non-strict per the originating
// theorem). `asn` is the expected total number of observations. stage_mass
// holds the stopping probability per stage; stage_lower_escape /
// stage_upper_escape the one-sided masses Pr{theta <= lower bracket, stop at
// ell} and Pr{theta >= upper bracket, stop at ell} that the per-stage budget
// zeta*delta_ell caps. truncation_bound is an upper bound on all probability
// mass the computation discarded (support windows, trimming, residual
// continue mass), so `coverage` is always a certified lower bound and
// `coverage + truncation_bound` an upper bound.
struct CoverageReport {
    double theta = 0.0;
    double coverage = 0.0;
    double asn = 0.0;
    double truncation_bound = 0.0;
    std::vector<double> stage_mass;
    std::vector<double> stage_lower_escape;
    std::vector<double> stage_upper_escape;
};

// Precision event of the plan's theorem at an exact lattice point, resolved
// in error-free arithmetic (ties at |estimate - theta| = eps are decided by
// the theorem's strictness, not by rounding).
bool coverage_event(const PrecisionGoal& goal, std::int64_t K, std::int64_t n, double theta);

// Lemma-style one-sided escape events (non-strict, as in the budget lemmas).
bool lower_escape_event(const PrecisionGoal& goal, std::int64_t K, std::int64_t n, double theta);
bool upper_escape_event(const PrecisionGoal& goal, std::int64_t K, std::int64_t n, double theta);

// DP over the cumulative-count lattice for fixed schedules. Binomial plans
// are computed with zero truncation; Poisson increments are windowed at
// mean +- (12 sqrt(mean) + 30) with the discarded mass recorded.
CoverageReport exact_coverage_fixed(const StageSchedule& plan, double theta);

// DP over the draw-count lattice of inverse sampling (negative-binomial
// stage increments, windowed with recorded truncation).
CoverageReport exact_coverage_inverse(const StageSchedule& plan, double p);

// Truncated DP for open-ended plans: iterates until the continue mass drops
// below 1e-9 or stage_cap stages, whichever first; the residual is added to
// truncation_bound.
CoverageReport exact_coverage_open(const StageSchedule& plan, double theta, int stage_cap = 200);

// Dispatch on plan kind.
CoverageReport exact_coverage(const StageSchedule& plan, double theta, int stage_cap = 200);

// Independent oracle: enumerates every outcome path of a fixed plan with its
// exact probability and replays the sequential executor on it. Refuses
// instances whose path count exceeds max_paths.
CoverageReport brute_force_enumerate(const StageSchedule& plan, double theta, std::uint64_t max_paths = 10000000);

// Embarrassingly parallel sweep; results are ordered like `thetas`
// regardless of thread count.
std::vector<CoverageReport> sweep_coverage(const StageSchedule& plan, const std::vector<double>& thetas,
                                           int stage_cap = 200, int threads = 1);

}  // namespace seqest
