#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "seqest/plan.hpp"

namespace seqest {

// State at one stage: the stage statistic (deterministic n_ell, or the random
// draw count of inverse sampling), the cumulative count K, and K/stat.
struct StageObservation {
    int ell = 0;
    std::int64_t stat = 0;
    std::int64_t K = 0;
    double estimate = 0.0;
};

// Terminal output of a sequential run. `trail` holds the per-stage decision
// values D_1..D_l: false at every stage before the stopping one.
struct EstimationResult {
    double estimate = 0.0;
    int stop_stage = 0;
    std::int64_t total_samples = 0;
    std::int64_t total_count = 0;  // cumulative K at the stopping stage
    std::vector<bool> trail;
};

// Executor failure that is a property of the input stream or the run limits
// (exhausted data, draw cap, stage cap), not a programming error.
struct RunError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Pull-based observation source: 0/1 values for Bernoulli sampling,
// nonnegative counts for Poisson sampling. Returns nullopt when exhausted.
class SampleSource {
  public:
    virtual ~SampleSource() = default;
    virtual std::optional<std::int64_t> next() = 0;
};

// Replays a recorded vector of observations.
class VectorSource final : public SampleSource {
  public:
    explicit VectorSource(std::vector<std::int64_t> values) : values_(std::move(values)) {}
    std::optional<std::int64_t> next() override {
        if (pos_ >= values_.size()) return std::nullopt;
        return values_[pos_++];
    }

  private:
    std::vector<std::int64_t> values_;
    std::size_t pos_ = 0;
};

// Stage decision predicates. Both tail conditions of the scheme's theorem
// must hold; bracket parameters that leave the distribution's domain make
// the corresponding tail sum exactly 0, so that side passes automatically.
// The Poisson lower condition is evaluated in the complement form
// S_P(K, inf, n, lower) <= budget, which coincides with the theorem's
// S_P(0, K-1, n, lower) >= 1 - budget for lower > 0 and stays well defined
// when the bracket is nonpositive.
bool decide_binomial(const PrecisionGoal& goal, std::int64_t K, std::int64_t n, double budget);
bool decide_poisson(const PrecisionGoal& goal, std::int64_t K, std::int64_t n, double budget);
bool decide(const PrecisionGoal& goal, std::int64_t K, std::int64_t n, double budget);

// Runs a fixed-schedule plan (abs-binomial, mixed-binomial, mixed-poisson).
// Throws RunError if the stream is exhausted before the stop, or if no stage
// decision fires by stage s (which the schedule construction rules out).
EstimationResult run_fixed_schedule(const StageSchedule& plan, SampleSource& stream);

// Runs an inverse-sampling plan: draws one at a time until the cumulative
// successes reach gamma_ell, then evaluates the stage decision. draw_cap
// bounds the total draws; a breach is reported as RunError, never silently
// truncated.
EstimationResult run_inverse_sampling(const StageSchedule& plan, SampleSource& stream,
                                      std::int64_t draw_cap = 1000000000);

// Runs an open-ended plan up to stage_cap stages.
EstimationResult run_open_ended(const StageSchedule& plan, SampleSource& stream, int stage_cap = 200);

// Dispatches to the executor matching the plan kind.
EstimationResult run_plan(const StageSchedule& plan, SampleSource& stream, int stage_cap = 200,
                          std::int64_t draw_cap = 1000000000);

}  // namespace seqest
