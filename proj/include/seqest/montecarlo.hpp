#pragma once

#include <cstdint>
#include <vector>

#include "seqest/plan.hpp"
#include "seqest/stopping.hpp"

namespace seqest {

// Counter-based pseudo-random stream: every draw is a pure function of
// (seed, trial, counter), so per-trial substreams are independent of worker
// scheduling and batch results are reproducible for any thread count.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t trial);
    std::uint64_t next_u64();
    double next_unit();  // uniform in [0,1), 53-bit

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

class BernoulliSource final : public SampleSource {
  public:
    BernoulliSource(double p, std::uint64_t seed, std::uint64_t trial) : rng_(seed, trial), p_(p) {}
    std::optional<std::int64_t> next() override { return rng_.next_unit() < p_ ? 1 : 0; }

  private:
    CounterRng rng_;
    double p_;
};

// Exact-distribution Poisson variates: sequential-search inversion for small
// means, transformed rejection (PTRD) for large ones.
class PoissonSource final : public SampleSource {
  public:
    PoissonSource(double lambda, std::uint64_t seed, std::uint64_t trial);
    std::optional<std::int64_t> next() override;

  private:
    CounterRng rng_;
    double lambda_;
    // PTRD constants, precomputed when lambda >= 10
    double b_ = 0.0, a_ = 0.0, inv_alpha_ = 0.0, v_r_ = 0.0;
};

std::int64_t poisson_variate(CounterRng& rng, double lambda);

struct MonteCarloReport {
    double theta = 0.0;
    std::int64_t trials = 0;
    double coverage_hat = 0.0;
    double coverage_stderr = 0.0;
    double asn_hat = 0.0;
    double asn_stderr = 0.0;
    std::uint64_t seed = 0;
    std::int64_t failures = 0;
};

// Runs `trials` independent executions of the plan at theta, one substream
// per trial index. Failed runs (draw/stage cap, which the tested
// configurations never hit) count as not covered and are excluded from the
// sample-size statistics. Results are byte-identical for any `threads`.
MonteCarloReport simulate_coverage(const StageSchedule& plan, double theta, std::int64_t trials, std::uint64_t seed,
                                   int threads = 1, int stage_cap = 200, std::int64_t draw_cap = 1000000000);

}  // namespace seqest
