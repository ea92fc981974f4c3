#include "seqest/montecarlo.hpp"

#include <cmath>
#include <memory>
#include <thread>

#include "seqest/coverage.hpp"
#include "seqest/kernels.hpp"

namespace seqest {
namespace {

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t trial)
    : key_(mix64(mix64(seed + kGolden) ^ (trial * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL))) {}

std::uint64_t CounterRng::next_u64() { return mix64(key_ + (++counter_) * kGolden); }

double CounterRng::next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::int64_t poisson_variate(CounterRng& rng, double lambda) {
    if (lambda < 10.0) {
        // inversion by sequential search
        const double p0 = std::exp(-lambda);
        double u = rng.next_unit();
        std::int64_t k = 0;
        double p = p0;
        while (u > p) {
            u -= p;
            ++k;
            p *= lambda / static_cast<double>(k);
            if (p == 0.0) break;  // u ~ 1 and the tail underflowed
        }
        return k;
    }
    // Hormann's PTRD transformed-rejection sampler. The published acceptance
    // tests compare ln V against the log pmf, so the saddle-point kernel
    // serves directly.
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double v = rng.next_unit();
        double u;
        if (v <= 0.86 * v_r) {
            u = v / v_r - 0.43;
            return static_cast<std::int64_t>(
                std::floor((2.0 * a / (0.5 - std::fabs(u)) + b) * u + lambda + 0.445));
        }
        if (v >= v_r) {
            u = rng.next_unit() - 0.5;
        } else {
            u = v / v_r - 0.93;
            u = (u < 0.0 ? -0.5 : 0.5) - u;
            v = rng.next_unit() * v_r;
        }
        const double us = 0.5 - std::fabs(u);
        if (us <= 0.0 || (us < 0.013 && v > us)) continue;
        const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.445);
        if (kf < 0.0) continue;
        v = v * inv_alpha / (a / (us * us) + b);
        const std::int64_t k = static_cast<std::int64_t>(kf);
        if (std::log(v) <= log_poisson_pmf(k, lambda)) return k;
    }
}

PoissonSource::PoissonSource(double lambda, std::uint64_t seed, std::uint64_t trial)
    : rng_(seed, trial), lambda_(lambda) {}

std::optional<std::int64_t> PoissonSource::next() { return poisson_variate(rng_, lambda_); }

MonteCarloReport simulate_coverage(const StageSchedule& plan, double theta, std::int64_t trials, std::uint64_t seed,
                                   int threads, int stage_cap, std::int64_t draw_cap) {
    if (trials < 1) throw std::invalid_argument("seqest: simulate_coverage requires trials >= 1");
    const bool binomial = mode_is_binomial(plan.mode);

    struct Block {
        std::int64_t covered = 0;
        std::int64_t failures = 0;
        std::int64_t samples = 0;
        unsigned __int128 samples_sq = 0;
        std::int64_t completed = 0;
    };

    auto run_range = [&](std::int64_t lo, std::int64_t hi, Block& blk) {
        for (std::int64_t t = lo; t < hi; ++t) {
            std::unique_ptr<SampleSource> src;
            if (binomial)
                src = std::make_unique<BernoulliSource>(theta, seed, static_cast<std::uint64_t>(t));
            else
                src = std::make_unique<PoissonSource>(theta, seed, static_cast<std::uint64_t>(t));
            try {
                const EstimationResult res = run_plan(plan, *src, stage_cap, draw_cap);
                blk.completed += 1;
                blk.samples += res.total_samples;
                blk.samples_sq += static_cast<unsigned __int128>(res.total_samples) *
                                  static_cast<unsigned __int128>(res.total_samples);
                if (coverage_event(plan.goal, res.total_count, res.total_samples, theta)) blk.covered += 1;
            } catch (const RunError&) {
                blk.failures += 1;
            }
        }
    };

    const int nt = std::max(1, threads);
    std::vector<Block> blocks(static_cast<std::size_t>(nt));
    if (nt == 1) {
        run_range(0, trials, blocks[0]);
    } else {
        const std::int64_t chunk = (trials + nt - 1) / nt;
        std::vector<std::thread> pool;
        for (int w = 0; w < nt; ++w) {
            const std::int64_t lo = w * chunk;
            const std::int64_t hi = std::min(trials, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi, w] { run_range(lo, hi, blocks[static_cast<std::size_t>(w)]); });
        }
        for (std::thread& th : pool) th.join();
    }

    Block total;
    for (const Block& b : blocks) {
        total.covered += b.covered;
        total.failures += b.failures;
        total.samples += b.samples;
        total.samples_sq += b.samples_sq;
        total.completed += b.completed;
    }

    MonteCarloReport rpt;
    rpt.theta = theta;
    rpt.trials = trials;
    rpt.seed = seed;
    rpt.failures = total.failures;
    rpt.coverage_hat = static_cast<double>(total.covered) / static_cast<double>(trials);
    rpt.coverage_stderr =
        std::sqrt(rpt.coverage_hat * (1.0 - rpt.coverage_hat) / static_cast<double>(trials));
    if (total.completed > 0) {
        const double nC = static_cast<double>(total.completed);
        const double mean = static_cast<double>(total.samples) / nC;
        const double msq = static_cast<double>(total.samples_sq) / nC;
        rpt.asn_hat = mean;
        rpt.asn_stderr = std::sqrt(std::max(0.0, msq - mean * mean) / nC);
    }
    return rpt;
}

}  // namespace seqest
