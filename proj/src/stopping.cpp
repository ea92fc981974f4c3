#include "seqest/stopping.hpp"

#include <algorithm>
#include <string>

#include "seqest/kernels.hpp"

namespace seqest {
namespace {

struct Brackets {
    double lower;
    double upper;
};

Brackets brackets_for(const PrecisionGoal& goal, double estimate) {
    switch (goal.mode) {
        case Mode::AbsoluteBinomial:
        case Mode::AbsolutePoissonOpen:
            return {estimate - goal.eps_a, estimate + goal.eps_a};
        case Mode::RelativeBinomialInverse:
        case Mode::RelativeBinomialOpen:
        case Mode::RelativePoissonOpen:
            return {estimate / (1.0 + goal.eps_r), estimate / (1.0 - goal.eps_r)};
        case Mode::MixedBinomial:
        case Mode::MixedPoisson:
            return {std::min(estimate - goal.eps_a, estimate / (1.0 + goal.eps_r)),
                    std::max(estimate + goal.eps_a, estimate / (1.0 - goal.eps_r))};
    }
    throw std::invalid_argument("seqest: unknown mode");
}

std::int64_t draw(SampleSource& stream, bool binomial) {
    const std::optional<std::int64_t> v = stream.next();
    if (!v) throw RunError("stream exhausted before the stopping rule fired");
    if (binomial) {
        if (*v != 0 && *v != 1) throw RunError("binomial stream value out of range {0,1}: " + std::to_string(*v));
    } else if (*v < 0) {
        throw RunError("poisson stream value negative: " + std::to_string(*v));
    }
    return *v;
}

}  // namespace

bool decide_binomial(const PrecisionGoal& goal, std::int64_t K, std::int64_t n, double budget) {
    const Brackets b = brackets_for(goal, static_cast<double>(K) / static_cast<double>(n));
    return s_b(K, n, n, b.lower) <= budget && s_b(0, K, n, b.upper) <= budget;
}

bool decide_poisson(const PrecisionGoal& goal, std::int64_t K, std::int64_t n, double budget) {
    const Brackets b = brackets_for(goal, static_cast<double>(K) / static_cast<double>(n));
    return s_p(K, kInfiniteUpper, n, b.lower) <= budget && s_p(0, K, n, b.upper) <= budget;
}

bool decide(const PrecisionGoal& goal, std::int64_t K, std::int64_t n, double budget) {
    return mode_is_binomial(goal.mode) ? decide_binomial(goal, K, n, budget) : decide_poisson(goal, K, n, budget);
}

EstimationResult run_fixed_schedule(const StageSchedule& plan, SampleSource& stream) {
    if (plan.is_open() || plan.is_inverse())
        throw std::invalid_argument("seqest: run_fixed_schedule requires a fixed-schedule plan");
    const bool binomial = mode_is_binomial(plan.mode);
    EstimationResult res;
    std::int64_t K = 0;
    std::int64_t consumed = 0;
    const int s = plan.stage_count();
    for (int ell = 1; ell <= s; ++ell) {
        const std::int64_t n = plan.stage_at(ell);
        while (consumed < n) {
            K += draw(stream, binomial);
            ++consumed;
        }
        const bool stop = decide(plan.goal, K, n, plan.budget_at(ell));
        res.trail.push_back(stop);
        if (stop) {
            res.estimate = static_cast<double>(K) / static_cast<double>(n);
            res.stop_stage = ell;
            res.total_samples = n;
            res.total_count = K;
            return res;
        }
    }
    throw RunError("no stage decision fired by the final stage");
}

EstimationResult run_inverse_sampling(const StageSchedule& plan, SampleSource& stream, std::int64_t draw_cap) {
    if (!plan.is_inverse()) throw std::invalid_argument("seqest: run_inverse_sampling requires an inverse-sampling plan");
    EstimationResult res;
    std::int64_t successes = 0;
    std::int64_t drawn = 0;
    const int s = plan.stage_count();
    for (int ell = 1; ell <= s; ++ell) {
        const std::int64_t gamma = plan.stage_at(ell);
        while (successes < gamma) {
            if (drawn >= draw_cap) throw RunError("draw cap reached before success target gamma_" + std::to_string(ell));
            successes += draw(stream, true);
            ++drawn;
        }
        const bool stop = decide_binomial(plan.goal, gamma, drawn, plan.budget_at(ell));
        res.trail.push_back(stop);
        if (stop) {
            res.estimate = static_cast<double>(gamma) / static_cast<double>(drawn);
            res.stop_stage = ell;
            res.total_samples = drawn;
            res.total_count = gamma;
            return res;
        }
    }
    throw RunError("no stage decision fired by the final stage");
}

EstimationResult run_open_ended(const StageSchedule& plan, SampleSource& stream, int stage_cap) {
    if (!plan.is_open()) throw std::invalid_argument("seqest: run_open_ended requires an open-ended plan");
    const bool binomial = mode_is_binomial(plan.mode);
    EstimationResult res;
    std::int64_t K = 0;
    std::int64_t consumed = 0;
    for (int ell = 1; ell <= stage_cap; ++ell) {
        const std::int64_t n = plan.stage_at(ell);
        while (consumed < n) {
            K += draw(stream, binomial);
            ++consumed;
        }
        const bool stop = decide(plan.goal, K, n, plan.budget_at(ell));
        res.trail.push_back(stop);
        if (stop) {
            res.estimate = static_cast<double>(K) / static_cast<double>(n);
            res.stop_stage = ell;
            res.total_samples = n;
            res.total_count = K;
            return res;
        }
    }
    throw RunError("stage cap " + std::to_string(stage_cap) + " reached before the stopping rule fired");
}

EstimationResult run_plan(const StageSchedule& plan, SampleSource& stream, int stage_cap, std::int64_t draw_cap) {
    if (plan.is_open()) return run_open_ended(plan, stream, stage_cap);
    if (plan.is_inverse()) return run_inverse_sampling(plan, stream, draw_cap);
    return run_fixed_schedule(plan, stream);
}

}  // namespace seqest
