#include "seqest/coverage.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "seqest/exact_compare.hpp"
#include "seqest/kernels.hpp"
#include "seqest/stopping.hpp"

namespace seqest {
namespace {

[[noreturn]] void reject(const std::string& what) { throw std::invalid_argument("seqest: " + what); }

// Probability vector over a contiguous integer support [offset, offset+size).
struct MassVector {
    std::int64_t offset = 0;
    std::vector<double> mass;

    double total() const {
        double t = 0.0;
        for (double m : mass) t += m;
        return t;
    }
};

// Poisson pmf over the window mean +- (12 sqrt(mean) + 30), clipped at 0.
MassVector poisson_window(double mean) {
    const double half = 12.0 * std::sqrt(mean) + 30.0;
    MassVector v;
    v.offset = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(mean - half)));
    const std::int64_t hi = static_cast<std::int64_t>(std::ceil(mean + half));
    v.mass.resize(static_cast<std::size_t>(hi - v.offset + 1));
    for (std::int64_t k = v.offset; k <= hi; ++k)
        v.mass[static_cast<std::size_t>(k - v.offset)] = std::exp(log_poisson_pmf(k, mean));
    return v;
}

// Negative-binomial pmf of the draw count for dgamma further successes,
// windowed at mean +- (12 sd + 30).
MassVector neg_binomial_window(std::int64_t dgamma, double p) {
    const double mean = static_cast<double>(dgamma) / p;
    const double sd = std::sqrt(static_cast<double>(dgamma) * (1.0 - p)) / p;
    const double half = 12.0 * sd + 30.0;
    MassVector v;
    v.offset = std::max<std::int64_t>(dgamma, static_cast<std::int64_t>(std::floor(mean - half)));
    const std::int64_t hi = std::max<std::int64_t>(v.offset, static_cast<std::int64_t>(std::ceil(mean + half)));
    v.mass.resize(static_cast<std::size_t>(hi - v.offset + 1));
    for (std::int64_t n = v.offset; n <= hi; ++n)
        v.mass[static_cast<std::size_t>(n - v.offset)] = std::exp(log_neg_binomial_pmf(dgamma, n, p));
    return v;
}

MassVector binomial_full(std::int64_t n, double p) {
    MassVector v;
    v.offset = 0;
    v.mass.resize(static_cast<std::size_t>(n + 1));
    for (std::int64_t k = 0; k <= n; ++k) v.mass[static_cast<std::size_t>(k)] = std::exp(log_binomial_pmf(n, k, p));
    return v;
}

MassVector convolve(const MassVector& a, const MassVector& b) {
    MassVector out;
    out.offset = a.offset + b.offset;
    out.mass.assign(a.mass.size() + b.mass.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.mass.size(); ++i) {
        const double ai = a.mass[i];
        if (ai == 0.0) continue;
        for (std::size_t j = 0; j < b.mass.size(); ++j) out.mass[i + j] += ai * b.mass[j];
    }
    return out;
}

// Drop leading/trailing entries carrying at most `edge_mass` probability on
// each side; returns the dropped total.
double trim_edges(MassVector& v, double edge_mass) {
    double dropped = 0.0;
    std::size_t lo = 0;
    double acc = 0.0;
    while (lo < v.mass.size() && acc + v.mass[lo] <= edge_mass) acc += v.mass[lo++];
    dropped += acc;
    acc = 0.0;
    std::size_t hi = v.mass.size();
    while (hi > lo && acc + v.mass[hi - 1] <= edge_mass) acc += v.mass[--hi];
    dropped += acc;
    if (lo > 0 || hi < v.mass.size()) {
        v.mass = std::vector<double>(v.mass.begin() + static_cast<std::ptrdiff_t>(lo),
                                     v.mass.begin() + static_cast<std::ptrdiff_t>(hi));
        v.offset += static_cast<std::int64_t>(lo);
    }
    return dropped;
}

struct StageTally {
    double stop_mass = 0.0;
    double covered = 0.0;
    double lower_escape = 0.0;
    double upper_escape = 0.0;
    double samples = 0.0;
};

// Classify the current stage: move stopping mass out of `v` into the tally,
// leave continue mass in place.
StageTally classify_stage(const PrecisionGoal& goal, MassVector& v, std::int64_t stat, double budget, double theta) {
    StageTally t;
    for (std::size_t i = 0; i < v.mass.size(); ++i) {
        const double m = v.mass[i];
        if (m == 0.0) continue;
        const std::int64_t K = v.offset + static_cast<std::int64_t>(i);
        if (!decide(goal, K, stat, budget)) continue;
        t.stop_mass += m;
        t.samples += m * static_cast<double>(stat);
        if (coverage_event(goal, K, stat, theta)) t.covered += m;
        if (lower_escape_event(goal, K, stat, theta)) t.lower_escape += m;
        if (upper_escape_event(goal, K, stat, theta)) t.upper_escape += m;
        v.mass[i] = 0.0;
    }
    return t;
}

void append_tally(CoverageReport& rpt, const StageTally& t) {
    rpt.stage_mass.push_back(t.stop_mass);
    rpt.stage_lower_escape.push_back(t.lower_escape);
    rpt.stage_upper_escape.push_back(t.upper_escape);
    rpt.coverage += t.covered;
    rpt.asn += t.samples;
}

void check_theta(const StageSchedule& plan, double theta) {
    if (mode_is_binomial(plan.mode)) {
        if (!(theta > 0.0 && theta < 1.0)) reject("binomial parameter must lie in (0,1)");
    } else if (!(theta > 0.0)) {
        reject("poisson parameter must be positive");
    }
}

}  // namespace

bool coverage_event(const PrecisionGoal& goal, std::int64_t K, std::int64_t n, double theta) {
    switch (goal.mode) {
        case Mode::AbsoluteBinomial:
            return gap_sign_abs(K, n, theta, goal.eps_a) < 0 && gap_sign_abs(K, n, theta, -goal.eps_a) > 0;
        case Mode::AbsolutePoissonOpen:
            return gap_sign_abs(K, n, theta, goal.eps_a) <= 0 && gap_sign_abs(K, n, theta, -goal.eps_a) >= 0;
        case Mode::RelativeBinomialInverse:
            return gap_sign_rel(K, n, theta, goal.eps_r) < 0 && gap_sign_rel(K, n, theta, -goal.eps_r) > 0;
        case Mode::RelativeBinomialOpen:
        case Mode::RelativePoissonOpen:
            return gap_sign_rel(K, n, theta, goal.eps_r) <= 0 && gap_sign_rel(K, n, theta, -goal.eps_r) >= 0;
        case Mode::MixedBinomial:
        case Mode::MixedPoisson:
            return (gap_sign_abs(K, n, theta, goal.eps_a) < 0 && gap_sign_abs(K, n, theta, -goal.eps_a) > 0) ||
                   (gap_sign_rel(K, n, theta, goal.eps_r) < 0 && gap_sign_rel(K, n, theta, -goal.eps_r) > 0);
    }
    reject("unknown mode");
}

bool lower_escape_event(const PrecisionGoal& goal, std::int64_t K, std::int64_t n, double theta) {
    switch (goal.mode) {
        case Mode::AbsoluteBinomial:
        case Mode::AbsolutePoissonOpen:
            return gap_sign_abs(K, n, theta, goal.eps_a) >= 0;
        case Mode::RelativeBinomialInverse:
        case Mode::RelativeBinomialOpen:
        case Mode::RelativePoissonOpen:
            return gap_sign_rel(K, n, theta, goal.eps_r) >= 0;
        case Mode::MixedBinomial:
        case Mode::MixedPoisson:
            return gap_sign_abs(K, n, theta, goal.eps_a) >= 0 && gap_sign_rel(K, n, theta, goal.eps_r) >= 0;
    }
    reject("unknown mode");
}

bool upper_escape_event(const PrecisionGoal& goal, std::int64_t K, std::int64_t n, double theta) {
    switch (goal.mode) {
        case Mode::AbsoluteBinomial:
        case Mode::AbsolutePoissonOpen:
            return gap_sign_abs(K, n, theta, -goal.eps_a) <= 0;
        case Mode::RelativeBinomialInverse:
        case Mode::RelativeBinomialOpen:
        case Mode::RelativePoissonOpen:
            return gap_sign_rel(K, n, theta, -goal.eps_r) <= 0;
        case Mode::MixedBinomial:
        case Mode::MixedPoisson:
            return gap_sign_abs(K, n, theta, -goal.eps_a) <= 0 && gap_sign_rel(K, n, theta, -goal.eps_r) <= 0;
    }
    reject("unknown mode");
}

CoverageReport exact_coverage_fixed(const StageSchedule& plan, double theta) {
    if (plan.is_open()) reject("exact_coverage_fixed cannot evaluate open-ended plans; use exact_coverage_open");
    if (plan.is_inverse()) reject("exact_coverage_fixed cannot evaluate inverse plans; use exact_coverage_inverse");
    check_theta(plan, theta);

    const bool binomial = mode_is_binomial(plan.mode);
    const int s = plan.stage_count();
    CoverageReport rpt;
    rpt.theta = theta;

    MassVector v = binomial ? binomial_full(plan.stage_at(1), theta)
                            : poisson_window(static_cast<double>(plan.stage_at(1)) * theta);
    if (!binomial) rpt.truncation_bound += std::max(0.0, 1.0 - v.total());

    for (int ell = 1; ell <= s; ++ell) {
        const std::int64_t n = plan.stage_at(ell);
        append_tally(rpt, classify_stage(plan.goal, v, n, plan.budget_at(ell), theta));
        if (ell == s) break;
        const std::int64_t dn = plan.stage_at(ell + 1) - n;
        if (binomial) {
            v = convolve(v, binomial_full(dn, theta));
        } else {
            rpt.truncation_bound += trim_edges(v, 1e-15);
            MassVector inc = poisson_window(static_cast<double>(dn) * theta);
            rpt.truncation_bound += std::max(0.0, 1.0 - inc.total());
            v = convolve(v, inc);
        }
    }
    // final-stage certainty makes this zero; recorded honestly if it is not
    rpt.truncation_bound += v.total();
    return rpt;
}

CoverageReport exact_coverage_inverse(const StageSchedule& plan, double p) {
    if (!plan.is_inverse()) reject("exact_coverage_inverse requires an inverse-sampling plan");
    if (!(p > 0.0 && p < 1.0)) reject("binomial parameter must lie in (0,1)");

    const int s = plan.stage_count();
    CoverageReport rpt;
    rpt.theta = p;

    MassVector v = neg_binomial_window(plan.stage_at(1), p);
    rpt.truncation_bound += std::max(0.0, 1.0 - v.total());

    for (int ell = 1; ell <= s; ++ell) {
        const std::int64_t gamma = plan.stage_at(ell);
        const double budget = plan.budget_at(ell);
        // stage statistic is the draw count; K is the fixed success target
        StageTally t;
        for (std::size_t i = 0; i < v.mass.size(); ++i) {
            const double m = v.mass[i];
            if (m == 0.0) continue;
            const std::int64_t draws = v.offset + static_cast<std::int64_t>(i);
            if (!decide_binomial(plan.goal, gamma, draws, budget)) continue;
            t.stop_mass += m;
            t.samples += m * static_cast<double>(draws);
            if (coverage_event(plan.goal, gamma, draws, p)) t.covered += m;
            if (lower_escape_event(plan.goal, gamma, draws, p)) t.lower_escape += m;
            if (upper_escape_event(plan.goal, gamma, draws, p)) t.upper_escape += m;
            v.mass[i] = 0.0;
        }
        append_tally(rpt, t);
        if (ell == s) break;
        rpt.truncation_bound += trim_edges(v, 1e-15);
        MassVector inc = neg_binomial_window(plan.stage_at(ell + 1) - gamma, p);
        rpt.truncation_bound += std::max(0.0, 1.0 - inc.total());
        v = convolve(v, inc);
    }
    rpt.truncation_bound += v.total();
    return rpt;
}

CoverageReport exact_coverage_open(const StageSchedule& plan, double theta, int stage_cap) {
    if (!plan.is_open()) reject("exact_coverage_open requires an open-ended plan");
    check_theta(plan, theta);

    const bool binomial = mode_is_binomial(plan.mode);
    CoverageReport rpt;
    rpt.theta = theta;

    MassVector v = binomial ? binomial_full(plan.stage_at(1), theta)
                            : poisson_window(static_cast<double>(plan.stage_at(1)) * theta);
    if (!binomial) rpt.truncation_bound += std::max(0.0, 1.0 - v.total());

    for (int ell = 1; ell <= stage_cap; ++ell) {
        const std::int64_t n = plan.stage_at(ell);
        append_tally(rpt, classify_stage(plan.goal, v, n, plan.budget_at(ell), theta));
        const double cont = v.total();
        if (cont < 1e-9 || ell == stage_cap) {
            rpt.truncation_bound += cont;
            break;
        }
        rpt.truncation_bound += trim_edges(v, 1e-15);
        const std::int64_t dn = plan.stage_at(ell + 1) - n;
        MassVector inc;
        if (binomial) {
            inc = binomial_full(dn, theta);
        } else {
            inc = poisson_window(static_cast<double>(dn) * theta);
            rpt.truncation_bound += std::max(0.0, 1.0 - inc.total());
        }
        v = convolve(v, inc);
    }
    return rpt;
}

CoverageReport exact_coverage(const StageSchedule& plan, double theta, int stage_cap) {
    if (plan.is_open()) return exact_coverage_open(plan, theta, stage_cap);
    if (plan.is_inverse()) return exact_coverage_inverse(plan, theta);
    return exact_coverage_fixed(plan, theta);
}

namespace {

struct Enumerator {
    const StageSchedule& plan;
    double theta;
    std::uint64_t max_paths;
    bool binomial;
    CoverageReport rpt;
    std::uint64_t paths = 0;
    std::vector<std::int64_t> stream;
    std::vector<MassVector> inc;  // per-stage increment pmf over increment values

    void dfs(int ell, std::int64_t K, double weight) {
        const std::int64_t n = plan.stage_at(ell);
        if (decide(plan.goal, K, n, plan.budget_at(ell))) {
            if (++paths > max_paths) throw std::length_error("seqest: brute-force path budget exceeded");
            VectorSource src(stream);
            const EstimationResult res = run_fixed_schedule(plan, src);
            if (res.stop_stage != ell || res.total_count != K)
                throw std::logic_error("seqest: executor disagreed with enumeration");
            while (rpt.stage_mass.size() < static_cast<std::size_t>(ell)) {
                rpt.stage_mass.push_back(0.0);
                rpt.stage_lower_escape.push_back(0.0);
                rpt.stage_upper_escape.push_back(0.0);
            }
            rpt.stage_mass[static_cast<std::size_t>(ell - 1)] += weight;
            rpt.asn += weight * static_cast<double>(res.total_samples);
            if (coverage_event(plan.goal, K, n, theta)) rpt.coverage += weight;
            if (lower_escape_event(plan.goal, K, n, theta))
                rpt.stage_lower_escape[static_cast<std::size_t>(ell - 1)] += weight;
            if (upper_escape_event(plan.goal, K, n, theta))
                rpt.stage_upper_escape[static_cast<std::size_t>(ell - 1)] += weight;
            return;
        }
        if (ell == plan.stage_count()) {
            rpt.truncation_bound += weight;  // unreachable for well-formed plans
            return;
        }
        expand(ell + 1, K, weight);
    }

    void expand(int ell, std::int64_t K, double weight) {
        const std::int64_t dn = plan.stage_at(ell) - (ell == 1 ? 0 : plan.stage_at(ell - 1));
        const MassVector& pmf = inc[static_cast<std::size_t>(ell - 1)];
        double used = 0.0;
        for (std::size_t i = 0; i < pmf.mass.size(); ++i) {
            const std::int64_t add = pmf.offset + static_cast<std::int64_t>(i);
            const double w = weight * pmf.mass[i];
            used += pmf.mass[i];
            if (w == 0.0) continue;
            const std::size_t mark = stream.size();
            if (binomial) {
                for (std::int64_t j = 0; j < add; ++j) stream.push_back(1);
                for (std::int64_t j = add; j < dn; ++j) stream.push_back(0);
            } else {
                stream.push_back(add);
                for (std::int64_t j = 1; j < dn; ++j) stream.push_back(0);
            }
            dfs(ell, K + add, w);
            stream.resize(mark);
        }
        rpt.truncation_bound += weight * std::max(0.0, 1.0 - used);
    }
};

}  // namespace

CoverageReport brute_force_enumerate(const StageSchedule& plan, double theta, std::uint64_t max_paths) {
    if (plan.is_open() || plan.is_inverse()) reject("brute_force_enumerate requires a fixed-schedule plan");
    check_theta(plan, theta);

    Enumerator en{plan, theta, max_paths, mode_is_binomial(plan.mode), {}, 0, {}, {}};
    en.rpt.theta = theta;
    for (int ell = 1; ell <= plan.stage_count(); ++ell) {
        const std::int64_t dn = plan.stage_at(ell) - (ell == 1 ? 0 : plan.stage_at(ell - 1));
        if (en.binomial) {
            en.inc.push_back(binomial_full(dn, theta));
        } else {
            MassVector w = poisson_window(static_cast<double>(dn) * theta);
            // enumerate increments from zero so path probabilities are exact
            if (w.offset > 0) {
                std::vector<double> full(static_cast<std::size_t>(w.offset), 0.0);
                for (std::int64_t k = 0; k < w.offset; ++k)
                    full[static_cast<std::size_t>(k)] = std::exp(log_poisson_pmf(k, static_cast<double>(dn) * theta));
                w.mass.insert(w.mass.begin(), full.begin(), full.end());
                w.offset = 0;
            }
            en.inc.push_back(std::move(w));
        }
    }
    en.expand(1, 0, 1.0);
    while (en.rpt.stage_mass.size() < static_cast<std::size_t>(plan.stage_count())) {
        en.rpt.stage_mass.push_back(0.0);
        en.rpt.stage_lower_escape.push_back(0.0);
        en.rpt.stage_upper_escape.push_back(0.0);
    }
    return en.rpt;
}

std::vector<CoverageReport> sweep_coverage(const StageSchedule& plan, const std::vector<double>& thetas,
                                           int stage_cap, int threads) {
    std::vector<CoverageReport> out(thetas.size());
    const int nt = std::max(1, threads);
    if (nt == 1 || thetas.size() <= 1) {
        for (std::size_t i = 0; i < thetas.size(); ++i) out[i] = exact_coverage(plan, thetas[i], stage_cap);
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= thetas.size()) return;
            out[i] = exact_coverage(plan, thetas[i], stage_cap);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    return out;
}

}  // namespace seqest
