#include "seqest/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace seqest {
namespace {

[[noreturn]] void reject(const std::string& what) { throw std::invalid_argument("seqest: " + what); }

std::vector<double> sorted_unique(std::set<double> pts) { return {pts.begin(), pts.end()}; }

struct GridEval {
    double min_coverage;
    std::vector<CoverageReport> reports;
};

GridEval evaluate_grid(const StageSchedule& plan, const std::vector<double>& pts, int threads) {
    GridEval ev;
    ev.reports = sweep_coverage(plan, pts, 200, threads);
    ev.min_coverage = 2.0;
    for (const CoverageReport& r : ev.reports) ev.min_coverage = std::min(ev.min_coverage, r.coverage);
    return ev;
}

}  // namespace

std::pair<VerificationGrid, VerificationGrid> build_q_grids(const StageSchedule& plan, double eps) {
    if (plan.mode != Mode::AbsoluteBinomial) reject("build_q_grids requires an absolute-criterion binomial plan");
    std::set<double> plus;
    std::set<double> minus;
    for (int ell = 1; ell <= plan.stage_count(); ++ell) {
        const std::int64_t n = plan.stage_at(ell);
        for (std::int64_t k = 0; k <= n; ++k) {
            const double base = static_cast<double>(k) / static_cast<double>(n);
            const double up = base + eps;
            if (up > 0.0 && up < 0.5) plus.insert(up);
            const double dn = base - eps;
            if (dn > 0.0 && dn < 0.5) minus.insert(dn);
        }
    }
    plus.insert(0.5);
    minus.insert(0.5);
    VerificationGrid gp{sorted_unique(std::move(plus)), VerificationGrid::Provenance::QPlus};
    VerificationGrid gm{sorted_unique(std::move(minus)), VerificationGrid::Provenance::QMinus};
    return {gp, gm};
}

VerificationGrid default_tuner_grid(const PrecisionGoal& goal, double rho) {
    goal.validate();
    if (mode_is_open(goal.mode)) reject("no default tuner grid for open-ended modes");
    const StageSchedule plan = build_fixed(goal, std::nullopt, rho);

    if (goal.mode == Mode::AbsoluteBinomial) {
        auto [gp, gm] = build_q_grids(plan, goal.eps_a);
        std::set<double> pts(gp.points.begin(), gp.points.end());
        pts.insert(gm.points.begin(), gm.points.end());
        return {sorted_unique(std::move(pts)), VerificationGrid::Provenance::UserSupplied};
    }

    std::set<double> pts;
    const bool binomial = mode_is_binomial(goal.mode);
    double lo = 0.0, hi = 0.0;
    if (goal.mode == Mode::RelativeBinomialInverse) {
        lo = 0.05, hi = 0.95;
        for (int i = 0; i < 999; ++i) pts.insert(lo + (hi - lo) * static_cast<double>(i) / 998.0);
    } else if (binomial) {
        lo = 0.0, hi = 1.0;
        for (int i = 1; i <= 999; ++i) pts.insert(static_cast<double>(i) / 1000.0);
    } else {
        lo = 0.1, hi = 10.0;
        for (int i = 0; i < 999; ++i)
            pts.insert(lo * std::pow(hi / lo, static_cast<double>(i) / 998.0));
    }
    // stage lattice points mapped through the criterion brackets
    if (!mode_is_inverse(goal.mode)) {
        auto keep = [&](double x) {
            if (binomial ? (x > 0.0 && x < 1.0) : (x >= 0.1 && x <= 10.0)) pts.insert(x);
        };
        for (int ell = 1; ell <= plan.stage_count(); ++ell) {
            const std::int64_t n = plan.stage_at(ell);
            const std::int64_t kmax = binomial ? n : 12 * n;
            for (std::int64_t k = 0; k <= kmax; ++k) {
                const double base = static_cast<double>(k) / static_cast<double>(n);
                if (!binomial && base > 10.0 + goal.eps_a + 1.0) break;
                if (goal.eps_a > 0.0) {
                    keep(base - goal.eps_a);
                    keep(base + goal.eps_a);
                }
                if (goal.eps_r > 0.0) {
                    keep(base / (1.0 + goal.eps_r));
                    keep(base / (1.0 - goal.eps_r));
                }
            }
        }
    }
    return {sorted_unique(std::move(pts)), VerificationGrid::Provenance::Uniform};
}

TuneResult tune_zeta(const PrecisionGoal& goal, double rho, const VerificationGrid& grid, double tol, int threads) {
    goal.validate();
    if (mode_is_open(goal.mode))
        reject("tune_zeta does not apply to open-ended modes (their schedules reject zeta above the theorem bound)");
    if (grid.points.empty()) reject("tune_zeta requires a nonempty verification grid");
    if (!(tol > 0.0)) reject("tune_zeta requires tol > 0");

    const int tau = schedule_tau(goal, rho);
    const double zeta_default = default_zeta(tau, goal.mode);
    const double target = 1.0 - goal.delta;
    const std::vector<std::int64_t> raw_default = raw_stage_values(goal, zeta_default, rho);

    TuneResult result;
    auto probe = [&](double zeta) {
        StageSchedule plan = build_fixed(goal, zeta, rho);
        // rebuild consistency: ln(1/(zeta*delta)) shrinks as zeta grows, so
        // every raw ladder entry must stay at or below the default's
        const std::vector<std::int64_t> raw = raw_stage_values(goal, zeta, rho);
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] > raw_default[i])
                throw std::logic_error("seqest: schedule grew while zeta increased");
        }
        GridEval ev = evaluate_grid(plan, grid.points, threads);
        const bool ok = ev.min_coverage >= target;
        result.transcript.push_back({zeta, ev.min_coverage, ok});
        return std::make_tuple(ok, std::move(plan), std::move(ev.reports));
    };

    auto [ok_def, plan_def, reports_def] = probe(zeta_default);
    if (!ok_def)
        throw std::runtime_error(
            "seqest: default zeta failed the verification grid; the theorems guarantee it, so this indicates an "
            "implementation defect");
    result.zeta_star = zeta_default;
    result.plan = std::move(plan_def);
    result.certificate = std::move(reports_def);

    auto [ok_top, plan_top, reports_top] = probe(1.0);
    if (ok_top) {
        result.zeta_star = 1.0;
        result.plan = std::move(plan_top);
        result.certificate = std::move(reports_top);
        return result;
    }

    double lo = zeta_default;
    double hi = 1.0;
    while (hi - lo > tol * lo) {
        const double mid = 0.5 * (lo + hi);
        auto [ok, plan_mid, reports_mid] = probe(mid);
        if (ok) {
            lo = mid;
            result.zeta_star = mid;
            result.plan = std::move(plan_mid);
            result.certificate = std::move(reports_mid);
        } else {
            hi = mid;
        }
    }
    return result;
}

}  // namespace seqest
