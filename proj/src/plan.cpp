#include "seqest/plan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace seqest {
namespace {

constexpr double kQuietNan = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void reject(const std::string& what) { throw std::invalid_argument("seqest: " + what); }

std::int64_t ceil_to_i64(double x, const char* what) {
    if (!(x < 9.0e18)) reject(std::string(what) + ": schedule value overflows 64-bit range");
    const double c = std::ceil(x);
    return static_cast<std::int64_t>(c);
}

void check_common(const PrecisionGoal& goal, double zeta, double rho) {
    if (!(goal.delta > 0.0 && goal.delta < 1.0)) reject("requires 0 < delta < 1");
    if (!(zeta > 0.0)) reject("requires zeta > 0");
    if (!(rho > 0.0)) reject("requires rho > 0");
}

std::vector<std::int64_t> dedup_sorted(std::vector<std::int64_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

StageSchedule assemble(const PrecisionGoal& goal, double zeta, double rho, double nu, int tau,
                       std::vector<std::int64_t> raw) {
    StageSchedule plan;
    plan.mode = goal.mode;
    plan.goal = goal;
    plan.zeta = zeta;
    plan.rho = rho;
    plan.nu = nu;
    plan.tau = tau;
    plan.stages = dedup_sorted(std::move(raw));
    plan.per_stage_budget.assign(plan.stages.size(), zeta * goal.delta);
    return plan;
}

}  // namespace

bool mode_is_binomial(Mode m) {
    return m == Mode::AbsoluteBinomial || m == Mode::RelativeBinomialInverse || m == Mode::RelativeBinomialOpen ||
           m == Mode::MixedBinomial;
}

bool mode_is_poisson(Mode m) { return !mode_is_binomial(m); }

bool mode_is_open(Mode m) {
    return m == Mode::RelativeBinomialOpen || m == Mode::AbsolutePoissonOpen || m == Mode::RelativePoissonOpen;
}

bool mode_is_inverse(Mode m) { return m == Mode::RelativeBinomialInverse; }

std::string mode_name(Mode m) {
    switch (m) {
        case Mode::AbsoluteBinomial: return "abs-binomial";
        case Mode::RelativeBinomialInverse: return "rel-binomial-inverse";
        case Mode::RelativeBinomialOpen: return "rel-binomial-open";
        case Mode::MixedBinomial: return "mixed-binomial";
        case Mode::MixedPoisson: return "mixed-poisson";
        case Mode::AbsolutePoissonOpen: return "abs-poisson-open";
        case Mode::RelativePoissonOpen: return "rel-poisson-open";
    }
    reject("unknown mode");
}

Mode mode_from_name(const std::string& name) {
    if (name == "abs-binomial") return Mode::AbsoluteBinomial;
    if (name == "rel-binomial-inverse") return Mode::RelativeBinomialInverse;
    if (name == "rel-binomial-open") return Mode::RelativeBinomialOpen;
    if (name == "mixed-binomial") return Mode::MixedBinomial;
    if (name == "mixed-poisson") return Mode::MixedPoisson;
    if (name == "abs-poisson-open") return Mode::AbsolutePoissonOpen;
    if (name == "rel-poisson-open") return Mode::RelativePoissonOpen;
    reject("unknown mode name '" + name + "'");
}

void PrecisionGoal::validate() const {
    if (!(delta > 0.0 && delta < 1.0)) reject("requires 0 < delta < 1");
    switch (mode) {
        case Mode::AbsoluteBinomial:
            if (!(eps_a > 0.0 && eps_a < 0.5)) reject("abs-binomial requires 0 < eps < 1/2");
            break;
        case Mode::RelativeBinomialInverse:
        case Mode::RelativeBinomialOpen:
        case Mode::RelativePoissonOpen:
            if (!(eps_r > 0.0 && eps_r < 1.0)) reject(mode_name(mode) + " requires 0 < eps < 1");
            break;
        case Mode::AbsolutePoissonOpen:
            if (!(eps_a > 0.0)) reject("abs-poisson-open requires eps > 0");
            break;
        case Mode::MixedBinomial: {
            if (!(eps_a > 0.0 && eps_a < 35.0 / 94.0)) reject("mixed-binomial requires 0 < eps_a < 35/94");
            const double lower = 70.0 * eps_a / (35.0 - 24.0 * eps_a);
            if (!(eps_r > lower)) reject("mixed-binomial requires eps_r > 70*eps_a/(35-24*eps_a)");
            if (!(eps_r < 1.0)) reject("mixed-binomial requires eps_r < 1");
            break;
        }
        case Mode::MixedPoisson:
            if (!(eps_a > 0.0 && eps_a < 1.0)) reject("mixed-poisson requires 0 < eps_a < 1");
            if (!(eps_r > 0.0 && eps_r < 1.0)) reject("mixed-poisson requires 0 < eps_r < 1");
            break;
    }
}

std::int64_t StageSchedule::stage_at(int ell) const {
    if (!is_open()) return stages.at(static_cast<std::size_t>(ell - 1));
    const OpenEndedConfig& cfg = *open_ended;
    std::int64_t prev = 0;
    std::int64_t n = cfg.n1;
    for (int j = 1; j <= ell; ++j) {
        const double raw = static_cast<double>(cfg.n1) * std::pow(cfg.growth, j - 1);
        if (!(raw < 9.0e18)) throw std::overflow_error("seqest: open-ended stage size overflows 64-bit range");
        n = std::max(static_cast<std::int64_t>(std::ceil(raw)), prev + 1);
        prev = n;
    }
    return n;
}

double StageSchedule::budget_at(int ell) const {
    if (!is_open()) return per_stage_budget.at(static_cast<std::size_t>(ell - 1));
    const int t = open_ended->tau;
    const double d = ell <= t ? goal.delta : std::ldexp(goal.delta, t - ell);
    return zeta * d;
}

double default_zeta(int tau, Mode mode) {
    if (mode == Mode::MixedBinomial) {
        if (tau > -1) reject("mixed-binomial requires tau <= -1");
        return 1.0 / (2.0 * (1.0 - static_cast<double>(tau)));
    }
    if (tau < 1) reject("requires tau >= 1");
    return 1.0 / (2.0 * (static_cast<double>(tau) + 1.0));
}

namespace {

// Shared ladder construction: raw values are ceil(scale * base^(i/tau)),
// i = 0..|tau|. For the mixed binomial scheme tau is negative and base is
// 1+nu in (0,1), so the exponents i/tau run from 0 down to -1 and the ladder
// climbs from scale to scale/(1+nu).
std::vector<std::int64_t> geometric_ladder(double scale, double base, int tau, const char* what) {
    std::vector<std::int64_t> raw;
    const int span = std::abs(tau);
    raw.reserve(static_cast<std::size_t>(span) + 1);
    for (int i = 0; i <= span; ++i) {
        const double f = std::pow(base, static_cast<double>(i) / static_cast<double>(tau));
        raw.push_back(ceil_to_i64(f * scale, what));
    }
    return raw;
}

struct LadderParams {
    double nu;
    int tau;
    double scale_over_logbudget;  // multiply by ln(1/(zeta*delta)) to get scale
    double base;
};

LadderParams ladder_params(const PrecisionGoal& goal, double rho) {
    goal.validate();
    if (!(rho > 0.0)) reject("requires rho > 0");
    LadderParams lp{};
    switch (goal.mode) {
        case Mode::AbsoluteBinomial: {
            const double eps = goal.eps_a;
            const double c = 2.0 * eps * eps;
            const double lninv = -std::log1p(-eps);  // ln(1/(1-eps))
            lp.tau = static_cast<int>(std::ceil(std::log(lninv / c) / std::log1p(rho)));
            lp.nu = kQuietNan;
            lp.scale_over_logbudget = 1.0 / c;
            lp.base = c / lninv;  // exponent 1 - i/tau folded below
            return lp;
        }
        case Mode::RelativeBinomialInverse: {
            const double eps = goal.eps_r;
            lp.nu = eps / ((1.0 + eps) * std::log1p(eps) - eps);
            lp.tau = static_cast<int>(std::ceil(std::log1p(lp.nu) / std::log1p(rho)));
            lp.scale_over_logbudget = 1.0 / std::log1p(eps);
            lp.base = 1.0 + lp.nu;
            return lp;
        }
        case Mode::MixedBinomial: {
            const double ea = goal.eps_a, er = goal.eps_r;
            lp.nu = (ea + er * ea - er) / (er * std::log1p(er)) * std::log1p(er * er / (er - ea - er * ea));
            lp.tau = static_cast<int>(std::floor(std::log1p(lp.nu) / std::log1p(rho)));
            lp.scale_over_logbudget = 1.0 / std::log1p(er);
            lp.base = 1.0 + lp.nu;
            return lp;
        }
        case Mode::MixedPoisson: {
            const double ea = goal.eps_a, er = goal.eps_r;
            lp.nu = er / (ea * ((1.0 + er) * std::log1p(er) - er));
            lp.tau = static_cast<int>(std::ceil(std::log(lp.nu) / std::log1p(rho)));
            lp.scale_over_logbudget = 1.0;
            lp.base = lp.nu;
            return lp;
        }
        default: reject("fixed-schedule builder called with an open-ended mode");
    }
}

}  // namespace

int schedule_tau(const PrecisionGoal& goal, double rho) { return ladder_params(goal, rho).tau; }

std::vector<std::int64_t> raw_stage_values(const PrecisionGoal& goal, double zeta, double rho) {
    const LadderParams lp = ladder_params(goal, rho);
    if (!(zeta > 0.0)) reject("requires zeta > 0");
    const double L = -std::log(zeta * goal.delta);
    if (goal.mode == Mode::AbsoluteBinomial) {
        // stage i = ceil(base^(1 - i/tau) * L / (2 eps^2)), i = 0..tau
        std::vector<std::int64_t> raw;
        raw.reserve(static_cast<std::size_t>(lp.tau) + 1);
        for (int i = 0; i <= lp.tau; ++i) {
            const double f = std::pow(lp.base, 1.0 - static_cast<double>(i) / static_cast<double>(lp.tau));
            raw.push_back(ceil_to_i64(f * L * lp.scale_over_logbudget, "abs-binomial"));
        }
        return raw;
    }
    return geometric_ladder(L * lp.scale_over_logbudget, lp.base, lp.tau, mode_name(goal.mode).c_str());
}

StageSchedule build_abs_binomial(const PrecisionGoal& goal, std::optional<double> zeta, double rho) {
    if (goal.mode != Mode::AbsoluteBinomial) reject("build_abs_binomial requires mode abs-binomial");
    const LadderParams lp = ladder_params(goal, rho);
    const double z = zeta ? *zeta : default_zeta(lp.tau, goal.mode);
    check_common(goal, z, rho);
    return assemble(goal, z, rho, lp.nu, lp.tau, raw_stage_values(goal, z, rho));
}

StageSchedule build_rel_binomial_inverse(const PrecisionGoal& goal, std::optional<double> zeta, double rho) {
    if (goal.mode != Mode::RelativeBinomialInverse) reject("build_rel_binomial_inverse requires mode rel-binomial-inverse");
    const LadderParams lp = ladder_params(goal, rho);
    const double z = zeta ? *zeta : default_zeta(lp.tau, goal.mode);
    check_common(goal, z, rho);
    return assemble(goal, z, rho, lp.nu, lp.tau, raw_stage_values(goal, z, rho));
}

StageSchedule build_mixed_binomial(const PrecisionGoal& goal, std::optional<double> zeta, double rho) {
    if (goal.mode != Mode::MixedBinomial) reject("build_mixed_binomial requires mode mixed-binomial");
    const LadderParams lp = ladder_params(goal, rho);
    const double z = zeta ? *zeta : default_zeta(lp.tau, goal.mode);
    check_common(goal, z, rho);
    return assemble(goal, z, rho, lp.nu, lp.tau, raw_stage_values(goal, z, rho));
}

StageSchedule build_mixed_poisson(const PrecisionGoal& goal, std::optional<double> zeta, double rho) {
    if (goal.mode != Mode::MixedPoisson) reject("build_mixed_poisson requires mode mixed-poisson");
    const LadderParams lp = ladder_params(goal, rho);
    const double z = zeta ? *zeta : default_zeta(lp.tau, goal.mode);
    check_common(goal, z, rho);
    return assemble(goal, z, rho, lp.nu, lp.tau, raw_stage_values(goal, z, rho));
}

StageSchedule build_fixed(const PrecisionGoal& goal, std::optional<double> zeta, double rho) {
    switch (goal.mode) {
        case Mode::AbsoluteBinomial: return build_abs_binomial(goal, zeta, rho);
        case Mode::RelativeBinomialInverse: return build_rel_binomial_inverse(goal, zeta, rho);
        case Mode::MixedBinomial: return build_mixed_binomial(goal, zeta, rho);
        case Mode::MixedPoisson: return build_mixed_poisson(goal, zeta, rho);
        default: reject("mode " + mode_name(goal.mode) + " has no fixed schedule; use build_open_ended");
    }
}

StageSchedule build_open_ended(const PrecisionGoal& goal, std::optional<double> zeta, int tau, std::int64_t n1,
                               double growth) {
    if (!mode_is_open(goal.mode)) reject("build_open_ended requires an open-ended mode");
    goal.validate();
    if (tau < 1) reject("open-ended requires tau >= 1");
    if (n1 < 1) reject("open-ended requires n1 >= 1");
    if (!(growth > 1.0)) reject("open-ended requires growth ratio r > 1");
    const double z = zeta ? *zeta : default_zeta(tau, goal.mode);
    if (!(z > 0.0)) reject("requires zeta > 0");
    if (!(2.0 * (static_cast<double>(tau) + 1.0) * z <= 1.0)) reject("open-ended requires 2(tau+1)*zeta <= 1");

    StageSchedule plan;
    plan.mode = goal.mode;
    plan.goal = goal;
    plan.zeta = z;
    plan.rho = kQuietNan;
    plan.nu = kQuietNan;
    plan.tau = tau;
    plan.open_ended = OpenEndedConfig{n1, growth, tau};
    return plan;
}

}  // namespace seqest
