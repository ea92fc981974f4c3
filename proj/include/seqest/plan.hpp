#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace seqest {

// The seven supported sampling schemes. "Open" modes run an unbounded
// deterministic ladder of stage sizes; the others have a finite schedule
// derived from the precision goal.
enum class Mode {
    AbsoluteBinomial,         // fixed schedule, |p_hat - p| < eps
    RelativeBinomialInverse,  // inverse sampling, |p_hat - p| < eps * p
    RelativeBinomialOpen,     // open-ended, |p_hat - p| <= eps * p
    MixedBinomial,            // fixed schedule, abs-or-rel criterion
    MixedPoisson,             // fixed schedule, abs-or-rel criterion
    AbsolutePoissonOpen,      // open-ended, |l_hat - l| <= eps
    RelativePoissonOpen,      // open-ended, |l_hat - l| <= eps * l
};

bool mode_is_binomial(Mode m);
bool mode_is_poisson(Mode m);
bool mode_is_open(Mode m);
bool mode_is_inverse(Mode m);
std::string mode_name(Mode m);
Mode mode_from_name(const std::string& name);

// Target criterion: tolerance(s) plus risk delta. eps_a carries the absolute
// tolerance (also the single eps of the absolute modes), eps_r the relative
// tolerance (also the single eps of the relative modes).
struct PrecisionGoal {
    Mode mode;
    double eps_a = 0.0;
    double eps_r = 0.0;
    double delta = 0.0;

    // Throws std::invalid_argument naming the violated inequality.
    void validate() const;
};

struct OpenEndedConfig {
    std::int64_t n1 = 10;  // first stage size
    double growth = 1.5;   // geometric ratio, > 1
    int tau = 3;           // stages with full budget delta before halving
};

// A fully materialized sampling plan. For fixed and inverse-sampling modes,
// `stages` holds the cumulative sample sizes n_1 < ... < n_s (or success
// targets gamma_1 < ... < gamma_s) and `per_stage_budget` the constant
// zeta*delta. Open-ended plans store the generator configuration instead and
// derive stage sizes and shrinking budgets on demand.
struct StageSchedule {
    Mode mode;
    PrecisionGoal goal;
    double zeta = 0.0;
    double rho = 0.0;
    double nu = 0.0;  // NaN where the theorem defines none
    int tau = 0;
    std::vector<std::int64_t> stages;
    std::vector<double> per_stage_budget;
    std::optional<OpenEndedConfig> open_ended;

    bool is_open() const { return open_ended.has_value(); }
    bool is_inverse() const { return mode == Mode::RelativeBinomialInverse; }
    int stage_count() const { return static_cast<int>(stages.size()); }

    // Stage statistic at 1-based stage ell; for open-ended plans this is the
    // strictly increasing ceil(n1 * growth^(ell-1)) ladder.
    std::int64_t stage_at(int ell) const;
    // Per-stage error budget zeta * delta_ell.
    double budget_at(int ell) const;
};

// zeta upper bound granted by the theorem for a schedule with the given tau:
// 1/(2(tau+1)) everywhere except the mixed binomial scheme's 1/(2(1-tau)).
double default_zeta(int tau, Mode mode);

// Schedule builders. Passing std::nullopt for zeta selects the theorem
// default. All throw std::invalid_argument on parameter-region violations,
// naming the inequality that failed.
StageSchedule build_abs_binomial(const PrecisionGoal& goal, std::optional<double> zeta, double rho);
StageSchedule build_rel_binomial_inverse(const PrecisionGoal& goal, std::optional<double> zeta, double rho);
StageSchedule build_mixed_binomial(const PrecisionGoal& goal, std::optional<double> zeta, double rho);
StageSchedule build_mixed_poisson(const PrecisionGoal& goal, std::optional<double> zeta, double rho);
StageSchedule build_open_ended(const PrecisionGoal& goal, std::optional<double> zeta, int tau, std::int64_t n1,
                               double growth);

// Dispatch over the four fixed/inverse builders (open modes rejected).
StageSchedule build_fixed(const PrecisionGoal& goal, std::optional<double> zeta, double rho);

// tau as the builder would derive it (independent of zeta).
int schedule_tau(const PrecisionGoal& goal, double rho);

// The pre-deduplication ladder values, index 0..|tau|, used by consistency
// checks: they must shrink elementwise as zeta grows.
std::vector<std::int64_t> raw_stage_values(const PrecisionGoal& goal, double zeta, double rho);

}  // namespace seqest
