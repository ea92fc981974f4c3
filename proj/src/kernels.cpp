#include "seqest/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace seqest {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLnSqrt2Pi = 0.91893853320467274178032973640562;

// stirlerr(n) = ln(n!) - [ (n+1/2) ln n - n + ln sqrt(2 pi) ].
// Integer arguments only; exact table below 16, Stirling series beyond.
double stirlerr(std::int64_t n) {
    static const double table[16] = {
        0.0,
        0.08106146679532725821967,   // n=1
        0.04134069595540929409382,   // n=2
        0.02767792568499833914879,   // n=3
        0.02079067210376509311152,   // n=4
        0.01664469118982119216319,   // n=5
        0.01387612882307074799875,   // n=6
        0.01189670994589177009506,   // n=7
        0.01041126526197209649748,   // n=8
        0.009255462182712732917729,  // n=9
        0.008330563433362871256469,  // n=10
        0.007573675487951840794972,  // n=11
        0.006942840107209529865664,  // n=12
        0.00640899418800420706844,   // n=13
        0.005951370112758847735624,  // n=14
        0.005554733551962801371039,  // n=15
    };
    if (n < 16) return table[n];
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    // 1/(12n) - 1/(360n^3) + 1/(1260n^5) - 1/(1680n^7) + 1/(1188n^9)
    return (1.0 / 12 - (1.0 / 360 - (1.0 / 1260 - (1.0 / 1680 - 1.0 / (1188 * nn)) / nn) / nn) / nn) /
           static_cast<double>(n);
}

// bd0(x, m) = x ln(x/m) + m - x, evaluated without cancellation when x ~ m.
double bd0(double x, double m) {
    if (x == 0.0) return m;
    if (std::fabs(x - m) < 0.1 * (x + m)) {
        const double v = (x - m) / (x + m);
        const double v2 = v * v;
        double s = (x - m) * v;
        double ej = 2.0 * x * v;
        for (int j = 1;; ++j) {
            ej *= v2;
            const double s1 = s + ej / (2 * j + 1);
            if (s1 == s) return s1;
            s = s1;
        }
    }
    return x * std::log(x / m) + m - x;
}

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

[[noreturn]] void contract_violation(const std::string& what) {
    throw std::invalid_argument("seqest: " + what);
}

}  // namespace

double log_binomial_pmf(std::int64_t n, std::int64_t k, double p) {
    if (k == 0) return static_cast<double>(n) * std::log1p(-p);
    if (k == n) return static_cast<double>(n) * std::log(p);
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    const double nk = static_cast<double>(n - k);
    const double lc = stirlerr(n) - stirlerr(k) - stirlerr(n - k) - bd0(kd, nd * p) - bd0(nk, nd * (1.0 - p));
    return lc - kLnSqrt2Pi - 0.5 * std::log(kd * (nk / nd));
}

double log_poisson_pmf(std::int64_t k, double mean) {
    if (k == 0) return -mean;
    const double kd = static_cast<double>(k);
    return -stirlerr(k) - bd0(kd, mean) - kLnSqrt2Pi - 0.5 * std::log(kd);
}

double log_neg_binomial_pmf(std::int64_t gamma, std::int64_t n, double p) {
    // C(n-1, gamma-1) p^gamma q^(n-gamma) = (gamma/n) * Binomial(n, gamma) pmf
    return std::log(static_cast<double>(gamma) / static_cast<double>(n)) + log_binomial_pmf(n, gamma, p);
}

namespace {

// Sum pmf terms over [k, l] anchored at the in-range mode. Terms are generated
// by exact-ratio recurrence outward from the anchor, where they decay
// monotonically, so early termination below 1e-21 of the running sum loses
// less than 1e-16 relative mass.
template <typename RatioUp, typename RatioDown>
double anchored_tail_sum(std::int64_t k, std::int64_t l, std::int64_t anchor, double log_anchor_pmf,
                         RatioUp ratio_up, RatioDown ratio_down) {
    KahanSum acc;
    acc.add(1.0);
    double t = 1.0;
    for (std::int64_t i = anchor; i < l; ++i) {
        t *= ratio_up(i);
        if (!(t > 1e-21 * acc.sum)) break;
        acc.add(t);
    }
    t = 1.0;
    for (std::int64_t i = anchor; i > k; --i) {
        t *= ratio_down(i);
        if (!(t > 1e-21 * acc.sum)) break;
        acc.add(t);
    }
    const double base = std::exp(log_anchor_pmf);
    return std::min(base * acc.sum, 1.0);
}

}  // namespace

double s_b(std::int64_t k, std::int64_t l, std::int64_t n, double p) {
    if (n <= 0) contract_violation("s_b requires n >= 1 (got n=" + std::to_string(n) + ")");
    if (k < 0) contract_violation("s_b requires k >= 0 (got k=" + std::to_string(k) + ")");
    if (l > n) contract_violation("s_b requires l <= n (got l=" + std::to_string(l) + ", n=" + std::to_string(n) + ")");
    if (!(p > 0.0 && p < 1.0)) return 0.0;
    if (k > l) return 0.0;

    // anchor at the pmf mode clamped into [k, l]
    std::int64_t anchor = static_cast<std::int64_t>(std::floor((static_cast<double>(n) + 1.0) * p));
    anchor = std::clamp(anchor, k, l);
    const double odds = p / (1.0 - p);
    const double la = log_binomial_pmf(n, anchor, p);
    return anchored_tail_sum(
        k, l, anchor, la,
        [&](std::int64_t i) { return (static_cast<double>(n - i) / static_cast<double>(i + 1)) * odds; },
        [&](std::int64_t i) { return (static_cast<double>(i) / static_cast<double>(n - i + 1)) / odds; });
}

double s_p(std::int64_t k, std::int64_t l, std::int64_t n, double lambda) {
    if (n <= 0) contract_violation("s_p requires n >= 1 (got n=" + std::to_string(n) + ")");
    if (k < 0) contract_violation("s_p requires k >= 0 (got k=" + std::to_string(k) + ")");
    if (!(lambda > 0.0)) return 0.0;
    if (l == kInfiniteUpper) {
        if (k == 0) return 1.0;
        return std::max(0.0, 1.0 - s_p(0, k - 1, n, lambda));
    }
    if (k > l) return 0.0;

    const double mean = static_cast<double>(n) * lambda;
    std::int64_t anchor = static_cast<std::int64_t>(std::floor(mean));
    anchor = std::clamp(anchor, k, l);
    const double la = log_poisson_pmf(anchor, mean);
    return anchored_tail_sum(
        k, l, anchor, la, [&](std::int64_t i) { return mean / static_cast<double>(i + 1); },
        [&](std::int64_t i) { return static_cast<double>(i) / mean; });
}

double m_b(double z, double mu) {
    if (!(z >= 0.0 && z <= 1.0)) contract_violation("m_b requires z in [0,1]");
    if (!(mu > 0.0 && mu < 1.0)) return kNegInf;
    if (z == 0.0) return std::log1p(-mu);
    if (z == 1.0) return std::log(mu);
    return z * std::log(mu / z) + (1.0 - z) * std::log((1.0 - mu) / (1.0 - z));
}

double m_i(double z, double mu) {
    if (!(z >= 0.0 && z <= 1.0)) contract_violation("m_i requires z in [0,1]");
    if (!(mu > 0.0 && mu < 1.0)) return kNegInf;
    if (z == 0.0) return kNegInf;
    if (z == 1.0) return std::log(mu);
    return std::log(mu / z) + (1.0 / z - 1.0) * std::log((1.0 - mu) / (1.0 - z));
}

double m_p(double z, double lambda) {
    if (!(z >= 0.0)) contract_violation("m_p requires z >= 0");
    if (!(lambda > 0.0)) return kNegInf;
    if (z == 0.0) return -lambda;
    return z - lambda + z * std::log(lambda / z);
}

}  // namespace seqest
