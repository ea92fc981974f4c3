#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

// Exact sign evaluation for the coverage-event comparisons
//
//     (K - n*theta) - n*eps           (absolute gap)
//     (K - n*theta) - n*eps*theta     (relative gap)
//
// where K, n are integers and theta, eps are the double values the plan was
// built with. The grid points used in coverage verification are constructed
// to sit exactly on these decision boundaries, so the strict-vs-non-strict
// distinction of each theorem has to be resolved in exact arithmetic, not by
// rounded floating-point comparison. Every product is split with fma into an
// error-free two-term expansion and the resulting short list of doubles is
// distilled until its sign is provable.

namespace seqest {
namespace detail {

struct SplitPair {
    double hi;
    double lo;
};

inline SplitPair two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    const double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline SplitPair two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

// Sign of the exact sum of `vals[0..count)`. Repeated two_sum distillation;
// terminates because each pass shrinks the residue by ~2^-53.
inline int exact_sign_of_sum(double* vals, int count) {
    for (;;) {
        std::sort(vals, vals + count, [](double a, double b) { return std::fabs(a) < std::fabs(b); });
        double head = 0.0;
        int m = 0;
        for (int i = 0; i < count; ++i) {
            const SplitPair r = two_sum(head, vals[i]);
            head = r.hi;
            if (r.lo != 0.0) vals[m++] = r.lo;
        }
        if (m == 0) return head > 0.0 ? 1 : (head < 0.0 ? -1 : 0);
        double residue = 0.0;
        for (int i = 0; i < m; ++i) residue += std::fabs(vals[i]);
        if (std::fabs(head) > 2.0 * residue) return head > 0.0 ? 1 : -1;
        vals[m++] = head;
        count = m;
    }
}

}  // namespace detail

// Sign of (K - n*theta) - n*eps, exactly. eps may be negative, which turns
// the expression into (K - n*theta) + n*|eps|.
inline int gap_sign_abs(std::int64_t K, std::int64_t n, double theta, double eps) {
    const double nd = static_cast<double>(n);
    const detail::SplitPair nt = detail::two_prod(nd, theta);
    const detail::SplitPair ne = detail::two_prod(nd, eps);
    double vals[5] = {static_cast<double>(K), -nt.hi, -nt.lo, -ne.hi, -ne.lo};
    return detail::exact_sign_of_sum(vals, 5);
}

// Sign of (K - n*theta) - n*eps*theta, exactly.
inline int gap_sign_rel(std::int64_t K, std::int64_t n, double theta, double eps) {
    const double nd = static_cast<double>(n);
    const detail::SplitPair nt = detail::two_prod(nd, theta);
    const detail::SplitPair ne = detail::two_prod(nd, eps);
    const detail::SplitPair a = detail::two_prod(ne.hi, theta);
    const detail::SplitPair b = detail::two_prod(ne.lo, theta);
    double vals[7] = {static_cast<double>(K), -nt.hi, -nt.lo, -a.hi, -a.lo, -b.hi, -b.lo};
    return detail::exact_sign_of_sum(vals, 7);
}

}  // namespace seqest
