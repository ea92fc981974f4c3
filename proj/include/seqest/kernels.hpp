#pragma once

#include <cstdint>

// Numerically stable binomial / Poisson tail sums and the large-deviation
// rate functions they are paired with. These are the primitives every
// stopping rule, schedule bound and coverage computation is built from.
//
// Conventions used throughout:
//   * s_b(k,l,n,p) = sum_{i=k}^{l} C(n,i) p^i (1-p)^(n-i), and exactly 0
//     when p lies outside the open unit interval.
//   * s_p(k,l,n,lambda) = sum_{i=k}^{l} (n*lambda)^i e^(-n*lambda)/i!, and
//     exactly 0 when lambda <= 0.
//   * An empty index range (k > l) sums to 0.
//   * Minus infinity is a first-class return value of the rate functions,
//     never an overflow artifact.

namespace seqest {

// Upper-limit sentinel for s_p meaning "sum to infinity".
inline constexpr std::int64_t kInfiniteUpper = INT64_MAX;

// log of the binomial pmf C(n,k) p^k (1-p)^(n-k) for 0 <= k <= n, p in (0,1).
// Saddle-point evaluation (Stirling error + stable KL remainder), relative
// accuracy a few 1e-13 even at n = 1e9 whenever the pmf is representable.
double log_binomial_pmf(std::int64_t n, std::int64_t k, double p);

// log of the Poisson pmf mean^k e^(-mean) / k! for k >= 0, mean > 0.
double log_poisson_pmf(std::int64_t k, double mean);

// Negative-binomial pmf: probability that the gamma-th success of a
// Bernoulli(p) sequence arrives exactly on draw n (n >= gamma >= 1).
double log_neg_binomial_pmf(std::int64_t gamma, std::int64_t n, double p);

// Binomial tail sum. Requires n >= 1, k >= 0, l <= n; k > l yields 0.
// Relative error <= 1e-12 against exact summation for n <= 1e4 whenever the
// value is representable in double range.
double s_b(std::int64_t k, std::int64_t l, std::int64_t n, double p);

// Poisson tail sum. Requires n >= 1, k >= 0. Pass l = kInfiniteUpper for an
// unbounded upper limit, evaluated as 1 - s_p(0, k-1, n, lambda).
double s_p(std::int64_t k, std::int64_t l, std::int64_t n, double lambda);

// Binomial rate function M_B(z, mu):
//   z ln(mu/z) + (1-z) ln((1-mu)/(1-z))   z in (0,1), mu in (0,1)
//   ln(1-mu)                              z = 0,      mu in (0,1)
//   ln(mu)                                z = 1,      mu in (0,1)
//   -inf                                  mu outside (0,1)
// Requires z in [0,1].
double m_b(double z, double mu);

// Inverse-sampling rate function M_I(z, mu) = M_B(z, mu) / z extended by
//   ln(mu) at z = 1, -inf at z = 0, -inf for mu outside (0,1).
double m_i(double z, double mu);

// Poisson rate function M_P(z, lambda):
//   z - lambda + z ln(lambda/z)   z > 0, lambda > 0
//   -lambda                       z = 0, lambda > 0
//   -inf                          lambda <= 0
// Requires z >= 0.
double m_p(double z, double lambda);

}  // namespace seqest
