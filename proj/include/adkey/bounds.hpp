#pragma once

// Entropy functions and concentration-bound primitives shared by the whole
// library. All functions are pure and thread-safe.

namespace adkey {

// Confidence level for a statistical estimator, epsilon in (0, 1].
struct Confidence {
    double epsilon;

    explicit Confidence(double eps);
};

enum class Direction { upper, lower };

// Binary entropy h(x) in bits, with the 0*log(0) := 0 convention.
// Throws std::domain_error outside [0,1].
double binary_entropy(double x);

// Equals binary_entropy(x) for x < 1/2 and 1 otherwise.
double truncated_binary_entropy(double x);

// Hoeffding deviation: sqrt((N/2) ln(1/eps)).
double hoeffding_delta(double n_total, Confidence eps);

// Chernoff deviations:
//   upper: ln(1/eps)   + sqrt(2 n ln(1/eps) + ln^2(1/eps))
//   lower: ln(1/eps)/2 + sqrt(2 n ln(1/eps) + ln^2(1/eps)/4)
double chernoff_delta(double n, Confidence eps, Direction direction);

// min(hoeffding_delta(N,eps), chernoff_delta(n,eps,dir)). N is the set
// total, n the subset count being bounded.
double combined_delta(double n_total, double n, Confidence eps, Direction direction);

// Serfling-type extrapolation term used to carry error rates from a test
// set of size k to an unobserved set of size n:
//   nu(n,k,eps) = sqrt(((n+k)(k+1) / (2 n k^2)) ln(1/eps))
// Throws std::domain_error if n < 1 or k < 1.
double serfling_nu(double n, double k, Confidence eps);

// Test hook: globally scales serfling_nu. Exists so the oracle suite can be
// run against a deliberately corrupted bound and must then fail; 1.0 in
// normal operation. Not thread-safe, set once before computation.
void set_extrapolation_scale(double scale);
double extrapolation_scale();

// Deviation envelope for block statistics under random permutation
// partitioning: 3 * hoeffding_delta(N, eps).
double mcdiarmid_block_delta(double n_total, Confidence eps);

}  // namespace adkey
