#pragma once

#include <utility>

#include "adkey/bounds.hpp"

namespace adkey {

// Side conditions under which the block-wise bounds below are monotone and
// well-defined. All must hold for a nonzero distilled key.
struct AdValidity {
    bool c1 = false;  // phi_z_plus < 1/2
    bool c2 = false;  // s_K- * [(1-phi_z)^b + phi_z^b] > b(b-1)
    bool c3 = false;  // phi_z + 2 phi_x < 1 - phi_z
    bool c4 = false;  // phi_z < (1 - phi_x) - sqrt(1/2 - phi_x(1 - phi_x))
    bool c5 = false;  // logical error-rate denominator positive

    bool all() const { return c1 && c2 && c3 && c4 && c5; }
};

// Block-wise finite-size estimators for the distilled key.
struct AdEstimates {
    double s_bar_minus = 0.0;      // lower bound on accepted single-photon blocks
    double s_bar_minus_raw = 0.0;  // before the clamp at 0
    bool s_bar_clamped = false;
    double phi_bar_plus = 0.0;     // upper bound on the logical X error rate
    double phi_bar_plus_raw = 0.0;
    bool phi_bar_clamped = false;
    double delta_prime = 0.0;
    double n_k_bar = 0.0;          // expected distilled key length
    double phi_k_bar = 0.0;        // expected distilled QBER
    AdValidity validity;
};

// Block success probability and distilled error rate for a single block:
// Pr(succ) = (1-phi)^b + phi^b, phi_bar = phi^b / Pr(succ). b = 1 gives
// (1, phi).
std::pair<double, double> ad_success_and_error(double phi, int b);

// Expected distilled key length and QBER:
// N_K_bar = floor(n_K/b) * Pr(succ), Phi_K_bar = phi_bar.
// Throws std::domain_error if n_k < b.
std::pair<double, double> distilled_key_stats(double n_k, double phi_k, int b);

// Exact hypergeometric expectation of the number of blocks made entirely of
// single-photon events that pass the accept test, for a key of n_k events
// containing s_k single-photon events of which r_z carry a bit error.
// Factors with negative numerators zero their product.
double expected_single_blocks_exact(double n_k, double s_k, double r_z, int b);

// Checks every side condition without throwing.
AdValidity ad_validity(double n_k, double s_k_minus, double phi_z_plus,
                       double phi_x_plus, int b, Confidence eps_bar);

// Lower bound on accepted all-single-photon blocks. Throws std::domain_error
// naming the violated condition if c1 or c2 fails.
double accepted_single_blocks_lower(double n_k, double s_k_minus, double phi_z_plus,
                                    int b, Confidence eps_bar, double* raw = nullptr,
                                    bool* clamped = nullptr);

// Upper bound on the logical X error rate of the distilled bits. Throws
// std::domain_error naming the violated condition if any of c1..c5 fails.
double logical_x_error_upper(double n_k, double s_k_minus, double phi_z_plus,
                             double phi_x_plus, int b, Confidence eps_bar,
                             double* raw = nullptr, bool* clamped = nullptr,
                             double* delta_prime_out = nullptr);

// Full block-stage pass. Never throws on condition failure: invalid runs come
// back with validity flags unset and zeroed estimators.
AdEstimates evaluate_ad_estimates(double n_k, double phi_k, double s_k_minus,
                                  double phi_z_plus, double phi_x_plus, int b,
                                  Confidence eps_bar);

// Protocol acceptance decision: accept iff s_bar_minus >= s_tol and
// phi_bar_plus <= phi_tol and every validity flag holds.
bool acceptance_test(const AdEstimates& ad, double s_tol, double phi_tol);

}  // namespace adkey
