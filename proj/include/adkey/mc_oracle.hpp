#pragma once

#include <cstdint>
#include <vector>

#include "adkey/bounds.hpp"
#include "adkey/channel.hpp"
#include "adkey/params.hpp"

namespace adkey {

// Composition of the sifted key material by single-photon error type:
// m_i no error, m_x bit flip, m_y bit and phase flip, m_z phase flip only.
// Everything beyond s_k() is multi-photon or vacuum.
struct BlockTally {
    long n_k = 0;
    long m_i = 0, m_x = 0, m_y = 0, m_z = 0;

    long s_k() const { return m_i + m_x + m_y + m_z; }
    long r_bit() const { return m_x + m_y; }     // bit-flipped singles
    long r_phase() const { return m_z + m_y; }   // phase-flipped singles
};

// Exact expectation, over a uniform random permutation partitioned into
// floor(n_k/b) blocks, of the number of accepted all-single-photon blocks
// that carry an odd number of phase flips. Companion to
// expected_single_blocks_exact in the block-estimator module.
double expected_odd_phase_blocks_exact(const BlockTally& t, int b);

// Brute-force average of (accepted single blocks, odd-phase accepted blocks)
// over every distinct arrangement of the tally; n_k <= 12 or so.
struct EnumerationResult {
    double mean_s = 0.0;
    double mean_r = 0.0;
    long arrangements = 0;
};
EnumerationResult enumerate_block_means(const BlockTally& t, int b);

// Seeded permutation experiment: per trial, shuffle the tally's pulses with
// a transposition chain, partition into blocks of b, accept blocks that are
// all-single-photon with 0 or b bit flips, and count odd-phase accepted
// blocks. Violation frequencies are measured against the 3 delta_H envelope
// around the exact means and, optionally, caller-supplied one-sided bounds.
struct PermutationStats {
    long trials = 0;
    double mean_s = 0.0, mean_r = 0.0;
    double se_s = 0.0, se_r = 0.0;      // standard errors of the means
    double exact_s = 0.0, exact_r = 0.0;
    double freq_s_envelope = 0.0;       // |S - E[S]| > 3 delta_H(n_k, eps)
    double freq_r_envelope = 0.0;
    double freq_s_below = 0.0;          // S < s_lower (if supplied)
    double freq_phi_above = 0.0;        // R/S > phi_upper among trials with S > 0
};
PermutationStats permutation_block_experiment(const BlockTally& t, int b, long trials,
                                              std::uint64_t seed, Confidence eps,
                                              double s_lower = -1e300,
                                              double phi_upper = 1e300);

// Sampling-without-replacement check of the extrapolation term: frequency
// with which the unobserved mean exceeds the sample mean plus nu(n,k,eps).
struct SerflingStats {
    long trials = 0;
    double violation_freq = 0.0;
    double standard_error = 0.0;
};
SerflingStats serfling_experiment(const std::vector<std::uint8_t>& population, long k,
                                  Confidence eps, long trials, std::uint64_t seed);

// I.i.d. block acceptance and distilled error versus the closed forms.
struct AdIidStats {
    long trials = 0;
    double acceptance = 0.0;
    double distilled_error = 0.0;  // among accepted blocks
    long accepted = 0;
};
AdIidStats ad_iid_experiment(double phi, int b, long trials, std::uint64_t seed);

// Binomial sampling check of the expectation bounds: with X drawn from
// Binomial(n_total, p) and lambda = n_total * p, measures how often
//   lambda > X + delta (Hoeffding / Chernoff upper)
//   lambda < X - delta (Hoeffding / Chernoff lower)
// each of which the bounds promise happens with probability <= eps.
struct ConcentrationStats {
    long trials = 0;
    double freq_hoeffding_upper = 0.0;
    double freq_hoeffding_lower = 0.0;
    double freq_chernoff_upper = 0.0;
    double freq_chernoff_lower = 0.0;
    double standard_error = 0.0;  // at the eps budget, sqrt(eps(1-eps)/trials)
};
ConcentrationStats concentration_experiment(long n_total, double p, Confidence eps,
                                            long trials, std::uint64_t seed);

// Per-trial protocol simulation checking every one-sided estimation-stage
// bound against the hidden truth. Phase flips are counterfactual, assigned
// at the channel's single-photon error rate.
struct DecoyConservStats {
    long trials = 0;
    double freq_o[num_sets] = {0, 0, 0};  // o_f < o_f^-
    double freq_s[num_sets] = {0, 0, 0};  // s_f < s_f^-
    double freq_e_t = 0.0, freq_e_x = 0.0;  // e_f > e_f^+
    double freq_phi_z = 0.0, freq_phi_x = 0.0;
    long invalid_runs = 0;
};
DecoyConservStats decoy_conservativeness_experiment(const ProtocolParams& pp,
                                                    const ChannelParams& ch, long trials,
                                                    std::uint64_t seed);

// Pulse-level protocol simulation. Returns the observed count table plus
// hidden per-set truth tallies (vacuum / single-photon detections and
// single-photon bit errors) and, for the key set, the per-detection type
// sequence needed by the block experiments.
enum class KeyPulseType : std::uint8_t { other = 0, single_ok = 1, single_bit_error = 2 };

struct SimulationResult {
    CountTable observed;
    double o_true[num_sets] = {0, 0, 0};
    double s_true[num_sets] = {0, 0, 0};
    double e_true[num_sets] = {0, 0, 0};
    std::vector<KeyPulseType> key_types;
};
SimulationResult simulate_pulses(const ProtocolParams& pp, const ChannelParams& ch,
                                 std::uint64_t seed);

// Chained conservativeness run: per trial, simulate the protocol, run the
// whole estimation pipeline at the tally's eps_bar, assign counterfactual
// phase flips at the channel's single-photon phase error rate (a fraction
// m_y_rate of bit-flipped singles also carries one), perform one random
// blocking, and test the combined failure event
//   { s_K < s_K^-  or  phi_Z > phi_Z^+  or  phi_X > phi_X^+
//     or  S < S^-  or  R/S > Phi^+ }.
struct PipelineStats {
    long trials = 0;
    long failures = 0;
    long invalid_runs = 0;  // estimation declared invalid; counted as failures
    double freq = 0.0;
    double standard_error = 0.0;
};
PipelineStats pipeline_conservativeness_experiment(const ProtocolParams& pp,
                                                   const ChannelParams& ch, long trials,
                                                   std::uint64_t seed,
                                                   double m_y_rate = 0.0);

}  // namespace adkey
