#pragma once

#include <array>

#include "adkey/params.hpp"

namespace adkey {

// Observation sets: key-generation (Z), test subset of Z-basis rounds (T),
// and the X-basis phase-error probe.
enum class SetIndex { set_z = 0, set_t = 1, set_x = 2 };

inline constexpr int num_sets = 3;
inline constexpr int num_intensities = 3;

// Sifted detection / error counts per (set, intensity) cell. Values are
// expectations or tallies depending on the producer; kept as double so the
// analytic channel model and the simulator share one type.
struct CountTable {
    // n[f][i]: detections in set f at intensity i. m[f][i]: errors.
    std::array<std::array<double, num_intensities>, num_sets> n{};
    std::array<std::array<double, num_intensities>, num_sets> m{};

    double n_set(SetIndex f) const;
    double m_set(SetIndex f) const;

    // Raw key material comes from the two decoy-usable intensities only.
    double n_key() const;
    double m_key() const;
    double qber_key() const;  // m_key / n_key, 0 when n_key == 0
};

// Probability that the aligned (resp. misaligned) detector clicks for a
// pulse of intensity mu.
struct ClickProbabilities {
    double correct;
    double wrong;

    double detect() const;  // at least one detector fires
    double error() const;   // wrong-only plus half of double clicks
};

ClickProbabilities click_probabilities(double mu, const ChannelParams& ch);

// Marginal click probabilities conditioned on the pulse containing exactly
// k photons. The two detectors are correlated at fixed k (a photon reaching
// one cannot reach the other), so the joint distribution comes from
// outcome_probabilities_photon below, not from multiplying these.
ClickProbabilities click_probabilities_photon(int k, const ChannelParams& ch);

// Joint detector-outcome distribution for a k-photon pulse: each photon is
// independently lost (1-eta), routed to the aligned detector (eta cos^2) or
// the misaligned one (eta sin^2); each detector additionally dark-clicks
// with p_noise. Poisson-averaging these over k reproduces the intensity
// model above exactly, double-click statistics included.
struct OutcomeProbabilities {
    double none;
    double correct_only;
    double wrong_only;
    double both;

    double detect() const { return 1.0 - none; }
    double error() const { return wrong_only + 0.5 * both; }
};

OutcomeProbabilities outcome_probabilities_photon(int k, const ChannelParams& ch);

// Expected sifted counts for every (set, intensity) cell after N pulses.
CountTable expected_counts(const ProtocolParams& pp, const ChannelParams& ch);

// Poisson photon-number weights tau_k = sum_i p_mu_i e^{-mu_i} mu_i^k / k!.
// restricted = true drops the weakest intensity from the sum.
double tau_k(int k, const ProtocolParams& pp, bool restricted = false);

}  // namespace adkey
