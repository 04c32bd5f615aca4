#include "adkey/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace adkey {

double CountTable::n_set(SetIndex f) const {
    const auto& row = n[static_cast<int>(f)];
    return row[0] + row[1] + row[2];
}

double CountTable::m_set(SetIndex f) const {
    const auto& row = m[static_cast<int>(f)];
    return row[0] + row[1] + row[2];
}

double CountTable::n_key() const {
    const auto& row = n[static_cast<int>(SetIndex::set_z)];
    return row[0] + row[1];
}

double CountTable::m_key() const {
    const auto& row = m[static_cast<int>(SetIndex::set_z)];
    return row[0] + row[1];
}

double CountTable::qber_key() const {
    const double nk = n_key();
    return nk > 0.0 ? m_key() / nk : 0.0;
}

double ClickProbabilities::detect() const {
    return 1.0 - (1.0 - correct) * (1.0 - wrong);
}

double ClickProbabilities::error() const {
    // Wrong-detector-only events plus a fair coin on double clicks.
    return wrong * (1.0 - correct) + 0.5 * correct * wrong;
}

ClickProbabilities click_probabilities(double mu, const ChannelParams& ch) {
    if (mu < 0.0) throw std::domain_error("click_probabilities: negative intensity");
    const double c = std::cos(ch.delta_mis);
    const double s = std::sin(ch.delta_mis);
    ClickProbabilities p;
    p.correct = 1.0 - (1.0 - ch.p_noise) * std::exp(-ch.eta * mu * c * c);
    p.wrong = 1.0 - (1.0 - ch.p_noise) * std::exp(-ch.eta * mu * s * s);
    return p;
}

ClickProbabilities click_probabilities_photon(int k, const ChannelParams& ch) {
    if (k < 0) throw std::domain_error("click_probabilities_photon: negative k");
    const double c = std::cos(ch.delta_mis);
    const double s = std::sin(ch.delta_mis);
    ClickProbabilities p;
    p.correct = 1.0 - (1.0 - ch.p_noise) * std::pow(1.0 - ch.eta * c * c, k);
    p.wrong = 1.0 - (1.0 - ch.p_noise) * std::pow(1.0 - ch.eta * s * s, k);
    return p;
}

OutcomeProbabilities outcome_probabilities_photon(int k, const ChannelParams& ch) {
    if (k < 0) throw std::domain_error("outcome_probabilities_photon: negative k");
    const double c = std::cos(ch.delta_mis);
    const double s = std::sin(ch.delta_mis);
    const double q = 1.0 - ch.p_noise;
    const double no_correct = q * std::pow(1.0 - ch.eta * c * c, k);
    const double no_wrong = q * std::pow(1.0 - ch.eta * s * s, k);
    OutcomeProbabilities o;
    o.none = q * q * std::pow(1.0 - ch.eta, k);
    o.correct_only = no_wrong - o.none;
    o.wrong_only = no_correct - o.none;
    o.both = 1.0 - no_correct - no_wrong + o.none;
    return o;
}

CountTable expected_counts(const ProtocolParams& pp, const ChannelParams& ch) {
    pp.validate();
    ch.validate();
    const double p_x = 1.0 - pp.p_z;
    const std::array<double, num_sets> sift = {
        pp.p_z * pp.p_z * (1.0 - pp.q_t),  // Z
        pp.p_z * pp.p_z * pp.q_t,          // T
        p_x * p_x,                         // X
    };
    CountTable t;
    for (int i = 0; i < num_intensities; ++i) {
        const ClickProbabilities p = click_probabilities(pp.mu[i], ch);
        const double base = pp.pulses * pp.p_mu[i];
        for (int f = 0; f < num_sets; ++f) {
            t.n[f][i] = base * sift[f] * p.detect();
            t.m[f][i] = base * sift[f] * p.error();
        }
    }
    return t;
}

double tau_k(int k, const ProtocolParams& pp, bool restricted) {
    if (k < 0) throw std::domain_error("tau_k: negative k");
    double kfact = 1.0;
    for (int j = 2; j <= k; ++j) kfact *= j;
    double tau = 0.0;
    for (int i = 0; i < num_intensities; ++i) {
        if (restricted && i == 2) continue;
        tau += pp.p_mu[i] * std::exp(-pp.mu[i]) * std::pow(pp.mu[i], k) / kfact;
    }
    return tau;
}

}  // namespace adkey
