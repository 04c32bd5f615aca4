#include "adkey/decoy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace adkey {

namespace {

int idx(SetIndex f) { return static_cast<int>(f); }

void check_probability(double p, const char* name) {
    if (!(p > 0.0)) {
        throw std::domain_error(std::string("decoy: ") + name + " must be positive");
    }
}

}  // namespace

CellBounds bounded_expectations(
    const std::array<std::array<double, num_intensities>, num_sets>& counts,
    Confidence eps_bar) {
    CellBounds cb;
    for (int f = 0; f < num_sets; ++f) {
        const double total = counts[f][0] + counts[f][1] + counts[f][2];
        for (int i = 0; i < num_intensities; ++i) {
            const double c = counts[f][i];
            cb.upper[f][i] = c + combined_delta(total, c, eps_bar, Direction::upper);
            const double lo = c - combined_delta(total, c, eps_bar, Direction::lower);
            cb.clamped[f][i] = lo < 0.0;
            cb.lower[f][i] = lo < 0.0 ? 0.0 : lo;
        }
    }
    return cb;
}

double vacuum_lower(SetIndex f, const DecoyEstimates& de, const ProtocolParams& pp,
                    bool* clamped, double* raw) {
    check_probability(pp.p_mu[1], "p_mu2");
    check_probability(pp.p_mu[2], "p_mu3");
    const double mu2 = pp.mu[1], mu3 = pp.mu[2];
    const int fi = idx(f);
    const double value = de.tau0 / (mu2 - mu3) *
        (mu2 * std::exp(mu3) * de.n_bounds.lower[fi][2] / pp.p_mu[2] -
         mu3 * std::exp(mu2) * de.n_bounds.upper[fi][1] / pp.p_mu[1]);
    if (raw) *raw = value;
    if (clamped) *clamped = value < 0.0;
    return value < 0.0 ? 0.0 : value;
}

double single_photon_lower(SetIndex f, const DecoyEstimates& de, const ProtocolParams& pp,
                           bool* clamped, double* raw) {
    check_probability(pp.p_mu[0], "p_mu1");
    check_probability(pp.p_mu[1], "p_mu2");
    check_probability(pp.p_mu[2], "p_mu3");
    const double mu1 = pp.mu[0], mu2 = pp.mu[1], mu3 = pp.mu[2];
    const double denom = mu1 * (mu2 - mu3) - (mu2 * mu2 - mu3 * mu3);
    if (!(denom > 0.0)) {
        throw std::domain_error("decoy: intensities must satisfy mu1(mu2-mu3) > mu2^2-mu3^2");
    }
    const int fi = idx(f);
    const double o_term = de.o_minus[fi] / de.tau0;
    const double value = de.tau1 * mu1 / denom *
        (std::exp(mu2) * de.n_bounds.lower[fi][1] / pp.p_mu[1] -
         std::exp(mu3) * de.n_bounds.upper[fi][2] / pp.p_mu[2] +
         (mu2 * mu2 - mu3 * mu3) / (mu1 * mu1) *
             (o_term - std::exp(mu1) * de.n_bounds.upper[fi][0] / pp.p_mu[0]));
    if (raw) *raw = value;
    if (clamped) *clamped = value < 0.0;
    return value < 0.0 ? 0.0 : value;
}

void key_set_bounds(DecoyEstimates& de) {
    if (!(de.tau0 > 0.0) || !(de.tau1 > 0.0)) {
        throw std::domain_error("decoy: tau0 and tau1 must be positive");
    }
    de.o_k_minus = de.tau0_prime / de.tau0 * de.o_minus[idx(SetIndex::set_z)];
    de.s_k_minus = de.tau1_prime / de.tau1 * de.s_minus[idx(SetIndex::set_z)];
}

double single_photon_error_upper(SetIndex f, const DecoyEstimates& de,
                                 const ProtocolParams& pp, bool* clamped) {
    check_probability(pp.p_mu[1], "p_mu2");
    check_probability(pp.p_mu[2], "p_mu3");
    const double mu2 = pp.mu[1], mu3 = pp.mu[2];
    const int fi = idx(f);
    const double value = de.tau1 / (mu2 - mu3) *
        (std::exp(mu2) * de.m_bounds.upper[fi][1] / pp.p_mu[1] -
         std::exp(mu3) * de.m_bounds.lower[fi][2] / pp.p_mu[2]);
    if (clamped) *clamped = value < 0.0;
    return value < 0.0 ? 0.0 : value;
}

void error_rate_uppers(DecoyEstimates& de, Confidence eps_bar) {
    const double s_t = de.s_minus[idx(SetIndex::set_t)];
    const double s_x = de.s_minus[idx(SetIndex::set_x)];
    if (!(de.s_k_minus > 0.0) || !(s_x > 0.0) || (de.has_test_set && !(s_t > 0.0))) {
        throw std::domain_error("decoy: single-photon lower bounds must be positive");
    }
    auto rate = [&](SetIndex f, double s_f, double& raw, bool& clamped) {
        raw = de.e_plus[idx(f)] / s_f + serfling_nu(de.s_k_minus, s_f, eps_bar);
        clamped = raw > 1.0;
        return clamped ? 1.0 : raw;
    };
    if (de.has_test_set) {
        de.phi_z_plus = rate(SetIndex::set_t, s_t, de.phi_z_plus_raw, de.phi_z_clamped);
    }
    de.phi_x_plus = rate(SetIndex::set_x, s_x, de.phi_x_plus_raw, de.phi_x_clamped);
    de.rates_valid = true;
}

DecoyEstimates estimate_all(const CountTable& ct, const ProtocolParams& pp,
                            bool with_test_set) {
    const Confidence eps_bar(pp.eps_bar_effective());
    DecoyEstimates de;
    de.has_test_set = with_test_set;
    de.tau0 = tau_k(0, pp);
    de.tau1 = tau_k(1, pp);
    de.tau0_prime = tau_k(0, pp, true);
    de.tau1_prime = tau_k(1, pp, true);
    de.n_bounds = bounded_expectations(ct.n, eps_bar);
    de.m_bounds = bounded_expectations(ct.m, eps_bar);
    for (SetIndex f : {SetIndex::set_z, SetIndex::set_t, SetIndex::set_x}) {
        if (f == SetIndex::set_t && !with_test_set) continue;
        const int fi = idx(f);
        de.o_minus[fi] = vacuum_lower(f, de, pp, &de.o_clamped[fi], &de.o_minus_raw[fi]);
        de.s_minus[fi] =
            single_photon_lower(f, de, pp, &de.s_clamped[fi], &de.s_minus_raw[fi]);
    }
    key_set_bounds(de);
    for (SetIndex f : {SetIndex::set_t, SetIndex::set_x}) {
        if (f == SetIndex::set_t && !with_test_set) continue;
        const int fi = idx(f);
        de.e_plus[fi] = single_photon_error_upper(f, de, pp, &de.e_clamped[fi]);
    }
    try {
        error_rate_uppers(de, eps_bar);
    } catch (const std::domain_error&) {
        de.rates_valid = false;
    }
    return de;
}

}  // namespace adkey
