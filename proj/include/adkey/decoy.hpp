#pragma once

#include <array>

#include "adkey/bounds.hpp"
#include "adkey/channel.hpp"
#include "adkey/params.hpp"

namespace adkey {

// Per-cell bounded expectations n (or m) +/- delta. Lower bounds are clamped
// at zero; `clamped` records where that happened.
struct CellBounds {
    std::array<std::array<double, num_intensities>, num_sets> upper{};
    std::array<std::array<double, num_intensities>, num_sets> lower{};
    std::array<std::array<bool, num_intensities>, num_sets> clamped{};
};

// Everything the three-intensity estimation stage produces. Raw (pre-clamp)
// values are kept next to the clamped ones for diagnostics.
struct DecoyEstimates {
    double tau0 = 0.0, tau1 = 0.0;
    double tau0_prime = 0.0, tau1_prime = 0.0;

    CellBounds n_bounds;
    CellBounds m_bounds;

    std::array<double, num_sets> o_minus{};  // vacuum-event lower bounds per set
    std::array<double, num_sets> s_minus{};  // single-photon lower bounds per set
    std::array<double, num_sets> o_minus_raw{};
    std::array<double, num_sets> s_minus_raw{};
    std::array<bool, num_sets> o_clamped{};
    std::array<bool, num_sets> s_clamped{};

    double o_k_minus = 0.0;
    double s_k_minus = 0.0;

    std::array<double, num_sets> e_plus{};  // single-photon error uppers (T, X used)
    std::array<bool, num_sets> e_clamped{};

    double phi_z_plus = 0.0, phi_x_plus = 0.0;
    double phi_z_plus_raw = 0.0, phi_x_plus_raw = 0.0;
    bool phi_z_clamped = false, phi_x_clamped = false;

    // False when a single-photon lower bound needed for the error rates is
    // not positive; phi values are then meaningless and the run is aborted.
    bool rates_valid = false;
    // False for the plain-BB84 pipeline, which runs without a test set and
    // never fills the T-set estimates.
    bool has_test_set = true;
};

// Stage operations; estimate_all composes them in order.
CellBounds bounded_expectations(
    const std::array<std::array<double, num_intensities>, num_sets>& counts,
    Confidence eps_bar);

double vacuum_lower(SetIndex f, const DecoyEstimates& de, const ProtocolParams& pp,
                    bool* clamped = nullptr, double* raw = nullptr);
double single_photon_lower(SetIndex f, const DecoyEstimates& de, const ProtocolParams& pp,
                           bool* clamped = nullptr, double* raw = nullptr);
void key_set_bounds(DecoyEstimates& de);
double single_photon_error_upper(SetIndex f, const DecoyEstimates& de,
                                 const ProtocolParams& pp, bool* clamped = nullptr);
// Throws std::domain_error if any of s_T-, s_X-, s_K- is not positive
// (s_T- only when a test set exists).
void error_rate_uppers(DecoyEstimates& de, Confidence eps_bar);

// Full estimation pass. with_test_set = false skips every T-set bound and
// phi_z_plus (the plain-BB84 path, which only needs phi_x_plus). On a
// non-positive denominator the result carries rates_valid = false instead
// of throwing.
DecoyEstimates estimate_all(const CountTable& ct, const ProtocolParams& pp,
                            bool with_test_set = true);

}  // namespace adkey
