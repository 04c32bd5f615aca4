#include "adkey/ad.hpp"

#include <cmath>
#include <stdexcept>

namespace adkey {

namespace {

// Number of blocks formed from the key; real-valued expectations are rounded
// before the integer floor.
double block_count(double n_k, int b) {
    return std::floor(std::round(n_k) / b);
}

double success_prob(double phi, int b) {
    return std::pow(1.0 - phi, b) + std::pow(phi, b);
}

double delta_prime_term(double n_k, double s_k_minus, int b, Confidence eps_bar) {
    return std::pow(n_k / s_k_minus, b) * mcdiarmid_block_delta(n_k, eps_bar) /
           block_count(n_k, b);
}

}  // namespace

std::pair<double, double> ad_success_and_error(double phi, int b) {
    if (!(phi >= 0.0 && phi <= 1.0)) {
        throw std::domain_error("ad_success_and_error: phi outside [0,1]");
    }
    if (b < 1) throw std::domain_error("ad_success_and_error: b must be >= 1");
    const double p_succ = success_prob(phi, b);
    return {p_succ, std::pow(phi, b) / p_succ};
}

std::pair<double, double> distilled_key_stats(double n_k, double phi_k, int b) {
    if (n_k < b) throw std::domain_error("distilled_key_stats: n_k < b");
    auto [p_succ, phi_bar] = ad_success_and_error(phi_k, b);
    return {block_count(n_k, b) * p_succ, phi_bar};
}

double expected_single_blocks_exact(double n_k, double s_k, double r_z, int b) {
    if (r_z < 0.0 || r_z > s_k || s_k > n_k) {
        throw std::domain_error("expected_single_blocks_exact: need 0 <= r_z <= s_k <= n_k");
    }
    if (b < 1) throw std::domain_error("expected_single_blocks_exact: b must be >= 1");
    const double r_good = s_k - r_z;
    auto falling_ratio = [&](double r) {
        double prod = 1.0;
        for (int j = 0; j < b; ++j) {
            const double num = r - j;
            if (num <= 0.0) return 0.0;
            prod *= num / (n_k - j);
        }
        return prod;
    };
    return block_count(n_k, b) * (falling_ratio(r_good) + falling_ratio(r_z));
}

AdValidity ad_validity(double n_k, double s_k_minus, double phi_z_plus,
                       double phi_x_plus, int b, Confidence eps_bar) {
    AdValidity v;
    if (b < 1 || n_k < b || !(s_k_minus > 0.0)) return v;
    v.c1 = phi_z_plus < 0.5;
    v.c2 = s_k_minus * success_prob(phi_z_plus, b) > static_cast<double>(b) * (b - 1);
    if (b == 1) {
        v.c3 = true;
        v.c4 = true;
    } else {
        v.c3 = phi_z_plus + 2.0 * phi_x_plus < 1.0 - phi_z_plus;
        const double disc = 0.5 - phi_x_plus * (1.0 - phi_x_plus);
        v.c4 = disc >= 0.0 && phi_z_plus < (1.0 - phi_x_plus) - std::sqrt(disc);
    }
    const double dp = delta_prime_term(n_k, s_k_minus, b, eps_bar);
    v.c5 = success_prob(phi_z_plus, b) - static_cast<double>(b) * (b - 1) / s_k_minus - dp > 0.0;
    return v;
}

double accepted_single_blocks_lower(double n_k, double s_k_minus, double phi_z_plus,
                                    int b, Confidence eps_bar, double* raw,
                                    bool* clamped) {
    if (b < 1 || n_k < b || !(s_k_minus > 0.0)) {
        throw std::domain_error("accepted_single_blocks_lower: need n_k >= b >= 1 and s_k_minus > 0");
    }
    if (!(phi_z_plus < 0.5)) {
        throw std::domain_error("accepted_single_blocks_lower: condition c1 failed (phi_z_plus >= 1/2)");
    }
    const double succ = success_prob(phi_z_plus, b);
    if (!(s_k_minus * succ > static_cast<double>(b) * (b - 1))) {
        throw std::domain_error("accepted_single_blocks_lower: condition c2 failed");
    }
    const double value = block_count(n_k, b) * std::pow(s_k_minus / n_k, b) *
                             (succ - static_cast<double>(b) * (b - 1) / s_k_minus) -
                         mcdiarmid_block_delta(n_k, eps_bar);
    if (raw) *raw = value;
    if (clamped) *clamped = value < 0.0;
    return value < 0.0 ? 0.0 : value;
}

double logical_x_error_upper(double n_k, double s_k_minus, double phi_z_plus,
                             double phi_x_plus, int b, Confidence eps_bar,
                             double* raw, bool* clamped, double* delta_prime_out) {
    const AdValidity v = ad_validity(n_k, s_k_minus, phi_z_plus, phi_x_plus, b, eps_bar);
    if (!v.c1) throw std::domain_error("logical_x_error_upper: condition c1 failed");
    if (!v.c2) throw std::domain_error("logical_x_error_upper: condition c2 failed");
    if (!v.c3) throw std::domain_error("logical_x_error_upper: condition c3 failed");
    if (!v.c4) throw std::domain_error("logical_x_error_upper: condition c4 failed");
    if (!v.c5) throw std::domain_error("logical_x_error_upper: condition c5 failed");
    const double dp = delta_prime_term(n_k, s_k_minus, b, eps_bar);
    if (delta_prime_out) *delta_prime_out = dp;
    const double numer =
        0.5 * (std::pow(1.0 - phi_z_plus, b) -
               std::pow(1.0 - phi_z_plus - 2.0 * phi_x_plus, b)) +
        dp;
    const double denom = success_prob(phi_z_plus, b) -
                         static_cast<double>(b) * (b - 1) / s_k_minus - dp;
    const double value = numer / denom;
    if (raw) *raw = value;
    if (clamped) *clamped = value < 0.0 || value > 1.0;
    return value < 0.0 ? 0.0 : (value > 1.0 ? 1.0 : value);
}

AdEstimates evaluate_ad_estimates(double n_k, double phi_k, double s_k_minus,
                                  double phi_z_plus, double phi_x_plus, int b,
                                  Confidence eps_bar) {
    AdEstimates ad;
    if (n_k >= b && b >= 1) {
        auto [nb, pb] = distilled_key_stats(n_k, phi_k, b);
        ad.n_k_bar = nb;
        ad.phi_k_bar = pb;
    }
    ad.validity = ad_validity(n_k, s_k_minus, phi_z_plus, phi_x_plus, b, eps_bar);
    if (!ad.validity.all()) return ad;
    ad.s_bar_minus = accepted_single_blocks_lower(n_k, s_k_minus, phi_z_plus, b,
                                                  eps_bar, &ad.s_bar_minus_raw,
                                                  &ad.s_bar_clamped);
    ad.phi_bar_plus = logical_x_error_upper(n_k, s_k_minus, phi_z_plus, phi_x_plus, b,
                                            eps_bar, &ad.phi_bar_plus_raw,
                                            &ad.phi_bar_clamped, &ad.delta_prime);
    return ad;
}

bool acceptance_test(const AdEstimates& ad, double s_tol, double phi_tol) {
    return ad.validity.all() && ad.s_bar_minus >= s_tol && ad.phi_bar_plus <= phi_tol;
}

}  // namespace adkey
