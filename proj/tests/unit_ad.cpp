#include <cmath>
#include <random>
#include <stdexcept>

#include "adkey/ad.hpp"
#include "doctest.h"

using namespace adkey;

TEST_CASE("block success and distilled error rate") {
    auto [p0, e0] = ad_success_and_error(0.0, 5);
    CHECK(p0 == 1.0);
    CHECK(e0 == 0.0);
    auto [ph, eh] = ad_success_and_error(0.5, 2);
    CHECK(ph == doctest::Approx(0.5));
    CHECK(eh == doctest::Approx(0.5));
    auto [p, e] = ad_success_and_error(0.1, 3);
    CHECK(p == doctest::Approx(0.730).epsilon(1e-4));
    CHECK(e == doctest::Approx(0.0013699).epsilon(1e-4));
    auto [p1, e1] = ad_success_and_error(0.37, 1);
    CHECK(p1 == 1.0);
    CHECK(e1 == doctest::Approx(0.37));
}

TEST_CASE("distilled error rate is suppressed as blocks grow") {
    for (double phi = 0.02; phi <= 0.201; phi += 0.02) {
        for (int b = 1; b <= 9; ++b) {
            CHECK(ad_success_and_error(phi, b + 1).second <
                  ad_success_and_error(phi, b).second);
        }
    }
}

TEST_CASE("expected distilled key statistics") {
    auto [n0, p0] = distilled_key_stats(100.0, 0.0, 4);
    CHECK(n0 == 25.0);
    CHECK(p0 == 0.0);
    auto [n1, p1] = distilled_key_stats(7.0, 0.5, 2);
    CHECK(n1 == doctest::Approx(1.5));
    CHECK(p1 == doctest::Approx(0.5));
    auto [n2, p2] = distilled_key_stats(1e6, 0.1, 3);
    CHECK(n2 == doctest::Approx(243333.1).epsilon(1e-5));
    CHECK(p2 == doctest::Approx(0.0013699).epsilon(1e-4));
    auto [n3, p3] = distilled_key_stats(500.0, 0.23, 1);
    CHECK(n3 == 500.0);
    CHECK(p3 == doctest::Approx(0.23));
    CHECK_THROWS_AS(distilled_key_stats(2.0, 0.1, 3), std::domain_error);
}

TEST_CASE("exact accepted-block expectation") {
    CHECK(expected_single_blocks_exact(4, 4, 1, 2) == doctest::Approx(1.0));
    CHECK(expected_single_blocks_exact(12, 12, 0, 3) == doctest::Approx(4.0));
    CHECK(expected_single_blocks_exact(12, 0, 0, 3) == 0.0);
    // One factor hits a negative numerator and zeroes its product.
    CHECK(expected_single_blocks_exact(10, 2, 1, 3) == 0.0);
}

TEST_CASE("lower bound example value") {
    double raw = 0.0;
    bool clamped = true;
    const double s = accepted_single_blocks_lower(1e6, 5e5, 0.1, 3, Confidence(1e-10),
                                                  &raw, &clamped);
    CHECK(s == doctest::Approx(20236.9).epsilon(1e-4));
    CHECK_FALSE(clamped);
    CHECK(raw == s);
}

TEST_CASE("lower bound approaches the block count in the ideal limit") {
    const double s = accepted_single_blocks_lower(9e5, 9e5, 0.0, 3, Confidence(1.0));
    CHECK(s == doctest::Approx(300000.0).epsilon(1e-4));
}

TEST_CASE("lower bound rejects violated side conditions") {
    CHECK_THROWS_AS(accepted_single_blocks_lower(1e6, 5e5, 0.5, 3, Confidence(0.01)),
                    std::domain_error);
    CHECK_THROWS_AS(accepted_single_blocks_lower(1e6, 5.0, 0.1, 4, Confidence(0.01)),
                    std::domain_error);
}

TEST_CASE("lower bound never exceeds the exact expectation") {
    std::mt19937_64 gen(7);
    for (int it = 0; it < 1000; ++it) {
        std::uniform_int_distribution<int> nk_d(20, 200);
        const int n_k = nk_d(gen);
        std::uniform_int_distribution<int> b_d(2, 5);
        const int b = b_d(gen);
        std::uniform_real_distribution<double> s_d(0.5, 1.0);
        const double s_k = std::floor(s_d(gen) * n_k);
        std::uniform_real_distribution<double> phi_d(0.0, 0.45);
        const double phi = phi_d(gen);
        const double r_z = std::ceil(phi * s_k);
        if (r_z > s_k) continue;
        const double phi_eff = s_k > 0 ? r_z / s_k : 0.0;
        if (!(phi_eff < 0.5)) continue;
        if (!(s_k * (std::pow(1 - phi_eff, b) + std::pow(phi_eff, b)) > b * (b - 1)))
            continue;
        const double lower =
            accepted_single_blocks_lower(n_k, s_k, phi_eff, b, Confidence(1.0));
        const double exact = expected_single_blocks_exact(n_k, s_k, r_z, b);
        CHECK(lower <= exact + 1e-9);
    }
}

TEST_CASE("logical error upper bound example value") {
    const double v = logical_x_error_upper(1e9, 1e6, 0.05, 0.05, 2, Confidence(1.0));
    CHECK(v == doctest::Approx(0.099448).epsilon(1e-3));
    // Monotone in the single-photon error rate inside the domain.
    CHECK(logical_x_error_upper(1e9, 1e6, 0.05, 0.06, 2, Confidence(1.0)) > v);
    // And in the bit error rate.
    CHECK(logical_x_error_upper(1e9, 1e6, 0.06, 0.05, 2, Confidence(1.0)) > v);
}

TEST_CASE("logical error upper bound is zero without single-photon errors") {
    CHECK(logical_x_error_upper(1e9, 1e6, 0.05, 0.0, 3, Confidence(1.0)) ==
          doctest::Approx(0.0));
}

TEST_CASE("validity conditions") {
    const Confidence eps(0.01);
    AdValidity v = ad_validity(1e6, 5e5, 0.1, 0.05, 3, eps);
    CHECK(v.all());
    v = ad_validity(1e6, 5e5, 0.55, 0.05, 3, eps);
    CHECK_FALSE(v.c1);
    v = ad_validity(1e6, 10.0, 0.1, 0.05, 5, eps);
    CHECK_FALSE(v.c2);
    v = ad_validity(1e6, 5e5, 0.3, 0.25, 3, eps);
    CHECK_FALSE(v.c3);
    // b = 1 waives the block-shape conditions.
    v = ad_validity(1e6, 5e5, 0.3, 0.25, 1, eps);
    CHECK(v.c3);
    CHECK(v.c4);
    v = ad_validity(1.0, 5e5, 0.1, 0.05, 3, eps);
    CHECK_FALSE(v.all());
}

TEST_CASE("full block-stage pass flags invalid runs instead of throwing") {
    AdEstimates ad = evaluate_ad_estimates(1e6, 0.05, 5e5, 0.45, 0.2, 4,
                                           Confidence(0.01));
    CHECK_FALSE(ad.validity.all());
    CHECK(ad.s_bar_minus == 0.0);
    CHECK(ad.phi_bar_plus == 0.0);
    // Expected distilled stats are still reported.
    CHECK(ad.n_k_bar > 0.0);

    ad = evaluate_ad_estimates(1e6, 0.05, 8e5, 0.06, 0.06, 3, Confidence(1e-10));
    CHECK(ad.validity.all());
    CHECK(ad.s_bar_minus > 0.0);
    CHECK(ad.phi_bar_plus > 0.0);
    CHECK(ad.phi_bar_plus < 0.5);
    CHECK(ad.delta_prime > 0.0);
}

TEST_CASE("acceptance test uses non-strict thresholds") {
    AdEstimates ad = evaluate_ad_estimates(1e6, 0.05, 5e5, 0.06, 0.06, 3,
                                           Confidence(1e-10));
    CHECK(acceptance_test(ad, ad.s_bar_minus, ad.phi_bar_plus));
    CHECK_FALSE(acceptance_test(ad, ad.s_bar_minus + 1.0, ad.phi_bar_plus));
    CHECK_FALSE(acceptance_test(ad, ad.s_bar_minus, ad.phi_bar_plus / 2.0));
    ad.validity.c4 = false;
    CHECK_FALSE(acceptance_test(ad, 0.0, 1.0));
}
