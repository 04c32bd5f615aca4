#include <cmath>

#include "adkey/skl.hpp"
#include "doctest.h"

using namespace adkey;

TEST_CASE("reconciliation leakage model") {
    CHECK(lambda_ir(1e5, 0.0, 1.2) == 0.0);
    CHECK(lambda_ir(1e5, 0.5, 1.2) == doctest::Approx(1.2e5));
    CHECK(lambda_ir(243333.1, 0.0013699, 1.2) == doctest::Approx(4381.5).epsilon(1e-3));
}

TEST_CASE("key length from tolerances") {
    SklResult r = skl_ad_proof(0.0, 0.01, 0.0, 1e-15, 1e-9, 1e8);
    CHECK(r.ell == 0.0);
    r = skl_ad_proof(1e5, 0.5, 0.0, 1e-15, 1e-9, 1e8);
    CHECK(r.ell == 0.0);  // truncated entropy kills the first term
    r = skl_ad_proof(1e5, 0.05, 1e4, 1e-15, 1e-9, 1e8);
    CHECK(r.ell == doctest::Approx(61182.0));
    CHECK(r.rate == doctest::Approx(61182.0 / 1e8));
    CHECK(std::floor(r.ell) == r.ell);
}

TEST_CASE("overhead constant variants differ by about one bit") {
    const SklResult a = skl_ad_proof(1e5, 0.05, 1e4, 1e-15, 1e-9, 1e8,
                                     PaConstant::derivation);
    const SklResult b = skl_ad_proof(1e5, 0.05, 1e4, 1e-15, 1e-9, 1e8,
                                     PaConstant::practical);
    CHECK(std::abs(a.ell - b.ell) <= 10.0);
    CHECK(b.ell <= a.ell);  // the practical constant is one bit more costly
}

TEST_CASE("plain-variant key length example") {
    ProtocolParams pp;
    DecoyEstimates de;
    de.rates_valid = true;
    de.o_k_minus = 1000.0;
    de.s_k_minus = 1e5;
    de.phi_x_plus = 0.05;
    CountTable ct;
    ct.n[0][0] = 2e5;
    ct.m[0][0] = 1e4;  // qber 0.05
    const SklResult r = skl_bb84(de, ct, pp);
    CHECK(r.ell == doctest::Approx(3439.0));
    CHECK(r.valid);
}

TEST_CASE("plain-variant key length clamps at zero") {
    ProtocolParams pp;
    DecoyEstimates de;
    de.rates_valid = true;
    de.o_k_minus = 10.0;
    de.s_k_minus = 1e4;
    de.phi_x_plus = 0.6;  // truncated entropy wipes the single-photon term
    CountTable ct;
    ct.n[0][0] = 2e4;
    ct.m[0][0] = 1e3;
    const SklResult r = skl_bb84(de, ct, pp);
    CHECK(r.ell == 0.0);
}

TEST_CASE("simulation-mode key length is zero on invalid block estimates") {
    ProtocolParams pp;
    DecoyEstimates de;
    de.rates_valid = true;
    AdEstimates ad;  // validity flags default to false
    const SklResult r = skl_ad_simulation(de, ad, pp);
    CHECK(r.ell == 0.0);
    CHECK_FALSE(r.valid);
}

TEST_CASE("end-to-end positive key at low error rate") {
    ProtocolParams pp;
    pp.pulses = 1e8;
    pp.block_size = 2;
    ChannelParams ch;
    ch.eta = 0.5;
    ch.p_noise = 1e-6;
    ch.delta_mis = 0.05;
    const EvalResult ad = evaluate_ad(pp, ch);
    CHECK(ad.skl.ell > 0.0);
    CHECK(ad.skl.rate == ad.skl.ell / pp.pulses);
    const EvalResult plain = evaluate_bb84(pp, ch);
    CHECK(plain.skl.ell > 0.0);
}

TEST_CASE("key length falls as misalignment grows") {
    ProtocolParams pp;
    pp.pulses = 1e8;
    pp.block_size = 3;
    ChannelParams ch;
    ch.eta = 0.8;
    ch.p_noise = 1e-6;
    double prev = -1.0;
    bool first = true;
    for (double mis = 0.02; mis < 0.3; mis += 0.04) {
        ch.delta_mis = mis;
        const double ell = evaluate_ad(pp, ch).skl.ell;
        if (!first) CHECK(ell <= prev);
        prev = ell;
        first = false;
    }
}
