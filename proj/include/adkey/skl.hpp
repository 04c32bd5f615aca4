#pragma once

#include "adkey/ad.hpp"
#include "adkey/channel.hpp"
#include "adkey/decoy.hpp"
#include "adkey/params.hpp"

namespace adkey {

enum class SklVariant { ad_proof, ad_simulation, bb84 };

// The privacy-amplification overhead constant exists in two forms that differ
// by about one bit; `derivation` is the default.
enum class PaConstant { derivation, practical };

struct SklResult {
    double ell = 0.0;   // integer-valued bit count, floor applied, >= 0
    double rate = 0.0;  // ell / N
    SklVariant variant = SklVariant::ad_simulation;
    double lambda_ir = 0.0;
    bool valid = false;  // false when validity flags forced ell = 0
};

// Information-reconciliation leakage model: f * N_K_bar * h(Phi_K_bar).
double lambda_ir(double n_k_bar, double phi_k_bar, double f_ir);

// Distilled-key length from acceptance-test tolerances:
//   floor(S_tol [1 - h(Phi_tol)] - lambda - log2(2/eps_cor) - pa_term)
// clamped at 0. The first term uses the truncated entropy, so Phi_tol >= 1/2
// yields zero key. pulses is only used to report the rate.
SklResult skl_ad_proof(double s_tol, double phi_tol, double lambda, double eps_cor,
                       double eps_sec, double pulses,
                       PaConstant pa = PaConstant::derivation);

// Same expression with the estimated bounds substituted for the tolerances
// and lambda_ir built from the expected distilled statistics. Invalid block
// estimates give a zero-key result, not an exception.
SklResult skl_ad_simulation(const DecoyEstimates& de, const AdEstimates& ad,
                            const ProtocolParams& pp,
                            PaConstant pa = PaConstant::derivation);

// Plain (no block post-selection) baseline:
//   floor(o_K- + s_K- [1 - h(phi_X+)] - f n_K h(phi_K)
//         - log2(2/eps_cor) - 4 log2(17 / (eps_sec 2^{1/4})))
SklResult skl_bb84(const DecoyEstimates& de, const CountTable& ct,
                   const ProtocolParams& pp);

// End-to-end evaluations over the analytic channel model.
struct EvalResult {
    CountTable ct;
    DecoyEstimates de;
    AdEstimates ad;  // untouched for the bb84 variant
    SklResult skl;
};

EvalResult evaluate_ad(const ProtocolParams& pp, const ChannelParams& ch,
                       PaConstant pa = PaConstant::derivation);
EvalResult evaluate_bb84(const ProtocolParams& pp, const ChannelParams& ch);

}  // namespace adkey
