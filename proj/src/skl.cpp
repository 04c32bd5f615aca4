#include "adkey/skl.hpp"

#include <cmath>
#include <stdexcept>

namespace adkey {

namespace {

double pa_overhead(double eps_sec, PaConstant pa) {
    if (pa == PaConstant::derivation) {
        return 4.0 * std::log2(std::pow(2.0, 1.75) /
                               (eps_sec - eps_sec * eps_sec / 8.0));
    }
    return 4.0 * std::log2(4.0 / (eps_sec - eps_sec * eps_sec / 4.0));
}

double floor_clamp(double bits) {
    const double f = std::floor(bits);
    return f > 0.0 ? f : 0.0;
}

}  // namespace

double lambda_ir(double n_k_bar, double phi_k_bar, double f_ir) {
    if (!(f_ir >= 1.0)) throw std::domain_error("lambda_ir: f_ir must be >= 1");
    return f_ir * n_k_bar * binary_entropy(phi_k_bar);
}

SklResult skl_ad_proof(double s_tol, double phi_tol, double lambda, double eps_cor,
                       double eps_sec, double pulses, PaConstant pa) {
    SklResult r;
    r.variant = SklVariant::ad_proof;
    r.lambda_ir = lambda;
    const double bits = s_tol * (1.0 - truncated_binary_entropy(phi_tol)) - lambda -
                        std::log2(2.0 / eps_cor) - pa_overhead(eps_sec, pa);
    r.ell = floor_clamp(bits);
    r.rate = pulses > 0.0 ? r.ell / pulses : 0.0;
    r.valid = true;
    return r;
}

SklResult skl_ad_simulation(const DecoyEstimates& de, const AdEstimates& ad,
                            const ProtocolParams& pp, PaConstant pa) {
    SklResult r;
    r.variant = SklVariant::ad_simulation;
    if (!de.rates_valid || !ad.validity.all()) {
        r.rate = 0.0;
        r.valid = false;
        return r;
    }
    const double lambda = lambda_ir(ad.n_k_bar, ad.phi_k_bar, pp.f_ir);
    r = skl_ad_proof(ad.s_bar_minus, ad.phi_bar_plus, lambda, pp.eps_cor, pp.eps_sec,
                     pp.pulses, pa);
    r.variant = SklVariant::ad_simulation;
    return r;
}

SklResult skl_bb84(const DecoyEstimates& de, const CountTable& ct,
                   const ProtocolParams& pp) {
    SklResult r;
    r.variant = SklVariant::bb84;
    const double n_k = ct.n_key();
    if (!(n_k > 0.0) || !de.rates_valid) {
        r.valid = false;
        return r;
    }
    const double ir = pp.f_ir * n_k * binary_entropy(ct.qber_key());
    r.lambda_ir = ir;
    const double bits = de.o_k_minus +
                        de.s_k_minus * (1.0 - truncated_binary_entropy(de.phi_x_plus)) -
                        ir - std::log2(2.0 / pp.eps_cor) -
                        4.0 * std::log2(17.0 / (pp.eps_sec * std::pow(2.0, 0.25)));
    r.ell = floor_clamp(bits);
    r.rate = r.ell / pp.pulses;
    r.valid = true;
    return r;
}

EvalResult evaluate_ad(const ProtocolParams& pp, const ChannelParams& ch,
                       PaConstant pa) {
    EvalResult res;
    res.ct = expected_counts(pp, ch);
    res.de = estimate_all(res.ct, pp, true);
    const double n_k = res.ct.n_key();
    if (res.de.rates_valid && n_k >= pp.block_size) {
        res.ad = evaluate_ad_estimates(n_k, res.ct.qber_key(), res.de.s_k_minus,
                                       res.de.phi_z_plus, res.de.phi_x_plus,
                                       pp.block_size,
                                       Confidence(pp.eps_bar_effective()));
    }
    res.skl = skl_ad_simulation(res.de, res.ad, pp, pa);
    return res;
}

EvalResult evaluate_bb84(const ProtocolParams& pp, const ChannelParams& ch) {
    ProtocolParams flat = pp;
    flat.q_t = 0.0;  // no test set: every sifted Z bit is key material
    EvalResult res;
    res.ct = expected_counts(flat, ch);
    res.de = estimate_all(res.ct, flat, false);
    res.skl = skl_bb84(res.de, res.ct, flat);
    return res;
}

}  // namespace adkey
