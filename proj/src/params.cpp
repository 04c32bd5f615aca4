#include "adkey/params.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace adkey {

namespace {
[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw std::invalid_argument(field + ": " + why);
}
}  // namespace

void ProtocolParams::validate() const {
    if (!(pulses > 0.0)) fail("pulses", "must be positive");
    if (block_size < 1) fail("block_size", "must be >= 1");
    if (!(mu[0] > mu[1] + mu[2])) fail("mu", "requires mu1 > mu2 + mu3");
    if (!(mu[1] > mu[2])) fail("mu", "requires mu2 > mu3");
    if (!(mu[2] >= 0.0)) fail("mu", "requires mu3 >= 0");
    double sum = 0.0;
    for (double p : p_mu) {
        if (!(p > 0.0)) fail("p_mu", "entries must be positive");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) fail("p_mu", "entries must sum to 1");
    if (!(p_z > 0.0 && p_z < 1.0)) fail("p_z", "must lie in (0,1)");
    if (!(q_t >= 0.0 && q_t < 1.0)) fail("q_t", "must lie in [0,1)");
    if (!(eps_cor > 0.0 && eps_cor < 1.0)) fail("eps_cor", "must lie in (0,1)");
    if (!(eps_sec > 0.0 && eps_sec < 1.0)) fail("eps_sec", "must lie in (0,1)");
    if (eps_bar < 0.0 || eps_bar > 1.0) fail("eps_bar", "must lie in [0,1]");
    if (!(f_ir >= 1.0)) fail("f_ir", "must be >= 1");
    if (s_tol < 0.0) fail("s_tol", "must be >= 0");
    if (!(phi_tol >= 0.0 && phi_tol <= 1.0)) fail("phi_tol", "must lie in [0,1]");
}

void ChannelParams::validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) fail("eta", "must lie in (0,1]");
    if (!(p_noise >= 0.0 && p_noise < 1.0)) fail("p_noise", "must lie in [0,1)");
    if (!(delta_mis >= 0.0 && delta_mis <= std::numbers::pi / 4.0)) {
        fail("delta_mis", "must lie in [0, pi/4]");
    }
}

}  // namespace adkey
