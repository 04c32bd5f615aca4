#pragma once

#include <array>
#include <string>

namespace adkey {

// All tunable protocol inputs. block_size = 1 denotes the plain (no block
// post-selection) baseline; the decoy/key-rate machinery accepts it.
struct ProtocolParams {
    double pulses = 1e8;                       // N
    int block_size = 2;                        // b
    std::array<double, 3> mu{0.65, 0.15, 0.0};         // mu1 > mu2 + mu3, mu2 > mu3 >= 0
    std::array<double, 3> p_mu{0.6, 0.25, 0.15};       // positive, sum to 1
    double p_z = 0.9;                          // Z-basis probability, in (0,1)
    double q_t = 0.05;                         // test fraction of Z bits, in [0,1)
    double eps_cor = 1e-15;
    double eps_sec = 1e-9;
    double eps_bar = 0.0;                      // 0 => derived as eps_sec^2 / 368
    double f_ir = 1.2;                         // IR inefficiency factor >= 1
    double s_tol = 0.0;                        // acceptance threshold on block count
    double phi_tol = 1.0;                      // acceptance threshold on error rate

    // Per-estimator confidence; the configured override wins if set.
    double eps_bar_effective() const {
        return eps_bar > 0.0 ? eps_bar : eps_sec * eps_sec / 368.0;
    }

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Physical channel model inputs.
struct ChannelParams {
    double eta = 1.0;        // end-to-end transmission, in (0,1]
    double p_noise = 0.0;    // per-pulse noise click probability, in [0,1)
    double delta_mis = 0.0;  // misalignment angle in radians, in [0, pi/4]

    void validate() const;
};

}  // namespace adkey
