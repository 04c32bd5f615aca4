#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "adkey/params.hpp"
#include "adkey/skl.hpp"

namespace adkey {

enum class Objective { ad, bb84 };

struct OptimizationProblem {
    Objective objective = Objective::ad;
    ChannelParams channel;
    ProtocolParams base;  // pulses, block_size, eps budgets, f_ir; the free
                          // parameters in it are overwritten per evaluation
    PaConstant pa = PaConstant::derivation;
    int max_evals = 2000;
    int restarts = 20;
    std::uint64_t seed = 1;
};

struct OptimizationResult {
    ProtocolParams params;
    SklResult skl;
    double objective_value = 0.0;  // rate, or a tiny negative drift value on
                                   // zero-key plateaus
    long evaluations = 0;
};

// Nelder-Mead maximization of the key rate over the free parameters
// {mu1, mu2, mu3, p_mu1, p_mu2, p_z} plus q_t for the AD objective. The
// search runs in an unconstrained reparameterized space, so every candidate
// satisfies the intensity and simplex constraints by construction.
// Deterministic for a fixed seed; restart 0 starts from a fixed heuristic
// point, later restarts from seeded perturbations of it.
OptimizationResult optimize_key_rate(const OptimizationProblem& prob);

// Generic Nelder-Mead minimizer used by optimize_key_rate, exposed for
// testing against known optima. Returns the best point found.
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> start, double edge, int max_evals,
                                long* evals_used = nullptr);

struct ScanPoint {
    double sweep_value = 0.0;
    double qber = 0.0;  // key-set QBER at the optimized parameters
    OptimizationResult best;
};

enum class SweepVariable { delta_mis, eta };

// Independently optimized rate at each sweep value.
std::vector<ScanPoint> threshold_scan(const OptimizationProblem& base, SweepVariable var,
                                      const std::vector<double>& values);

struct ThresholdResult {
    bool found = false;
    double sweep_lo = 0.0;  // last sweep value with positive rate
    double sweep_hi = 0.0;  // first sweep value with zero rate
    double qber_lo = 0.0;   // QBER at the optimized last-positive point
    OptimizationResult best_at_lo;
};

// Bisection for the zero-rate crossing along the sweep variable. The rate
// must be positive at lo and zero at hi; refined until the bracket QBER
// width is below qber_tol (delta_mis sweeps) or the bracket width is below
// sweep_tol (eta sweeps).
ThresholdResult find_threshold(const OptimizationProblem& base, SweepVariable var,
                               double lo, double hi, double tol);

}  // namespace adkey
