#include <cmath>

#include "adkey/optimize.hpp"
#include "doctest.h"

using namespace adkey;

TEST_CASE("nelder-mead finds the optimum of a smooth bowl") {
    auto f = [](const std::vector<double>& x) {
        double s = 0.0;
        for (double v : x) s += (v - 0.3) * (v - 0.3);
        return s;
    };
    const std::vector<double> best = nelder_mead(f, {0.9, -0.5, 0.1, 0.7}, 0.1, 4000);
    for (double v : best) CHECK(v == doctest::Approx(0.3).epsilon(1e-4));
}

TEST_CASE("optimized parameters always satisfy the protocol constraints") {
    OptimizationProblem prob;
    prob.base.pulses = 1e8;
    prob.base.block_size = 2;
    prob.channel.eta = 0.3;
    prob.channel.p_noise = 1e-5;
    prob.channel.delta_mis = 0.1;
    prob.restarts = 4;
    prob.max_evals = 400;
    const OptimizationResult r = optimize_key_rate(prob);
    CHECK_NOTHROW(r.params.validate());
    CHECK(r.skl.ell > 0.0);
    CHECK(r.evaluations > 0);
}

TEST_CASE("optimization is deterministic for a fixed seed") {
    OptimizationProblem prob;
    prob.base.pulses = 1e7;
    prob.base.block_size = 3;
    prob.channel.eta = 0.6;
    prob.channel.delta_mis = 0.15;
    prob.restarts = 3;
    prob.max_evals = 300;
    prob.seed = 42;
    const OptimizationResult a = optimize_key_rate(prob);
    const OptimizationResult b = optimize_key_rate(prob);
    CHECK(a.skl.ell == b.skl.ell);
    for (int i = 0; i < 3; ++i) CHECK(a.params.mu[i] == b.params.mu[i]);
    CHECK(a.params.p_z == b.params.p_z);
}

TEST_CASE("more restarts never hurt the best value") {
    OptimizationProblem prob;
    prob.base.pulses = 1e7;
    prob.channel.eta = 0.4;
    prob.channel.delta_mis = 0.2;
    prob.max_evals = 250;
    prob.seed = 9;
    prob.restarts = 1;
    const double one = optimize_key_rate(prob).objective_value;
    prob.restarts = 6;
    const double six = optimize_key_rate(prob).objective_value;
    CHECK(six >= one);
}

TEST_CASE("plain objective ignores the test fraction") {
    OptimizationProblem prob;
    prob.objective = Objective::bb84;
    prob.base.pulses = 1e8;
    prob.channel.eta = 0.5;
    prob.channel.delta_mis = 0.1;
    prob.restarts = 3;
    prob.max_evals = 400;
    const OptimizationResult r = optimize_key_rate(prob);
    CHECK(r.params.q_t == 0.0);
    CHECK(r.skl.ell > 0.0);
}

TEST_CASE("threshold scan brackets the zero-rate crossing") {
    OptimizationProblem prob;
    prob.base.pulses = 1e8;
    prob.base.block_size = 3;
    prob.restarts = 4;
    prob.max_evals = 600;
    const std::vector<double> angles = {0.10, 0.25, 0.45};
    const auto scan = threshold_scan(prob, SweepVariable::delta_mis, angles);
    REQUIRE(scan.size() == 3);
    CHECK(scan[0].best.skl.rate > 0.0);
    CHECK(scan[2].best.skl.rate == 0.0);
    CHECK(scan[0].qber < scan[2].qber);

    const ThresholdResult t = find_threshold(prob, SweepVariable::delta_mis, 0.10,
                                             0.45, 0.002);
    CHECK(t.found);
    CHECK(t.sweep_lo < t.sweep_hi);
    CHECK(t.best_at_lo.skl.rate > 0.0);
    CHECK(t.qber_lo > 0.08);
    CHECK(t.qber_lo < 0.14);
}

TEST_CASE("threshold search reports an empty bracket without a sign change") {
    OptimizationProblem prob;
    prob.base.pulses = 1e5;  // far too few pulses for any key
    prob.restarts = 2;
    prob.max_evals = 150;
    const ThresholdResult t =
        find_threshold(prob, SweepVariable::delta_mis, 0.05, 0.4, 0.002);
    CHECK_FALSE(t.found);
}
