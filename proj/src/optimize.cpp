#include "adkey/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adkey/rng.hpp"

namespace adkey {

namespace {

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-clamp(z, -15.0, 15.0))); }

int dimension(Objective obj) { return obj == Objective::ad ? 7 : 6; }

// Map an unconstrained vector onto the constrained protocol parameters.
// Layout: [g1, g2, m3, a1, a2, z, t]; the intensities are built additively
// so mu1 > mu2 + mu3 and mu2 > mu3 >= 0 hold by construction, and the
// pulse-choice probabilities through a softmax with the third logit fixed
// at zero.
ProtocolParams decode(const std::vector<double>& x, const OptimizationProblem& prob) {
    ProtocolParams pp = prob.base;
    const double mu3 = x[2] * x[2];
    const double mu2 = mu3 + x[1] * x[1] + 1e-5;
    const double mu1 = mu2 + mu3 + x[0] * x[0] + 1e-5;
    pp.mu = {mu1, mu2, mu3};
    const double e1 = std::exp(clamp(x[3], -30.0, 30.0));
    const double e2 = std::exp(clamp(x[4], -30.0, 30.0));
    const double norm = e1 + e2 + 1.0;
    const double p1 = e1 / norm;
    const double p2 = e2 / norm;
    pp.p_mu = {p1, p2, 1.0 - p1 - p2};
    pp.p_z = sigmoid(x[5]);
    pp.q_t = prob.objective == Objective::ad ? sigmoid(x[6]) : 0.0;
    return pp;
}

// Inverse of decode at a specific parameter point, used for the start point.
std::vector<double> encode(const ProtocolParams& pp, const OptimizationProblem& prob) {
    std::vector<double> x(dimension(prob.objective));
    x[2] = std::sqrt(pp.mu[2]);
    x[1] = std::sqrt(std::max(pp.mu[1] - pp.mu[2] - 1e-5, 0.0));
    x[0] = std::sqrt(std::max(pp.mu[0] - pp.mu[1] - pp.mu[2] - 1e-5, 0.0));
    x[3] = std::log(pp.p_mu[0] / pp.p_mu[2]);
    x[4] = std::log(pp.p_mu[1] / pp.p_mu[2]);
    x[5] = std::log(pp.p_z / (1.0 - pp.p_z));
    if (prob.objective == Objective::ad) {
        const double q = clamp(pp.q_t, 1e-6, 1.0 - 1e-6);
        x[6] = std::log(q / (1.0 - q));
    }
    return x;
}

// Rate when key is produced; on zero-key plateaus a drift term far below any
// real rate, pulling the simplex toward lower estimated error rates.
double objective_value(const EvalResult& res) {
    if (res.skl.ell > 0.0) return res.skl.rate;
    double slack = 1.0;
    if (!res.de.rates_valid) {
        slack += 10.0;
    } else {
        slack += res.de.phi_x_plus + (res.de.has_test_set ? res.de.phi_z_plus : 0.0);
    }
    return -1e-18 * slack;
}

struct Evaluator {
    const OptimizationProblem& prob;
    long evals = 0;

    EvalResult run(const ProtocolParams& pp) const {
        return prob.objective == Objective::ad ? evaluate_ad(pp, prob.channel, prob.pa)
                                               : evaluate_bb84(pp, prob.channel);
    }

    double operator()(const std::vector<double>& x) {
        ++evals;
        const ProtocolParams pp = decode(x, prob);
        pp.validate();  // reparameterization guarantees this; fail loudly if not
        return -objective_value(run(pp));  // minimized
    }
};

ProtocolParams heuristic_start(const OptimizationProblem& prob) {
    ProtocolParams pp = prob.base;
    pp.mu = {0.65, 0.15, 0.0};
    pp.p_mu = {0.6, 0.25, 0.15};
    pp.p_z = 0.9;
    pp.q_t = 0.05;
    return pp;
}

}  // namespace

std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> start, double edge, int max_evals,
                                long* evals_used) {
    const std::size_t n = start.size();
    long evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };

    std::vector<std::vector<double>> pts(n + 1, start);
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += edge;
    for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        std::vector<std::vector<double>> p2(n + 1);
        std::vector<double> v2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            p2[i] = pts[idx[i]];
            v2[i] = vals[idx[i]];
        }
        pts.swap(p2);
        vals.swap(v2);
    };

    while (evals < max_evals) {
        order();
        // Convergence: simplex collapsed in value and extent.
        double spread = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            spread = std::max(spread, std::abs(pts[n][i] - pts[0][i]));
        }
        if (spread < 1e-10 && std::abs(vals[n] - vals[0]) < 1e-16) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) {
                p[j] = centroid[j] + coef * (pts[n][j] - centroid[j]);
            }
            return p;
        };

        const std::vector<double> refl = blend(-1.0);
        const double fr = eval(refl);
        if (fr < vals[0]) {
            const std::vector<double> exp_pt = blend(-2.0);
            const double fe = eval(exp_pt);
            if (fe < fr) {
                pts[n] = exp_pt;
                vals[n] = fe;
            } else {
                pts[n] = refl;
                vals[n] = fr;
            }
        } else if (fr < vals[n - 1]) {
            pts[n] = refl;
            vals[n] = fr;
        } else {
            const bool outside = fr < vals[n];
            const std::vector<double> con = blend(outside ? -0.5 : 0.5);
            const double fc = eval(con);
            if (fc < std::min(fr, vals[n])) {
                pts[n] = con;
                vals[n] = fc;
            } else {
                // Shrink toward the best vertex.
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                        pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
                    }
                    vals[i] = eval(pts[i]);
                }
            }
        }
    }
    order();
    if (evals_used) *evals_used += evals;
    return pts[0];
}

OptimizationResult optimize_key_rate(const OptimizationProblem& prob) {
    Evaluator evaluator{prob};
    const std::vector<double> base_start = encode(heuristic_start(prob), prob);

    OptimizationResult best;
    best.objective_value = -1e100;

    for (int r = 0; r < std::max(prob.restarts, 1); ++r) {
        std::vector<double> start = base_start;
        if (r > 0) {
            CounterRng rng = CounterRng::stream(prob.seed, static_cast<std::uint64_t>(r));
            for (double& s : start) s += 1.5 * (2.0 * rng.next_double() - 1.0);
        }
        auto wrapped = [&](const std::vector<double>& x) { return evaluator(x); };
        const std::vector<double> x = nelder_mead(wrapped, start, 0.1, prob.max_evals);
        const ProtocolParams pp = decode(x, prob);
        const EvalResult res = evaluator.run(pp);
        const double value = objective_value(res);
        if (value > best.objective_value) {
            best.objective_value = value;
            best.params = pp;
            best.skl = res.skl;
        }
    }
    best.evaluations = evaluator.evals;
    return best;
}

std::vector<ScanPoint> threshold_scan(const OptimizationProblem& base, SweepVariable var,
                                      const std::vector<double>& values) {
    std::vector<ScanPoint> out;
    out.reserve(values.size());
    for (double v : values) {
        OptimizationProblem prob = base;
        if (var == SweepVariable::delta_mis) {
            prob.channel.delta_mis = v;
        } else {
            prob.channel.eta = v;
        }
        ScanPoint pt;
        pt.sweep_value = v;
        pt.best = optimize_key_rate(prob);
        pt.qber = expected_counts(pt.best.params, prob.channel).qber_key();
        out.push_back(std::move(pt));
    }
    return out;
}

ThresholdResult find_threshold(const OptimizationProblem& base, SweepVariable var,
                               double lo, double hi, double tol) {
    auto at = [&](double v) {
        OptimizationProblem prob = base;
        if (var == SweepVariable::delta_mis) {
            prob.channel.delta_mis = v;
        } else {
            prob.channel.eta = v;
        }
        OptimizationResult r = optimize_key_rate(prob);
        const double qber = expected_counts(r.params, prob.channel).qber_key();
        return std::pair<OptimizationResult, double>(std::move(r), qber);
    };

    ThresholdResult res;
    auto [r_lo, q_lo] = at(lo);
    if (r_lo.skl.ell <= 0.0) return res;  // no positive side: empty bracket
    auto [r_hi, q_hi] = at(hi);
    if (r_hi.skl.ell > 0.0) return res;  // no zero side

    for (int it = 0; it < 60; ++it) {
        const bool qber_mode = var == SweepVariable::delta_mis;
        const double width =
            qber_mode ? std::abs(q_hi - q_lo) : std::abs(10.0 * std::log10(hi / lo));
        if (width < tol) break;
        const double mid = 0.5 * (lo + hi);
        auto [r_mid, q_mid] = at(mid);
        if (r_mid.skl.ell > 0.0) {
            lo = mid;
            r_lo = std::move(r_mid);
            q_lo = q_mid;
        } else {
            hi = mid;
            q_hi = q_mid;
        }
    }
    res.found = true;
    res.sweep_lo = lo;
    res.sweep_hi = hi;
    res.qber_lo = q_lo;
    res.best_at_lo = std::move(r_lo);
    return res;
}

}  // namespace adkey
