#include "adkey/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "adkey/ad.hpp"
#include "adkey/decoy.hpp"
#include "adkey/rng.hpp"

namespace adkey {

namespace {

// Falling factorial r(r-1)...(r-j+1); zero once a factor goes negative.
double falling(double r, int j) {
    double prod = 1.0;
    for (int i = 0; i < j; ++i) {
        const double f = r - i;
        if (f <= 0.0) return 0.0;
        prod *= f;
    }
    return prod;
}

double binom(int n, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
    return v;
}

// Arrangement entry: 0 = not single photon, then I/X/Y/Z single types.
enum : std::uint8_t { t_other = 0, t_i = 1, t_x = 2, t_y = 3, t_z = 4 };

std::vector<std::uint8_t> tally_to_types(const BlockTally& t) {
    if (t.s_k() > t.n_k || t.m_i < 0 || t.m_x < 0 || t.m_y < 0 || t.m_z < 0) {
        throw std::invalid_argument("BlockTally: inconsistent counts");
    }
    std::vector<std::uint8_t> v;
    v.reserve(t.n_k);
    v.insert(v.end(), t.n_k - t.s_k(), t_other);
    v.insert(v.end(), t.m_i, t_i);
    v.insert(v.end(), t.m_x, t_x);
    v.insert(v.end(), t.m_y, t_y);
    v.insert(v.end(), t.m_z, t_z);
    return v;
}

// Accepted single-photon blocks and odd-phase accepted blocks of one
// arrangement.
std::pair<long, long> count_blocks(const std::vector<std::uint8_t>& a, int b) {
    const long nb = static_cast<long>(a.size()) / b;
    long s = 0, r = 0;
    for (long blk = 0; blk < nb; ++blk) {
        int bits = 0, phases = 0;
        bool all_single = true;
        for (int j = 0; j < b; ++j) {
            const std::uint8_t t = a[blk * b + j];
            if (t == t_other) {
                all_single = false;
                break;
            }
            if (t == t_x || t == t_y) ++bits;
            if (t == t_y || t == t_z) ++phases;
        }
        if (!all_single || (bits != 0 && bits != b)) continue;
        ++s;
        if (phases % 2 == 1) ++r;
    }
    return {s, r};
}

void shuffle_chain(std::vector<std::uint8_t>& a, CounterRng& rng) {
    if (a.size() < 2) return;
    for (std::size_t i = a.size() - 1; i >= 1; --i) {
        const std::size_t j = rng.next_below(i + 1);
        std::swap(a[i], a[j]);
    }
}

}  // namespace

double expected_odd_phase_blocks_exact(const BlockTally& t, int b) {
    if (b < 1 || t.n_k < b) {
        throw std::domain_error("expected_odd_phase_blocks_exact: need n_k >= b >= 1");
    }
    const double nb = std::floor(static_cast<double>(t.n_k) / b);
    const double denom = falling(static_cast<double>(t.n_k), b);
    double sum = 0.0;
    for (int k = 1; k <= b; k += 2) {
        sum += binom(b, k) * (falling(t.m_z, k) * falling(t.m_i, b - k) +
                              falling(t.m_y, k) * falling(t.m_x, b - k));
    }
    return nb * sum / denom;
}

EnumerationResult enumerate_block_means(const BlockTally& t, int b) {
    std::vector<std::uint8_t> a = tally_to_types(t);
    std::sort(a.begin(), a.end());
    EnumerationResult res;
    double sum_s = 0.0, sum_r = 0.0;
    do {
        const auto [s, r] = count_blocks(a, b);
        sum_s += s;
        sum_r += r;
        ++res.arrangements;
    } while (std::next_permutation(a.begin(), a.end()));
    res.mean_s = sum_s / res.arrangements;
    res.mean_r = sum_r / res.arrangements;
    return res;
}

PermutationStats permutation_block_experiment(const BlockTally& t, int b, long trials,
                                              std::uint64_t seed, Confidence eps,
                                              double s_lower, double phi_upper) {
    if (trials < 1) throw std::invalid_argument("permutation_block_experiment: trials < 1");
    const std::vector<std::uint8_t> base = tally_to_types(t);
    PermutationStats st;
    st.trials = trials;
    st.exact_s = expected_single_blocks_exact(t.n_k, t.s_k(), t.r_bit(), b);
    st.exact_r = expected_odd_phase_blocks_exact(t, b);
    const double envelope = mcdiarmid_block_delta(static_cast<double>(t.n_k), eps);

    double sum_s = 0.0, sum_s2 = 0.0, sum_r = 0.0, sum_r2 = 0.0;
    long env_s = 0, env_r = 0, below_s = 0, above_phi = 0;
    std::vector<std::uint8_t> a;
    for (long trial = 0; trial < trials; ++trial) {
        CounterRng rng = CounterRng::stream(seed, static_cast<std::uint64_t>(trial));
        a = base;
        shuffle_chain(a, rng);
        const auto [s, r] = count_blocks(a, b);
        sum_s += s;
        sum_s2 += static_cast<double>(s) * s;
        sum_r += r;
        sum_r2 += static_cast<double>(r) * r;
        if (std::abs(s - st.exact_s) > envelope) ++env_s;
        if (std::abs(r - st.exact_r) > envelope) ++env_r;
        if (s < s_lower) ++below_s;
        if (s > 0 && static_cast<double>(r) / s > phi_upper) ++above_phi;
    }
    const double n = static_cast<double>(trials);
    st.mean_s = sum_s / n;
    st.mean_r = sum_r / n;
    st.se_s = std::sqrt(std::max(sum_s2 / n - st.mean_s * st.mean_s, 0.0) / n);
    st.se_r = std::sqrt(std::max(sum_r2 / n - st.mean_r * st.mean_r, 0.0) / n);
    st.freq_s_envelope = env_s / n;
    st.freq_r_envelope = env_r / n;
    st.freq_s_below = below_s / n;
    st.freq_phi_above = above_phi / n;
    return st;
}

SerflingStats serfling_experiment(const std::vector<std::uint8_t>& population, long k,
                                  Confidence eps, long trials, std::uint64_t seed) {
    const long total_len = static_cast<long>(population.size());
    const long n = total_len - k;
    if (k < 1 || n < 1) throw std::invalid_argument("serfling_experiment: need n, k >= 1");
    if (trials < 1) throw std::invalid_argument("serfling_experiment: trials < 1");
    long total_ones = 0;
    for (std::uint8_t v : population) total_ones += v;
    const double nu = serfling_nu(static_cast<double>(n), static_cast<double>(k), eps);

    std::vector<std::uint32_t> idx(total_len);
    long violations = 0;
    for (long trial = 0; trial < trials; ++trial) {
        CounterRng rng = CounterRng::stream(seed, static_cast<std::uint64_t>(trial));
        for (long i = 0; i < total_len; ++i) idx[i] = static_cast<std::uint32_t>(i);
        long sample_ones = 0;
        // Partial shuffle: the first k entries form the test sample.
        for (long i = 0; i < k; ++i) {
            const long j = i + static_cast<long>(rng.next_below(total_len - i));
            std::swap(idx[i], idx[j]);
            sample_ones += population[idx[i]];
        }
        const double rest_mean =
            static_cast<double>(total_ones - sample_ones) / static_cast<double>(n);
        const double sample_mean = static_cast<double>(sample_ones) / static_cast<double>(k);
        if (rest_mean > sample_mean + nu) ++violations;
    }
    SerflingStats st;
    st.trials = trials;
    st.violation_freq = static_cast<double>(violations) / static_cast<double>(trials);
    st.standard_error =
        std::sqrt(st.violation_freq * (1.0 - st.violation_freq) / static_cast<double>(trials));
    return st;
}

AdIidStats ad_iid_experiment(double phi, int b, long trials, std::uint64_t seed) {
    if (!(phi >= 0.0 && phi <= 1.0)) throw std::domain_error("ad_iid_experiment: bad phi");
    if (b < 1 || trials < 1) throw std::invalid_argument("ad_iid_experiment: bad b or trials");
    long accepted = 0, wrong = 0;
    for (long trial = 0; trial < trials; ++trial) {
        CounterRng rng = CounterRng::stream(seed, static_cast<std::uint64_t>(trial));
        int errors = 0;
        for (int j = 0; j < b; ++j) errors += rng.next_bernoulli(phi) ? 1 : 0;
        if (errors == 0 || errors == b) {
            ++accepted;
            if (errors == b) ++wrong;
        }
    }
    AdIidStats st;
    st.trials = trials;
    st.accepted = accepted;
    st.acceptance = static_cast<double>(accepted) / static_cast<double>(trials);
    st.distilled_error =
        accepted > 0 ? static_cast<double>(wrong) / static_cast<double>(accepted) : 0.0;
    return st;
}

ConcentrationStats concentration_experiment(long n_total, double p, Confidence eps,
                                            long trials, std::uint64_t seed) {
    if (n_total < 1 || !(p >= 0.0 && p <= 1.0) || trials < 1) {
        throw std::invalid_argument("concentration_experiment: bad inputs");
    }
    const double lambda = static_cast<double>(n_total) * p;
    const double dh = hoeffding_delta(static_cast<double>(n_total), eps);
    long h_up = 0, h_lo = 0, c_up = 0, c_lo = 0;
    for (long trial = 0; trial < trials; ++trial) {
        CounterRng rng = CounterRng::stream(seed, static_cast<std::uint64_t>(trial));
        long x = 0;
        for (long i = 0; i < n_total; ++i) x += rng.next_bernoulli(p) ? 1 : 0;
        const double xd = static_cast<double>(x);
        if (lambda > xd + dh) ++h_up;
        if (lambda < xd - dh) ++h_lo;
        if (lambda > xd + chernoff_delta(xd, eps, Direction::upper)) ++c_up;
        if (lambda < xd - chernoff_delta(xd, eps, Direction::lower)) ++c_lo;
    }
    ConcentrationStats st;
    st.trials = trials;
    const double n = static_cast<double>(trials);
    st.freq_hoeffding_upper = h_up / n;
    st.freq_hoeffding_lower = h_lo / n;
    st.freq_chernoff_upper = c_up / n;
    st.freq_chernoff_lower = c_lo / n;
    st.standard_error = std::sqrt(eps.epsilon * (1.0 - eps.epsilon) / n);
    return st;
}

DecoyConservStats decoy_conservativeness_experiment(const ProtocolParams& pp,
                                                    const ChannelParams& ch, long trials,
                                                    std::uint64_t seed) {
    if (trials < 1) {
        throw std::invalid_argument("decoy_conservativeness_experiment: trials < 1");
    }
    const auto single = outcome_probabilities_photon(1, ch);
    const double p_err = single.error() / single.detect();
    const double p_phase_ok = p_err < 1.0 ? p_err / (1.0 - p_err) : 1.0;

    DecoyConservStats st;
    st.trials = trials;
    long v_o[num_sets] = {0, 0, 0}, v_s[num_sets] = {0, 0, 0};
    long v_et = 0, v_ex = 0, v_pz = 0, v_px = 0;
    for (long trial = 0; trial < trials; ++trial) {
        const std::uint64_t sim_seed =
            CounterRng::mix(seed + (2 * static_cast<std::uint64_t>(trial) + 1) *
                                       0x9E3779B97F4A7C15ULL);
        const SimulationResult sim = simulate_pulses(pp, ch, sim_seed);
        const DecoyEstimates de = estimate_all(sim.observed, pp, true);
        for (int f = 0; f < num_sets; ++f) {
            if (sim.o_true[f] < de.o_minus[f]) ++v_o[f];
            if (sim.s_true[f] < de.s_minus[f]) ++v_s[f];
        }
        if (sim.e_true[static_cast<int>(SetIndex::set_t)] >
            de.e_plus[static_cast<int>(SetIndex::set_t)])
            ++v_et;
        if (sim.e_true[static_cast<int>(SetIndex::set_x)] >
            de.e_plus[static_cast<int>(SetIndex::set_x)])
            ++v_ex;
        if (!de.rates_valid) {
            ++st.invalid_runs;
            continue;
        }
        CounterRng rng = CounterRng::stream(seed, 2 * static_cast<std::uint64_t>(trial));
        long s_k_true = 0, bit = 0, phase = 0;
        for (KeyPulseType t : sim.key_types) {
            if (t == KeyPulseType::other) continue;
            ++s_k_true;
            if (t == KeyPulseType::single_bit_error) {
                ++bit;
            } else if (rng.next_bernoulli(p_phase_ok)) {
                ++phase;
            }
        }
        if (s_k_true > 0) {
            if (static_cast<double>(bit) / s_k_true > de.phi_z_plus) ++v_pz;
            if (static_cast<double>(phase) / s_k_true > de.phi_x_plus) ++v_px;
        }
    }
    const double n = static_cast<double>(trials);
    for (int f = 0; f < num_sets; ++f) {
        st.freq_o[f] = v_o[f] / n;
        st.freq_s[f] = v_s[f] / n;
    }
    st.freq_e_t = v_et / n;
    st.freq_e_x = v_ex / n;
    st.freq_phi_z = v_pz / n;
    st.freq_phi_x = v_px / n;
    return st;
}

SimulationResult simulate_pulses(const ProtocolParams& pp, const ChannelParams& ch,
                                 std::uint64_t seed) {
    pp.validate();
    ch.validate();
    const long pulses = static_cast<long>(std::llround(pp.pulses));
    if (pulses > 20'000'000) {
        throw std::invalid_argument("simulate_pulses: pulse count beyond desk scale");
    }

    // Poisson photon-number tables per intensity, truncated where the tail
    // mass drops below 1e-12 (tail folded into the last bucket), and the
    // per-photon-number outcome distributions.
    struct IntensityTable {
        std::vector<double> cum_k;
        std::vector<OutcomeProbabilities> outcomes;
    };
    std::array<IntensityTable, num_intensities> tables;
    for (int i = 0; i < num_intensities; ++i) {
        const double mu = pp.mu[i];
        double w = std::exp(-mu);
        double cum = 0.0;
        int k = 0;
        for (;;) {
            cum += w;
            tables[i].cum_k.push_back(cum);
            tables[i].outcomes.push_back(outcome_probabilities_photon(k, ch));
            if (1.0 - cum < 1e-12 || k > 200) break;
            ++k;
            w *= mu / k;
        }
        tables[i].cum_k.back() = 1.0;
    }
    const double cum_mu1 = pp.p_mu[0];
    const double cum_mu2 = pp.p_mu[0] + pp.p_mu[1];
    const double p_zz = pp.p_z * pp.p_z;
    const double p_xx = (1.0 - pp.p_z) * (1.0 - pp.p_z);

    SimulationResult res;
    CounterRng rng(CounterRng::mix(seed));
    for (long p = 0; p < pulses; ++p) {
        const double ub = rng.next_double();
        int set;
        if (ub < p_zz) {
            set = rng.next_double() < pp.q_t ? static_cast<int>(SetIndex::set_t)
                                             : static_cast<int>(SetIndex::set_z);
        } else if (ub < p_zz + p_xx) {
            set = static_cast<int>(SetIndex::set_x);
        } else {
            continue;  // basis mismatch, sifted away
        }
        const double ui = rng.next_double();
        const int inten = ui < cum_mu1 ? 0 : (ui < cum_mu2 ? 1 : 2);
        const IntensityTable& tab = tables[inten];
        const double uk = rng.next_double();
        int k = 0;
        while (tab.cum_k[k] <= uk) ++k;
        const OutcomeProbabilities& o = tab.outcomes[k];
        const double uo = rng.next_double();
        bool detected = true, error = false;
        if (uo < o.none) {
            detected = false;
        } else if (uo < o.none + o.correct_only) {
            error = false;
        } else if (uo < o.none + o.correct_only + o.wrong_only) {
            error = true;
        } else {
            error = rng.next_bernoulli(0.5);  // double click, random assignment
        }
        if (!detected) continue;
        res.observed.n[set][inten] += 1.0;
        if (error) res.observed.m[set][inten] += 1.0;
        if (k == 0) res.o_true[set] += 1.0;
        if (k == 1) {
            res.s_true[set] += 1.0;
            if (error) res.e_true[set] += 1.0;
        }
        if (set == static_cast<int>(SetIndex::set_z) && inten <= 1) {
            res.key_types.push_back(k == 1 ? (error ? KeyPulseType::single_bit_error
                                                    : KeyPulseType::single_ok)
                                           : KeyPulseType::other);
        }
    }
    return res;
}

PipelineStats pipeline_conservativeness_experiment(const ProtocolParams& pp,
                                                   const ChannelParams& ch, long trials,
                                                   std::uint64_t seed, double m_y_rate) {
    if (trials < 1) {
        throw std::invalid_argument("pipeline_conservativeness_experiment: trials < 1");
    }
    const Confidence eps_bar(pp.eps_bar_effective());
    const auto single = outcome_probabilities_photon(1, ch);
    const double p_err = single.error() / single.detect();  // bit and phase alike
    const double p_phase_ok =
        p_err < 1.0 ? std::max((p_err - m_y_rate * p_err) / (1.0 - p_err), 0.0) : 1.0;

    PipelineStats st;
    st.trials = trials;
    std::vector<std::uint8_t> arrangement;
    for (long trial = 0; trial < trials; ++trial) {
        const std::uint64_t sim_seed =
            CounterRng::mix(seed + (2 * static_cast<std::uint64_t>(trial) + 1) *
                                       0x9E3779B97F4A7C15ULL);
        const SimulationResult sim = simulate_pulses(pp, ch, sim_seed);
        CounterRng rng = CounterRng::stream(seed, 2 * static_cast<std::uint64_t>(trial));

        // Counterfactual phase flips on the key-set singles.
        arrangement.clear();
        arrangement.reserve(sim.key_types.size());
        long s_k_true = 0, bit_true = 0, phase_true = 0;
        for (KeyPulseType t : sim.key_types) {
            if (t == KeyPulseType::other) {
                arrangement.push_back(t_other);
                continue;
            }
            ++s_k_true;
            if (t == KeyPulseType::single_bit_error) {
                ++bit_true;
                const bool phase = rng.next_bernoulli(m_y_rate);
                phase_true += phase ? 1 : 0;
                arrangement.push_back(phase ? t_y : t_x);
            } else {
                const bool phase = rng.next_bernoulli(p_phase_ok);
                phase_true += phase ? 1 : 0;
                arrangement.push_back(phase ? t_z : t_i);
            }
        }
        const double n_k = sim.observed.n_key();

        const DecoyEstimates de = estimate_all(sim.observed, pp, true);
        if (!de.rates_valid || n_k < pp.block_size) {
            ++st.invalid_runs;
            ++st.failures;
            continue;
        }
        const AdEstimates ad = evaluate_ad_estimates(
            n_k, sim.observed.qber_key(), de.s_k_minus, de.phi_z_plus, de.phi_x_plus,
            pp.block_size, eps_bar);
        if (!ad.validity.all()) {
            ++st.invalid_runs;
            ++st.failures;
            continue;
        }

        shuffle_chain(arrangement, rng);
        const auto [s_blocks, r_blocks] = count_blocks(arrangement, pp.block_size);

        const double phi_z_true =
            s_k_true > 0 ? static_cast<double>(bit_true) / s_k_true : 0.0;
        const double phi_x_true =
            s_k_true > 0 ? static_cast<double>(phase_true) / s_k_true : 0.0;
        const bool fail =
            s_k_true < de.s_k_minus || phi_z_true > de.phi_z_plus ||
            phi_x_true > de.phi_x_plus || s_blocks < ad.s_bar_minus ||
            (s_blocks > 0 &&
             static_cast<double>(r_blocks) / s_blocks > ad.phi_bar_plus);
        if (fail) ++st.failures;
    }
    st.freq = static_cast<double>(st.failures) / static_cast<double>(st.trials);
    st.standard_error =
        std::sqrt(st.freq * (1.0 - st.freq) / static_cast<double>(st.trials));
    return st;
}

}  // namespace adkey
