// Batch front end: single-point key-length evaluation, sweeps with per-point
// optimization, parameter optimization, and the Monte Carlo oracle suites.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "adkey/mc_oracle.hpp"
#include "adkey/optimize.hpp"
#include "adkey/rng.hpp"
#include "adkey/skl.hpp"
#include "json.hpp"

using json = nlohmann::json;
using namespace adkey;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_oracle = 3;
constexpr int exit_runtime = 4;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal representation, for byte-deterministic output.
std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt(long v) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Configuration

struct SweepConfig {
    std::string variable = "delta_mis";
    double start = 0.0;
    double stop = 0.0;
    long steps = 0;
    bool per_point_optimize = true;
    std::vector<int> b_values;
    std::string svg;
};

struct OracleConfig {
    std::string suite = "all";
    long trials = 0;  // 0: per-suite defaults
};

struct AppConfig {
    ProtocolParams pp;
    ChannelParams ch;
    int max_evals = 2000;
    int restarts = 20;
    SweepConfig sweep;
    OracleConfig oracle;
};

void reject_unknown(const json& obj, const std::string& section,
                    const std::vector<std::string>& known) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown config field: " + section + key);
        }
    }
}

double need_number(const json& v, const std::string& name) {
    if (!v.is_number()) throw ConfigError("config field " + name + " must be a number");
    return v.get<double>();
}

void parse_protocol(const json& j, ProtocolParams& pp) {
    reject_unknown(j, "protocol.",
                   {"pulses", "block_size", "mu", "p_mu", "p_z", "q_t", "eps_cor",
                    "eps_sec", "eps_bar", "f_ir", "s_tol", "phi_tol"});
    if (j.contains("pulses")) pp.pulses = need_number(j["pulses"], "protocol.pulses");
    if (j.contains("block_size")) {
        pp.block_size = static_cast<int>(need_number(j["block_size"], "protocol.block_size"));
    }
    for (const char* name : {"mu", "p_mu"}) {
        if (!j.contains(name)) continue;
        const json& arr = j[name];
        if (!arr.is_array() || arr.size() != 3) {
            throw ConfigError(std::string("config field protocol.") + name +
                              " must be an array of 3 numbers");
        }
        for (int i = 0; i < 3; ++i) {
            const double v = need_number(arr[i], std::string("protocol.") + name);
            (std::string(name) == "mu" ? pp.mu : pp.p_mu)[i] = v;
        }
    }
    if (j.contains("p_z")) pp.p_z = need_number(j["p_z"], "protocol.p_z");
    if (j.contains("q_t")) pp.q_t = need_number(j["q_t"], "protocol.q_t");
    if (j.contains("eps_cor")) pp.eps_cor = need_number(j["eps_cor"], "protocol.eps_cor");
    if (j.contains("eps_sec")) pp.eps_sec = need_number(j["eps_sec"], "protocol.eps_sec");
    if (j.contains("eps_bar")) pp.eps_bar = need_number(j["eps_bar"], "protocol.eps_bar");
    if (j.contains("f_ir")) pp.f_ir = need_number(j["f_ir"], "protocol.f_ir");
    if (j.contains("s_tol")) pp.s_tol = need_number(j["s_tol"], "protocol.s_tol");
    if (j.contains("phi_tol")) pp.phi_tol = need_number(j["phi_tol"], "protocol.phi_tol");
}

void parse_channel(const json& j, ChannelParams& ch) {
    reject_unknown(j, "channel.", {"eta", "p_noise", "delta_mis"});
    if (j.contains("eta")) ch.eta = need_number(j["eta"], "channel.eta");
    if (j.contains("p_noise")) ch.p_noise = need_number(j["p_noise"], "channel.p_noise");
    if (j.contains("delta_mis")) {
        ch.delta_mis = need_number(j["delta_mis"], "channel.delta_mis");
    }
}

AppConfig load_config(const std::string& path) {
    AppConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    reject_unknown(j, "", {"protocol", "channel", "optimize", "sweep", "oracle"});
    if (j.contains("protocol")) parse_protocol(j["protocol"], cfg.pp);
    if (j.contains("channel")) parse_channel(j["channel"], cfg.ch);
    if (j.contains("optimize")) {
        const json& o = j["optimize"];
        reject_unknown(o, "optimize.", {"max_evals", "restarts"});
        if (o.contains("max_evals")) {
            cfg.max_evals = static_cast<int>(need_number(o["max_evals"], "optimize.max_evals"));
        }
        if (o.contains("restarts")) {
            cfg.restarts = static_cast<int>(need_number(o["restarts"], "optimize.restarts"));
        }
    }
    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        reject_unknown(s, "sweep.",
                       {"variable", "start", "stop", "steps", "per_point_optimize",
                        "b_values", "svg"});
        if (s.contains("variable")) cfg.sweep.variable = s["variable"].get<std::string>();
        if (cfg.sweep.variable != "delta_mis" && cfg.sweep.variable != "eta") {
            throw ConfigError("sweep.variable must be delta_mis or eta");
        }
        if (s.contains("start")) cfg.sweep.start = need_number(s["start"], "sweep.start");
        if (s.contains("stop")) cfg.sweep.stop = need_number(s["stop"], "sweep.stop");
        if (s.contains("steps")) {
            cfg.sweep.steps = static_cast<long>(need_number(s["steps"], "sweep.steps"));
        }
        if (s.contains("per_point_optimize")) {
            if (!s["per_point_optimize"].is_boolean()) {
                throw ConfigError("sweep.per_point_optimize must be a boolean");
            }
            cfg.sweep.per_point_optimize = s["per_point_optimize"].get<bool>();
        }
        if (s.contains("b_values")) {
            for (const json& v : s["b_values"]) {
                cfg.sweep.b_values.push_back(static_cast<int>(need_number(v, "sweep.b_values")));
            }
        }
        if (s.contains("svg")) cfg.sweep.svg = s["svg"].get<std::string>();
    }
    if (j.contains("oracle")) {
        const json& o = j["oracle"];
        reject_unknown(o, "oracle.", {"suite", "trials"});
        if (o.contains("suite")) cfg.oracle.suite = o["suite"].get<std::string>();
        if (o.contains("trials")) {
            cfg.oracle.trials = static_cast<long>(need_number(o["trials"], "oracle.trials"));
            if (cfg.oracle.trials <= 0) {
                throw ConfigError("oracle.trials: must be positive");
            }
        }
    }
    cfg.pp.validate();
    cfg.ch.validate();
    return cfg;
}

json emit_config(const ProtocolParams& pp, const ChannelParams& ch) {
    json j;
    j["protocol"] = {{"pulses", pp.pulses},   {"block_size", pp.block_size},
                     {"mu", pp.mu},           {"p_mu", pp.p_mu},
                     {"p_z", pp.p_z},         {"q_t", pp.q_t},
                     {"eps_cor", pp.eps_cor}, {"eps_sec", pp.eps_sec},
                     {"eps_bar", pp.eps_bar}, {"f_ir", pp.f_ir},
                     {"s_tol", pp.s_tol},     {"phi_tol", pp.phi_tol}};
    j["channel"] = {{"eta", ch.eta}, {"p_noise", ch.p_noise}, {"delta_mis", ch.delta_mis}};
    return j;
}

// ---------------------------------------------------------------------------
// Output

const char* csv_header =
    "sweep_var,sweep_value,variant,b,mu1,mu2,mu3,p_mu1,p_mu2,p_z,q_t,phi_k,"
    "s_kbar_minus,phi_xbar_plus,lambda_ir,ell,rate,valid";

std::string csv_row(const std::string& sweep_var, double sweep_value,
                    const std::string& variant, const ProtocolParams& pp,
                    const ChannelParams& ch, const EvalResult& res) {
    // For the plain variant the two estimator columns carry the key-set
    // single-photon lower bound and phase-error upper bound instead.
    const bool plain = variant == "bb84";
    const double s_col = plain ? res.de.s_k_minus : res.ad.s_bar_minus;
    const double phi_col = plain ? res.de.phi_x_plus : res.ad.phi_bar_plus;
    const double phi_k = expected_counts(pp, ch).qber_key();
    std::ostringstream os;
    os << sweep_var << ',' << fmt(sweep_value) << ',' << variant << ','
       << (plain ? 1 : pp.block_size) << ',' << fmt(pp.mu[0]) << ',' << fmt(pp.mu[1])
       << ',' << fmt(pp.mu[2]) << ',' << fmt(pp.p_mu[0]) << ',' << fmt(pp.p_mu[1]) << ','
       << fmt(pp.p_z) << ',' << fmt(plain ? 0.0 : pp.q_t) << ',' << fmt(phi_k) << ','
       << fmt(s_col) << ',' << fmt(phi_col) << ',' << fmt(res.skl.lambda_ir) << ','
       << fmt(res.skl.ell) << ',' << fmt(res.skl.rate) << ','
       << (res.skl.valid ? 1 : 0);
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    out << text;
}

// Minimal self-contained SVG line chart, one polyline per series.
void write_svg(const std::string& path,
               const std::map<std::string, std::vector<std::pair<double, double>>>& series) {
    const double w = 720, h = 480, ml = 70, mr = 20, mt = 20, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
    for (const auto& [name, pts] : series) {
        for (const auto& [x, y] : pts) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymax = std::max(ymax, y);
        }
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > 0.0)) ymax = 1.0;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                            "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
       << h << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
       << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
       << h - mb << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double x = xmin + (xmax - xmin) * i / 4.0;
        const double y = ymin + (ymax - ymin) * i / 4.0;
        os << "<text x=\"" << px(x) << "\" y=\"" << h - mb + 18
           << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
        os << "<text x=\"" << ml - 6 << "\" y=\"" << py(y) + 4
           << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(y) << "</text>\n";
    }
    int ci = 0;
    double ly = mt + 12;
    for (const auto& [name, pts] : series) {
        const char* color = colors[ci++ % 8];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
        for (const auto& [x, y] : pts) os << px(x) << ',' << py(y) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << w - mr - 150 << "\" y=\"" << ly << "\" font-size=\"12\" fill=\""
           << color << "\">" << name << "</text>\n";
        ly += 15;
    }
    os << "</svg>\n";
    write_text(path, os.str());
}

// ---------------------------------------------------------------------------
// Commands

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string variant = "ad";
    std::uint64_t seed = 1;
    int b_override = 0;
    std::string skl_constant = "derivation";
    int threads = 1;
    double nu_scale = 1.0;
};

PaConstant pa_from(const CommonOpts& c) {
    return c.skl_constant == "practical" ? PaConstant::practical : PaConstant::derivation;
}

int cmd_skl(const CommonOpts& opts) {
    AppConfig cfg = load_config(opts.config_path);
    if (opts.b_override > 0) cfg.pp.block_size = opts.b_override;
    cfg.pp.validate();
    std::ostringstream os;
    os << csv_header << '\n';
    if (opts.variant == "ad" || opts.variant == "both") {
        os << csv_row("point", 0.0, "ad", cfg.pp, cfg.ch,
                      evaluate_ad(cfg.pp, cfg.ch, pa_from(opts)))
           << '\n';
    }
    if (opts.variant == "bb84" || opts.variant == "both") {
        os << csv_row("point", 0.0, "bb84", cfg.pp, cfg.ch, evaluate_bb84(cfg.pp, cfg.ch))
           << '\n';
    }
    write_text(opts.out_path, os.str());
    return exit_ok;
}

int cmd_optimize(const CommonOpts& opts) {
    AppConfig cfg = load_config(opts.config_path);
    if (opts.b_override > 0) cfg.pp.block_size = opts.b_override;
    OptimizationProblem prob;
    prob.objective = opts.variant == "bb84" ? Objective::bb84 : Objective::ad;
    prob.channel = cfg.ch;
    prob.base = cfg.pp;
    prob.pa = pa_from(opts);
    prob.max_evals = cfg.max_evals;
    prob.restarts = cfg.restarts;
    prob.seed = opts.seed;
    const OptimizationResult best = optimize_key_rate(prob);
    json out = emit_config(best.params, cfg.ch);
    write_text(opts.out_path, out.dump(2) + "\n");
    std::cerr << "best rate " << fmt(best.skl.rate) << " (ell " << fmt(best.skl.ell)
              << ", " << best.evaluations << " evaluations)\n";
    return exit_ok;
}

int cmd_sweep(const CommonOpts& opts) {
    AppConfig cfg = load_config(opts.config_path);
    const SweepConfig& sw = cfg.sweep;
    if (sw.steps < 0) throw ConfigError("sweep.steps must be >= 0");
    std::vector<double> values;
    for (long i = 0; i < sw.steps; ++i) {
        values.push_back(sw.steps == 1 ? sw.start
                                       : sw.start + (sw.stop - sw.start) * i / (sw.steps - 1));
    }
    std::vector<int> b_values = sw.b_values;
    if (b_values.empty()) b_values.push_back(opts.b_override > 0 ? opts.b_override
                                                                 : cfg.pp.block_size);
    const SweepVariable var =
        sw.variable == "eta" ? SweepVariable::eta : SweepVariable::delta_mis;

    struct Series {
        std::string variant;
        int b;
    };
    std::vector<Series> series;
    if (opts.variant == "ad" || opts.variant == "both") {
        for (int b : b_values) series.push_back({"ad", b});
    }
    if (opts.variant == "bb84" || opts.variant == "both") series.push_back({"bb84", 1});

    struct Cell {
        ProtocolParams pp;
        EvalResult res;
    };
    std::vector<Cell> cells(series.size() * values.size());

    auto run_cell = [&](std::size_t si, std::size_t vi) {
        const Series& s = series[si];
        ProtocolParams pp = cfg.pp;
        pp.block_size = s.b;
        ChannelParams ch = cfg.ch;
        (var == SweepVariable::eta ? ch.eta : ch.delta_mis) = values[vi];
        if (sw.per_point_optimize) {
            OptimizationProblem prob;
            prob.objective = s.variant == "bb84" ? Objective::bb84 : Objective::ad;
            prob.channel = ch;
            prob.base = pp;
            prob.pa = pa_from(opts);
            prob.max_evals = cfg.max_evals;
            prob.restarts = cfg.restarts;
            prob.seed = CounterRng::mix(opts.seed + si * 1000003 + vi);
            const OptimizationResult best = optimize_key_rate(prob);
            pp = best.params;
        }
        Cell& cell = cells[si * values.size() + vi];
        cell.pp = pp;
        cell.res = s.variant == "bb84" ? evaluate_bb84(pp, ch)
                                       : evaluate_ad(pp, ch, pa_from(opts));
    };

    // Cells are independent; shard them over the worker count. Output order
    // is fixed afterwards, so the CSV does not depend on scheduling.
    const int workers = std::max(opts.threads, 1);
    std::vector<std::thread> pool;
    const std::size_t total = cells.size();
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < total; i += static_cast<std::size_t>(workers)) {
                run_cell(i / values.size(), i % values.size());
            }
        });
    }
    for (auto& t : pool) t.join();

    std::ostringstream os;
    os << csv_header << '\n';
    std::map<std::string, std::vector<std::pair<double, double>>> chart;
    for (std::size_t si = 0; si < series.size(); ++si) {
        const Series& s = series[si];
        const std::string label =
            s.variant == "bb84" ? "bb84" : "ad_b" + std::to_string(s.b);
        for (std::size_t vi = 0; vi < values.size(); ++vi) {
            const Cell& cell = cells[si * values.size() + vi];
            ChannelParams ch = cfg.ch;
            (var == SweepVariable::eta ? ch.eta : ch.delta_mis) = values[vi];
            os << csv_row(sw.variable, values[vi], s.variant, cell.pp, ch, cell.res)
               << '\n';
            chart[label].push_back({values[vi], cell.res.skl.rate});
        }
        // Zero-crossing summary rows: bracket midpoint between the last
        // positive-rate value and its zero-rate neighbor, carrying the
        // positive side's parameters and estimates.
        for (std::size_t vi = 0; vi + 1 < values.size(); ++vi) {
            const Cell& a = cells[si * values.size() + vi];
            const Cell& b = cells[si * values.size() + vi + 1];
            const bool a_pos = a.res.skl.rate > 0.0;
            const bool b_pos = b.res.skl.rate > 0.0;
            if (a_pos == b_pos) continue;
            const std::size_t pos_vi = a_pos ? vi : vi + 1;
            const Cell& pos = a_pos ? a : b;
            ChannelParams ch = cfg.ch;
            (var == SweepVariable::eta ? ch.eta : ch.delta_mis) = values[pos_vi];
            os << csv_row(sw.variable + "_crossing",
                          0.5 * (values[vi] + values[vi + 1]), s.variant, pos.pp, ch,
                          pos.res)
               << '\n';
        }
    }
    write_text(opts.out_path, os.str());
    if (!sw.svg.empty()) write_svg(sw.svg, chart);
    return exit_ok;
}

// ---------------------------------------------------------------------------
// Oracle suites

struct OracleReport {
    bool ok = true;
    std::ostringstream os;

    void check(const std::string& name, double freq, double budget) {
        const bool pass = freq <= budget;
        ok = ok && pass;
        os << (pass ? "[pass] " : "[FAIL] ") << name << " freq=" << fmt(freq)
           << " budget=" << fmt(budget) << '\n';
    }
};

void oracle_bounds(OracleReport& rep, std::uint64_t seed, long trials) {
    if (trials <= 0) trials = 100000;
    // Extrapolation: worst-variance half/half population.
    std::vector<std::uint8_t> population(10000, 0);
    for (int i = 0; i < 5000; ++i) population[i] = 1;
    for (double eps : {0.01, 0.001}) {
        const SerflingStats st =
            serfling_experiment(population, 1000, Confidence(eps), trials, seed);
        rep.check("serfling_eps_" + fmt(eps), st.violation_freq,
                  eps + 3.0 * std::sqrt(eps * (1.0 - eps) / trials));
    }
    // Expectation bounds on binomial counts.
    for (double eps : {0.01, 0.001}) {
        const ConcentrationStats st =
            concentration_experiment(2000, 0.2, Confidence(eps), trials, seed + 1);
        const double budget = eps + 3.0 * st.standard_error;
        rep.check("hoeffding_upper_eps_" + fmt(eps), st.freq_hoeffding_upper, budget);
        rep.check("hoeffding_lower_eps_" + fmt(eps), st.freq_hoeffding_lower, budget);
        rep.check("chernoff_upper_eps_" + fmt(eps), st.freq_chernoff_upper, budget);
        rep.check("chernoff_lower_eps_" + fmt(eps), st.freq_chernoff_lower, budget);
    }
    // Block-statistic envelope under random permutations.
    BlockTally t;
    t.n_k = 10000;
    t.m_i = 6000;
    t.m_x = 700;
    t.m_y = 100;
    t.m_z = 700;
    for (double eps : {0.01, 0.001}) {
        const PermutationStats st = permutation_block_experiment(
            t, 3, std::min(trials, 20000L), seed + 2, Confidence(eps));
        const double budget =
            2.0 * eps + 3.0 * std::sqrt(eps * (1.0 - eps) / std::min(trials, 20000L));
        rep.check("mcdiarmid_s_eps_" + fmt(eps), st.freq_s_envelope, budget);
        rep.check("mcdiarmid_r_eps_" + fmt(eps), st.freq_r_envelope, budget);
    }
}

ProtocolParams desk_protocol() {
    ProtocolParams pp;
    pp.pulses = 500000;
    pp.block_size = 2;
    pp.eps_bar = 0.005;
    pp.p_z = 0.75;
    pp.q_t = 0.25;
    return pp;
}

ChannelParams desk_channel() {
    ChannelParams ch;
    ch.eta = 1.0;
    ch.p_noise = 1e-5;
    ch.delta_mis = 0.05;
    return ch;
}

void oracle_decoy(OracleReport& rep, std::uint64_t seed, long trials) {
    if (trials <= 0) trials = 1000;
    const ProtocolParams pp = desk_protocol();
    const ChannelParams ch = desk_channel();
    const double eb = pp.eps_bar_effective();
    const DecoyConservStats st = decoy_conservativeness_experiment(pp, ch, trials, seed);
    auto budget = [&](double mult) {
        const double b = mult * eb;
        return b + 3.0 * std::sqrt(b * (1.0 - b) / trials);
    };
    const char* set_names[] = {"z", "t", "x"};
    for (int f = 0; f < num_sets; ++f) {
        rep.check(std::string("decoy_s_") + set_names[f], st.freq_s[f], budget(5.0));
        rep.check(std::string("decoy_o_") + set_names[f], st.freq_o[f], budget(2.0));
    }
    rep.check("decoy_e_t", st.freq_e_t, budget(2.0));
    rep.check("decoy_e_x", st.freq_e_x, budget(2.0));
    rep.check("decoy_phi_z", st.freq_phi_z, budget(13.0));
    rep.check("decoy_phi_x", st.freq_phi_x, budget(13.0));
    rep.check("decoy_invalid_runs", static_cast<double>(st.invalid_runs) / trials, 0.01);
}

void oracle_ad(OracleReport& rep, std::uint64_t seed, long trials) {
    if (trials <= 0) trials = 200000;
    // I.i.d. acceptance and distilled error against the closed forms. 4 sigma
    // per comparison: there are ~130 of them, 3 sigma flakes once in a few
    // seeds while a wrong closed form misses by far more.
    for (double phi = 0.01; phi < 0.301; phi += 0.04) {
        for (int b = 2; b <= 9; ++b) {
            const AdIidStats st = ad_iid_experiment(phi, b, trials, seed++);
            const auto [succ, err] = ad_success_and_error(phi, b);
            const double se_acc = std::sqrt(succ * (1.0 - succ) / trials);
            rep.check("iid_acc_phi_" + fmt(phi) + "_b_" + fmt(static_cast<long>(b)),
                      std::abs(st.acceptance - succ), 4.0 * se_acc + 1e-9);
            if (st.accepted > 100) {
                const double se_err = std::sqrt(err * (1.0 - err) / st.accepted);
                rep.check("iid_err_phi_" + fmt(phi) + "_b_" + fmt(static_cast<long>(b)),
                          std::abs(st.distilled_error - err), 4.0 * se_err + 1e-4);
            }
        }
    }
    // One-sided block bounds at a permissive budget.
    BlockTally t;
    t.n_k = 10000;
    t.m_i = 8200;
    t.m_x = 400;
    t.m_y = 0;
    t.m_z = 400;
    const double eps = 0.01;
    const long perm_trials = std::min(trials, 20000L);
    const double phi_z = static_cast<double>(t.r_bit()) / t.s_k();
    const double phi_x = static_cast<double>(t.r_phase()) / t.s_k();
    const double s_lower = accepted_single_blocks_lower(
        t.n_k, t.s_k(), phi_z, 3, Confidence(eps));
    const double phi_upper = logical_x_error_upper(t.n_k, t.s_k(), phi_z, phi_x, 3,
                                                   Confidence(eps));
    const PermutationStats st = permutation_block_experiment(
        t, 3, perm_trials, seed + 7, Confidence(eps), s_lower, phi_upper);
    const double budget = 2.0 * eps + 3.0 * std::sqrt(eps * (1.0 - eps) / perm_trials);
    rep.check("block_lower_bound", st.freq_s_below, budget);
    rep.check("block_error_upper_bound", st.freq_phi_above, budget);
    // Exact enumeration across every small tally.
    long mismatches = 0;
    for (int n_k = 2; n_k <= 8; ++n_k) {
        for (int mi = 0; mi <= n_k; ++mi)
            for (int mx = 0; mi + mx <= n_k; ++mx)
                for (int my = 0; mi + mx + my <= n_k; ++my)
                    for (int mz = 0; mi + mx + my + mz <= n_k; ++mz)
                        for (int b = 2; b <= n_k; ++b) {
                            const BlockTally tt{n_k, mi, mx, my, mz};
                            const EnumerationResult e = enumerate_block_means(tt, b);
                            const double es = expected_single_blocks_exact(
                                n_k, tt.s_k(), tt.r_bit(), b);
                            const double er = expected_odd_phase_blocks_exact(tt, b);
                            if (std::abs(es - e.mean_s) > 1e-9 ||
                                std::abs(er - e.mean_r) > 1e-9)
                                ++mismatches;
                        }
    }
    rep.check("exact_enumeration_mismatches", static_cast<double>(mismatches), 0.0);
}

void oracle_pipeline(OracleReport& rep, std::uint64_t seed, long trials) {
    if (trials <= 0) trials = 1000;
    const ProtocolParams pp = desk_protocol();
    const ChannelParams ch = desk_channel();
    const double eb = pp.eps_bar_effective();
    const PipelineStats st = pipeline_conservativeness_experiment(pp, ch, trials, seed);
    rep.check("pipeline_combined", st.freq, 23.0 * eb + 3.0 * st.standard_error);
}

int cmd_oracle(const CommonOpts& opts, const std::string& suite_flag) {
    AppConfig cfg = load_config(opts.config_path);
    const std::string suite = suite_flag.empty() ? cfg.oracle.suite : suite_flag;
    const long trials = cfg.oracle.trials;
    if (suite != "bounds" && suite != "decoy" && suite != "ad" && suite != "all") {
        throw ConfigError("oracle.suite must be one of bounds, decoy, ad, all");
    }
    OracleReport rep;
    if (suite == "bounds" || suite == "all") oracle_bounds(rep, opts.seed, trials);
    if (suite == "decoy" || suite == "all") oracle_decoy(rep, opts.seed, trials);
    if (suite == "ad" || suite == "all") oracle_ad(rep, opts.seed, trials);
    if (suite == "all") oracle_pipeline(rep, opts.seed, trials);
    write_text(opts.out_path, rep.os.str());
    return rep.ok ? exit_ok : exit_oracle;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-size secure key length calculator with block post-selection"};
    app.require_subcommand(1);
    CommonOpts opts;
    std::string suite_flag;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config_path, "JSON config file");
        cmd->add_option("--seed", opts.seed, "64-bit seed");
        cmd->add_option("--out", opts.out_path, "output file (default stdout)");
        cmd->add_option("--variant", opts.variant, "ad, bb84 or both")
            ->check(CLI::IsMember({"ad", "bb84", "both"}));
        cmd->add_option("--b", opts.b_override, "block size override");
        cmd->add_option("--skl-constant", opts.skl_constant,
                        "privacy-amplification constant variant")
            ->check(CLI::IsMember({"derivation", "practical"}));
        cmd->add_option("--threads", opts.threads, "worker threads for sweeps");
        cmd->add_option("--nu-scale", opts.nu_scale, "")->group("");  // test hook
    };

    CLI::App* skl = app.add_subcommand("skl", "single-point key length");
    CLI::App* sweep = app.add_subcommand("sweep", "channel sweep with optimization");
    CLI::App* optimize = app.add_subcommand("optimize", "optimize free parameters");
    CLI::App* oracle = app.add_subcommand("oracle", "Monte Carlo verification suites");
    for (CLI::App* cmd : {skl, sweep, optimize, oracle}) add_common(cmd);
    oracle->add_option("--suite", suite_flag, "bounds, decoy, ad or all");

    CLI11_PARSE(app, argc, argv);

    try {
        set_extrapolation_scale(opts.nu_scale);
        if (skl->parsed()) return cmd_skl(opts);
        if (optimize->parsed()) return cmd_optimize(opts);
        if (sweep->parsed()) return cmd_sweep(opts);
        if (oracle->parsed()) return cmd_oracle(opts, suite_flag);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_runtime;
}
