#pragma once

// Figure and table reproductions behind the `nugate` command-line tool. Each
// command turns a config into an io::Report; writing files is left to the
// caller.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nugate/io.hpp"
#include "nugate/nugate.hpp"

namespace nugate::experiments {

/// f(0), …, f(n−1) on a small worker pool. Results land at their own index,
/// so the output never depends on scheduling.
template <class F>
auto parallel_map(std::size_t n, F&& f, std::size_t threads = 0) {
    using R = decltype(f(std::size_t{0}));
    std::vector<std::optional<R>> slots(n);
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(n, 1));
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                std::lock_guard lk(err_mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (err) std::rethrow_exception(err);
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

struct LinearFit {
    double slope = 0.0, intercept = 0.0;
};

/// Least squares y = slope·x + intercept; needs two distinct x.
inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ArgumentError("fit_line: need at least two points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw ArgumentError("fit_line: x values are all equal");
    const double slope = (n * sxy - sx * sy) / den;
    return {slope, (sy - slope * sx) / n};
}

/// Seed for grid point / trajectory block `index` under a master seed.
inline std::uint64_t sub_seed(std::uint64_t master, std::uint64_t index) { return Rng::split(master, index).next(); }

// ---------------------------------------------------------------------------
// Σ sources

/// Normalized singular values of a matrix with i.i.d. complex Gaussian
/// entries (the overall scale drops out).
inline DiagonalSigma random_sigma(std::size_t num_qubits, Rng& rng) {
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << num_qubits);
    const auto v = random_state(2 * num_qubits, rng);
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = v[static_cast<std::size_t>(i * d + j)];
    return decompose_and_normalize(m).sigma;
}

/// "random" (seeded), "preset:idempotent" (diag(1,0)), "preset:half"
/// (diag(1,0.5)), "preset:projector4" (diag(1,1,0,0)), "matrix:<path>" (the
/// singular values of a JSON matrix), or a path to a one-per-line file.
inline DiagonalSigma sigma_from_source(const std::string& source, std::size_t random_qubits, std::uint64_t seed) {
    if (source == "random") {
        Rng rng(seed);
        return random_sigma(random_qubits, rng);
    }
    if (source == "preset:idempotent") return DiagonalSigma::normalized({1.0, 0.0});
    if (source == "preset:half") return DiagonalSigma::normalized({1.0, 0.5});
    if (source == "preset:projector4") return DiagonalSigma::normalized({1.0, 1.0, 0.0, 0.0});
    if (source.rfind("preset:", 0) == 0) throw ArgumentError("unknown Sigma preset " + source);
    if (source.rfind("matrix:", 0) == 0) return decompose_and_normalize(io::load_matrix(source.substr(7))).sigma;
    return io::load_sigma(source);
}

// ---------------------------------------------------------------------------
// tradeoff

struct TradeoffConfig {
    std::string sigma_source = "random";
    std::size_t sigma_qubits = 2;
    io::Grid grid{{0.1, 0.01, 0.001}, {0.1, 0.05, 0.02, 0.01, 0.005}};
    std::uint64_t trajectories = 100'000;
    std::vector<double> mc_epsilon;         // empty → every ε in the grid
    std::uint64_t unbounded_shot_cap = 1000;  // shot cap when n* is unbounded
    bool exact = false;
    bool refine = false;
    std::uint64_t seed = 0;
};

inline io::Report cmd_tradeoff(const TradeoffConfig& cfg) {
    const DiagonalSigma sigma = sigma_from_source(cfg.sigma_source, cfg.sigma_qubits, cfg.seed);
    const StateVector psi0 = uniform_superposition(sigma.num_qubits());

    struct Point {
        double eta, eps;
    };
    std::vector<Point> pts;
    for (const double eta : cfg.grid.eta)
        for (const double eps : cfg.grid.epsilon) pts.push_back({eta, eps});

    const auto want_mc = [&](double eps) {
        if (cfg.exact || cfg.trajectories == 0) return false;
        if (cfg.mc_epsilon.empty()) return true;
        return std::any_of(cfg.mc_epsilon.begin(), cfg.mc_epsilon.end(),
                           [&](double e) { return std::abs(e - eps) <= 1e-12 * std::max(1.0, e); });
    };

    struct Row {
        std::optional<std::uint64_t> n_star;
        double p_cf, p_lim, p_mc = std::nan(""), se = std::nan(""), z = std::nan("");
        std::uint64_t trajectories = 0;
    };
    const auto rows = parallel_map(pts.size(), [&](std::size_t i) {
        const TradeoffQuery q{sigma, psi0, pts[i].eta, pts[i].eps};
        Row r;
        r.n_star = threshold_shots(q, cfg.refine);
        r.p_cf = cumulative_success(q, cfg.refine);
        r.p_lim = limiting_success(sigma, psi0, pts[i].eta).value;
        if (want_mc(pts[i].eps)) {
            const std::uint64_t cap = r.n_star ? *r.n_star : cfg.unbounded_shot_cap;
            const auto ens = rus_ensemble(psi0, sigma, pts[i].eps, cap, cfg.trajectories, sub_seed(cfg.seed, i));
            const double n = static_cast<double>(ens.trajectories);
            r.trajectories = ens.trajectories;
            r.p_mc = ens.success_frequency();
            r.se = std::sqrt(r.p_mc * (1.0 - r.p_mc) / n);
            const double sd = std::sqrt(r.p_cf * (1.0 - r.p_cf) / n);
            r.z = sd > 0.0 ? (r.p_mc - r.p_cf) / sd : (r.p_mc == r.p_cf ? 0.0 : std::nan(""));
        }
        return r;
    });

    io::Report rep;
    rep.command = "tradeoff";
    rep.seed = cfg.seed;
    rep.parameters = {{"sigma_source", cfg.sigma_source},
                      {"sigma", sigma.values()},
                      {"sigma_norm_factor", sigma.norm_factor()},
                      {"eta", cfg.grid.eta},
                      {"epsilon", cfg.grid.epsilon},
                      {"trajectories", cfg.exact ? 0 : cfg.trajectories},
                      {"refine", cfg.refine}};
    io::Table t{"points",
                {"eta", "epsilon", "n_star", "p_closed_form", "p_monte_carlo", "p_mc_stderr", "mc_z", "p_limit",
                 "trajectories"},
                {}};
    double max_abs_z = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& r = rows[i];
        t.add({pts[i].eta, pts[i].eps,
               r.n_star ? io::Cell(static_cast<long long>(*r.n_star)) : io::Cell(std::string("unbounded")), r.p_cf,
               r.p_mc, r.se, r.z, r.p_lim, static_cast<long long>(r.trajectories)});
        if (std::isfinite(r.z)) max_abs_z = std::max(max_abs_z, std::abs(r.z));
    }
    rep.tables.push_back(std::move(t));

    // Gap to the ε → 0 limit at the smallest ε, per η.
    const double eps_min = *std::min_element(cfg.grid.epsilon.begin(), cfg.grid.epsilon.end());
    io::json gaps = io::json::array();
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (pts[i].eps == eps_min)
            gaps.push_back({{"eta", pts[i].eta},
                            {"epsilon", eps_min},
                            {"abs_gap_to_limit", std::abs(rows[i].p_cf - rows[i].p_lim)}});
    rep.summary = {{"limit_gap_at_smallest_epsilon", gaps}, {"max_abs_mc_z", max_abs_z}};
    return rep;
}

// ---------------------------------------------------------------------------
// grover-table

struct GroverTableConfig {
    std::uint64_t k_max = 7;
    std::uint64_t curve_k_max = 12;
    std::vector<double> t_values{0.9797, 0.9855, 0.9891};
};

inline io::Report cmd_grover_table(const GroverTableConfig& cfg) {
    if (cfg.k_max < 1) throw ArgumentError("grover-table: k range must include k >= 1");
    io::Report rep;
    rep.command = "grover-table";
    rep.parameters = {{"k_max", cfg.k_max}, {"curve_k_max", cfg.curve_k_max}, {"t", cfg.t_values}};

    io::Table roots{"roots", {"k", "m", "t_star"}, {}};
    for (std::uint64_t k = 1; k <= cfg.k_max; ++k)
        for (std::uint64_t m = 0; m <= k; ++m)
            roots.add({static_cast<long long>(k), static_cast<long long>(m), optimal_t_roots(k, m)});

    io::Table curves{"failure", {"t", "k", "p0"}, {}};
    io::Table argmin{"argmin", {"t", "argmin_k", "p0_min"}, {}};
    io::json best = io::json::array();
    for (const double t : cfg.t_values) {
        std::uint64_t kb = 0;
        double pb = 2.0;
        for (std::uint64_t k = 0; k <= cfg.curve_k_max; ++k) {
            const double p = failure_prob(t, k);
            curves.add({t, static_cast<long long>(k), p});
            if (p < pb) pb = p, kb = k;
        }
        argmin.add({t, static_cast<long long>(kb), pb});
        best.push_back({{"t", t}, {"argmin_k", kb}, {"p0_min", pb}});
    }
    rep.tables = {std::move(roots), std::move(curves), std::move(argmin)};
    rep.summary = {{"argmin", best}};
    return rep;
}

// ---------------------------------------------------------------------------
// ite

struct IteConfig {
    std::vector<std::size_t> sites{2, 3, 4, 5, 6};
    double tau = 10.0;
    double eta = 0.01;
    double epsilon = 0.3;
    std::uint64_t trajectories = 2000;
    std::uint64_t max_rounds = 400;  // 0 = threshold n* only
    bool exact = false;
    std::uint64_t seed = 0;
};

struct IteRow {
    std::size_t sites = 0;
    std::optional<std::uint64_t> n_star;
    std::uint64_t round_cap = 0;
    double p_closed_form = 0.0;
    std::uint64_t trajectories = 0, successes = 0;
    double mean_rounds = std::nan(""), mean_fid_ite = std::nan(""), min_fid_ite = std::nan(""),
           mean_fid_ground = std::nan("");

    double frequency() const {
        return trajectories ? static_cast<double>(successes) / static_cast<double>(trajectories) : std::nan("");
    }
};

/// Trajectory i at L sites draws its chain and its measurements from
/// Rng::split(sub_seed(seed, L), i).
inline IteRow ite_row(std::size_t L, const IteConfig& cfg) {
    IteRow row;
    row.sites = L;
    // The closed form depends on the couplings only through |J| = 1, so any
    // chain of the right length serves.
    const IsingChain ref(std::vector<int>(L - 1, 1));
    const auto bonds = bond_placements(ref, cfg.tau, true);
    row.n_star = multi_gate_threshold(bonds, uniform_superposition(L), cfg.eta, cfg.epsilon);
    std::uint64_t cap = row.n_star ? *row.n_star : kMaxShotsCap;
    if (cfg.max_rounds > 0) cap = std::min(cap, cfg.max_rounds);
    cap = std::min(cap, kMaxShotsCap);
    row.round_cap = cap;
    row.p_closed_form = ite_success_probability(ref, cfg.tau, cfg.epsilon, cap);
    if (cfg.exact) return row;

    const std::uint64_t master = sub_seed(cfg.seed, L);
    const IteOptions opts{cfg.max_rounds, false};
    double rounds = 0, fi = 0, fg = 0, fmin = 2.0;
    for (std::uint64_t i = 0; i < cfg.trajectories; ++i) {
        Rng rng = Rng::split(master, i);
        const auto chain = random_chain(L, rng);
        const auto r = ite_rus_protocol(chain, cfg.tau, cfg.epsilon, cfg.eta, rng, opts);
        ++row.trajectories;
        if (!r.success) continue;
        ++row.successes;
        rounds += static_cast<double>(r.rounds);
        fi += r.fidelity_ite;
        fg += r.fidelity_ground;
        fmin = std::min(fmin, r.fidelity_ite);
    }
    if (row.successes) {
        const double s = static_cast<double>(row.successes);
        row.mean_rounds = rounds / s;
        row.mean_fid_ite = fi / s;
        row.mean_fid_ground = fg / s;
        row.min_fid_ite = fmin;
    }
    return row;
}

inline io::Report cmd_ite(const IteConfig& cfg) {
    if (cfg.sites.empty()) throw ArgumentError("ite: empty site list");
    for (const auto L : cfg.sites)
        if (L < 2 || L > 12) throw ArgumentError("ite: sites must lie in [2, 12]");
    const auto rows = parallel_map(cfg.sites.size(), [&](std::size_t i) { return ite_row(cfg.sites[i], cfg); });

    io::Report rep;
    rep.command = "ite";
    rep.seed = cfg.seed;
    rep.parameters = {{"sites", cfg.sites}, {"tau", cfg.tau},           {"eta", cfg.eta},
                      {"epsilon", cfg.epsilon}, {"trajectories", cfg.exact ? 0 : cfg.trajectories},
                      {"max_rounds", cfg.max_rounds}};
    io::Table t{"sites",
                {"L", "n_star", "round_cap", "p_closed_form", "trajectories", "successes", "success_frequency",
                 "mean_rounds", "mean_fidelity_ite", "min_fidelity_ite", "mean_fidelity_ground"},
                {}};
    std::vector<double> xs, y_cf, xs_mc, y_mc;
    for (const auto& r : rows) {
        t.add({static_cast<long long>(r.sites),
               r.n_star ? io::Cell(static_cast<long long>(*r.n_star)) : io::Cell(std::string("unbounded")),
               static_cast<long long>(r.round_cap), r.p_closed_form, static_cast<long long>(r.trajectories),
               static_cast<long long>(r.successes), r.frequency(), r.mean_rounds, r.mean_fid_ite, r.min_fid_ite,
               r.mean_fid_ground});
        if (r.p_closed_form > 0.0) xs.push_back(static_cast<double>(r.sites)), y_cf.push_back(std::log(r.p_closed_form));
        if (r.successes > 0) xs_mc.push_back(static_cast<double>(r.sites)), y_mc.push_back(std::log(r.frequency()));
    }
    rep.tables.push_back(std::move(t));

    // Expected: ln p drops by ½ ln η per added site.
    const double predicted = 0.5 * std::log(cfg.eta);
    rep.summary = {{"predicted_slope", predicted}};
    if (xs.size() >= 2) rep.summary["closed_form_slope"] = fit_line(xs, y_cf).slope;
    if (xs_mc.size() >= 2) {
        const double s = fit_line(xs_mc, y_mc).slope;
        rep.summary["sampled_slope"] = s;
        rep.summary["sampled_slope_relative_error"] = std::abs(s - predicted) / std::abs(predicted);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// method1 / method2

/// Chain for L sites: explicit couplings when given, else random_chain(L)
/// seeded by sub_seed(chain_seed, L).
inline IsingChain chain_for(std::size_t L, const std::optional<IsingChain>& fixed, std::uint64_t chain_seed) {
    if (fixed) {
        if (fixed->sites() != L) throw ArgumentError("chain length does not match the site list");
        return *fixed;
    }
    Rng rng(sub_seed(chain_seed, L));
    return random_chain(L, rng);
}

inline std::string couplings_text(const IsingChain& c) {
    std::string s;
    for (const int j : c.couplings()) s += j > 0 ? '+' : '-';
    return s;
}

struct Method1Config {
    std::vector<std::size_t> sites{2, 3, 4, 5, 6};
    double tau = 10.0;
    std::uint64_t k = 1;
    RunMode mode = RunMode::exact;
    std::optional<IsingChain> chain;
    std::uint64_t chain_seed = 0;
    std::uint64_t seed = 0;
};

inline io::Report cmd_method1(const Method1Config& cfg) {
    if (cfg.sites.empty()) throw ArgumentError("method1: empty site list");
    const auto runs = parallel_map(cfg.sites.size(), [&](std::size_t i) {
        const auto chain = chain_for(cfg.sites[i], cfg.chain, cfg.chain_seed);
        Rng rng(sub_seed(cfg.seed, cfg.sites[i]));
        return std::make_pair(chain, method1_run(chain, cfg.tau, cfg.k, rng, {cfg.mode, 1e-9}));
    });

    io::Report rep;
    rep.command = "method1";
    rep.seed = cfg.seed;
    rep.parameters = {{"sites", cfg.sites}, {"tau", cfg.tau}, {"k", cfg.k},
                      {"mode", cfg.mode == RunMode::exact ? "exact" : "sampled"}, {"chain_seed", cfg.chain_seed}};
    io::Table bonds{"bonds",
                    {"L", "bond", "J", "epsilon", "t_target", "t_actual", "success_prob", "success_predicted",
                     "outcome", "flagged", "gate_fidelity", "reflection_ops", "ops_ratio"},
                    {}};
    io::Table summary{"runs", {"L", "couplings", "k", "fidelity_ite", "fidelity_ground", "total_ops", "flagged"}, {}};
    double min_fid = 1.0, min_p = 1.0;
    for (const auto& [chain, r] : runs) {
        const auto L = static_cast<long long>(chain.sites());
        for (std::size_t b = 0; b < r.bonds.size(); ++b) {
            const auto& x = r.bonds[b];
            const double ratio = b ? static_cast<double>(x.reflection_ops) /
                                         static_cast<double>(r.bonds[b - 1].reflection_ops)
                                   : std::nan("");
            bonds.add({L, static_cast<long long>(b), static_cast<long long>(x.J), x.epsilon, x.t_target, x.t_actual,
                       x.success_prob, x.success_predicted, static_cast<long long>(x.outcome),
                       static_cast<long long>(x.flagged), x.gate_fidelity, static_cast<long long>(x.reflection_ops),
                       ratio});
            min_fid = std::min(min_fid, x.gate_fidelity);
            min_p = std::min(min_p, x.success_prob);
        }
        summary.add({L, couplings_text(chain), static_cast<long long>(r.k), r.fidelity_ite, r.fidelity_ground,
                     static_cast<long long>(r.total_ops), static_cast<long long>(r.flagged)});
    }
    rep.tables = {std::move(bonds), std::move(summary)};
    rep.summary = {{"min_gate_fidelity", min_fid}, {"min_success_prob", min_p}};
    return rep;
}

struct Method2Config {
    std::vector<std::size_t> sites{6, 7, 8, 9, 10};
    double tau = 10.0;
    std::optional<std::uint64_t> k;  // nullopt → predicted_iterations
    bool normalized = false;
    RunMode mode = RunMode::exact;
    std::uint64_t shots = 10'000;
    std::size_t amplitude_cap = kDefaultAmplitudeCap;
    std::optional<IsingChain> chain;
    std::uint64_t chain_seed = 0;
    std::uint64_t seed = 0;
};

inline io::Report cmd_method2(const Method2Config& cfg) {
    if (cfg.sites.empty()) throw ArgumentError("method2: empty site list");
    for (const auto L : cfg.sites) {
        const std::size_t n = 2 * L - 1;
        if (n >= 63 || (std::size_t{1} << n) > cfg.amplitude_cap)
            throw SizeError("method2: L = " + std::to_string(L) + " needs 2^" + std::to_string(n) +
                            " amplitudes, above the cap of " + std::to_string(cfg.amplitude_cap));
    }
    const auto runs = parallel_map(
        cfg.sites.size(),
        [&](std::size_t i) {
            const auto chain = chain_for(cfg.sites[i], cfg.chain, cfg.chain_seed);
            Rng rng(sub_seed(cfg.seed, cfg.sites[i]));
            Method2Options o;
            o.mode = cfg.mode;
            o.k = cfg.k;
            o.normalized = cfg.normalized;
            o.shots = cfg.shots;
            o.amplitude_cap = cfg.amplitude_cap;
            return std::make_pair(chain, method2_run(chain, cfg.tau, rng, o));
        },
        1);  // one register at a time keeps peak memory at a single state

    io::Report rep;
    rep.command = "method2";
    rep.seed = cfg.seed;
    rep.parameters = {{"sites", cfg.sites},
                      {"tau", cfg.tau},
                      {"k", cfg.k ? io::json(*cfg.k) : io::json("auto")},
                      {"normalized", cfg.normalized},
                      {"mode", cfg.mode == RunMode::exact ? "exact" : "sampled"},
                      {"shots", cfg.mode == RunMode::sampled ? cfg.shots : 0},
                      {"chain_seed", cfg.chain_seed}};
    io::Table curve{"curve",
                    {"L", "k", "success_prob", "success_predicted", "fidelity_ground", "fidelity_ite",
                     "postselected_ground"},
                    {}};
    io::Table kt{"k_final",
                 {"L", "couplings", "k_final", "epsilon", "s_target", "s_actual", "success_prob", "fidelity_ground",
                  "fidelity_ite", "shots", "successes"},
                 {}};
    std::vector<double> xs, ys;
    for (const auto& [chain, r] : runs) {
        const auto L = static_cast<long long>(chain.sites());
        for (const auto& p : r.curve)
            curve.add({L, static_cast<long long>(p.k), p.success_prob, p.success_predicted, p.fidelity_ground,
                       p.fidelity_ite, p.postselected_ground});
        const auto& last = r.curve.back();
        kt.add({L, couplings_text(chain), static_cast<long long>(r.plan.k), r.plan.epsilon_schedule.front(),
                r.plan.target_root, r.s_actual, last.success_prob, last.fidelity_ground, last.fidelity_ite,
                static_cast<long long>(r.shots), static_cast<long long>(r.successes)});
        xs.push_back(static_cast<double>(L));
        ys.push_back(std::log2(static_cast<double>(r.plan.k)));
    }
    rep.tables = {std::move(curve), std::move(kt)};
    if (xs.size() >= 2) {
        const auto f = fit_line(xs, ys);
        rep.summary = {{"log2_k_slope", f.slope}, {"log2_k_intercept", f.intercept}};
    }
    return rep;
}

// ---------------------------------------------------------------------------
// oracle ground-state

inline std::string bitstring(std::uint64_t z, std::size_t sites) {
    std::string s(sites, '0');
    for (std::size_t q = 0; q < sites; ++q)
        if ((z >> q) & 1U) s[q] = '1';
    return s;
}

inline io::Report cmd_ground_state(const IsingChain& chain) {
    const auto g = ground_subspace(chain);
    io::Report rep;
    rep.command = "ground-state";
    rep.parameters = {{"sites", chain.sites()}, {"couplings", chain.couplings()}};
    io::Table t{"ground", {"bitstring", "index", "energy"}, {}};
    for (const auto z : g.bitstrings)
        t.add({bitstring(z, chain.sites()), static_cast<long long>(z), chain.energy(z)});
    rep.tables.push_back(std::move(t));
    rep.summary = {{"energy", g.energy}, {"degeneracy", g.bitstrings.size()}};
    return rep;
}

// ---------------------------------------------------------------------------
// Plotting

/// Python/matplotlib script that draws whichever of the CSV outputs exist in
/// its own directory.
inline const char* plot_script() {
    return R"PY(#!/usr/bin/env python3
"""Render figures from the CSV files written next to this script."""
import csv
import math
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def rows(name):
    path = os.path.join(HERE, name)
    if not os.path.exists(path):
        return None
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def num(x):
    try:
        return float(x)
    except ValueError:
        return math.nan


def tradeoff(data):
    fig, ax = plt.subplots()
    for eta in sorted({r["eta"] for r in data}, key=num):
        sel = sorted((r for r in data if r["eta"] == eta), key=lambda r: num(r["epsilon"]))
        eps = [num(r["epsilon"]) for r in sel]
        line, = ax.plot(eps, [num(r["p_closed_form"]) for r in sel], label=f"eta={eta}")
        ax.axhline(num(sel[0]["p_limit"]), color=line.get_color(), ls=":")
        mc = [(e, num(r["p_monte_carlo"])) for e, r in zip(eps, sel) if not math.isnan(num(r["p_monte_carlo"]))]
        if mc:
            ax.plot(*zip(*mc), "o", color=line.get_color(), mfc="none")
    ax.set_xscale("log")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("success probability")
    ax.legend()
    fig.savefig(os.path.join(HERE, "tradeoff.png"), dpi=150)


def failure(data):
    fig, ax = plt.subplots()
    for t in sorted({r["t"] for r in data}, key=num):
        sel = [r for r in data if r["t"] == t]
        ax.plot([int(r["k"]) for r in sel], [num(r["p0"]) for r in sel], "o-", label=f"t={t}")
    ax.set_xlabel("k")
    ax.set_ylabel("failure probability")
    ax.legend()
    fig.savefig(os.path.join(HERE, "grover_failure.png"), dpi=150)


def method2(curve, kfinal):
    if curve:
        fig, ax = plt.subplots()
        for L in sorted({r["L"] for r in curve}, key=int):
            sel = [r for r in curve if r["L"] == L]
            ax.plot([int(r["k"]) for r in sel], [num(r["fidelity_ground"]) for r in sel], "o-", label=f"L={L}")
        ax.set_xlabel("Grover iterations k")
        ax.set_ylabel("fidelity with ground subspace")
        ax.legend()
        fig.savefig(os.path.join(HERE, "method2_fidelity.png"), dpi=150)
    if kfinal:
        fig, ax = plt.subplots()
        ax.semilogy([int(r["L"]) for r in kfinal], [int(r["k_final"]) for r in kfinal], "o-", base=2)
        ax.set_xlabel("sites L")
        ax.set_ylabel("Grover iterations k")
        fig.savefig(os.path.join(HERE, "method2_iterations.png"), dpi=150)


def main():
    done = False
    if (d := rows("tradeoff_points.csv")):
        tradeoff(d)
        done = True
    if (d := rows("grover-table_failure.csv")):
        failure(d)
        done = True
    c, k = rows("method2_curve.csv"), rows("method2_k_final.csv")
    if c or k:
        method2(c, k)
        done = True
    if not done:
        print("no CSV inputs found in", HERE, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
)PY";
}

}  // namespace nugate::experiments
