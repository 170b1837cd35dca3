// nugate: command-line harness for the trade-off, Grover and Ising-ITE
// experiments. Every command writes CSV (or JSON) files plus a plotting
// script into --out.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "nugate/experiments.hpp"
#include "nugate/io.hpp"

namespace ex = nugate::experiments;
namespace io = nugate::io;

namespace {

struct Common {
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
};

std::string default_out_dir() {
    const char* env = std::getenv("NUGATE_OUT_DIR");
    return env && *env ? env : ".";
}

void add_common(CLI::App* app, Common& c) {
    app->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    app->add_option("--out", c.out, "Output directory (default: $NUGATE_OUT_DIR or .)");
    app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

void emit(const io::Report& rep, const Common& c) {
    const std::filesystem::path dir = c.out.empty() ? default_out_dir() : c.out;
    const auto files = io::write_report(rep, dir, c.format == "json" ? io::Format::json : io::Format::csv);
    io::write_text(dir / "plot_figures.py", ex::plot_script());
    for (const auto& f : files) std::cout << f.string() << '\n';
}

nugate::RunMode parse_mode(const std::string& m, bool exact) {
    if (exact) return nugate::RunMode::exact;
    return m == "sampled" ? nugate::RunMode::sampled : nugate::RunMode::exact;
}

std::optional<std::uint64_t> parse_k(const std::string& k) {
    if (k == "auto") return std::nullopt;
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(k, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != k.size() || v < 1) throw nugate::ArgumentError("--k must be a positive integer or 'auto'");
    return static_cast<std::uint64_t>(v);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic nonunitary gates: trade-off, Grover amplification and Ising imaginary-time runs"};
    app.require_subcommand(1);

    // tradeoff
    Common c_tr;
    ex::TradeoffConfig tr;
    std::string grid_file;
    auto* s_tr = app.add_subcommand("tradeoff", "Success probability vs epsilon under a fidelity bound");
    add_common(s_tr, c_tr);
    s_tr->add_option("--sigma", tr.sigma_source,
                     "random | preset:idempotent | preset:half | preset:projector4 | matrix:<json> | <file>")
        ->capture_default_str();
    s_tr->add_option("--sigma-qubits", tr.sigma_qubits, "Qubits of the random Sigma")->capture_default_str();
    s_tr->add_option("--grid", grid_file, "JSON file {eta: [...], epsilon: [...]}");
    s_tr->add_option("--eta", tr.grid.eta, "Fidelity slack grid")->delimiter(',');
    s_tr->add_option("--epsilon", tr.grid.epsilon, "Rotation angle grid")->delimiter(',');
    s_tr->add_option("--trajectories", tr.trajectories, "Monte Carlo trajectories per point")->capture_default_str();
    s_tr->add_option("--mc-epsilon", tr.mc_epsilon, "Only sample these epsilon values")->delimiter(',');
    s_tr->add_option("--unbounded-cap", tr.unbounded_shot_cap, "Shot cap when n* is unbounded")->capture_default_str();
    s_tr->add_flag("--exact", tr.exact, "Closed forms only, no sampling");
    s_tr->add_flag("--refine", tr.refine, "Cubic refinement of the shot threshold");

    // grover-table
    Common c_gt;
    ex::GroverTableConfig gt;
    auto* s_gt = app.add_subcommand("grover-table", "Optimal t roots and failure probability curves");
    add_common(s_gt, c_gt);
    s_gt->add_option("--k-max", gt.k_max, "Largest k in the root table")->capture_default_str();
    s_gt->add_option("--curve-k-max", gt.curve_k_max, "Largest k in the failure curves")->capture_default_str();
    s_gt->add_option("--t", gt.t_values, "t values for the failure curves")->delimiter(',');
    bool gt_exact = false;
    s_gt->add_flag("--exact", gt_exact, "Accepted for uniformity; the table is always exact");

    // ite
    Common c_ite;
    ex::IteConfig ite;
    auto* s_ite = app.add_subcommand("ite", "Repeat-until-success imaginary-time evolution of random Ising chains");
    add_common(s_ite, c_ite);
    s_ite->add_option("--sites", ite.sites, "Chain lengths")->delimiter(',');
    s_ite->add_option("--tau", ite.tau, "Imaginary time")->capture_default_str();
    s_ite->add_option("--eta", ite.eta, "Fidelity slack")->capture_default_str();
    s_ite->add_option("--epsilon", ite.epsilon, "Rotation angle")->capture_default_str();
    s_ite->add_option("--trajectories", ite.trajectories, "Runs per chain length")->capture_default_str();
    s_ite->add_option("--max-rounds", ite.max_rounds, "Round cap below the threshold (0 = threshold only)")
        ->capture_default_str();
    s_ite->add_flag("--exact", ite.exact, "Closed form only, no sampling");

    // method1
    Common c_m1;
    ex::Method1Config m1;
    std::string m1_mode = "exact", m1_chain, m1_plan;
    bool m1_exact = false;
    auto* s_m1 = app.add_subcommand("method1", "Per-bond Grover amplification with recursive reflections");
    add_common(s_m1, c_m1);
    s_m1->add_option("--sites", m1.sites, "Chain lengths")->delimiter(',');
    s_m1->add_option("--tau", m1.tau, "Imaginary time")->capture_default_str();
    s_m1->add_option("--k", m1.k, "Grover iterations per bond")->capture_default_str();
    s_m1->add_option("--mode", m1_mode, "exact | sampled")->check(CLI::IsMember({"exact", "sampled"}));
    s_m1->add_flag("--exact", m1_exact, "Same as --mode exact");
    s_m1->add_option("--chain", m1_chain, "Chain JSON {sites, couplings | seed, tau}");
    s_m1->add_option("--plan", m1_plan, "Plan JSON {chain, tau, k, mode}");
    s_m1->add_option("--chain-seed", m1.chain_seed, "Seed for random couplings")->capture_default_str();

    // method2
    Common c_m2;
    ex::Method2Config m2;
    std::string m2_mode = "exact", m2_chain, m2_plan, m2_k = "auto";
    bool m2_exact = false;
    auto* s_m2 = app.add_subcommand("method2", "Grover amplification over the whole ancilla register");
    add_common(s_m2, c_m2);
    s_m2->add_option("--sites", m2.sites, "Chain lengths")->delimiter(',');
    s_m2->add_option("--tau", m2.tau, "Imaginary time")->capture_default_str();
    s_m2->add_option("--k", m2_k, "Grover iterations or 'auto'")->capture_default_str();
    s_m2->add_flag("--normalized", m2.normalized, "Use normalized bond Sigma instead of e^{+-J tau}");
    s_m2->add_option("--mode", m2_mode, "exact | sampled")->check(CLI::IsMember({"exact", "sampled"}));
    s_m2->add_flag("--exact", m2_exact, "Same as --mode exact");
    s_m2->add_option("--shots", m2.shots, "Shots in sampled mode")->capture_default_str();
    s_m2->add_option("--amplitude-cap", m2.amplitude_cap, "Largest register size in amplitudes")->capture_default_str();
    s_m2->add_option("--chain", m2_chain, "Chain JSON {sites, couplings | seed, tau}");
    s_m2->add_option("--plan", m2_plan, "Plan JSON {chain, tau, k, mode}");
    s_m2->add_option("--chain-seed", m2.chain_seed, "Seed for random couplings")->capture_default_str();

    // oracle ground-state
    auto* s_or = app.add_subcommand("oracle", "Reference oracles");
    s_or->require_subcommand(1);
    Common c_gs;
    std::string gs_chain;
    std::vector<int> gs_couplings;
    std::size_t gs_sites = 0;
    auto* s_gs = s_or->add_subcommand("ground-state", "Ground energy and ground bitstrings of a chain");
    add_common(s_gs, c_gs);
    s_gs->add_option("--chain", gs_chain, "Chain JSON {sites, couplings | seed, tau}");
    s_gs->add_option("--couplings", gs_couplings, "Couplings, e.g. 1,-1,1")->delimiter(',');
    s_gs->add_option("--sites", gs_sites, "Random chain length (seeded by --seed)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (s_tr->parsed()) {
            if (!grid_file.empty()) tr.grid = io::parse_grid(io::read_json(grid_file));
            tr.grid = io::parse_grid(io::json{{"eta", tr.grid.eta}, {"epsilon", tr.grid.epsilon}});
            tr.seed = c_tr.seed;
            emit(ex::cmd_tradeoff(tr), c_tr);
        } else if (s_gt->parsed()) {
            emit(ex::cmd_grover_table(gt), c_gt);
        } else if (s_ite->parsed()) {
            ite.seed = c_ite.seed;
            emit(ex::cmd_ite(ite), c_ite);
        } else if (s_m1->parsed()) {
            m1.seed = c_m1.seed;
            m1.mode = parse_mode(m1_mode, m1_exact);
            if (!m1_plan.empty()) {
                const auto p = io::parse_plan(io::read_json(m1_plan));
                m1.chain = p.chain.chain;
                m1.tau = p.chain.tau;
                if (p.k) m1.k = *p.k;
                if (!m1_exact) m1.mode = parse_mode(p.mode, false);
            } else if (!m1_chain.empty()) {
                const auto c = io::parse_chain(io::read_json(m1_chain));
                m1.chain = c.chain;
                m1.tau = c.tau;
            }
            if (m1.chain) m1.sites = {m1.chain->sites()};
            emit(ex::cmd_method1(m1), c_m1);
        } else if (s_m2->parsed()) {
            m2.seed = c_m2.seed;
            m2.mode = parse_mode(m2_mode, m2_exact);
            m2.k = parse_k(m2_k);
            if (!m2_plan.empty()) {
                const auto p = io::parse_plan(io::read_json(m2_plan));
                m2.chain = p.chain.chain;
                m2.tau = p.chain.tau;
                m2.k = p.k;
                if (!m2_exact) m2.mode = parse_mode(p.mode, false);
            } else if (!m2_chain.empty()) {
                const auto c = io::parse_chain(io::read_json(m2_chain));
                m2.chain = c.chain;
                m2.tau = c.tau;
            }
            if (m2.chain) m2.sites = {m2.chain->sites()};
            emit(ex::cmd_method2(m2), c_m2);
        } else if (s_gs->parsed()) {
            std::optional<nugate::IsingChain> chain;
            if (!gs_chain.empty()) {
                chain = io::parse_chain(io::read_json(gs_chain)).chain;
            } else if (!gs_couplings.empty()) {
                chain = nugate::IsingChain(gs_couplings);
            } else if (gs_sites >= 2) {
                nugate::Rng rng(c_gs.seed);
                chain = nugate::random_chain(gs_sites, rng);
            } else {
                throw nugate::ArgumentError("ground-state: give --chain, --couplings or --sites");
            }
            emit(ex::cmd_ground_state(*chain), c_gs);
        }
    } catch (const nugate::ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
