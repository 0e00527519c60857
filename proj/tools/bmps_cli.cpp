#include "bmps/density.hpp"
#include "bmps/energy.hpp"
#include "bmps/io.hpp"
#include "bmps/models.hpp"
#include "bmps/mps.hpp"
#include "bmps/overlap.hpp"
#include "bmps/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace bmps;

namespace {

struct ModelArgs {
    std::string model = "tfim";
    std::size_t sites = 12;
    double hx = 0.01;
    double delta = 1.0;
    std::string cache_dir = "cache";
    bool no_cache = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--model", model, "Model: tfim or xxz")
            ->check(CLI::IsMember({"tfim", "xxz"}));
        cmd->add_option("--sites", sites, "Chain length N (2..14)");
        cmd->add_option("--hx", hx, "Transverse field (tfim)");
        cmd->add_option("--delta", delta, "Anisotropy (xxz)");
        cmd->add_option("--cache-dir", cache_dir, "Spectrum cache directory");
        cmd->add_flag("--no-cache", no_cache, "Disable the spectrum cache");
    }
    ModelSpec spec() const {
        if (model == "tfim") return {ModelKind::TFIM, sites, hx, 0.0};
        return {ModelKind::XXZ, sites, 0.0, delta};
    }
    Spectrum solve() const {
        return solve_model(spec(), no_cache ? "" : cache_dir);
    }
};

// Accepts "1,2,29" and ranges "1-10"; indices are 1-based.
std::vector<std::size_t> parse_states(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-');
        if (dash != std::string::npos && dash > 0) {
            const std::size_t lo = std::stoul(item.substr(0, dash));
            const std::size_t hi = std::stoul(item.substr(dash + 1));
            if (hi < lo) throw CLI::ValidationError("states", "bad range " + item);
            for (std::size_t k = lo; k <= hi; ++k) out.push_back(k);
        } else {
            out.push_back(std::stoul(item));
        }
    }
    if (out.empty())
        throw CLI::ValidationError("states", "empty state list");
    return out;
}

std::string states_label(const std::vector<std::size_t>& states) {
    if (states.size() > 2 &&
        states.back() - states.front() + 1 == states.size())
        return std::to_string(states.front()) + "-" +
               std::to_string(states.back());
    std::string out;
    for (std::size_t k : states)
        out += (out.empty() ? "" : ",") + std::to_string(k);
    return out;
}

BundledMPS build_bundle(const Spectrum& sp,
                        const std::vector<std::size_t>& states,
                        double cutoff) {
    Matrix cols(sp.states.n_rows, states.size());
    for (std::size_t k = 0; k < states.size(); ++k) {
        if (states[k] < 1 || states[k] > sp.states.n_cols)
            throw LinalgError("state index " + std::to_string(states[k]) +
                              " out of range 1.." +
                              std::to_string(sp.states.n_cols));
        cols.col(k) = sp.states.col(states[k] - 1);
    }
    BundledMPS mps = bundled_mps_from_vectors(cols, cutoff);
    mps.state_indices = states;
    return mps;
}

struct OverlapOutputs {
    std::size_t kept_rows = 0, kept_cols = 0, high_weight = 0;
};

OverlapOutputs emit_overlap(const Spectrum& sp,
                            const std::vector<std::size_t>& bundle_a,
                            const std::vector<std::size_t>& bundle_b,
                            std::size_t bond, double cutoff,
                            double threshold_log10, double floor_log10,
                            const fs::path& dir, const std::string& note) {
    fs::create_directories(dir);
    const BundledMPS a = build_bundle(sp, bundle_a, 0.0);
    const BundledMPS b = build_bundle(sp, bundle_b, 0.0);
    const OverlapMatrix gamma = weighted_overlap(a, b, bond);
    const TruncatabilityReport rep =
        truncatability_report(gamma, cutoff, threshold_log10);
    const Matrix logmat = log_abs_matrix(gamma, floor_log10);

    write_csv(gamma.entries, (dir / "gamma.csv").string());
    write_pgm(logmat, (dir / "gamma.pgm").string(), floor_log10,
              logmat.max() > floor_log10 ? logmat.max() : floor_log10 + 1.0);

    std::ostringstream out;
    out << "model: " << sp.model.tag() << "\n";
    if (!note.empty()) out << "note: " << note << "\n";
    out << "bond: " << bond << "\n"
        << "bundle A: states " << states_label(bundle_a) << "\n"
        << "bundle B: states " << states_label(bundle_b) << "\n";
    out << "energies A:";
    for (std::size_t k : bundle_a) out << " " << sp.energies(k - 1);
    out << "\nenergies B:";
    for (std::size_t k : bundle_b) out << " " << sp.energies(k - 1);
    out << "\nGamma size: " << gamma.entries.n_rows << " x "
        << gamma.entries.n_cols << "\n"
        << "row/column cutoff: " << cutoff << "\n"
        << "kept rows: " << rep.kept_rows << " (truncatable "
        << gamma.entries.n_rows - rep.kept_rows << ")\n"
        << "kept cols: " << rep.kept_cols << " (truncatable "
        << gamma.entries.n_cols - rep.kept_cols << ")\n"
        << "entries with log10|Gamma| > " << threshold_log10 << ": "
        << rep.high_weight_count << "\n";
    std::ofstream report(dir / "report.txt");
    report << out.str();

    return {rep.kept_rows, rep.kept_cols, rep.high_weight_count};
}

struct PresetPair {
    std::string a, b;
};

int run_overlap(const ModelArgs& margs, const std::string& preset,
                const std::string& bundle_a, const std::string& bundle_b,
                std::size_t bond, double cutoff, double threshold_log10,
                double floor_log10, const std::string& output_dir) {
    std::vector<PresetPair> pairs;
    std::string note;
    ModelArgs args = margs;
    if (preset == "fig3" || preset == "fig4") {
        args.model = "tfim";
        args.sites = 12;
        args.hx = preset == "fig3" ? 0.01 : 1.0;
        pairs = {{"1,2", "1,3"},
                 {"1,2", "29,30"},
                 {"1,2", "4095,4096"},
                 {"28,29", "29,30"},
                 {"4095,4096", "4093,4094"}};
    } else if (preset == "fig5") {
        args.model = "xxz";
        args.sites = 12;
        pairs = {{"1-10", "11-20"},
                 {"2048-2058", "1-10"},
                 {"2048-2058", "2059-2068"},
                 {"4086-4096", "4076-4085"}};
        note = "caption ranges taken verbatim; 2048-2058 and 4086-4096 span "
               "11 states while the text describes groups of 10";
    } else if (!preset.empty()) {
        std::cerr << "unknown preset " << preset << "\n";
        return 1;
    } else {
        pairs = {{bundle_a, bundle_b}};
    }

    const Spectrum sp = args.solve();
    if (bond == 0) bond = args.sites / 2;

    for (const PresetPair& p : pairs) {
        const auto sa = parse_states(p.a);
        const auto sb = parse_states(p.b);
        fs::path dir = output_dir;
        if (pairs.size() > 1)
            dir /= "pair_" + states_label(sa) + "_x_" + states_label(sb);
        const OverlapOutputs o = emit_overlap(sp, sa, sb, bond, cutoff,
                                              threshold_log10, floor_log10,
                                              dir, note);
        std::cout << states_label(sa) << " x " << states_label(sb)
                  << ": kept " << o.kept_rows << "x" << o.kept_cols
                  << ", high-weight " << o.high_weight << " -> " << dir.string()
                  << "\n";
    }
    return 0;
}

int run_metrics(const ModelArgs& margs, const std::string& states_text,
                std::size_t m, std::size_t gamma_state,
                const std::string& couplings_text, bool no_ultralocal,
                double tol, const std::string& output_dir) {
    const Spectrum sp = margs.solve();
    const auto states = parse_states(states_text);
    const std::size_t n = margs.sites;

    LocalCouplings c = LocalCouplings::uniform(n);
    if (!couplings_text.empty()) {
        std::stringstream ss(couplings_text);
        std::string item;
        std::vector<double> parsed;
        while (std::getline(ss, item, ',')) parsed.push_back(std::stod(item));
        if (parsed.size() != n)
            throw LinalgError("--couplings needs one value per site");
        c.values = Vector(parsed);
    }

    if (gamma_state == 0) gamma_state = states.front();
    DensityMatrix rho_gamma =
        one_body_rdm(sp.states.col(gamma_state - 1), RdmMethod::OperatorForm,
                     "state:" + std::to_string(gamma_state));
    const NaturalOrbitalSet basis = natural_orbitals(rho_gamma);
    if (m == 0) m = default_orbital_count(rho_gamma, basis);

    std::vector<DensityMatrix> rdms;
    for (std::size_t k : states)
        rdms.push_back(one_body_rdm(sp.states.col(k - 1),
                                    RdmMethod::OperatorForm,
                                    "state:" + std::to_string(k)));

    fs::create_directories(output_dir);
    std::ostringstream csv;
    csv << "alpha,beta,delta_alpha,delta_beta,r,abs_dE_exact,dE_m";
    if (no_ultralocal) csv << ",dE_m_full";
    csv << ",frobenius_lhs,frobenius_rhs,frobenius_holds,off_block_mass,"
           "verdict\r\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (std::size_t i = 0; i < states.size(); ++i) {
        for (std::size_t j = i + 1; j < states.size(); ++j) {
            const TruncationError da = truncation_error(rdms[i], basis, m);
            const TruncationError db = truncation_error(rdms[j], basis, m);
            const double r = relative_truncation(da, db);
            const double de_exact =
                std::abs(sp.energies(states[i] - 1) - sp.energies(states[j] - 1));
            const double de_m = energy_difference_truncated(rdms[i], rdms[j],
                                                            basis, m, c);
            const FrobeniusBound fb =
                frobenius_bound_check(rdms[i], rdms[j], basis, m, c);
            std::string verdict = "trace-mismatch";
            double off_mass = -1.0;
            if (std::abs(rdms[i].trace - rdms[j].trace) <= 1e-8) {
                const NaturalOrbitalSet pa = natural_orbitals(rdms[i]);
                const NaturalOrbitalSet pb = natural_orbitals(rdms[j]);
                const Matrix u = connecting_unitary(pa, rdms[i].trace, pb,
                                                    rdms[j].trace);
                const SimilarityVerdict sv = similarity_classifier(u, m, tol);
                off_mass = sv.off_block_mass;
                verdict = sv.verdict == Verdict::Similar ? "similar"
                                                         : "dissimilar";
            }
            csv << states[i] << ',' << states[j] << ',' << num(da.value) << ','
                << num(db.value) << ',' << num(r) << ',' << num(de_exact)
                << ',' << num(de_m);
            if (no_ultralocal)
                csv << ',' << num(energy_difference_truncated(
                              rdms[i], rdms[j], basis, m, c, false));
            csv << ',' << num(fb.lhs) << ',' << num(fb.rhs) << ','
                << (fb.holds ? 1 : 0) << ',' << num(off_mass) << ',' << verdict
                << "\r\n";
        }
    }
    {
        std::ofstream out(fs::path(output_dir) / "metrics.csv");
        out << csv.str();
    }

    std::ostringstream report;
    report << "model: " << sp.model.tag() << "\n"
           << "gamma basis: state " << gamma_state << ", m = " << m << "\n";
    if (states.size() >= 3) {
        auto run_suite = [&](const std::string& label, auto&& dist) {
            const MetricReport mr = metric_axiom_suite(states, dist);
            report << label << ": " << mr.violations.size()
                   << " violations, max triangle slack "
                   << mr.max_triangle_slack << "\n";
            for (const MetricViolation& v : mr.violations) {
                report << "  " << v.axiom << " at";
                for (std::size_t idx : v.indices) report << " " << idx;
                report << " magnitude " << v.magnitude << "\n";
            }
        };
        run_suite("relative truncation r axioms", [&](std::size_t x,
                                                      std::size_t y) {
            const auto it_x = std::find(states.begin(), states.end(), x);
            const auto it_y = std::find(states.begin(), states.end(), y);
            const auto& ra = rdms[std::distance(states.begin(), it_x)];
            const auto& rb = rdms[std::distance(states.begin(), it_y)];
            return relative_truncation(truncation_error(ra, basis, m),
                                       truncation_error(rb, basis, m));
        });
        run_suite("|dE| axioms", [&](std::size_t x, std::size_t y) {
            return std::abs(sp.energies(x - 1) - sp.energies(y - 1));
        });
    } else {
        report << "fewer than 3 states: metric axiom suite skipped\n";
    }
    {
        std::ofstream out(fs::path(output_dir) / "report.txt");
        out << report.str();
    }
    std::cout << report.str();
    std::cout << "pairwise table -> " << output_dir << "/metrics.csv\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bundled matrix product states from exact spin-chain "
                 "eigenstates: overlap heatmaps and truncation metrics"};
    app.set_config("--config");
    app.require_subcommand(1);

    ModelArgs solve_args, overlap_args, metrics_args;

    auto* solve_cmd =
        app.add_subcommand("solve", "Diagonalize a model and cache the "
                                    "spectrum");
    solve_args.attach(solve_cmd);

    auto* overlap_cmd = app.add_subcommand(
        "overlap", "Weighted overlap matrix of two bundles at a bond");
    overlap_args.attach(overlap_cmd);
    std::string bundle_a = "1,2", bundle_b = "1,3", preset;
    std::size_t bond = 0;
    double cutoff = 1e-8, threshold_log10 = -8.0, floor_log10 = -16.0;
    std::string output_dir = "out";
    overlap_cmd->add_option("--bundle-a", bundle_a,
                            "States of bundle A, e.g. 1,2 or 1-10");
    overlap_cmd->add_option("--bundle-b", bundle_b, "States of bundle B");
    overlap_cmd->add_option("--bond", bond, "Bond index (default: middle)");
    overlap_cmd->add_option("--cutoff", cutoff, "Row/column truncation cutoff");
    overlap_cmd->add_option("--threshold-log10", threshold_log10,
                            "High-weight threshold on log10|Gamma|");
    overlap_cmd->add_option("--floor-log10", floor_log10,
                            "Heatmap floor for log10|Gamma|");
    overlap_cmd->add_option("--output-dir", output_dir, "Output directory");
    overlap_cmd->add_option("--preset", preset,
                            "fig3 | fig4 | fig5 bundle sets");

    auto* metrics_cmd = app.add_subcommand(
        "metrics", "Pairwise truncation/energy metrics and axiom report");
    metrics_args.attach(metrics_cmd);
    std::string states_text = "1,2,3,29,30", couplings_text;
    std::size_t m = 0, gamma_state = 0;
    bool no_ultralocal = false;
    double similarity_tol = 0.1;
    std::string metrics_out = "out";
    metrics_cmd->add_option("--states", states_text, "State list");
    metrics_cmd->add_option("--m", m,
                            "Orbital count (default: smallest m with "
                            "own-basis delta < 1e-3)");
    metrics_cmd->add_option("--gamma-state", gamma_state,
                            "Basis state gamma (default: first listed)");
    metrics_cmd->add_option("--couplings", couplings_text,
                            "Per-site couplings C_i, comma separated");
    metrics_cmd->add_flag("--no-ultralocal", no_ultralocal,
                          "Also evaluate the full pre-limit double sum");
    metrics_cmd->add_option("--similarity-tol", similarity_tol,
                            "Off-block mass tolerance for the classifier");
    metrics_cmd->add_option("--output-dir", metrics_out, "Output directory");

    auto* verify_cmd =
        app.add_subcommand("verify", "Run every invariant suite");
    bool quick = false;
    std::string verify_cache = "cache";
    verify_cmd->add_flag("--quick", quick, "Restrict to N <= 8");
    verify_cmd->add_option("--cache-dir", verify_cache,
                           "Spectrum cache directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) {
            const Spectrum sp = solve_args.solve();
            std::cout << sp.model.tag() << ": " << sp.energies.n_elem
                      << " energies";
            if (!solve_args.no_cache)
                std::cout << " cached in "
                          << spectrum_cache_path(sp.model,
                                                 solve_args.cache_dir);
            std::cout << "\n";
            if (sp.energies.n_elem <= 16) {
                for (arma::uword k = 0; k < sp.energies.n_elem; ++k)
                    std::printf("E_%llu = %.12g\n",
                                static_cast<unsigned long long>(k + 1),
                                sp.energies(k));
            } else {
                std::printf("E_1 = %.12g, E_2 = %.12g, gap = %.6g\n",
                            sp.energies(0), sp.energies(1),
                            sp.energies(1) - sp.energies(0));
            }
            return 0;
        }
        if (overlap_cmd->parsed())
            return run_overlap(overlap_args, preset, bundle_a, bundle_b, bond,
                               cutoff, threshold_log10, floor_log10,
                               output_dir);
        if (metrics_cmd->parsed())
            return run_metrics(metrics_args, states_text, m, gamma_state,
                               couplings_text, no_ultralocal, similarity_tol,
                               metrics_out);
        if (verify_cmd->parsed()) {
            VerifyOptions opts;
            opts.quick = quick;
            opts.cache_dir = verify_cache;
            bool all_ok = true;
            for (const SuiteResult& r : run_verification(opts)) {
                std::cout << r.name << ": " << r.checks << " checks, "
                          << r.failures.size() << " failures"
                          << (r.passed() ? " [ok]" : " [FAIL]") << "\n";
                for (const std::string& f : r.failures)
                    std::cout << "  " << f << "\n";
                all_ok = all_ok && r.passed();
            }
            return all_ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
