#pragma once

// Command-line front end. Subcommands:
//   rates      single-bias scalar report (terminal table + rates.csv)
//   sweep      flux sweep of the rate pipeline (sweep.csv + features.csv)
//   levels     metastable-well spectrum (levels.csv + potential.csv)
//   resonance  two-photon resonance panels, nominal and perturbed
//   verify     exact operator-identity suite
//
// Exit codes: 0 success, 2 configuration/usage error, 3 numeric failure,
// 4 verification failure. Orchestration is single-threaded; sweeps manage
// their own worker pool (capped by SQUIDCOUPLER_THREADS).

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sqc/io.hpp"

namespace sqc::cli {

namespace detail {

struct Overrides {
    std::optional<double> flux_cpl;
    std::optional<double> flux_ext;
    bool freeze_zpf = false;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
};

inline io::RunConfig apply_overrides(io::RunConfig cfg, const Overrides& ov) {
    if (ov.flux_cpl) cfg.circuit.flux_cpl = *ov.flux_cpl;
    if (ov.flux_ext) cfg.circuit.flux_ext = *ov.flux_ext;
    if (ov.freeze_zpf) cfg.sweep.freeze_zpf = true;
    if (ov.out_dir) cfg.output.directory = *ov.out_dir;
    if (ov.format) {
        if (*ov.format != "csv" && *ov.format != "record")
            throw config_error("--format must be csv or record, got '" + *ov.format + "'");
        cfg.output.format = *ov.format;
    }
    return cfg;
}

inline std::filesystem::path ensure_out_dir(const io::RunConfig& cfg) {
    const std::filesystem::path dir = cfg.output.directory;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw config_error("cannot create output directory '" + dir.string() +
                               "': " + ec.message());
    return dir;
}

inline void emit(const io::RunConfig& cfg, const std::filesystem::path& dir,
                 const std::string& stem, const io::Table& table,
                 const std::vector<std::string>& provenance) {
    io::write_csv(dir / (stem + ".csv"), table, provenance);
    if (cfg.output.format == "record")
        io::write_record(dir / (stem + ".json"), io::table_record(table, provenance));
}

inline std::string onoff(bool b) { return b ? "true" : "false"; }

inline int cmd_rates(const io::RunConfig& cfg) {
    const RateSetOptions opts{cfg.sweep.freeze_zpf};
    const RateSet rs = compute_rate_set(cfg.circuit, opts);
    std::cout << io::rates_pretty(rs);

    const auto dir = ensure_out_dir(cfg);
    const auto prov =
        io::provenance_lines(cfg, "rates", {"freeze_zpf: " + onoff(opts.freeze_zpf)});
    emit(cfg, dir, "rates", io::rates_table(rs), prov);
    return 0;
}

inline int cmd_sweep(const io::RunConfig& cfg) {
    SweepSpec spec;
    spec.axis = cfg.sweep.axis;
    spec.start = cfg.sweep.start;
    spec.stop = cfg.sweep.stop;
    spec.n_points = cfg.sweep.n_points;
    spec.freeze_zpf = cfg.sweep.freeze_zpf;
    spec.base = cfg.circuit;
    spec.numeric_every = 0;  // the rate columns need no eigen-solves
    const SweepResult result = run_sweep(spec);

    const auto dir = ensure_out_dir(cfg);
    const auto prov =
        io::provenance_lines(cfg, "sweep", {"freeze_zpf: " + onoff(spec.freeze_zpf)});
    emit(cfg, dir, "sweep", io::sweep_table(result), prov);

    int failed = 0;
    for (const auto& row : result.rows)
        if (!row.ok()) ++failed;
    std::cout << "sweep: " << result.rows.size() << " points over "
              << axis_name(spec.axis) << " in [" << spec.start << ", " << spec.stop
              << "], " << failed << " failed\n";

    // Feature extraction needs a minimum sample density; short sweeps just
    // skip the sidecar.
    if (spec.n_points >= 16) {
        const FeatureSet features =
            find_features(result, {"g1i_tilde", "g_minus", "g2_tilde"});
        emit(cfg, dir, "features", io::features_table(features), prov);
        std::cout << "features: " << features.zeros.size() << " zeros, "
                  << features.extrema.size() << " extrema, "
                  << features.resonance_windows.size() << " resonance windows\n";
    }
    return 0;
}

inline int cmd_levels(const io::RunConfig& cfg) {
    // Level structure of the atom alone: the coupler branch is removed so the
    // table describes the bare metastable well that the quartic ladder
    // expands about.
    CircuitParameters bare = cfg.circuit;
    bare.I0_c = 0.0;
    bare.C_c_total = 0.0;
    auto d = derive_energies(bare);
    const EquilibriumState eq = solve_equilibrium(d, bare);
    d = attach_equilibrium(d, eq);
    const auto profiles = mode_profiles(d, eq);
    const PotentialSpec pot{d.E_L_a, d.E_J_a, bare.flux_ext, std::nullopt};

    // The automatic window needs a two-well landscape; a single-well
    // potential gets a window centred on its minimum instead.
    Grid grid{0.0, 0.0, 0};
    try {
        grid = default_grid(pot, cfg.grid.n_points);
    } catch (const no_metastable_well_error&) {
        grid = Grid{eq.phi_a_min - 4.0, eq.phi_a_min + 4.0, cfg.grid.n_points};
    }
    // The shallow-well ladder sits above many deep-well states, so the solve
    // must reach well past the barrier top. The doubled-grid check is skipped:
    // it would flag continuum-like levels far above the barrier that the
    // report never uses.
    const int k = std::min(96, grid.n_points / 4);
    const EigenSolution sol = solve_spectrum(pot, d.E_C_a, grid, k, SolveOptions{false});

    // The atom equilibrium phase is the metastable minimum of this potential,
    // which anchors the perturbative ladder to absolute energies.
    const double u_ref = pot.U(eq.phi_a_min);

    std::vector<MetastableLevel> levels;
    std::vector<double> perturbative;
    bool classified = true;
    try {
        const MetastableLadder ladder = classify_metastable(sol, pot, grid);
        levels = ladder.levels;
        const auto rel = perturbative_ladder(d, eq, profiles, std::max(ladder.count, 2));
        for (int i = 0; i < ladder.count && i < static_cast<int>(rel.size()); ++i)
            perturbative.push_back(rel[i] + u_ref);
        std::cout << "levels: " << ladder.count << " metastable states, barrier "
                  << ladder.barrier_top - u_ref << " GHz above the well minimum at phi = "
                  << ladder.barrier_phi << " rad\n"
                  << "omega_ge = " << ladder.omega_ge << " GHz, numerical anharmonicity "
                  << ladder.anharmonicity_num << " MHz\n";
    } catch (const no_metastable_well_error&) {
        // Single-well potential: emit the plain spectrum, no classification.
        classified = false;
        for (const double e : sol.energies) levels.push_back({e, 0.0, false});
        const auto rel =
            perturbative_ladder(d, eq, profiles, std::max<int>(2, sol.energies.size()));
        for (std::size_t i = 0; i < sol.energies.size() && i < rel.size(); ++i)
            perturbative.push_back(rel[i] + u_ref);
        std::cout << "levels: single-well potential, " << sol.energies.size()
                  << " states, no metastable classification\n";
    }

    const auto dir = ensure_out_dir(cfg);
    const auto prov = io::provenance_lines(
        cfg, "levels", {"grid_points: " + std::to_string(grid.n_points)});
    emit(cfg, dir, "levels", io::levels_table(levels, perturbative, classified), prov);
    const int stride = std::max(1, grid.n_points / 512);
    emit(cfg, dir, "potential", io::potential_table(pot, grid, stride), prov);
    return 0;
}

inline int cmd_resonance(const io::RunConfig& cfg) {
    ResonanceOptions nominal_opts;
    nominal_opts.axis = cfg.sweep.axis;
    nominal_opts.start = cfg.sweep.start;
    nominal_opts.stop = cfg.sweep.stop;
    nominal_opts.n_points = cfg.sweep.n_points;
    nominal_opts.numeric_every = cfg.sweep.numeric_every;
    nominal_opts.freeze_zpf = cfg.sweep.freeze_zpf;
    const SweepResult nominal = resonance_report(cfg.circuit, 0.0, nominal_opts);

    // Perturbed panel: offset atom junction current, atom-bias axis over the
    // recovery range.
    ResonanceOptions recovery_opts = nominal_opts;
    recovery_opts.axis = SweepAxis::flux_ext;
    recovery_opts.start = cfg.sweep.recovery_start;
    recovery_opts.stop = cfg.sweep.recovery_stop;
    const SweepResult perturbed = resonance_report(
        cfg.circuit, cfg.sweep.atom_energy_perturbation, recovery_opts);

    const auto dir = ensure_out_dir(cfg);
    const auto prov = io::provenance_lines(
        cfg, "resonance",
        {"atom_energy_perturbation: " +
         io::detail::format_double(cfg.sweep.atom_energy_perturbation)});
    emit(cfg, dir, "resonance_nominal", io::resonance_table(nominal), prov);
    emit(cfg, dir, "resonance_perturbed", io::resonance_table(perturbed), prov);

    io::Table windows;
    if (nominal.rows.size() >= 16) {
        const auto nf = find_features(nominal, {});
        const auto pf = find_features(perturbed, {});
        windows = io::features_table(nf, "nominal");
        const io::Table pw = io::features_table(pf, "perturbed");
        windows.rows.insert(windows.rows.end(), pw.rows.begin(), pw.rows.end());
        emit(cfg, dir, "resonance_windows", windows, prov);
    }

    auto report_panel = [](const char* name, const SweepResult& panel) {
        int in_window = 0;
        for (const auto& row : panel.rows)
            if (row_in_resonance(row)) ++in_window;
        std::cout << name << ": " << in_window << " of " << panel.rows.size()
                  << " points inside the two-photon window\n";
    };
    report_panel("nominal", nominal);
    report_panel("perturbed", perturbed);
    return 0;
}

inline int cmd_verify(const std::string& only) {
    std::vector<alg::VerificationReport> reports;
    if (only.empty())
        reports = alg::run_verification();
    else
        reports.push_back(alg::verify_identity(only));

    std::printf("%-28s %-9s %-9s %s\n", "identity", "expected", "outcome", "difference");
    bool as_expected = true;
    for (const auto& r : reports) {
        std::printf("%-28s %-9s %-9s %s\n", r.name.c_str(),
                    r.expect_pass ? "pass" : "fail", r.pass ? "pass" : "fail",
                    r.difference.c_str());
        if (r.pass != r.expect_pass) as_expected = false;
    }

    // Full suite: healthy iff every identity behaves as expected (the
    // negative control is expected to fail). Explicit --only: the exit code
    // reports that identity's own outcome.
    if (!only.empty()) return reports.front().pass ? 0 : 4;
    return as_expected ? 0 : 4;
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
    CLI::App app{"Design toolkit for a SQUID-mediated two-photon resonator-qubit coupler"};
    app.require_subcommand(1);

    std::string config_path;
    detail::Overrides ov;
    double flux_cpl = 0.0, flux_ext = 0.0;
    std::string out_dir, format, only;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--flux-cpl", flux_cpl, "override coupler flux (Phi_0)");
        sub->add_option("--flux-ext", flux_ext, "override atom bias flux (Phi_0)");
        sub->add_flag("--freeze-zpf", ov.freeze_zpf,
                      "freeze zero-point amplitudes at their uncoupled values");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--format", format, "csv or record (csv + JSON mirror)");
    };

    CLI::App* rates = app.add_subcommand("rates", "single-bias coupling-rate report");
    add_common(rates);
    CLI::App* sweep = app.add_subcommand("sweep", "flux sweep of the rate pipeline");
    add_common(sweep);
    CLI::App* levels = app.add_subcommand("levels", "metastable-well level structure");
    add_common(levels);
    CLI::App* resonance =
        app.add_subcommand("resonance", "two-photon resonance panels");
    add_common(resonance);
    CLI::App* verify = app.add_subcommand("verify", "exact operator-identity suite");
    verify->add_option("--only", only, "run a single identity by name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help/version exit cleanly, usage errors are config errors
    }

    try {
        if (verify->parsed()) return detail::cmd_verify(only);

        CLI::App* active = rates->parsed()    ? rates
                           : sweep->parsed()  ? sweep
                           : levels->parsed() ? levels
                                              : resonance;
        if (active->count("--flux-cpl")) ov.flux_cpl = flux_cpl;
        if (active->count("--flux-ext")) ov.flux_ext = flux_ext;
        if (active->count("--out")) ov.out_dir = out_dir;
        if (active->count("--format")) ov.format = format;
        const io::RunConfig cfg =
            detail::apply_overrides(io::parse_config(config_path), ov);

        if (rates->parsed()) return detail::cmd_rates(cfg);
        if (sweep->parsed()) return detail::cmd_sweep(cfg);
        if (levels->parsed()) return detail::cmd_levels(cfg);
        return detail::cmd_resonance(cfg);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const unknown_identity_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const sqc::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

inline int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace sqc::cli
