// Level structure of the flux-biased rf-SQUID atom: numerically solve the
// one-dimensional potential, classify the metastable shallow-well ladder,
// and set it against the quartic perturbative ladder.
#include <cstdio>

#include "sqc/circuit.hpp"
#include "sqc/schrodinger.hpp"

using namespace sqc;

int main() {
    // The atom alone: 1 nH loop, 300 fF island, 1.1 uA junction, biased at
    // 0.715 flux quanta. Resonator and coupler branches are absent.
    CircuitParameters p{
        .L_r = 0.84868e-9,
        .C_r = 692.8e-15,
        .L_a = 1.0e-9,
        .C_a_total = 300.0e-15,
        .I0_a = 1.1e-6,
        .I0_c = 0.0,
        .C_c_total = 0.0,
        .flux_ext = 0.7150,
        .flux_cpl = 0.0,
    };

    auto d = derive_energies(p);
    const EquilibriumState eq = solve_equilibrium(d, p);
    d = attach_equilibrium(d, eq);
    const auto profiles = mode_profiles(d, eq);

    const PotentialSpec pot{d.E_L_a, d.E_J_a, p.flux_ext, std::nullopt};
    const Grid grid = default_grid(pot);
    const EigenSolution sol = solve_spectrum(pot, d.E_C_a, grid, 96, SolveOptions{false});
    const MetastableLadder ladder = classify_metastable(sol, pot, grid);

    const double u_min = pot.U(eq.phi_a_min);
    std::printf("shallow well at phi = %.4f rad, barrier %.2f GHz above its floor\n",
                eq.phi_a_min, ladder.barrier_top - u_min);
    std::printf("%d metastable states, omega_ge = %.4f GHz, anharmonicity %.1f MHz\n\n",
                ladder.count, ladder.omega_ge, ladder.anharmonicity_num);

    const auto quartic = perturbative_ladder(d, eq, profiles, ladder.count);
    std::printf("%5s %14s %14s %12s\n", "n", "numerical/GHz", "quartic/GHz",
                "mismatch/MHz");
    int n = 0;
    for (const auto& lv : ladder.levels) {
        if (!lv.metastable) continue;
        const double e_num = lv.energy - u_min;
        const double e_q = quartic[n];
        std::printf("%5d %14.4f %14.4f %12.1f\n", n, e_num, e_q,
                    ghz_to_mhz(e_q - e_num));
        ++n;
    }
    std::printf("\nthe quartic ladder drifts sharp toward the barrier top;"
                " its own barrier estimate is %.1f GHz\n",
                perturbative_barrier(d, eq));
    return 0;
}
