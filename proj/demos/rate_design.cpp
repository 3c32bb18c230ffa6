// Design walk-through: start from a concrete circuit, report the coupling
// rates at the operating bias, then sweep the coupler flux to find the
// two-photon sweet spot and the bias where the inductive one-photon channel
// switches off.
#include <cstdio>

#include "sqc/rateset.hpp"
#include "sqc/sweep.hpp"

using namespace sqc;

int main() {
    // A 6.7 GHz lumped resonator, a dc-SQUID coupler, and an rf-SQUID phase
    // qubit biased into its shallow metastable well.
    const CircuitParameters device{
        .L_r = 0.84868e-9,
        .C_r = 692.8e-15,
        .L_a = 1.0e-9,
        .C_a_total = 300.0e-15,
        .I0_a = 1.1e-6,
        .I0_c = 30.0e-9,
        .C_c_total = 5.0e-15,
        .flux_ext = 0.7150,
        .flux_cpl = 0.0,
    };

    const RateSet rs = compute_rate_set(device);
    std::printf("operating point  flux_ext = %.4f  flux_cpl = %.4f\n",
                device.flux_ext, device.flux_cpl);
    std::printf("  omega_r_tilde   %9.4f GHz\n", rs.freqs.omega_r_tilde);
    std::printf("  omega_a_tilde   %9.4f GHz\n", rs.freqs.omega_a_tilde);
    std::printf("  design detuning %9.4f MHz (atom vs. twice the designed resonator)\n",
                rs.detuning_design);
    std::printf("  g2_tilde        %9.4f MHz   two-photon exchange\n",
                rs.renorm.g2_tilde);
    std::printf("  K_tilde         %9.4f MHz   cross-Kerr\n", rs.renorm.K_tilde);
    std::printf("  g1c             %9.4f MHz   capacitive one-photon channel\n\n",
                rs.bare.g1c);

    // One flux period of the coupler, dense enough for feature refinement.
    SweepSpec spec;
    spec.axis = SweepAxis::flux_cpl;
    spec.start = -1.0;
    spec.stop = 1.0;
    spec.n_points = 129;
    spec.base = device;
    const SweepResult sweep = run_sweep(spec);

    const FeatureSet features = find_features(sweep, {"g2_tilde", "g1i_tilde"});
    for (const auto& ex : features.extrema)
        if (ex.quantity == "g2_tilde" && ex.value > 0.0)
            std::printf("g2_tilde maximum  %7.3f MHz at flux_cpl = %+.5f\n", ex.value,
                        ex.flux);
    for (const auto& z : features.zeros)
        if (z.quantity == "g1i_tilde")
            std::printf("g1i_tilde zero    at flux_cpl = %+.5f (clean two-photon bias)\n",
                        z.flux);
    std::printf("resonance windows in this period: %zu\n",
                features.resonance_windows.size());
    return 0;
}
