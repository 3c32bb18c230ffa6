// Flux sweeps, feature extraction, and the two-photon resonance report.
//
// Quantitative anchors (coupler flux in Phi_0, rates in MHz) were frozen from
// an independent reference implementation of the same pipeline:
//   * max g2_tilde = 31.126 at flux_cpl = 0.12832; the flux_cpl = 0 value sits
//     11.17 % below that maximum,
//   * with zero-point amplitudes frozen at their uncoupled values the maximum
//     moves to 34.748 at flux_cpl = 0.08386 (5.33 % above the origin value),
//   * g1i_tilde crosses zero at flux_cpl = 0.165209, where
//     cot(delta) = (5/6) mu phi_a_zpf^2,
//   * g_minus changes sign four times across one flux period [-1, 1],
//   * at flux_cpl = 0.5 every Josephson-mediated rate vanishes,
//   * the nominal device is inside the two-photon window at flux_cpl = 0:
//     numerical atom frequency 13.46597 GHz against twice the designed
//     resonator frequency gives a -11.73 MHz detuning, well inside g2_tilde;
//     every |flux_cpl| >= 0.05 point is far outside.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "reference_device.hpp"
#include "sqc/sweep.hpp"

namespace {

using namespace sqc;

SweepSpec fig4_spec(int n_points) {
    SweepSpec spec;
    spec.axis = SweepAxis::flux_cpl;
    spec.start = -1.0;
    spec.stop = 1.0;
    spec.n_points = n_points;
    spec.base = refdev::device();
    return spec;
}

const SweepResult& fig4_sweep() {
    static const SweepResult result = run_sweep(fig4_spec(129));
    return result;
}

const SweepResult& nominal_report() {
    static const SweepResult result = resonance_report(refdev::device(), 0.0);
    return result;
}

int sample_sign_changes(const SweepResult& result, const std::string& quantity) {
    int changes = 0;
    for (std::size_t i = 0; i + 1 < result.rows.size(); ++i) {
        const auto& a = result.rows[i];
        const auto& b = result.rows[i + 1];
        if (!a.rates || !b.rates) continue;
        if (quantity_value(*a.rates, quantity) * quantity_value(*b.rates, quantity) < 0.0)
            ++changes;
    }
    return changes;
}

double pipeline_value(const SweepSpec& spec, double flux, const RateSet& near,
                      const std::string& quantity) {
    auto p = spec.base;
    (spec.axis == SweepAxis::flux_cpl ? p.flux_cpl : p.flux_ext) = flux;
    const RateSet rs = compute_rate_set(p, RateSetOptions{spec.freeze_zpf},
                                        std::make_pair(near.eq.phi_r_min, near.eq.phi_a_min));
    return quantity_value(rs, quantity);
}

TEST(RunSweep, RowsAreOrderedAndComplete) {
    const auto& result = fig4_sweep();
    ASSERT_EQ(result.rows.size(), 129u);
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const auto& row = result.rows[i];
        EXPECT_TRUE(row.ok()) << "row " << i << ": " << row.error;
        ASSERT_TRUE(row.rates.has_value());
        if (i > 0) {
            EXPECT_LT(result.rows[i - 1].flux, row.flux);
        }
    }
    EXPECT_DOUBLE_EQ(result.rows.front().flux, -1.0);
    EXPECT_DOUBLE_EQ(result.rows.back().flux, 1.0);
}

TEST(RunSweep, JosephsonRatesVanishAtHalfFluxQuantum) {
    const auto& rows = fig4_sweep().rows;
    const auto& row = rows[96];
    ASSERT_DOUBLE_EQ(row.flux, 0.5);  // coupler junction energy is zero here
    ASSERT_TRUE(row.rates.has_value());
    const auto& rs = *row.rates;
    EXPECT_LT(std::abs(rs.bare.g1i), 1e-9);
    EXPECT_LT(std::abs(rs.bare.g2), 1e-9);
    EXPECT_LT(std::abs(rs.bare.K0), 1e-9);
    EXPECT_LT(std::abs(rs.bare.G2), 1e-9);
    EXPECT_LT(std::abs(rs.bare.G3), 1e-9);
    // The capacitive channel stays open.
    EXPECT_GT(rs.bare.g1c, 10.0);
}

TEST(RunSweep, BeamSplitterRateChangesSignFourTimesPerPeriod) {
    EXPECT_EQ(sample_sign_changes(fig4_sweep(), "g_minus"), 4);
}

TEST(RunSweep, DeterministicAcrossThreadCounts) {
    SweepSpec spec = fig4_spec(17);
    spec.start = -0.2;
    spec.stop = 0.2;
    const SweepResult parallel = run_sweep(spec);

    ASSERT_EQ(setenv("SQUIDCOUPLER_THREADS", "1", 1), 0);
    const SweepResult serial = run_sweep(spec);
    ASSERT_EQ(unsetenv("SQUIDCOUPLER_THREADS"), 0);

    ASSERT_EQ(parallel.rows.size(), serial.rows.size());
    for (std::size_t i = 0; i < parallel.rows.size(); ++i) {
        ASSERT_TRUE(parallel.rows[i].rates && serial.rows[i].rates);
        EXPECT_DOUBLE_EQ(parallel.rows[i].rates->renorm.g2_tilde,
                         serial.rows[i].rates->renorm.g2_tilde);
        EXPECT_DOUBLE_EQ(parallel.rows[i].rates->eq.phi_a_min,
                         serial.rows[i].rates->eq.phi_a_min);
    }
}

TEST(RunSweep, FailedPointsCarryErrorsNotValues) {
    // Beyond flux_ext ~ 0.806 the shallow atom well has merged into the deep
    // one, so every point of this sweep must fail loudly.
    SweepSpec spec;
    spec.axis = SweepAxis::flux_ext;
    spec.start = 0.82;
    spec.stop = 0.90;
    spec.n_points = 9;
    spec.base = refdev::device();
    spec.numeric_every = 4;
    const SweepResult result = run_sweep(spec);
    ASSERT_EQ(result.rows.size(), 9u);
    for (const auto& row : result.rows) {
        EXPECT_FALSE(row.ok());
        EXPECT_NE(row.error.find("well"), std::string::npos) << row.error;
        EXPECT_FALSE(row.rates.has_value());
        EXPECT_FALSE(row.omega_a_num.has_value());
    }
}

TEST(RunSweep, ReversedContinuationReproducesEquilibria) {
    SweepSpec spec = fig4_spec(33);
    spec.start = -0.2;
    spec.stop = 0.2;
    const SweepResult forward = run_sweep(spec);

    // Continue the equilibrium backwards by hand and compare point by point.
    std::optional<std::pair<double, double>> carry;
    for (int i = spec.n_points - 1; i >= 0; --i) {
        auto p = spec.base;
        p.flux_cpl = forward.rows[i].flux;
        const auto eq = solve_equilibrium(derive_energies(p), p, carry);
        carry = {eq.phi_r_min, eq.phi_a_min};
        ASSERT_TRUE(forward.rows[i].rates.has_value());
        EXPECT_NEAR(eq.phi_r_min, forward.rows[i].rates->eq.phi_r_min, 1e-8);
        EXPECT_NEAR(eq.phi_a_min, forward.rows[i].rates->eq.phi_a_min, 1e-8);
    }
}

TEST(RunSweep, RejectsDegenerateSpecs) {
    SweepSpec spec = fig4_spec(129);
    spec.n_points = 1;
    EXPECT_THROW(run_sweep(spec), invalid_parameters_error);
    spec.n_points = 2;
    spec.start = spec.stop = 0.3;
    EXPECT_THROW(run_sweep(spec), invalid_parameters_error);
    spec = fig4_spec(33);
    spec.numeric_every = -1;
    EXPECT_THROW(run_sweep(spec), invalid_parameters_error);
}

TEST(FindFeatures, TwoPhotonRateMaximumMatchesReference) {
    const auto features = find_features(fig4_sweep(), {"g2_tilde"});
    const Extremum* peak = nullptr;
    for (const auto& e : features.extrema)
        if (std::abs(e.flux - 0.12832) < 5e-3) peak = &e;
    ASSERT_NE(peak, nullptr) << "no g2_tilde extremum near flux_cpl = 0.128";
    EXPECT_NEAR(peak->flux, 0.12832, 1e-4);
    EXPECT_NEAR(peak->value, 31.126, 2e-3);

    // The zero-coupler-flux operating point sits 11.17 % below that maximum.
    const auto& origin = fig4_sweep().rows[64];
    ASSERT_DOUBLE_EQ(origin.flux, 0.0);
    const double v0 = origin.rates->renorm.g2_tilde;
    EXPECT_NEAR((peak->value - v0) / peak->value, 0.1117, 0.004);
}

TEST(FindFeatures, FrozenAmplitudesShiftTheMaximum) {
    SweepSpec spec = fig4_spec(33);
    spec.start = 0.0;
    spec.stop = 0.2;
    spec.freeze_zpf = true;
    const SweepResult frozen = run_sweep(spec);
    const auto features = find_features(frozen, {"g2_tilde"});
    const Extremum* peak = nullptr;
    for (const auto& e : features.extrema)
        if (std::abs(e.flux - 0.08386) < 5e-3) peak = &e;
    ASSERT_NE(peak, nullptr);
    EXPECT_NEAR(peak->flux, 0.08386, 1e-4);
    EXPECT_NEAR(peak->value, 34.748, 2e-3);
    const double v0 = frozen.rows.front().rates->renorm.g2_tilde;
    EXPECT_NEAR((peak->value - v0) / peak->value, 0.0533, 0.003);
}

TEST(FindFeatures, InductiveCouplingZeroSatisfiesCotangentIdentity) {
    const auto& result = fig4_sweep();
    const auto features = find_features(result, {"g1i_tilde"});
    const Zero* zero = nullptr;
    for (const auto& z : features.zeros)
        if (std::abs(z.flux - 0.165209) < 5e-3) zero = &z;
    ASSERT_NE(zero, nullptr) << "no g1i_tilde zero near flux_cpl = 0.165";
    EXPECT_NEAR(zero->flux, 0.165209, 2e-5);

    // At the crossing the dressed inductive rate cancels exactly where
    // cot(delta) = (5/6) mu phi_a_zpf^2.
    auto p = refdev::device();
    p.flux_cpl = zero->flux;
    const RateSet rs = compute_rate_set(p);
    const double lhs = std::cos(rs.eq.delta) / std::sin(rs.eq.delta);
    const double rhs =
        (5.0 / 6.0) * rs.mu.mu * rs.profiles.second.phi_zpf * rs.profiles.second.phi_zpf;
    EXPECT_NEAR(lhs, rhs, 1e-6);

    // Bracketing: the continuous pipeline changes sign across the zero.
    const double step = (result.spec.stop - result.spec.start) / (result.spec.n_points - 1);
    const double left = pipeline_value(result.spec, zero->flux - step, rs, "g1i_tilde");
    const double right = pipeline_value(result.spec, zero->flux + step, rs, "g1i_tilde");
    EXPECT_LT(left * right, 0.0);
}

TEST(FindFeatures, ZeroLocationIsGridConverged) {
    auto locate = [](int n_points) {
        const auto features = find_features(run_sweep(fig4_spec(n_points)), {"g1i_tilde"});
        for (const auto& z : features.zeros)
            if (std::abs(z.flux - 0.165209) < 5e-3) return z.flux;
        ADD_FAILURE() << "zero not found with " << n_points << " points";
        return 0.0;
    };
    // Bisection runs on the continuous pipeline, so halving the sample step
    // must not move the root by more than the refinement tolerance.
    EXPECT_NEAR(locate(129), locate(257), 1e-6);
}

TEST(FindFeatures, SignChangeCountMatchesRefinedZeros) {
    const auto features = find_features(fig4_sweep(), {"g_minus"});
    int zeros = 0;
    for (const auto& z : features.zeros)
        if (z.quantity == "g_minus") ++zeros;
    EXPECT_EQ(zeros, 4);
    EXPECT_EQ(zeros, sample_sign_changes(fig4_sweep(), "g_minus"));
}

TEST(FindFeatures, RejectsShortSweepsAndUnknownQuantities) {
    SweepSpec spec = fig4_spec(8);
    spec.start = -0.1;
    spec.stop = 0.1;
    const SweepResult small = run_sweep(spec);
    EXPECT_THROW(find_features(small, {"g2_tilde"}), invalid_parameters_error);
    EXPECT_THROW(find_features(fig4_sweep(), {"g9"}), unknown_quantity_error);
    EXPECT_THROW(quantity_value(*fig4_sweep().rows[0].rates, "coupling"),
                 unknown_quantity_error);
}

TEST(ResonanceReport, NominalDeviceIsInsideTheWindowAtZeroCouplerFlux) {
    const auto& report = nominal_report();
    ASSERT_EQ(report.rows.size(), 33u);
    const auto& origin = report.rows[16];
    ASSERT_DOUBLE_EQ(origin.flux, 0.0);
    ASSERT_TRUE(origin.rates.has_value());
    ASSERT_TRUE(origin.omega_a_num.has_value());
    EXPECT_FALSE(origin.omega_a_num_interpolated);

    EXPECT_NEAR(*origin.omega_a_num, 13.46597, 2e-4);
    const double det_mhz =
        ghz_to_mhz(*origin.omega_a_num - 2.0 * origin.rates->omega_r_tilde_design);
    EXPECT_NEAR(det_mhz, -11.73, 0.2);
    EXPECT_LT(std::abs(det_mhz), std::abs(origin.rates->renorm.g2_tilde));
    EXPECT_TRUE(row_in_resonance(origin));

    for (const auto& row : report.rows) {
        if (std::abs(row.flux) >= 0.05) {
            EXPECT_FALSE(row_in_resonance(row)) << "flux_cpl = " << row.flux;
        }
    }
}

TEST(ResonanceReport, WindowsAreSoundAndMaximal) {
    const auto& report = nominal_report();
    const auto features = find_features(report, {});
    ASSERT_EQ(features.resonance_windows.size(), 1u);
    const auto& win = features.resonance_windows.front();
    EXPECT_LE(win.flux_lo, 0.0);
    EXPECT_GE(win.flux_hi, 0.0);

    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& row = report.rows[i];
        const bool inside = row.flux >= win.flux_lo && row.flux <= win.flux_hi;
        EXPECT_EQ(row_in_resonance(row), inside) << "flux_cpl = " << row.flux;
    }
}

TEST(ResonanceReport, InterpolatedFrequenciesStayBetweenSolvedNodes) {
    const auto& report = nominal_report();
    int interpolated = 0;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& row = report.rows[i];
        ASSERT_TRUE(row.omega_a_num.has_value()) << "row " << i;
        if (!row.omega_a_num_interpolated) continue;
        ++interpolated;
        const std::size_t lo = (i / 8) * 8;
        const std::size_t hi = std::min<std::size_t>(lo + 8, report.rows.size() - 1);
        const double ya = *report.rows[lo].omega_a_num;
        const double yb = *report.rows[hi].omega_a_num;
        EXPECT_GE(*row.omega_a_num, std::min(ya, yb) - 1e-9);
        EXPECT_LE(*row.omega_a_num, std::max(ya, yb) + 1e-9);
    }
    EXPECT_GT(interpolated, 0);
}

TEST(ResonanceReport, ZeroPerturbationMatchesNominal) {
    ResonanceOptions opts;
    opts.numeric_every = 0;  // rate pipeline only; eigen-solves are identical anyway
    const SweepResult perturbed = resonance_report(refdev::device(), 0.0, opts);

    SweepSpec spec;
    spec.axis = opts.axis;
    spec.start = opts.start;
    spec.stop = opts.stop;
    spec.n_points = opts.n_points;
    spec.base = refdev::device();
    const SweepResult nominal = run_sweep(spec);

    ASSERT_EQ(perturbed.rows.size(), nominal.rows.size());
    for (std::size_t i = 0; i < nominal.rows.size(); ++i) {
        ASSERT_TRUE(perturbed.rows[i].rates && nominal.rows[i].rates);
        EXPECT_DOUBLE_EQ(perturbed.rows[i].rates->renorm.g2_tilde,
                         nominal.rows[i].rates->renorm.g2_tilde);
        EXPECT_DOUBLE_EQ(perturbed.rows[i].rates->freqs.omega_a_tilde,
                         nominal.rows[i].rates->freqs.omega_a_tilde);
    }
}

TEST(ResonanceReport, AtomBiasRecoversAPerturbedResonance) {
    // A 2 % drop of the atom junction current pulls the shallow-well atom
    // ~350 MHz below the two-photon window at the nominal bias; backing the
    // external flux off to ~0.702 stiffens the well and restores resonance.
    const auto base = refdev::device();
    ResonanceOptions opts;
    opts.axis = SweepAxis::flux_ext;
    opts.start = base.flux_ext - 0.016;
    opts.stop = base.flux_ext + 0.004;
    opts.n_points = 51;
    const SweepResult recovered = resonance_report(base, -0.02, opts);

    const auto& at_base = recovered.rows[40];
    ASSERT_NEAR(at_base.flux, base.flux_ext, 1e-9);
    EXPECT_FALSE(row_in_resonance(at_base));

    int in_window = 0;
    for (const auto& row : recovered.rows) {
        if (row_in_resonance(row)) {
            ++in_window;
            // The weakened junction lowers the atom frequency, so recovery
            // happens at reduced external flux (stiffer well).
            EXPECT_LT(row.flux, base.flux_ext);
            EXPECT_NEAR(row.flux, 0.702, 0.002);
        }
    }
    EXPECT_GE(in_window, 2);
}

TEST(ResonanceReport, RejectsLargePerturbations) {
    EXPECT_THROW(resonance_report(refdev::device(), 0.05), invalid_parameters_error);
    EXPECT_THROW(resonance_report(refdev::device(), -0.07), invalid_parameters_error);
}

}  // namespace
