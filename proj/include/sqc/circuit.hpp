#pragma once

// Circuit layer: raw element values -> derived energy scales -> static
// equilibrium -> harmonic mode profiles (plasma frequencies and zero-point
// fluctuations), plus the regime-validity report.
//
// The device is a lumped resonator (L_r, C_r) coupled through a dc-SQUID
// (two junctions I0_c, total shunt C'_c, bias flux_cpl) to an rf-SQUID phase
// qubit (L_a, C'_a, junction I0_a, bias flux_ext) operated in the shallow
// metastable well of its tilted-washboard potential.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sqc/constants.hpp"

namespace sqc {

struct CircuitParameters {
    double L_r;         // resonator inductance (H)
    double C_r;         // resonator capacitance (F)
    double L_a;         // atom (rf-SQUID) inductance (H)
    double C_a_total;   // full atom island capacitance C'_a incl. junction (F)
    double I0_a;        // atom junction critical current (A)
    double I0_c;        // coupler critical current per junction (A)
    double C_c_total;   // full coupling capacitance C'_c incl. coupler junctions (F)
    double flux_ext;    // atom bias flux (Phi_0)
    double flux_cpl;    // coupler bias flux (Phi_0)

    // Element values must be physical. The two coupler entries may be zero
    // (capacitive ladder absent / coupler junctions switched off); everything
    // else must be strictly positive, fluxes finite.
    void validate() const {
        auto bad = [](double v) { return !(v > 0.0) || !std::isfinite(v); };
        auto bad_or_negative = [](double v) { return !(v >= 0.0) || !std::isfinite(v); };
        std::ostringstream msg;
        if (bad(L_r)) msg << "L_r=" << L_r << " ";
        if (bad(C_r)) msg << "C_r=" << C_r << " ";
        if (bad(L_a)) msg << "L_a=" << L_a << " ";
        if (bad(C_a_total)) msg << "C_a_total=" << C_a_total << " ";
        if (bad(I0_a)) msg << "I0_a=" << I0_a << " ";
        if (bad_or_negative(I0_c)) msg << "I0_c=" << I0_c << " ";
        if (bad_or_negative(C_c_total)) msg << "C_c_total=" << C_c_total << " ";
        if (!std::isfinite(flux_ext)) msg << "flux_ext=" << flux_ext << " ";
        if (!std::isfinite(flux_cpl)) msg << "flux_cpl=" << flux_cpl << " ";
        if (!msg.str().empty())
            throw invalid_parameters_error("circuit parameters out of range: " + msg.str());
    }
};

// All energies as E/h in GHz. Loaded inductive energies depend on the static
// equilibrium and stay unset until one is attached (two-stage construction).
struct DerivedEnergies {
    double E_C_r;    // resonator charging energy, capacitively loaded (GHz)
    double E_C_a;    // atom charging energy, capacitively loaded (GHz)
    double E_C_c;    // coupler charging energy (GHz)
    double E_L_r;    // resonator inductive energy (GHz)
    double E_L_a;    // atom inductive energy (GHz)
    double E_J_a;    // atom Josephson energy (GHz)
    double E_1J_c;   // single coupler-junction Josephson energy (GHz)
    double E_J_c;    // flux-tuned coupler Josephson energy 2 E_1J_c cos(pi flux_cpl); may be negative
    std::optional<double> E_L_r_tilde;  // E_L_r + E_J_c cos(delta) (GHz)
    std::optional<double> E_L_a_tilde;  // E_L_a + E_J_a cos(phi_a) + E_J_c cos(delta) (GHz)

    double loaded_E_L_r() const {
        if (!E_L_r_tilde)
            throw invalid_parameters_error("loaded inductive energies not attached yet");
        return *E_L_r_tilde;
    }
    double loaded_E_L_a() const {
        if (!E_L_a_tilde)
            throw invalid_parameters_error("loaded inductive energies not attached yet");
        return *E_L_a_tilde;
    }
};

struct EquilibriumState {
    double phi_r_min;   // resonator phase drop (rad)
    double phi_a_min;   // atom phase drop (rad)
    double delta;       // coupler phase difference phi_r_min - phi_a_min - pi*flux_cpl (rad)
    double residual_r;  // current-balance residual of the resonator equation (GHz rad)
    double residual_a;  // current-balance residual of the atom equation (GHz rad)
};

struct ModeProfile {
    double omega_p;   // plasma frequency omega_p/2pi (GHz)
    double n_zpf;     // Cooper-pair-number zero-point fluctuation (dimensionless)
    double phi_zpf;   // phase zero-point fluctuation (dimensionless)
};

// ---------------------------------------------------------------------------
// derive_energies
// ---------------------------------------------------------------------------

inline DerivedEnergies derive_energies(const CircuitParameters& p,
                                       const PhysicalConstants& consts = {}) {
    p.validate();
    if (!consts.consistent())
        throw invalid_parameters_error("flux quantum inconsistent with h/(2e)");

    const double e = consts.electron_charge;
    const double phi0 = consts.flux_quantum;

    // Capacitive loading: each mode sees the other's capacitance through the
    // coupling capacitor; the coupler sees the series combination of all three.
    double Ct_r = p.C_r;
    double Ct_a = p.C_a_total;
    double Ct_c = 0.0;
    if (p.C_c_total > 0.0) {
        Ct_r += p.C_a_total * p.C_c_total / (p.C_a_total + p.C_c_total);
        Ct_a += p.C_r * p.C_c_total / (p.C_r + p.C_c_total);
        Ct_c = 1.0 / (1.0 / p.C_c_total + 1.0 / p.C_r + 1.0 / p.C_a_total);
    }
    if (!(Ct_r > 0.0) || !(Ct_a > 0.0))
        throw invalid_parameters_error("non-positive loaded capacitance combination");

    DerivedEnergies d{};
    d.E_C_r = consts.to_ghz(e * e / (2.0 * Ct_r));
    d.E_C_a = consts.to_ghz(e * e / (2.0 * Ct_a));
    d.E_C_c = consts.to_ghz(4.0 * e * e * Ct_c / (p.C_a_total * p.C_r));
    d.E_L_r = consts.to_ghz(phi0 * phi0 / (4.0 * pi * pi * p.L_r));
    d.E_L_a = consts.to_ghz(phi0 * phi0 / (4.0 * pi * pi * p.L_a));
    d.E_J_a = consts.to_ghz(p.I0_a * phi0 / (2.0 * pi));
    d.E_1J_c = consts.to_ghz(p.I0_c * phi0 / (2.0 * pi));
    d.E_J_c = 2.0 * d.E_1J_c * std::cos(pi * p.flux_cpl);
    return d;
}

// Fill in the loaded inductive energies for a given static equilibrium.
inline DerivedEnergies attach_equilibrium(DerivedEnergies d, const EquilibriumState& eq) {
    const double cd = d.E_J_c * std::cos(eq.delta);
    d.E_L_r_tilde = d.E_L_r + cd;
    d.E_L_a_tilde = d.E_L_a + d.E_J_a * std::cos(eq.phi_a_min) + cd;
    return d;
}

// ---------------------------------------------------------------------------
// Static equilibrium
// ---------------------------------------------------------------------------

namespace detail {

// Bisection root refinement for a scalar function with a sign change on [lo, hi].
template <class F>
double bisect(F&& f, double lo, double hi, double f_lo, int iters = 200) {
    for (int i = 0; i < iters && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((f_lo < 0.0) == (fm < 0.0)) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Equilibrium phase of the atom alone (E_J_c = 0): root of
//   E_L_a (phi - 2 pi flux_ext) + E_J_a sin(phi) = 0
// on the shallow-well branch. The biased rf-SQUID potential generically has a
// deep (global) and a shallow (metastable) well; the shallow one is the
// higher-energy minimum. Dense scan over [-pi, 3 pi] plus bisection.
inline double uncoupled_atom_minimum(const DerivedEnergies& d, const CircuitParameters& p) {
    const double phi_ext = 2.0 * pi * p.flux_ext;
    auto dU = [&](double phi) { return d.E_L_a * (phi - phi_ext) + d.E_J_a * std::sin(phi); };
    auto U = [&](double phi) {
        const double x = phi - phi_ext;
        return 0.5 * d.E_L_a * x * x - d.E_J_a * std::cos(phi);
    };

    constexpr int n_scan = 20001;
    const double lo = std::min(-pi, phi_ext - 4.0);
    const double hi = std::max(3.0 * pi, phi_ext + 4.0);
    std::vector<double> minima;
    double prev_phi = lo, prev_d = dU(lo);
    for (int i = 1; i < n_scan; ++i) {
        const double phi = lo + (hi - lo) * i / (n_scan - 1);
        const double cur_d = dU(phi);
        if (prev_d < 0.0 && cur_d >= 0.0)  // derivative crosses up: a minimum
            minima.push_back(detail::bisect(dU, prev_phi, phi, prev_d));
        prev_phi = phi;
        prev_d = cur_d;
    }
    if (minima.empty())
        throw no_metastable_well_error("atom potential has no minimum in the scan window");
    if (minima.size() == 1) {
        // A single well is benign when it is the origin well of a lightly
        // tilted washboard; if the only survivor sits a winding away, the
        // shallow branch has merged into the deep well and is gone.
        if (std::abs(minima.front()) < pi) return minima.front();
        throw no_metastable_well_error(
            "shallow well has vanished at flux_ext = " + std::to_string(p.flux_ext) +
            "; only the deep well at phi = " + std::to_string(minima.front()) + " remains");
    }

    // Metastable = the minimum with the higher potential energy.
    return *std::max_element(minima.begin(), minima.end(),
                             [&](double a, double b) { return U(a) < U(b); });
}

// Solve the coupled current-conservation system
//   E_L_r phi_r + E_J_c sin(delta) = 0
//   E_L_a (phi_a - 2 pi flux_ext) + E_J_a sin(phi_a) - E_J_c sin(delta) = 0
// with delta = phi_r - phi_a - pi flux_cpl, by damped Newton iteration seeded
// from the uncoupled shallow-well minimum (or from `seed` when given, which is
// how sweeps continue along a flux axis without hopping wells).
inline EquilibriumState solve_equilibrium(
    const DerivedEnergies& d, const CircuitParameters& p,
    std::optional<std::pair<double, double>> seed = std::nullopt) {
    const double phi_ext = 2.0 * pi * p.flux_ext;
    const double off = pi * p.flux_cpl;

    double phi_r, phi_a;
    if (seed) {
        phi_r = seed->first;
        phi_a = seed->second;
    } else {
        phi_a = uncoupled_atom_minimum(d, p);
        phi_r = 0.0;
    }

    auto residuals = [&](double pr, double pa, double& f_r, double& f_a) {
        const double delta = pr - pa - off;
        f_r = d.E_L_r * pr + d.E_J_c * std::sin(delta);
        f_a = d.E_L_a * (pa - phi_ext) + d.E_J_a * std::sin(pa) - d.E_J_c * std::sin(delta);
    };

    const double scale = std::max(d.E_L_r, d.E_L_a);
    const double tol = 1e-12 * scale;
    double f_r, f_a;
    residuals(phi_r, phi_a, f_r, f_a);

    bool converged = std::hypot(f_r, f_a) <= tol;
    for (int iter = 0; iter < 200 && !converged; ++iter) {
        const double delta = phi_r - phi_a - off;
        const double c = d.E_J_c * std::cos(delta);
        // Jacobian of the residual system (symmetric).
        const double j_rr = d.E_L_r + c;
        const double j_ra = -c;
        const double j_aa = d.E_L_a + d.E_J_a * std::cos(phi_a) + c;
        const double det = j_rr * j_aa - j_ra * j_ra;
        if (std::abs(det) < 1e-12 * scale * scale)
            throw convergence_error("singular Jacobian at phi_r=" + std::to_string(phi_r) +
                                    ", phi_a=" + std::to_string(phi_a));
        const double step_r = (j_aa * f_r - j_ra * f_a) / det;
        const double step_a = (j_rr * f_a - j_ra * f_r) / det;

        // Damping: halve the step until the residual norm decreases.
        const double norm0 = std::hypot(f_r, f_a);
        double lambda = 1.0;
        double nr = phi_r, na = phi_a, g_r = f_r, g_a = f_a;
        for (int h = 0; h < 30; ++h, lambda *= 0.5) {
            nr = phi_r - lambda * step_r;
            na = phi_a - lambda * step_a;
            residuals(nr, na, g_r, g_a);
            if (std::hypot(g_r, g_a) < norm0) break;
        }
        phi_r = nr;
        phi_a = na;
        f_r = g_r;
        f_a = g_a;
        converged = std::hypot(f_r, f_a) <= tol;
    }
    if (!converged)
        throw convergence_error("equilibrium Newton did not converge; last iterate phi_r=" +
                                std::to_string(phi_r) + ", phi_a=" + std::to_string(phi_a) +
                                ", |f|=" + std::to_string(std::hypot(f_r, f_a)));

    // Stability: the Hessian of the two-variable potential (equal to the
    // residual Jacobian) must be positive definite at the solution, otherwise
    // the iteration landed on a saddle or left the metastable branch.
    const double delta = phi_r - phi_a - off;
    const double c = d.E_J_c * std::cos(delta);
    const double j_rr = d.E_L_r + c;
    const double j_aa = d.E_L_a + d.E_J_a * std::cos(phi_a) + c;
    const double det = j_rr * j_aa - c * c;
    if (!(j_rr > 0.0) || !(det > 0.0))
        throw no_metastable_well_error(
            "equilibrium at phi_r=" + std::to_string(phi_r) + ", phi_a=" +
            std::to_string(phi_a) + " is not a stable minimum");

    return EquilibriumState{phi_r, phi_a, delta, f_r, f_a};
}

// Design working point: the atom is pinned at its uncoupled shallow-well
// minimum and only the resonator phase relaxes against the coupler. This is
// the bookkeeping used to quote the resonator's designed frequency and the
// two-photon resonance condition; the fully coupled equilibrium above is what
// enters the rate pipeline.
inline EquilibriumState design_equilibrium(const DerivedEnergies& d,
                                           const CircuitParameters& p) {
    const double phi_a = uncoupled_atom_minimum(d, p);
    const double off = pi * p.flux_cpl;
    auto f = [&](double pr) { return d.E_L_r * pr + d.E_J_c * std::sin(pr - phi_a - off); };

    double lo = -0.5 * pi, hi = 0.5 * pi;
    double f_lo = f(lo);
    if ((f_lo < 0.0) == (f(hi) < 0.0))
        throw convergence_error("design equilibrium not bracketed in [-pi/2, pi/2]");
    const double phi_r = detail::bisect(f, lo, hi, f_lo, 200);

    const double delta = phi_r - phi_a - off;
    const double phi_ext = 2.0 * pi * p.flux_ext;
    const double res_a =
        d.E_L_a * (phi_a - phi_ext) + d.E_J_a * std::sin(phi_a) - d.E_J_c * std::sin(delta);
    return EquilibriumState{phi_r, phi_a, delta, f(phi_r), res_a};
}

// ---------------------------------------------------------------------------
// Mode profiles
// ---------------------------------------------------------------------------

inline ModeProfile make_profile(double E_C, double E_L_tilde, const char* mode_name) {
    if (!(E_L_tilde > 0.0))
        throw unstable_mode_error(std::string("loaded inductive energy of the ") + mode_name +
                                  " mode is non-positive: " + std::to_string(E_L_tilde) + " GHz");
    ModeProfile m{};
    m.omega_p = std::sqrt(8.0 * E_C * E_L_tilde);
    m.n_zpf = std::pow(E_L_tilde / (32.0 * E_C), 0.25);
    m.phi_zpf = std::pow(2.0 * E_C / E_L_tilde, 0.25);
    return m;
}

// Harmonic profile of each mode about the equilibrium: plasma frequency
// omega_p = sqrt(8 E_C E~_L) and zero-point fluctuations
// n_zpf = (E~_L/32 E_C)^(1/4), phi_zpf = (2 E_C/E~_L)^(1/4).
// Returns {resonator, atom}.
inline std::pair<ModeProfile, ModeProfile> mode_profiles(const DerivedEnergies& d,
                                                         const EquilibriumState& eq) {
    const DerivedEnergies loaded = d.E_L_r_tilde ? d : attach_equilibrium(d, eq);
    return {make_profile(loaded.E_C_r, loaded.loaded_E_L_r(), "resonator"),
            make_profile(loaded.E_C_a, loaded.loaded_E_L_a(), "atom")};
}

// ---------------------------------------------------------------------------
// Validity report
// ---------------------------------------------------------------------------

struct ValidityCheck {
    bool ok;           // ratio below threshold
    double ratio;      // the dimensionless ratio that must be small
    double threshold;  // "small" cut-off used
    double margin;     // threshold / ratio (how comfortably the check passes)
};

struct ValidityReport {
    ValidityCheck resonator_heavy;  // E_C_r / E_L_r << 1 (phase is a good coordinate)
    ValidityCheck atom_heavy;       // E_C_a / E_J_a << 1
    ValidityCheck not_ultrastrong;  // (E_J_c/E~_L_a) / (2 phi_a_zpf/phi_r_zpf) < 1
    ValidityCheck lambda_small;     // |Lambda_a| << 1 (cubic dressing is perturbative)
    bool all_ok;
};

struct ValidityThresholds {
    double much_less = 0.1;        // "<<" cut
    double very_much_less = 0.01;  // ">>" heaviness cut
};

inline ValidityCheck make_check(double ratio, double threshold) {
    const double margin =
        ratio == 0.0 ? std::numeric_limits<double>::infinity() : threshold / ratio;
    return ValidityCheck{ratio < threshold, ratio, threshold, margin};
}

inline ValidityReport check_validity(const DerivedEnergies& d, const EquilibriumState& eq,
                                     const std::pair<ModeProfile, ModeProfile>& profiles,
                                     const ValidityThresholds& thresholds = {}) {
    const DerivedEnergies loaded = d.E_L_r_tilde ? d : attach_equilibrium(d, eq);
    const auto& [res, atom] = profiles;

    ValidityReport r{};
    r.resonator_heavy = make_check(loaded.E_C_r / loaded.E_L_r, thresholds.very_much_less);
    r.atom_heavy = make_check(loaded.E_C_a / loaded.E_J_a, thresholds.very_much_less);
    r.not_ultrastrong =
        make_check(std::abs(loaded.E_J_c) / loaded.loaded_E_L_a() /
                       (2.0 * atom.phi_zpf / res.phi_zpf),
                   thresholds.much_less);
    // Lambda_a = mu phi_a_zpf / 12 with mu = (E_J_a/E~_L_a) sin(phi_a_min).
    const double mu = loaded.E_J_a / loaded.loaded_E_L_a() * std::sin(eq.phi_a_min);
    r.lambda_small = make_check(std::abs(mu * atom.phi_zpf / 12.0), thresholds.much_less);
    r.all_ok = r.resonator_heavy.ok && r.atom_heavy.ok && r.not_ultrastrong.ok &&
               r.lambda_small.ok;
    return r;
}

}  // namespace sqc
