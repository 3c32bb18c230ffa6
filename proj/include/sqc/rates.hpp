#pragma once

// Interaction-rate layer: every bare and renormalized coupling rate,
// self-nonlinearity, anharmonicity, and effective frequency of the
// resonator--SQUID--phase-qubit system at a single bias point.
//
// Unit discipline: rate-like quantities are rate/2pi in MHz; frequencies are
// omega/2pi in GHz; dimensionless quantities say so. Energies entering the
// formulas are E/h in GHz (see circuit.hpp).

#include <cmath>
#include <string>
#include <vector>

#include "sqc/circuit.hpp"
#include "sqc/constants.hpp"

namespace sqc {

// Bare interaction rates between resonator (mode a in formulas, phase phi_r)
// and atom (mode b, phase phi_a), plus cubic/quartic self-nonlinearities.
// All fields in MHz.
struct BareRates {
    double g1c;  // capacitive one-photon coupling E_C_c n_r n_a
    double g1i;  // inductive one-photon coupling E_J_c phi_r phi_a cos(delta)
    double K0;   // bare cross-Kerr E_J_c phi_r^2 phi_a^2 cos(delta)
    double g2;   // two-photon coupling -(1/2) E_J_c phi_r^2 phi_a sin(delta)
    double g3;   // three-photon-type coupling -(1/6) E_J_c phi_r^3 phi_a cos(delta)
    double G2;   // conjugate two-photon coupling +(1/2) E_J_c phi_r phi_a^2 sin(delta)
    double G3;   // conjugate three-photon-type coupling -(1/6) E_J_c phi_r phi_a^3 cos(delta)
    double X_r;  // resonator cubic self-nonlinearity (1/6) E_J_c phi_r^3 sin(delta)
    double Y_r;  // resonator quartic self-nonlinearity (1/24) E_J_c phi_r^4 cos(delta)
    double X_a;  // atom cubic self-nonlinearity (1/6)(E_J_a sin phi_a - E_J_c sin delta) phi_a^3
    double Y_a;  // atom quartic self-nonlinearity (1/24)(E_J_a cos phi_a + E_J_c cos delta) phi_a^4
};

// Cubic-nonlinearity coefficient of the atom well and the derived
// Schrieffer-Wolff smallness parameter.
struct MuCoefficient {
    double mu;        // (E_J_a / E~_L_a) sin(phi_a_min), dimensionless
    double lambda_a;  // mu * phi_a_zpf / 12, dimensionless
};

struct Anharmonicities {
    double Xi_a;         // atom anharmonicity (MHz)
    double Xi_r;         // resonator anharmonicity (MHz)
    double Xi_r_approx;  // leading small-E_J_c approximation of Xi_r (MHz)
};

struct EffectiveFrequencies {
    double omega_r_tilde;  // resonator frequency in the effective model (GHz)
    double omega_a_tilde;  // atom frequency in the effective model (GHz)
};

// Renormalized rates entering the effective two-photon Hamiltonian
//   H/hbar = w~_r a'a + w~_a b'b - (Xi_a/2) b'^2 b^2 - K~ a'a b'b
//            - g~_2 (a'^2 b + b' a^2).
// Rates in MHz, frequencies in GHz, lambda/mu dimensionless.
struct RenormalizedRates {
    double mu;        // atom cubic coefficient
    double lambda_a;  // atom SW parameter mu phi_a_zpf / 12
    double lambda_r;  // resonator SW parameter X_r / omega_p_r
    double g1i_tilde;      // inductive coupling after cubic dressing
    double g_minus;        // g1c - g1i_tilde
    double g_plus;         // g1c + g1i_tilde
    double J;              // photon-number (optomechanical-like) coupling
    double F;              // dressed three-photon-type coupling
    double G2_tilde_minus; // dressed conjugate two-photon coupling, lower branch
    double G2_tilde_plus;  // dressed conjugate two-photon coupling, upper branch
    double K0X;     // K0 + 24 lambda_a g2 (cross-Kerr after atom-cubic dressing)
    double K_lin;   // cross-Kerr from the linear couplings
    double K_mix;   // cross-Kerr from linear x three-photon-type mixing
    double K_quad;  // cross-Kerr from the quadratic couplings
    double K_tilde; // total cross-Kerr K0X + K_lin + K_mix + K_quad
    double g2_tilde;  // two-photon coupling with all corrections
    double Xi_a;      // atom anharmonicity (MHz)
    double Xi_r;      // resonator anharmonicity (MHz)
    double omega_r_tilde;  // GHz
    double omega_a_tilde;  // GHz
};

// Dimensionless perturbation-theory parameters of the two-step
// Schrieffer-Wolff elimination; all must stay well below 1.
struct SmallParameters {
    double lambda_minus, lambda_plus;  // g_-/(w_a - w_r), g_+/(w_a + w_r)
    double zeta_minus, zeta_plus;      // F/(w_a -+ w_r - Xi_a)
    double lambda_res;                 // -2 g_2 / w_a
    double lambda_atom;                // -2 J / w_r
    double lambda_2;                   // g_2 / (w_a + 2 w_r)
    double eta_minus, eta_plus;        // G~_2^-+ / (2 w_a -+ w_r - Xi_a)
    double lambda_prime_minus, lambda_prime_plus;  // lambda_-+ Xi_a/(w_a -+ w_r - Xi_a)
    std::vector<std::string> warnings;  // any |value| >= 0.3 strains perturbation theory
};

// ---------------------------------------------------------------------------
// Bare rates
// ---------------------------------------------------------------------------

inline BareRates bare_rates(const DerivedEnergies& d, const EquilibriumState& eq,
                            const std::pair<ModeProfile, ModeProfile>& profiles) {
    const auto& [res, atom] = profiles;
    const double pr = res.phi_zpf, pa = atom.phi_zpf;
    const double nr = res.n_zpf, na = atom.n_zpf;
    const double sd = std::sin(eq.delta), cd = std::cos(eq.delta);
    const double ej = d.E_J_c;

    BareRates b{};
    b.g1c = ghz_to_mhz(d.E_C_c * nr * na);
    b.g1i = ghz_to_mhz(ej * pr * pa * cd);
    b.K0 = ghz_to_mhz(ej * pr * pr * pa * pa * cd);
    b.g2 = ghz_to_mhz(-0.5 * ej * pr * pr * pa * sd);
    b.g3 = ghz_to_mhz(-(1.0 / 6.0) * ej * pr * pr * pr * pa * cd);
    b.G2 = ghz_to_mhz(0.5 * ej * pr * pa * pa * sd);
    b.G3 = ghz_to_mhz(-(1.0 / 6.0) * ej * pr * pa * pa * pa * cd);
    b.X_r = ghz_to_mhz((1.0 / 6.0) * ej * pr * pr * pr * sd);
    b.Y_r = ghz_to_mhz((1.0 / 24.0) * ej * pr * pr * pr * pr * cd);
    const double sa = std::sin(eq.phi_a_min), ca = std::cos(eq.phi_a_min);
    b.X_a = ghz_to_mhz((1.0 / 6.0) * (d.E_J_a * sa - ej * sd) * pa * pa * pa);
    b.Y_a = ghz_to_mhz((1.0 / 24.0) * (d.E_J_a * ca + ej * cd) * pa * pa * pa * pa);
    return b;
}

// ---------------------------------------------------------------------------
// Cubic coefficient and SW parameter
// ---------------------------------------------------------------------------

// mu = (E_J_a/E~_L_a) sin(phi_a_min) characterizes the cubic tilt of the
// metastable well (the coupler-induced cubic term is dropped, which is the
// approximation that makes the inductive-coupling zero condition
// cot(delta) = (5/6) mu phi_a_zpf^2 exact). Lambda_a = mu phi_a_zpf / 12.
inline MuCoefficient mu_coefficient(const DerivedEnergies& d, const EquilibriumState& eq) {
    const DerivedEnergies loaded = d.E_L_a_tilde ? d : attach_equilibrium(d, eq);
    const double elt = loaded.loaded_E_L_a();
    if (!(elt > 0.0)) throw unstable_mode_error("E~_L_a must be positive for mu");
    const double mu = loaded.E_J_a / elt * std::sin(eq.phi_a_min);
    const double phi_zpf = std::pow(2.0 * loaded.E_C_a / elt, 0.25);
    return MuCoefficient{mu, mu * phi_zpf / 12.0};
}

// Alternative expression of the same SW parameter through the full cubic
// rate, Lambda_a = X_a / omega_p_a. Exactly equal to mu phi_a_zpf/12 at
// E_J_c = 0; agrees to a few percent when coupled. Used as a cross-check.
inline double lambda_a_exact(const BareRates& bare,
                             const std::pair<ModeProfile, ModeProfile>& profiles) {
    return mhz_to_ghz(bare.X_a) / profiles.second.omega_p;
}

// ---------------------------------------------------------------------------
// Anharmonicities
// ---------------------------------------------------------------------------

// Xi = E_C [ (5/3) m^2 + (E~_L - E_L)/E~_L ] for each mode, where m is the
// relative cubic strength: m_a = (E_J_a sin phi_a - E_J_c sin delta)/E~_L_a
// and m_r = E_J_c sin delta / E~_L_r. At equilibrium m equals
// (E_L/E~_L)(phi - phi_bias), so this matches the closed form quoted for the
// atom; the sine-based form stays meaningful for frozen-fluctuation sweeps.
inline Anharmonicities anharmonicities(const DerivedEnergies& d, const EquilibriumState& eq,
                                       const CircuitParameters& params) {
    (void)params;  // bias already encoded in eq; kept for signature stability
    const DerivedEnergies loaded = d.E_L_a_tilde ? d : attach_equilibrium(d, eq);
    const double elt_a = loaded.loaded_E_L_a(), elt_r = loaded.loaded_E_L_r();
    const double sd = std::sin(eq.delta), cd = std::cos(eq.delta);

    Anharmonicities x{};
    const double m_a = (d.E_J_a * std::sin(eq.phi_a_min) - d.E_J_c * sd) / elt_a;
    x.Xi_a = ghz_to_mhz(loaded.E_C_a * ((5.0 / 3.0) * m_a * m_a + (elt_a - d.E_L_a) / elt_a));
    const double m_r = d.E_J_c * sd / elt_r;
    x.Xi_r = ghz_to_mhz(loaded.E_C_r * ((5.0 / 3.0) * m_r * m_r + (elt_r - d.E_L_r) / elt_r));
    const double r = d.E_J_c / d.E_L_r;
    x.Xi_r_approx = ghz_to_mhz(loaded.E_C_r * ((5.0 / 3.0) * r * r * sd * sd + r * cd));
    return x;
}

// ---------------------------------------------------------------------------
// Effective frequencies
// ---------------------------------------------------------------------------

// omega~_r = omega_p_r - K0X/2 and omega~_a = omega_p_a - Xi_a - K0X/2
// (lowest-transition frequencies of the effective model).
inline EffectiveFrequencies effective_frequencies(
    const std::pair<ModeProfile, ModeProfile>& profiles, double Xi_a_mhz, double K0X_mhz) {
    EffectiveFrequencies f{};
    f.omega_r_tilde = profiles.first.omega_p - 0.5 * mhz_to_ghz(K0X_mhz);
    f.omega_a_tilde = profiles.second.omega_p - mhz_to_ghz(Xi_a_mhz) - 0.5 * mhz_to_ghz(K0X_mhz);
    return f;
}

// Optional higher-order variant: add the second-order dispersive and
// Bloch-Siegert shifts of the linear couplings on top of the quoted
// approximation. Not used by the standard pipeline.
inline EffectiveFrequencies effective_frequencies_dressed(const EffectiveFrequencies& f,
                                                          double g_minus_mhz,
                                                          double g_plus_mhz) {
    const double d1 = ghz_to_mhz(f.omega_a_tilde - f.omega_r_tilde);
    const double d2 = ghz_to_mhz(f.omega_a_tilde + f.omega_r_tilde);
    EffectiveFrequencies out = f;
    out.omega_r_tilde -= mhz_to_ghz(g_minus_mhz * g_minus_mhz / d1 + g_plus_mhz * g_plus_mhz / d2);
    out.omega_a_tilde += mhz_to_ghz(g_minus_mhz * g_minus_mhz / d1 - g_plus_mhz * g_plus_mhz / d2);
    return out;
}

// ---------------------------------------------------------------------------
// Renormalized rates
// ---------------------------------------------------------------------------

namespace detail {

// Perturbative denominators inside the 1 MHz guard band would silently blow
// up sweep outputs; fail loudly instead, naming the term.
inline double guarded(double denom_mhz, const char* term) {
    if (std::abs(denom_mhz) < 1.0)
        throw near_degenerate_denominator_error(
            std::string("denominator '") + term + "' inside guard band: " +
            std::to_string(denom_mhz) + " MHz");
    return denom_mhz;
}

}  // namespace detail

// Assemble every renormalized rate of the effective model. The frequencies
// argument selects the denominators (pass the effective frequencies for the
// standard pipeline, or plasma frequencies for a sensitivity check).
inline RenormalizedRates renormalized_rates(const BareRates& bare,
                                            const std::pair<ModeProfile, ModeProfile>& profiles,
                                            const MuCoefficient& mu,
                                            const Anharmonicities& anh,
                                            const EffectiveFrequencies& freqs) {
    const double lam = mu.lambda_a;
    if (!(std::abs(lam) < 1.0))
        throw invalid_parameters_error("|lambda_a| = " + std::to_string(std::abs(lam)) +
                                       " >= 1: cubic dressing is non-perturbative");

    RenormalizedRates r{};
    r.mu = mu.mu;
    r.lambda_a = lam;
    r.lambda_r = mhz_to_ghz(bare.X_r) / profiles.first.omega_p;
    r.Xi_a = anh.Xi_a;
    r.Xi_r = anh.Xi_r;
    r.omega_r_tilde = freqs.omega_r_tilde;
    r.omega_a_tilde = freqs.omega_a_tilde;

    // Atom-cubic dressing of the couplings.
    r.g1i_tilde = bare.g1i - 20.0 * lam * bare.G2;
    r.g_minus = bare.g1c - r.g1i_tilde;
    r.g_plus = bare.g1c + r.g1i_tilde;
    r.J = bare.G2 + 6.0 * lam * bare.g1i;
    r.F = 3.0 * bare.G3 + 20.0 * lam * bare.G2;
    r.G2_tilde_minus = bare.G2 - 2.0 * lam * (bare.g1i - 2.0 * bare.g1c);
    r.G2_tilde_plus = bare.G2 - 2.0 * lam * (bare.g1i + 2.0 * bare.g1c);
    r.K0X = bare.K0 + 24.0 * lam * bare.g2;

    const double wr = ghz_to_mhz(freqs.omega_r_tilde);
    const double wa = ghz_to_mhz(freqs.omega_a_tilde);
    const double xi = anh.Xi_a;

    // Cross-Kerr from the linear couplings (vanishes as Xi_a -> 0: a linear
    // coupling between two harmonic modes produces no Kerr term).
    const double d1 = detail::guarded(wa - wr, "K_lin: omega_a - omega_r");
    const double d1x = detail::guarded(wa - wr - xi, "K_lin: omega_a - omega_r - Xi_a");
    const double d2 = detail::guarded(wa + wr, "K_lin: omega_a + omega_r");
    const double d2x = detail::guarded(wa + wr - xi, "K_lin: omega_a + omega_r - Xi_a");
    r.K_lin = 2.0 * xi * r.g_minus * r.g_minus / (d1 * d1x) +
              2.0 * xi * r.g_plus * r.g_plus / (d2 * d2x);

    // Mixing of the linear couplings with the dressed three-photon-type rate.
    r.K_mix = 4.0 * (r.g_minus / d1 + r.g_plus / d2) * r.F;

    // Quadratic couplings.
    const double q1 = detail::guarded(wa + 2.0 * wr, "K_quad: omega_a + 2 omega_r");
    const double q2 = detail::guarded(2.0 * wa - wr, "K_quad: 2 omega_a - omega_r");
    const double q3 = detail::guarded(2.0 * wa + wr, "K_quad: 2 omega_a + omega_r");
    r.K_quad = 4.0 * bare.g2 * bare.g2 / q1 + 16.0 * bare.g2 * bare.g2 * xi / (wa * wa) +
               4.0 * r.G2_tilde_minus * r.G2_tilde_minus / q2 +
               4.0 * r.G2_tilde_plus * r.G2_tilde_plus / q3;

    r.K_tilde = r.K0X + r.K_lin + r.K_mix + r.K_quad;

    // Two-photon rate: inside these corrections the one-photon inductive rate
    // can be taken without renormalization, so the bare combinations
    // g1c -+ g1i appear here (unlike g_minus/g_plus above).
    const double gmb = bare.g1c - bare.g1i;
    const double gpb = bare.g1c + bare.g1i;
    const double phi_a = profiles.second.phi_zpf;
    r.g2_tilde = bare.g2 - 2.0 * gmb * r.J / wr + 2.0 * gpb * bare.G2 / (3.0 * wr) -
                 mu.mu * phi_a * gpb * (bare.g1i - 2.0 * bare.g1c) / (9.0 * wr);
    return r;
}

// ---------------------------------------------------------------------------
// Small parameters
// ---------------------------------------------------------------------------

inline SmallParameters small_parameters(const RenormalizedRates& rates,
                                        const EffectiveFrequencies& freqs, double Xi_a_mhz) {
    const double wr = ghz_to_mhz(freqs.omega_r_tilde);
    const double wa = ghz_to_mhz(freqs.omega_a_tilde);
    const double xi = Xi_a_mhz;

    auto ratio = [](double num, double den, const char* name) {
        if (std::abs(den) < 1e-6)
            throw near_degenerate_denominator_error(std::string("small parameter '") + name +
                                                    "' has a degenerate denominator");
        return num / den;
    };

    SmallParameters s{};
    s.lambda_minus = ratio(rates.g_minus, wa - wr, "lambda_minus");
    s.lambda_plus = ratio(rates.g_plus, wa + wr, "lambda_plus");
    s.zeta_minus = ratio(rates.F, wa - wr - xi, "zeta_minus");
    s.zeta_plus = ratio(rates.F, wa + wr - xi, "zeta_plus");
    s.lambda_res = ratio(-2.0 * rates.g2_tilde, wa, "lambda_res");
    s.lambda_atom = ratio(-2.0 * rates.J, wr, "lambda_atom");
    s.lambda_2 = ratio(rates.g2_tilde, wa + 2.0 * wr, "lambda_2");
    s.eta_minus = ratio(rates.G2_tilde_minus, 2.0 * wa - wr - xi, "eta_minus");
    s.eta_plus = ratio(rates.G2_tilde_plus, 2.0 * wa + wr - xi, "eta_plus");
    s.lambda_prime_minus = s.lambda_minus * ratio(xi, wa - wr - xi, "lambda_prime_minus");
    s.lambda_prime_plus = s.lambda_plus * ratio(xi, wa + wr - xi, "lambda_prime_plus");

    const std::pair<const char*, double> all[] = {
        {"lambda_minus", s.lambda_minus}, {"lambda_plus", s.lambda_plus},
        {"zeta_minus", s.zeta_minus},     {"zeta_plus", s.zeta_plus},
        {"lambda_res", s.lambda_res},     {"lambda_atom", s.lambda_atom},
        {"lambda_2", s.lambda_2},         {"eta_minus", s.eta_minus},
        {"eta_plus", s.eta_plus},         {"lambda_prime_minus", s.lambda_prime_minus},
        {"lambda_prime_plus", s.lambda_prime_plus}};
    for (const auto& [name, v] : all) {
        if (!(std::abs(v) < 1.0))
            throw invalid_parameters_error(std::string("small parameter ") + name + " = " +
                                           std::to_string(v) + " is not < 1");
        if (std::abs(v) >= 0.3)
            s.warnings.push_back(std::string(name) + " = " + std::to_string(v) +
                                 " strains perturbation theory");
    }
    return s;
}

// ---------------------------------------------------------------------------
// Photon-number bound
// ---------------------------------------------------------------------------

// Largest resonator photon number for which the nonlinearity-induced
// frequency pull n_r * Xi_r stays below the two-photon rate, from the
// linearized ratio around the Xi_r zero at
//   delta_0 = -(pi/2 + alpha/2), alpha = 5 E_J_c / (3 E_L_r):
//   n_max = (E_L_r/E_C_r) phi_r_zpf^2 phi_a_zpf / (2 |delta - delta_0|).
// The bound diverges at delta = delta_0 (Xi_r vanishes there) and is
// undefined inside a small guard band around it.
inline double photon_number_bound(const DerivedEnergies& d, const EquilibriumState& eq,
                                  const std::pair<ModeProfile, ModeProfile>& profiles) {
    const double alpha = 5.0 * d.E_J_c / (3.0 * d.E_L_r);
    const double zero = 0.5 * pi + 0.5 * alpha;
    // Distance to the nearest zero of Xi_r, mod 2 pi, either sign branch.
    const double dist = std::min(std::abs(std::remainder(eq.delta - zero, 2.0 * pi)),
                                 std::abs(std::remainder(eq.delta + zero, 2.0 * pi)));
    constexpr double guard = 1e-6;  // rad
    if (dist < guard)
        throw bound_undefined_error(
            "bias delta = " + std::to_string(eq.delta) +
            " rad is inside the guard band around the resonator-anharmonicity zero");
    const double pr = profiles.first.phi_zpf, pa = profiles.second.phi_zpf;
    return d.E_L_r / d.E_C_r * pr * pr * pa / (2.0 * dist);
}

}  // namespace sqc
