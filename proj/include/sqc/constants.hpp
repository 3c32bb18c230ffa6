#pragma once

// Physical constants, unit conventions, and the library-wide error taxonomy.
//
// Canonical units everywhere in this library:
//   * energies as E/h in GHz,
//   * interaction rates and level shifts as rate/2pi in MHz,
//   * phases in radians,
//   * fluxes in units of the flux quantum Phi_0.
// Struct fields note their unit whenever it is not obvious from the name.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sqc {

inline constexpr double pi = std::numbers::pi;

// SI defining constants (exact since the 2019 redefinition).
struct PhysicalConstants {
    double electron_charge = 1.602176634e-19;  // e (C)
    double planck = 6.62607015e-34;            // h (J s)
    double flux_quantum = 6.62607015e-34 / (2.0 * 1.602176634e-19);  // Phi_0 = h/2e (Wb)

    // Phi_0 = h/(2e) must hold to machine precision for the energy formulas
    // below to be mutually consistent.
    bool consistent() const {
        return std::abs(flux_quantum - planck / (2.0 * electron_charge)) <=
               1e-15 * flux_quantum;
    }

    // Energy in joules -> E/h in GHz.
    double to_ghz(double e_joule) const { return e_joule / planck * 1e-9; }
};

inline double ghz_to_mhz(double e_ghz) { return e_ghz * 1e3; }
inline double mhz_to_ghz(double e_mhz) { return e_mhz * 1e-3; }

// ---------------------------------------------------------------------------
// Error taxonomy. Every failure mode thrown by the library derives from
// sqc::error so callers can map the family to a process exit code.
// ---------------------------------------------------------------------------

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raw inputs violate their invariants (non-positive element values, bad grid).
struct invalid_parameters_error : error {
    using error::error;
};

// An iterative solver exhausted its budget; message carries the last iterate.
struct convergence_error : error {
    using error::error;
};

// The biased potential has no shallow metastable well to work in.
struct no_metastable_well_error : error {
    using error::error;
};

// A loaded inductive energy came out non-positive: the mode is not a
// harmonic-oscillator-like degree of freedom at this bias.
struct unstable_mode_error : error {
    using error::error;
};

// A perturbative denominator fell inside the guard band; the message names
// the offending term.
struct near_degenerate_denominator_error : error {
    using error::error;
};

// The closed-form photon-number bound is undefined at this bias.
struct bound_undefined_error : error {
    using error::error;
};

// Discretization grid violates its contract (too few points, wells outside).
struct grid_error : error {
    using error::error;
};

// verify-style lookup of a name that is not registered.
struct degree_overflow_error : error {
    using error::error;
};

struct unknown_identity_error : error {
    using error::error;
};
struct unknown_quantity_error : error {
    using error::error;
};

// Configuration file / CLI argument problems.
struct config_error : error {
    using error::error;
};

}  // namespace sqc
