#pragma once

// 1D stationary Schrödinger solver for the (optionally coupler-perturbed)
// rf-SQUID potential: H = -4 E_C_a d^2/dphi^2 + U(phi), second-order central
// finite differences on a uniform grid with hard-wall boundaries, symmetric
// tridiagonal eigenproblem solved by deterministic Sturm bisection plus
// inverse iteration. Classifies the metastable-well ladder and extracts the
// numerical transition frequency and anharmonicity.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sqc/circuit.hpp"
#include "sqc/constants.hpp"

namespace sqc {

struct CouplerTerm {
    double E_J_c;      // coupler Josephson energy (GHz); may be negative
    double phi_r_min;  // resonator phase pinned at its equilibrium (rad)
    double flux_cpl;   // coupler bias (Phi_0)
};

struct PotentialSpec {
    double E_L_a;    // GHz
    double E_J_a;    // GHz
    double flux_ext; // Phi_0
    std::optional<CouplerTerm> coupler;

    double U(double phi) const {
        const double x = phi - 2.0 * pi * flux_ext;
        double u = 0.5 * E_L_a * x * x - E_J_a * std::cos(phi);
        if (coupler)
            u -= coupler->E_J_c * std::cos(coupler->phi_r_min - phi - pi * coupler->flux_cpl);
        return u;
    }

    void validate() const {
        if (!(E_L_a > 0.0) || !(E_J_a > 0.0))
            throw invalid_parameters_error("potential requires E_L_a, E_J_a > 0");
    }
};

struct Grid {
    double phi_min;  // rad
    double phi_max;  // rad
    int n_points;

    double spacing() const { return (phi_max - phi_min) / (n_points - 1); }
    double point(int j) const { return phi_min + spacing() * j; }

    void validate() const {
        if (!(phi_min < phi_max))
            throw grid_error("grid window is empty: [" + std::to_string(phi_min) + ", " +
                             std::to_string(phi_max) + "]");
        if (n_points < 512)
            throw grid_error("grid needs at least 512 points, got " +
                             std::to_string(n_points));
    }
};

struct EigenSolution {
    std::vector<double> energies;                   // ascending (GHz)
    std::vector<std::vector<double>> wavefunctions; // L2-normalized with grid weight
    Grid grid;
    std::optional<std::string> convergence_warning; // set when doubling the grid
                                                    // moves a requested level > 0.5 MHz
};

struct MetastableLevel {
    double energy;       // GHz
    double left_weight;  // integrated |psi|^2 left of the barrier
    bool metastable;     // energy below barrier_top and weight in the shallow well
};

struct MetastableLadder {
    double barrier_top;  // GHz
    double barrier_phi;  // rad
    std::vector<MetastableLevel> levels;  // every computed level, flagged
    int count;                 // number of metastable levels
    double omega_ge;           // E_e - E_g of the two lowest metastable levels (GHz)
    double anharmonicity_num;  // (E_e-E_g) - (E_f-E_e) (MHz)
};

// ---------------------------------------------------------------------------
// Tridiagonal eigenproblem: Sturm bisection + inverse iteration
// ---------------------------------------------------------------------------

namespace detail {

// Number of eigenvalues of the symmetric tridiagonal (diag, off) below x,
// via the Sturm sequence of the shifted LDL^T factorization.
inline int sturm_count(const std::vector<double>& diag, double off2, double x) {
    const double tiny = 1e-300;
    int count = 0;
    double q = diag[0] - x;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < diag.size(); ++i) {
        if (std::abs(q) < tiny) q = (q < 0.0 ? -tiny : tiny);
        q = diag[i] - x - off2 / q;
        if (q < 0.0) ++count;
    }
    return count;
}

// Lowest k eigenvalues by bisection on the Sturm count. Deterministic and
// order-exact: the count function cannot misorder levels.
inline std::vector<double> lowest_eigenvalues(const std::vector<double>& diag, double off,
                                              int k) {
    const double off2 = off * off;
    double lo = diag[0], hi = diag[0];
    for (double d : diag) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    lo -= 2.0 * std::abs(off) + 1.0;
    hi += 2.0 * std::abs(off) + 1.0;
    const double span = hi - lo;

    std::vector<double> vals(k);
    std::vector<double> lo_i(k, lo), hi_i(k, hi);
    for (int i = 0; i < k; ++i) {
        double a = lo_i[i], b = hi_i[i];
        while (b - a > 1e-13 * span + 1e-11) {
            const double mid = 0.5 * (a + b);
            const int c = sturm_count(diag, off2, mid);
            if (c >= i + 1)
                b = mid;
            else
                a = mid;
            // Narrow the brackets of the levels above while we are at it.
            for (int j = i + 1; j < k; ++j) {
                if (c >= j + 1)
                    hi_i[j] = std::min(hi_i[j], mid);
                else
                    lo_i[j] = std::max(lo_i[j], mid);
            }
        }
        vals[i] = 0.5 * (a + b);
        if (i + 1 < k) {
            lo_i[i + 1] = std::max(lo_i[i + 1], a);
        }
    }
    return vals;
}

// Solve (T - lambda I) x = b for tridiagonal T given by (diag, off) via the
// Thomas algorithm; near-zero pivots are nudged, which is the standard
// inverse-iteration safeguard.
inline void shifted_solve(const std::vector<double>& diag, double off, double lambda,
                          std::vector<double>& x) {
    const int n = static_cast<int>(diag.size());
    static thread_local std::vector<double> c, d;
    c.assign(n, 0.0);
    d.assign(n, 0.0);
    double piv = diag[0] - lambda;
    const double tiny = 1e-12 * (std::abs(lambda) + std::abs(off) + 1.0);
    if (std::abs(piv) < tiny) piv = (piv < 0.0 ? -tiny : tiny);
    c[0] = off / piv;
    d[0] = x[0] / piv;
    for (int i = 1; i < n; ++i) {
        piv = diag[i] - lambda - off * c[i - 1];
        if (std::abs(piv) < tiny) piv = (piv < 0.0 ? -tiny : tiny);
        c[i] = off / piv;
        d[i] = (x[i] - off * d[i - 1]) / piv;
    }
    x[n - 1] = d[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
}

inline void normalize(std::vector<double>& v, double weight) {
    double s = 0.0;
    for (double x : v) s += x * x;
    s = std::sqrt(s * weight);
    for (double& x : v) x /= s;
    // Deterministic sign: largest-magnitude component positive.
    const auto it = std::max_element(v.begin(), v.end(),
                                     [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (*it < 0.0)
        for (double& x : v) x = -x;
}

}  // namespace detail

struct SolveOptions {
    // Re-solve the eigenvalues on a doubled grid and attach a warning when a
    // requested level moves by more than 0.5 MHz. Cheap (values only).
    bool check_convergence = true;
};

inline EigenSolution solve_spectrum(const PotentialSpec& pot, double E_C_a, const Grid& grid,
                                    int k, const SolveOptions& options = {}) {
    pot.validate();
    grid.validate();
    if (!(E_C_a > 0.0)) throw invalid_parameters_error("E_C_a must be positive");
    if (k < 1 || k > grid.n_points / 4)
        throw invalid_parameters_error("requested " + std::to_string(k) +
                                       " levels; must be in [1, n_points/4] = [1, " +
                                       std::to_string(grid.n_points / 4) + "]");

    const int n = grid.n_points;
    const double h = grid.spacing();
    const double t = 4.0 * E_C_a / (h * h);  // hopping of the FD Laplacian

    std::vector<double> diag(n);
    for (int j = 0; j < n; ++j) diag[j] = 2.0 * t + pot.U(grid.point(j));
    const double off = -t;

    EigenSolution sol;
    sol.grid = grid;
    sol.energies = detail::lowest_eigenvalues(diag, off, k);

    // Inverse iteration per eigenvalue from a deterministic start vector.
    sol.wavefunctions.assign(k, {});
    for (int i = 0; i < k; ++i) {
        std::vector<double> v(n);
        for (int j = 0; j < n; ++j) v[j] = ((j * 2654435761u) % 1024) / 1024.0 - 0.5;
        for (int pass = 0; pass < 4; ++pass) {
            detail::shifted_solve(diag, off, sol.energies[i], v);
            detail::normalize(v, h);
        }
        sol.wavefunctions[i] = std::move(v);
    }
    // Near-degenerate pairs (tunnelling doublets) come out of inverse
    // iteration nearly parallel; Gram-Schmidt inside close clusters restores
    // orthogonality without disturbing well-separated states.
    for (int i = 1; i < k; ++i) {
        for (int j = i - 1; j >= 0 && sol.energies[i] - sol.energies[j] < 1e-4; --j) {
            double dot = 0.0;
            for (int m = 0; m < n; ++m) dot += sol.wavefunctions[i][m] * sol.wavefunctions[j][m];
            dot *= h;
            for (int m = 0; m < n; ++m) sol.wavefunctions[i][m] -= dot * sol.wavefunctions[j][m];
        }
        detail::normalize(sol.wavefunctions[i], h);
    }

    if (options.check_convergence) {
        Grid fine{grid.phi_min, grid.phi_max, 2 * n};
        const double hf = fine.spacing();
        const double tf = 4.0 * E_C_a / (hf * hf);
        std::vector<double> diag_f(2 * n);
        for (int j = 0; j < 2 * n; ++j) diag_f[j] = 2.0 * tf + pot.U(fine.point(j));
        const auto fine_vals = detail::lowest_eigenvalues(diag_f, -tf, k);
        double worst = 0.0;
        int worst_i = 0;
        for (int i = 0; i < k; ++i) {
            const double shift = std::abs(fine_vals[i] - sol.energies[i]);
            if (shift > worst) {
                worst = shift;
                worst_i = i;
            }
        }
        if (worst > 0.5e-3)
            sol.convergence_warning =
                "grid too coarse: level " + std::to_string(worst_i) + " moves by " +
                std::to_string(ghz_to_mhz(worst)) + " MHz when the grid is doubled";
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Metastable classification
// ---------------------------------------------------------------------------

namespace detail {

struct WellShape {
    double phi_meta, phi_global;  // the two deepest minima (meta = higher U)
    double barrier_phi, barrier_top;
};

// Locate the two deepest minima of U in the window and the barrier between
// them, by dense sampling plus parabolic refinement.
inline WellShape well_shape(const PotentialSpec& pot, double lo, double hi) {
    const int n_scan = 8192;
    const double h = (hi - lo) / (n_scan - 1);
    auto refine = [&](double x) {
        // One parabolic step through (x-h, x, x+h), then a compact golden
        // search to pin the extremum.
        double a = x - h, b = x + h;
        for (int it = 0; it < 80; ++it) {
            const double m1 = a + 0.381966 * (b - a);
            const double m2 = b - 0.381966 * (b - a);
            if (pot.U(m1) < pot.U(m2))
                b = m2;
            else
                a = m1;
        }
        return 0.5 * (a + b);
    };

    std::vector<double> minima;
    for (int j = 1; j + 1 < n_scan; ++j) {
        const double u0 = pot.U(lo + h * (j - 1));
        const double u1 = pot.U(lo + h * j);
        const double u2 = pot.U(lo + h * (j + 1));
        if (u1 <= u0 && u1 < u2) minima.push_back(refine(lo + h * j));
    }
    if (minima.size() < 2)
        throw no_metastable_well_error(
            "potential has fewer than two wells in the window; no interior barrier");
    std::sort(minima.begin(), minima.end(),
              [&](double a, double b) { return pot.U(a) < pot.U(b); });
    const double m_glob = minima[0];
    const double m_meta = minima[1];

    // Barrier: maximum of U strictly between the two wells.
    const double b_lo = std::min(m_glob, m_meta), b_hi = std::max(m_glob, m_meta);
    const int n_b = 4096;
    double best_phi = b_lo, best_u = -1e300;
    for (int j = 0; j <= n_b; ++j) {
        const double phi = b_lo + (b_hi - b_lo) * j / n_b;
        const double u = pot.U(phi);
        if (u > best_u) {
            best_u = u;
            best_phi = phi;
        }
    }
    // Golden search on -U around the sampled maximum.
    double a = best_phi - (b_hi - b_lo) / n_b, b = best_phi + (b_hi - b_lo) / n_b;
    for (int it = 0; it < 80; ++it) {
        const double m1 = a + 0.381966 * (b - a);
        const double m2 = b - 0.381966 * (b - a);
        if (pot.U(m1) > pot.U(m2))
            b = m2;
        else
            a = m1;
    }
    const double phi_b = 0.5 * (a + b);
    return WellShape{m_meta, m_glob, phi_b, pot.U(phi_b)};
}

}  // namespace detail

// Default discretization window: [phi_meta - 4, phi_global + 4] rad (or the
// mirror image when the shallow well sits right of the deep one), 4096 points.
inline Grid default_grid(const PotentialSpec& pot, int n_points = 4096) {
    const double phi_ext = 2.0 * pi * pot.flux_ext;
    const auto shape = detail::well_shape(pot, phi_ext - 2.0 * pi, phi_ext + 2.0 * pi);
    return Grid{std::min(shape.phi_meta, shape.phi_global) - 4.0,
                std::max(shape.phi_meta, shape.phi_global) + 4.0, n_points};
}

// Classify every computed level of `sol` against the barrier of `pot`:
// a level is metastable iff its energy lies below the barrier top and at
// least half of |psi|^2 sits on the shallow-well side. For a symmetric
// double well the tunnelling doublets carry weight 1/2 each, so they sit
// exactly on the classification boundary (and are counted as metastable by
// the >= comparison) — a documented boundary case.
inline MetastableLadder classify_metastable(const EigenSolution& sol, const PotentialSpec& pot,
                                            const Grid& grid) {
    if (grid.n_points != sol.grid.n_points || grid.phi_min != sol.grid.phi_min ||
        grid.phi_max != sol.grid.phi_max)
        throw grid_error("classification grid differs from the solution grid");
    const auto shape = detail::well_shape(pot, grid.phi_min, grid.phi_max);
    const double margin = 2.0;
    if (shape.phi_meta < grid.phi_min + margin || shape.phi_meta > grid.phi_max - margin ||
        shape.phi_global < grid.phi_min + margin || shape.phi_global > grid.phi_max - margin)
        throw grid_error("wells closer than 2 rad to the grid walls; widen the window");

    const bool meta_left = shape.phi_meta < shape.phi_global;
    const double h = grid.spacing();

    MetastableLadder ladder{};
    ladder.barrier_top = shape.barrier_top;
    ladder.barrier_phi = shape.barrier_phi;

    std::vector<double> meta_energies;
    for (std::size_t i = 0; i < sol.energies.size(); ++i) {
        double left = 0.0;
        const auto& psi = sol.wavefunctions[i];
        for (int j = 0; j < grid.n_points; ++j)
            if (grid.point(j) < shape.barrier_phi) left += psi[j] * psi[j] * h;
        const double shallow_side = meta_left ? left : 1.0 - left;
        const bool metastable = sol.energies[i] < shape.barrier_top && shallow_side >= 0.5;
        ladder.levels.push_back({sol.energies[i], left, metastable});
        if (metastable) meta_energies.push_back(sol.energies[i]);
    }
    ladder.count = static_cast<int>(meta_energies.size());
    ladder.omega_ge =
        meta_energies.size() >= 2 ? meta_energies[1] - meta_energies[0] : 0.0;
    ladder.anharmonicity_num =
        meta_energies.size() >= 3
            ? ghz_to_mhz((meta_energies[1] - meta_energies[0]) -
                         (meta_energies[2] - meta_energies[1]))
            : 0.0;
    return ladder;
}

// Numerical atom frequency: E_e - E_g of the metastable well of the
// coupler-perturbed potential (the -K0X/2 shift is applied by the caller).
// The eigenvalue budget is sized by a Sturm count below the barrier so the
// classification sees every sub-barrier state of the deep well too.
inline double numerical_atom_frequency(const PotentialSpec& pot, double E_C_a,
                                       const Grid& grid) {
    if (!pot.coupler)
        throw invalid_parameters_error(
            "numerical_atom_frequency expects a coupler-perturbed potential");
    const auto shape = detail::well_shape(pot, grid.phi_min, grid.phi_max);

    const int n = grid.n_points;
    const double h = grid.spacing();
    const double t = 4.0 * E_C_a / (h * h);
    std::vector<double> diag(n);
    for (int j = 0; j < n; ++j) diag[j] = 2.0 * t + pot.U(grid.point(j));
    const int below = detail::sturm_count(diag, t * t, shape.barrier_top);
    const int k = std::min(below + 2, n / 4);

    const auto sol = solve_spectrum(pot, E_C_a, grid, k, SolveOptions{false});
    const auto ladder = classify_metastable(sol, pot, grid);
    if (ladder.count < 2)
        throw no_metastable_well_error(
            "fewer than two metastable levels; cannot form a transition frequency");
    return ladder.omega_ge;
}

// ---------------------------------------------------------------------------
// Perturbative ladder
// ---------------------------------------------------------------------------

// Quartic-oscillator ladder of the metastable well, relative to the well
// minimum: E_n = n (omega_p_a - Xi_a) - Xi_a n(n-1)/2 + zero-point, with the
// zero-point energy omega/2 - 11 X^2/omega - 3 Y from second-order treatment
// of the cubic term.
inline std::vector<double> perturbative_ladder(const DerivedEnergies& d,
                                               const EquilibriumState& eq,
                                               const std::pair<ModeProfile, ModeProfile>& profiles,
                                               int n_levels) {
    if (n_levels < 2) throw invalid_parameters_error("perturbative ladder needs >= 2 levels");
    const auto& atom = profiles.second;
    const double w = atom.omega_p;
    const double pa = atom.phi_zpf;
    const double sd = std::sin(eq.delta), cd = std::cos(eq.delta);
    const double X = (1.0 / 6.0) * (d.E_J_a * std::sin(eq.phi_a_min) - d.E_J_c * sd) * pa * pa * pa;
    const double Y =
        (1.0 / 24.0) * (d.E_J_a * std::cos(eq.phi_a_min) + d.E_J_c * cd) * pa * pa * pa * pa;
    const double xi = 60.0 * (X / w) * X + 12.0 * Y;
    const double zero_point = 0.5 * w - 11.0 * X * X / w - 3.0 * Y;

    std::vector<double> ladder(n_levels);
    for (int n = 0; n < n_levels; ++n)
        ladder[n] = n * (w - xi) - 0.5 * xi * n * (n - 1) + zero_point;
    return ladder;
}

// Barrier height of the quartic Taylor model of the same well (relative to
// the well minimum): the outer stationary point of
// U4(s) = E~_L s^2/2 - E_J sin(phi) s^3/6 - E_J cos(phi) s^4/24.
inline double perturbative_barrier(const DerivedEnergies& d, const EquilibriumState& eq) {
    const DerivedEnergies loaded = d.E_L_a_tilde ? d : attach_equilibrium(d, eq);
    const double elt = loaded.loaded_E_L_a();
    const double b = d.E_J_a * std::sin(eq.phi_a_min) - d.E_J_c * std::sin(eq.delta);
    const double c = d.E_J_a * std::cos(eq.phi_a_min) + d.E_J_c * std::cos(eq.delta);
    // U4'(s)/s = E~_L - (b/2) s - (c/6) s^2 = 0, outer (positive) root.
    const double disc = 0.25 * b * b + (2.0 / 3.0) * c * elt;
    if (!(disc > 0.0) || !(c > 0.0))
        throw no_metastable_well_error("quartic well model has no outer barrier");
    const double s = (-0.5 * b + std::sqrt(disc)) / (c / 3.0);
    return 0.5 * elt * s * s - b * s * s * s / 6.0 - c * s * s * s * s / 24.0;
}

}  // namespace sqc
