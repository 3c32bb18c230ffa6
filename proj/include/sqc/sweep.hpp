#pragma once

// Flux-bias sweeps of the full design pipeline: sequential equilibrium
// continuation (Newton seeded from the previous point, so the solver never
// hops wells), parallel rate evaluation, optional numerical atom frequency on
// a decimated sub-grid with monotone cubic fill-in, and feature extraction
// (zeros, extrema, two-photon resonance windows) by refinement on the
// continuous pipeline rather than on the sampled rows.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sqc/rateset.hpp"
#include "sqc/schrodinger.hpp"

namespace sqc {

enum class SweepAxis { flux_cpl, flux_ext };

inline std::string axis_name(SweepAxis axis) {
    return axis == SweepAxis::flux_cpl ? "flux_cpl" : "flux_ext";
}

struct SweepSpec {
    SweepAxis axis = SweepAxis::flux_cpl;
    double start = 0.0;  // Phi_0
    double stop = 0.0;   // Phi_0
    int n_points = 0;
    bool freeze_zpf = false;
    CircuitParameters base;
    // 0 disables the eigen-solver; k > 0 solves every k-th point (plus the
    // last) and fills the rest by monotone cubic interpolation.
    int numeric_every = 0;

    void validate() const {
        if (!(start < stop)) throw invalid_parameters_error("sweep range is empty");
        if (n_points < 2) throw invalid_parameters_error("sweep needs at least 2 points");
        if (numeric_every < 0)
            throw invalid_parameters_error("numeric decimation must be non-negative");
        base.validate();
    }
    double flux_at(int i) const { return start + (stop - start) * i / (n_points - 1); }
};

struct SweepRow {
    double flux = 0.0;
    std::optional<RateSet> rates;          // absent on pipeline failure
    std::optional<double> omega_a_num;     // effective numerical atom frequency (GHz)
    bool omega_a_num_interpolated = false; // filled between decimated solves
    std::string error;                     // pipeline failure message, empty if ok
    std::vector<std::string> flags;        // non-fatal notes (numeric failures, warnings)

    bool ok() const { return error.empty(); }
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepRow> rows;
};

struct Zero {
    std::string quantity;
    double flux;
};

struct Extremum {
    std::string quantity;
    double flux;
    double value;
};

struct ResonanceWindow {
    double flux_lo;
    double flux_hi;
};

struct FeatureSet {
    std::vector<Zero> zeros;
    std::vector<Extremum> extrema;
    std::vector<ResonanceWindow> resonance_windows;
};

namespace detail {

inline CircuitParameters apply_axis(CircuitParameters p, SweepAxis axis, double flux) {
    (axis == SweepAxis::flux_cpl ? p.flux_cpl : p.flux_ext) = flux;
    return p;
}

inline int sweep_thread_count() {
    if (const char* env = std::getenv("SQUIDCOUPLER_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Fritsch-Carlson monotone cubic through (x, y); never overshoots the data.
struct MonotoneCubic {
    std::vector<double> x, y, m;

    MonotoneCubic(std::vector<double> xs, std::vector<double> ys)
        : x(std::move(xs)), y(std::move(ys)) {
        const std::size_t n = x.size();
        m.assign(n, 0.0);
        if (n < 2) return;
        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        m[0] = d[0];
        m[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i)
            m[i] = (d[i - 1] * d[i] > 0.0) ? 0.5 * (d[i - 1] + d[i]) : 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) {
                m[i] = m[i + 1] = 0.0;
                continue;
            }
            const double a = m[i] / d[i], b = m[i + 1] / d[i];
            const double s = a * a + b * b;
            if (s > 9.0) {
                const double tau = 3.0 / std::sqrt(s);
                m[i] = tau * a * d[i];
                m[i + 1] = tau * b * d[i];
            }
        }
    }

    double operator()(double xq) const {
        if (x.size() == 1) return y[0];
        std::size_t i = 0;
        while (i + 2 < x.size() && xq > x[i + 1]) ++i;
        const double h = x[i + 1] - x[i];
        const double t = (xq - x[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y[i] + (t3 - 2 * t2 + t) * h * m[i] +
               (-2 * t3 + 3 * t2) * y[i + 1] + (t3 - t2) * h * m[i + 1];
    }
};

// Effective numerical atom frequency for one pipeline point: metastable-well
// E_e - E_g of the coupler-perturbed potential, minus the same two-photon
// Lamb shift the analytic frequency carries.
inline double effective_numeric_frequency(const RateSet& rs) {
    const PotentialSpec pot{rs.energies.E_L_a, rs.energies.E_J_a, rs.params.flux_ext,
                            CouplerTerm{rs.energies.E_J_c, rs.eq.phi_r_min,
                                        rs.params.flux_cpl}};
    const Grid grid = default_grid(pot);
    const double raw = numerical_atom_frequency(pot, rs.energies.E_C_a, grid);
    return raw - 0.5 * mhz_to_ghz(rs.renorm.K0X);
}

}  // namespace detail

// Named read-outs of a computed rate set, shared by feature finding and the
// table writers. All rates in MHz, frequencies in GHz.
inline const std::map<std::string, std::function<double(const RateSet&)>>&
quantity_accessors() {
    static const std::map<std::string, std::function<double(const RateSet&)>> reg = {
        {"g1c", [](const RateSet& r) { return r.bare.g1c; }},
        {"g1i", [](const RateSet& r) { return r.bare.g1i; }},
        {"g1i_tilde", [](const RateSet& r) { return r.renorm.g1i_tilde; }},
        {"g_minus", [](const RateSet& r) { return r.renorm.g_minus; }},
        {"g_plus", [](const RateSet& r) { return r.renorm.g_plus; }},
        {"g2", [](const RateSet& r) { return r.bare.g2; }},
        {"g2_tilde", [](const RateSet& r) { return r.renorm.g2_tilde; }},
        {"g3", [](const RateSet& r) { return r.bare.g3; }},
        {"G2", [](const RateSet& r) { return r.bare.G2; }},
        {"G3", [](const RateSet& r) { return r.bare.G3; }},
        {"F", [](const RateSet& r) { return r.renorm.F; }},
        {"J", [](const RateSet& r) { return r.renorm.J; }},
        {"K0", [](const RateSet& r) { return r.bare.K0; }},
        {"K0X", [](const RateSet& r) { return r.renorm.K0X; }},
        {"K_tilde", [](const RateSet& r) { return r.renorm.K_tilde; }},
        {"Xi_a", [](const RateSet& r) { return r.anh.Xi_a; }},
        {"Xi_r", [](const RateSet& r) { return r.anh.Xi_r; }},
        {"mu", [](const RateSet& r) { return r.mu.mu; }},
        {"omega_r_tilde", [](const RateSet& r) { return r.freqs.omega_r_tilde; }},
        {"omega_a_tilde", [](const RateSet& r) { return r.freqs.omega_a_tilde; }},
        {"omega_r_tilde_design", [](const RateSet& r) { return r.omega_r_tilde_design; }},
        {"detuning", [](const RateSet& r) { return r.detuning; }},
        {"detuning_design", [](const RateSet& r) { return r.detuning_design; }},
    };
    return reg;
}

inline double quantity_value(const RateSet& rs, const std::string& name) {
    const auto& reg = quantity_accessors();
    const auto it = reg.find(name);
    if (it == reg.end()) throw unknown_quantity_error("unknown sweep quantity: " + name);
    return it->second(rs);
}

inline SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    const int n = spec.n_points;

    SweepResult result;
    result.spec = spec;
    result.rows.assign(n, {});
    for (int i = 0; i < n; ++i) result.rows[i].flux = spec.flux_at(i);

    // Pass 1 (sequential): equilibrium continuation along the sweep. Each
    // point seeds Newton with the previous solution so the solver tracks one
    // branch instead of hopping wells.
    std::vector<std::optional<std::pair<double, double>>> seeds(n);
    std::optional<std::pair<double, double>> carry;
    for (int i = 0; i < n; ++i) {
        const auto p = detail::apply_axis(spec.base, spec.axis, result.rows[i].flux);
        try {
            const auto d = derive_energies(p);
            const EquilibriumState eq = solve_equilibrium(d, p, carry);
            seeds[i] = {eq.phi_r_min, eq.phi_a_min};
            carry = seeds[i];
        } catch (const sqc::error& e) {
            result.rows[i].error = e.what();  // recorded; no fabricated values
        }
    }

    // Pass 2 (parallel): full rate pipeline per point over the read-only base.
    const RateSetOptions opts{spec.freeze_zpf};
    {
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                auto& row = result.rows[i];
                if (!row.ok()) continue;
                const auto p = detail::apply_axis(spec.base, spec.axis, row.flux);
                try {
                    row.rates = compute_rate_set(p, opts, seeds[i]);
                    for (const auto& w : row.rates->small.warnings)
                        row.flags.push_back("small-parameter: " + w);
                } catch (const sqc::error& e) {
                    row.error = e.what();
                }
            }
        };
        std::vector<std::thread> pool;
        const int n_threads = std::min(detail::sweep_thread_count(), n);
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Pass 3 (parallel): decimated eigen-solves for the numerical atom
    // frequency; pass 4 fills between them with a monotone cubic.
    if (spec.numeric_every > 0) {
        std::vector<int> nodes;
        for (int i = 0; i < n; ++i)
            if (i % spec.numeric_every == 0 || i == n - 1) nodes.push_back(i);

        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t j = next.fetch_add(1); j < nodes.size();
                 j = next.fetch_add(1)) {
                auto& row = result.rows[nodes[j]];
                if (!row.ok() || !row.rates) continue;
                try {
                    row.omega_a_num = detail::effective_numeric_frequency(*row.rates);
                } catch (const sqc::error& e) {
                    row.flags.push_back(std::string("numeric frequency failed: ") + e.what());
                }
            }
        };
        std::vector<std::thread> pool;
        const int n_threads =
            std::min<std::size_t>(detail::sweep_thread_count(), nodes.size());
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();

        std::vector<double> xs, ys;
        for (int i : nodes)
            if (result.rows[i].omega_a_num) {
                xs.push_back(result.rows[i].flux);
                ys.push_back(*result.rows[i].omega_a_num);
            }
        if (xs.size() >= 2) {
            const detail::MonotoneCubic fit(xs, ys);
            for (auto& row : result.rows)
                if (row.ok() && row.rates && !row.omega_a_num &&
                    row.flux >= xs.front() && row.flux <= xs.back()) {
                    row.omega_a_num = fit(row.flux);
                    row.omega_a_num_interpolated = true;
                }
        }
    }
    return result;
}

// Two-photon resonance criterion for one row: the effective atom frequency
// (numerical when available) within |g2_tilde| of twice the designed
// resonator frequency.
inline bool row_in_resonance(const SweepRow& row) {
    if (!row.ok() || !row.rates) return false;
    const double omega_a =
        row.omega_a_num ? *row.omega_a_num : row.rates->freqs.omega_a_tilde;
    const double det_mhz =
        ghz_to_mhz(omega_a - 2.0 * row.rates->omega_r_tilde_design);
    return std::abs(det_mhz) < std::abs(row.rates->renorm.g2_tilde);
}

inline FeatureSet find_features(const SweepResult& result,
                                const std::vector<std::string>& quantities) {
    if (static_cast<int>(result.rows.size()) < 16)
        throw invalid_parameters_error("feature extraction needs at least 16 sweep points");

    const auto& spec = result.spec;
    const RateSetOptions opts{spec.freeze_zpf};

    // Continuous pipeline evaluation at arbitrary flux, seeded from the
    // nearest sampled equilibrium for branch stability.
    auto pipeline = [&](double flux, const RateSet& near, const std::string& q) {
        const auto p = detail::apply_axis(spec.base, spec.axis, flux);
        const auto seed = std::make_pair(near.eq.phi_r_min, near.eq.phi_a_min);
        return quantity_value(compute_rate_set(p, opts, seed), q);
    };

    FeatureSet features;
    for (const auto& q : quantities) {
        if (!quantity_accessors().count(q))
            throw unknown_quantity_error("unknown sweep quantity: " + q);

        // Zeros: bracket on the samples, bisect on the continuous pipeline.
        for (std::size_t i = 0; i + 1 < result.rows.size(); ++i) {
            const auto& ra = result.rows[i];
            const auto& rb = result.rows[i + 1];
            if (!ra.ok() || !rb.ok() || !ra.rates || !rb.rates) continue;
            const double fa = quantity_value(*ra.rates, q);
            const double fb = quantity_value(*rb.rates, q);
            if (fa == 0.0) {
                features.zeros.push_back({q, ra.flux});
                continue;
            }
            if (fa * fb >= 0.0) continue;
            double lo = ra.flux, hi = rb.flux, flo = fa;
            for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = pipeline(mid, *ra.rates, q);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (flo * fm < 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            features.zeros.push_back({q, 0.5 * (lo + hi)});
        }

        // Extrema: strict interior sample extrema, golden-section refined.
        for (std::size_t i = 1; i + 1 < result.rows.size(); ++i) {
            const auto& rl = result.rows[i - 1];
            const auto& rm = result.rows[i];
            const auto& rr = result.rows[i + 1];
            if (!rl.ok() || !rm.ok() || !rr.ok() || !rl.rates || !rm.rates || !rr.rates)
                continue;
            const double fl = quantity_value(*rl.rates, q);
            const double fm = quantity_value(*rm.rates, q);
            const double fr = quantity_value(*rr.rates, q);
            const bool is_max = fm > fl && fm > fr;
            const bool is_min = fm < fl && fm < fr;
            if (!is_max && !is_min) continue;
            const double sign = is_max ? 1.0 : -1.0;
            double a = rl.flux, b = rr.flux;
            for (int it = 0; it < 120 && b - a > 1e-10; ++it) {
                const double m1 = a + 0.381966 * (b - a);
                const double m2 = b - 0.381966 * (b - a);
                if (sign * pipeline(m1, *rm.rates, q) < sign * pipeline(m2, *rm.rates, q))
                    a = m1;
                else
                    b = m2;
            }
            const double x = 0.5 * (a + b);
            features.extrema.push_back({q, x, pipeline(x, *rm.rates, q)});
        }
    }

    // Resonance windows: maximal runs of rows passing the pointwise
    // detuning-vs-g2_tilde criterion.
    std::size_t i = 0;
    while (i < result.rows.size()) {
        if (!row_in_resonance(result.rows[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < result.rows.size() && row_in_resonance(result.rows[j + 1])) ++j;
        features.resonance_windows.push_back({result.rows[i].flux, result.rows[j].flux});
        i = j + 1;
    }
    return features;
}

// One Fig.-3-style panel: the two-photon resonance sweep with the atom
// Josephson energy scaled by (1 + atom_energy_perturbation). Call with zero
// perturbation for the nominal panel and with an axis override of flux_ext
// to demonstrate recovering the resonance with the atom bias.
struct ResonanceOptions {
    SweepAxis axis = SweepAxis::flux_cpl;
    double start = -0.2;
    double stop = 0.2;
    int n_points = 33;
    int numeric_every = 8;
    bool freeze_zpf = false;
};

inline SweepResult resonance_report(const CircuitParameters& base,
                                    double atom_energy_perturbation,
                                    const ResonanceOptions& opts = {}) {
    if (!(std::abs(atom_energy_perturbation) < 0.05))
        throw invalid_parameters_error(
            "atom energy perturbation must stay below 5 percent");
    CircuitParameters p = base;
    p.I0_a *= 1.0 + atom_energy_perturbation;  // E_J_a is proportional to I0_a

    SweepSpec spec;
    spec.axis = opts.axis;
    spec.start = opts.start;
    spec.stop = opts.stop;
    spec.n_points = opts.n_points;
    spec.freeze_zpf = opts.freeze_zpf;
    spec.numeric_every = opts.numeric_every;
    spec.base = p;
    return run_sweep(spec);
}

}  // namespace sqc
