#pragma once

// Property suites shared by the `verify` command and the acceptance runner.
// Each suite returns the worst measured error next to its tolerance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vortexred/analysis.hpp"
#include "vortexred/integrator.hpp"
#include "vortexred/portrait.hpp"
#include "vortexred/quotient.hpp"
#include "vortexred/reduction.hpp"
#include "vortexred/symmetry.hpp"
#include "vortexred/vortex_dynamics.hpp"

namespace vortexred::verify {

struct Check {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string note;
};

inline Check bound(std::string name, double measured, double tolerance, std::string note = {}) {
    return {std::move(name), measured, tolerance, std::isfinite(measured) && measured <= tolerance, std::move(note)};
}

/// Relative difference with the denominator floored at `floor`.
inline double rel_diff(double a, double b, double floor = 1.0) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

namespace detail {

inline std::vector<SpherePoint> sphere_samples(std::uint64_t seed, std::size_t n, double min_l = 0.0,
                                               double max_w3 = 1.0) {
    std::mt19937_64 rng(seed);
    std::vector<SpherePoint> out;
    while (out.size() < n) {
        const SpherePoint w = sample_sphere(rng);
        if (w.w3() > max_w3) continue;
        if (min_l > 0.0 && vortexred::detail::min_l(w.vec()) < min_l) continue;
        out.push_back(w);
    }
    return out;
}

inline double max_abs(const Vec3& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace detail

// --- full dynamics --------------------------------------------------------

/// Momentum drift under translation by `a`. The rotational part is only
/// translation invariant when the translational part vanishes; for other
/// configurations it shifts by -Re(conj(a) sum Gamma z), which is what is checked.
inline Check momentum_translation(std::uint64_t seed, std::size_t n = 100) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<Complex> z;
        std::vector<double> g(4);
        for (int i = 0; i < 4; ++i) z.emplace_back(u(rng), u(rng));
        do {
            for (int i = 0; i < 3; ++i) g[i] = u(rng);
            g[3] = -(g[0] + g[1] + g[2]);
        } while (std::min({std::abs(g[0]), std::abs(g[1]), std::abs(g[2]), std::abs(g[3])}) < 1e-3);
        const PlanarConfig c(z, Strengths(g));
        const Complex a(u(rng), u(rng));
        const MomentumValue m0 = momentum(c);
        const MomentumValue m1 = momentum(c.translated(a));
        Complex s(0.0, 0.0);
        for (int i = 0; i < 4; ++i) s += c.strength(i) * z[i];
        const double expected_rot = m0.rot - (std::conj(a) * s).real();
        worst = std::max({worst, std::abs(m1.rot - expected_rot), std::abs(m1.tx - m0.tx), std::abs(m1.ty - m0.ty)});
    }
    return bound("momentum under translation", worst, 1e-12);
}

/// dH/dt along velocity_field by central differences (step 1e-6).
inline Check energy_along_flow(std::uint64_t seed, const SystemParams& params, std::size_t n = 100) {
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const PlanarConfig c = sample_level_set(params, seed + k);
        const auto v = velocity_field(c);
        auto moved = [&](double eps) {
            std::vector<Complex> z(c.positions().begin(), c.positions().end());
            for (std::size_t i = 0; i < z.size(); ++i) z[i] += eps * v[i];
            return hamiltonian(PlanarConfig(z, c.strengths()));
        };
        const double h = 1e-6;
        worst = std::max(worst, std::abs(moved(h) - moved(-h)) / (2.0 * h));
    }
    return bound("dH/dt along the flow", worst, 1e-7);
}

/// Drift of energy and momentum over [0, t_end] for `n` level-set samples.
inline Check conservation(std::uint64_t seed, const SystemParams& params, std::size_t n = 20, double t_end = 20.0,
                          double tol = 1e-9) {
    double worst = 0.0;
    std::size_t incomplete = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const PlanarConfig c = sample_level_set(params, seed + k);
        const Trajectory traj = integrate(c, IntegrationSettings::defaults(params, t_end), params);
        if (traj.status() != TerminalStatus::completed) ++incomplete;
        const DriftReport d = invariant_drift(traj);
        worst = std::max({worst, d.energy, d.momentum()});
    }
    Check r = bound("energy and momentum drift", worst, tol);
    if (incomplete > 0) {
        r.passed = false;
        r.note = std::to_string(incomplete) + " runs did not reach t_end";
    }
    return r;
}

// --- reduction ------------------------------------------------------------

inline Check hopf_section_roundtrip(std::uint64_t seed, const SystemParams& params, std::size_t n = 1000) {
    double worst = 0.0;
    for (const auto& w : detail::sphere_samples(seed, n, 0.0, 0.99)) {
        const HopfImage img = hopf(section(w, params), params);
        worst = std::max({worst, detail::max_abs(img.direction() - w.vec()), std::abs(img.w4 - 1.0)});
    }
    return bound("hopf(section(w)) = (w, 1)", worst, 1e-12);
}

inline Check full_vs_reduced_energy(std::uint64_t seed, const SystemParams& params, std::size_t n = 1000) {
    double worst = 0.0;
    for (const auto& w : detail::sphere_samples(seed, n, 1e-3, 0.99)) {
        const double full = hamiltonian(lift(section(w, params), params));
        worst = std::max(worst, rel_diff(full, reduced_hamiltonian_w(w, params), 0.0));
    }
    return bound("full vs reduced energy (relative)", worst, 1e-10);
}

inline Check w_vs_p_energy(std::uint64_t seed, const SystemParams& params, std::size_t n = 1000) {
    double worst = 0.0;
    for (const auto& w : detail::sphere_samples(seed, n, 1e-3)) {
        worst = std::max(worst, rel_diff(reduced_hamiltonian_w(w, params),
                                         reduced_hamiltonian_p(invariants(w), params), 0.0));
    }
    return bound("l-form vs p-form energy (relative)", worst, 1e-10);
}

inline Check distance_identity(std::uint64_t seed, const SystemParams& params, std::size_t n = 1000) {
    double worst = 0.0;
    const double a2 = params.alpha() * params.alpha();
    for (const auto& w : detail::sphere_samples(seed, n, 1e-3, 0.99)) {
        const PlanarConfig c = lift(section(w, params), params);
        const auto l = l_functionals(w).values();
        for (std::size_t k = 0; k < 6; ++k) {
            const auto [i, j] = LFunctionals::kPairs[k];
            const double d2 = std::norm(c.position(i) - c.position(j));
            worst = std::max(worst, rel_diff(d2, 0.5 * a2 * l[k], 0.0));
        }
    }
    return bound("squared distances = (alpha^2/2) l (relative)", worst, 1e-10);
}

inline Check cone_relation(std::uint64_t seed, const SystemParams& params, std::size_t n = 1000) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double scale = std::exp(g(rng));
        const ChartPoint c{scale * g(rng), scale * g(rng), scale * g(rng), scale * g(rng)};
        worst = std::max(worst, std::abs(hopf(c, params).cone_residual()) / std::max(1.0, c.norm2()));
    }
    return bound("cone relation of hopf", worst, 1e-12);
}

inline Check hopf_equivariance(std::uint64_t seed, const SystemParams& params, std::size_t n = 100) {
    double worst = 0.0;
    const double tol = 1e-9 * std::max(1.0, std::abs(params.gamma()) * params.alpha() * params.alpha());
    for (std::size_t k = 0; k < n; ++k) {
        const PlanarConfig c = sample_level_set(params, seed + k);
        const Vec3 w = hopf(to_chart(c, params, tol), params).direction();
        for (S3 g : kS3Elements) {
            const S3 rep = kSigmaIsHomomorphism ? g : inverse(g);
            const Vec3 lhs = hopf(to_chart(relabel_outer(c, g), params, tol), params).direction();
            worst = std::max(worst, detail::max_abs(lhs - permutation_matrix(rep) * w));
        }
    }
    return bound("hopf equivariance under S3", worst, 1e-12);
}

inline Check invariance_of_p(std::uint64_t seed, std::size_t n = 100) {
    double worst = 0.0;
    for (const auto& w : detail::sphere_samples(seed, n)) {
        const InvariantPoint p = invariants(w);
        for (S3 g : kS3Elements) {
            const InvariantPoint pg = invariants(Vec3(permutation_matrix(g) * w.vec()));
            worst = std::max({worst, std::abs(pg.p1 - p.p1), std::abs(pg.p2 - p.p2), std::abs(pg.p3 - p.p3),
                              std::abs(pg.p4 - p.p4)});
        }
    }
    return bound("S3 invariance of p", worst, 1e-12);
}

inline Check invariance_of_energy(std::uint64_t seed, const SystemParams& params, std::size_t n = 100) {
    double worst = 0.0;
    for (const auto& w : detail::sphere_samples(seed, n, 1e-3)) {
        const double h = reduced_hamiltonian_w(w, params);
        for (S3 g : kS3Elements) {
            worst = std::max(worst, rel_diff(reduced_hamiltonian_w(w.transformed(permutation_matrix(g)), params), h));
        }
    }
    return bound("S3 invariance of the reduced energy", worst, 1e-12);
}

/// Sup-norm distance on [0, t_end] between the reduced flow and the
/// Hopf projection of the full flow, over `n` random starts.
inline Check flow_oracle(std::uint64_t seed, const SystemParams& params, std::size_t n = 20, double t_end = 1.0) {
    double worst = 0.0;
    const double step = 0.01;
    const double tol = 1e-7 * std::max(1.0, std::abs(params.gamma()) * params.alpha() * params.alpha());
    std::size_t used = 0;
    for (const auto& w0 : detail::sphere_samples(seed, 4 * n, 1e-2, 0.99)) {
        if (used == n) break;
        IntegrationSettings s = IntegrationSettings::defaults(params, t_end);
        s.sample_interval = step;
        const Trajectory full = integrate(lift(section(w0, params), params), s, params);
        if (full.status() != TerminalStatus::completed) continue;
        const ReducedTrack red = integrate_reduced(w0, params, full.times());
        if (red.truncated || red.points.size() != full.size()) continue;
        for (std::size_t k = 0; k < full.size(); ++k) {
            const Vec3 w = hopf(to_chart(full.states()[k], params, tol), params).direction();
            worst = std::max(worst, detail::max_abs(w - red.points[k]));
        }
        ++used;
    }
    Check r = bound("reduced flow vs projected full flow", worst, 1e-6);
    if (used < n) {
        r.passed = false;
        r.note = "only " + std::to_string(used) + " usable starts";
    }
    return r;
}

/// Energy and relation residual along reduced orbits.
inline std::vector<Check> orbit_invariants(std::uint64_t seed, const SystemParams& params, std::size_t n = 10,
                                           double t_end = 20.0) {
    double energy_dev = 0.0;
    double relation = 0.0;
    std::vector<double> times;
    for (int k = 0; k <= 2000; ++k) times.push_back(t_end * k / 2000.0);
    for (const auto& w0 : detail::sphere_samples(seed, n, 1e-2)) {
        const double h0 = reduced_hamiltonian_w(w0, params);
        const ReducedTrack tr = integrate_reduced(w0, params, times);
        for (const Vec3& w : tr.points) {
            const Vec3 u = w.normalized();
            energy_dev = std::max(energy_dev, std::abs(vortexred::detail::reduced_energy(u, params) - h0));
            relation = std::max(relation, std::abs(invariants(u).relation_residual()));
        }
    }
    return {bound("energy along reduced orbits", energy_dev, 1e-8),
            bound("relation residual along reduced orbits", relation, 1e-10)};
}

// --- analysis -------------------------------------------------------------

struct Census {
    std::size_t points = 0;
    std::size_t centers = 0;
    std::size_t saddles = 0;
    std::size_t degenerate = 0;
    double saddle_location_error = 0.0;
    double center_location_error = 0.0;
    double saddle_energy_spread = 0.0;
    double center_energy_error = 0.0;
    double saddle_energy_error = 0.0;
    bool hessian_signs_fd = true;
};

/// Closed forms for Gamma = 3, alpha = 1 scaled to general parameters.
inline double center_energy_closed_form(const SystemParams& params) {
    const double a = params.alpha();
    return vortexred::detail::energy_scale(params) * (12.0 * std::log(a) - 3.0 * std::log(3.0));
}

inline double saddle_energy_closed_form(const SystemParams& params) {
    // (Gamma^2 / 36 pi) ln(alpha^12 (24 sqrt3 - 36)^3 / (108 * 64))
    const double s3 = std::numbers::sqrt3;
    return vortexred::detail::energy_scale(params) *
           (12.0 * std::log(params.alpha()) + 3.0 * std::log(24.0 * s3 - 36.0) - std::log(108.0 * 64.0));
}

inline Census equilibrium_census(const SystemParams& params, const CriticalPointOptions& opts = {}) {
    Census c;
    const auto found = find_critical_points(params, opts);
    c.points = found.size();
    const auto saddles = saddle_orbit();
    const double h_s = saddle_energy_closed_form(params);
    const double h_c = center_energy_closed_form(params);
    for (const auto& r : found) {
        const auto fd = symmetric_eigenvalues(tangential_hessian_fd(r.point.vec(), params));
        if (r.kind == EquilibriumKind::center) {
            ++c.centers;
            const double d = std::min((r.point.vec() - Vec3(0, 0, 1)).norm(), (r.point.vec() - Vec3(0, 0, -1)).norm());
            c.center_location_error = std::max(c.center_location_error, d);
            c.center_energy_error = std::max(c.center_energy_error, std::abs(r.energy - h_c));
            if (!((fd[0] > 0) == (fd[1] > 0))) c.hessian_signs_fd = false;
        } else if (r.kind == EquilibriumKind::saddle) {
            ++c.saddles;
            double d = std::numeric_limits<double>::infinity();
            for (const auto& s : saddles) d = std::min(d, (r.point.vec() - s.vec()).norm());
            c.saddle_location_error = std::max(c.saddle_location_error, d);
            c.saddle_energy_error = std::max(c.saddle_energy_error, std::abs(r.energy - h_s));
            if ((fd[0] > 0) == (fd[1] > 0)) c.hessian_signs_fd = false;
        } else {
            ++c.degenerate;
        }
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : saddles) {
        const double h = reduced_hamiltonian_w(s, params);
        lo = std::min(lo, h);
        hi = std::max(hi, h);
    }
    c.saddle_energy_spread = hi - lo;
    return c;
}

inline std::vector<Check> census_checks(const Census& c) {
    auto exact = [](std::string name, std::size_t got, std::size_t want) {
        Check r;
        r.name = std::move(name);
        r.measured = static_cast<double>(got);
        r.tolerance = static_cast<double>(want);
        r.passed = got == want;
        return r;
    };
    Check signs;
    signs.name = "Hessian signs (finite differences)";
    signs.passed = c.hessian_signs_fd;
    return {exact("critical points", c.points, 8),
            exact("centers", c.centers, 2),
            exact("saddles", c.saddles, 6),
            bound("saddle locations", c.saddle_location_error, 1e-8),
            bound("center locations", c.center_location_error, 1e-8),
            bound("saddle energy spread", c.saddle_energy_spread, 1e-12),
            bound("center energy vs closed form", c.center_energy_error, 1e-9),
            bound("saddle energy vs closed form", c.saddle_energy_error, 1e-9),
            signs};
}

inline Check saddle_vs_full_energy(const SystemParams& params) {
    return bound("saddle energy vs full Hamiltonian",
                 std::abs(saddle_energy(params) - hamiltonian(saddle_relative_equilibrium(params))), 1e-10);
}

/// Everything `verify` runs.
inline std::vector<Check> all_suites(std::uint64_t seed, const SystemParams& params) {
    std::vector<Check> out;
    out.push_back(momentum_translation(seed));
    out.push_back(energy_along_flow(seed, params));
    out.push_back(conservation(seed, params, 20, 10.0));
    out.push_back(hopf_section_roundtrip(seed, params));
    out.push_back(full_vs_reduced_energy(seed, params));
    out.push_back(w_vs_p_energy(seed, params));
    out.push_back(distance_identity(seed, params));
    out.push_back(cone_relation(seed, params));
    out.push_back(hopf_equivariance(seed, params));
    out.push_back(invariance_of_p(seed));
    out.push_back(invariance_of_energy(seed, params));
    out.push_back(flow_oracle(seed, params));
    for (auto& c : orbit_invariants(seed, params)) out.push_back(std::move(c));
    for (auto& c : census_checks(equilibrium_census(params))) out.push_back(std::move(c));
    out.push_back(saddle_vs_full_energy(params));
    return out;
}

}  // namespace vortexred::verify
