#pragma once

// Orbits of the reduced flow, their images on the cylinder, and the
// classification of localized states by orbit family.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "vortexred/analysis.hpp"
#include "vortexred/integrator.hpp"
#include "vortexred/dop853.hpp"
#include "vortexred/ode.hpp"
#include "vortexred/quotient.hpp"
#include "vortexred/reduction.hpp"

namespace vortexred {

enum class OrbitFamily { center, plus_collision, minus_collision, near_homoclinic, unresolved };

inline const char* to_string(OrbitFamily f) {
    switch (f) {
        case OrbitFamily::center: return "center-family";
        case OrbitFamily::plus_collision: return "plus-collision-family";
        case OrbitFamily::minus_collision: return "minus-collision-family";
        case OrbitFamily::near_homoclinic: return "near-homoclinic";
        case OrbitFamily::unresolved: return "unresolved";
    }
    return "unknown";
}

namespace detail {

inline auto make_reduced_rhs(const SystemParams& params) {
    return [params](double, const ode::State& y, ode::State& dydt) {
        const Vec3 w(y[0], y[1], y[2]);
        const auto l = l_values(w);
        if (*std::min_element(l.begin(), l.end()) <= 0.0) {
            std::fill(dydt.begin(), dydt.end(), std::numeric_limits<double>::quiet_NaN());
            return;
        }
        const Vec3 x = reduced_field(w, params);
        dydt[0] = x.x();
        dydt[1] = x.y();
        dydt[2] = x.z();
    };
}

inline double min_l(const Vec3& w) {
    const auto l = l_values(w);
    return *std::min_element(l.begin(), l.end());
}

inline Vec3 to_vec(const ode::State& y) { return {y[0], y[1], y[2]}; }

}  // namespace detail

struct ReducedTrack {
    std::vector<double> times;
    std::vector<Vec3> points;
    bool truncated = false;
};

/// Integrate the reduced flow from w0 and report it at the requested
/// (nondecreasing, nonnegative) output times. Stops early, flagging
/// `truncated`, once min l drops below `min_l`.
inline ReducedTrack integrate_reduced(const SpherePoint& w0, const SystemParams& params,
                                      std::span<const double> output_times, const ode::StepControl& control = {},
                                      double min_l = 1e-8) {
    ReducedTrack track;
    if (output_times.empty()) return track;
    auto rhs = detail::make_reduced_rhs(params);
    ode::DormandPrince853 stepper(rhs, control);
    stepper.reset(0.0, {w0.w1(), w0.w2(), w0.w3()});
    const double t_end = output_times.back();
    std::size_t next = 0;
    ode::State buf;
    while (next < output_times.size() && output_times[next] <= 0.0) {
        track.times.push_back(output_times[next++]);
        track.points.push_back(w0.vec());
    }
    while (next < output_times.size()) {
        stepper.step(t_end);
        while (next < output_times.size() && output_times[next] <= stepper.t()) {
            stepper.interpolate(output_times[next], buf);
            track.times.push_back(output_times[next++]);
            track.points.push_back(detail::to_vec(buf));
        }
        if (detail::min_l(detail::to_vec(stepper.y())) < min_l) {
            track.truncated = true;
            break;
        }
    }
    return track;
}

struct OrbitOptions {
    double t_max = 500.0;
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double closure_tol = 1e-5;
    /// A return to the section only counts within this distance of the start.
    double return_radius = 1e-2;
    /// Orbits with |H - H_saddle| below this are tagged near-homoclinic.
    double homoclinic_band = 1e-5;
    /// Orbits entering min l < collision_l are truncated.
    double collision_l = 1e-6;
    int samples_per_step = 4;
};

struct OrbitSample {
    double t;
    double h;
    double theta;
    double energy;
};

struct OrbitRecord {
    std::size_t id = 0;
    Vec3 initial = Vec3::Zero();
    double energy = 0.0;
    std::vector<OrbitSample> samples;
    std::optional<double> period;
    double closure = std::numeric_limits<double>::infinity();
    OrbitFamily family = OrbitFamily::unresolved;
    bool truncated = false;
    /// Winding of the orbit image in the stereographic plane around the -inf
    /// collision and around the centre image.
    long winding_origin = 0;
    long winding_center = 0;
    double max_energy_deviation = 0.0;
    double max_relation_residual = 0.0;

    bool closed(double tol) const noexcept { return period.has_value() && closure < tol; }
};

namespace detail {

/// Accumulates the winding of a sampled closed curve around a fixed point.
class WindingCounter {
public:
    explicit WindingCounter(std::complex<double> center) : center_(center) {}

    void add(std::complex<double> z) {
        const double a = std::arg(z - center_);
        if (has_last_) {
            double d = a - last_;
            while (d > kPi) d -= 2.0 * kPi;
            while (d < -kPi) d += 2.0 * kPi;
            total_ += d;
        } else {
            first_ = a;
            has_last_ = true;
        }
        last_ = a;
    }

    long turns() const {
        double d = first_ - last_;
        while (d > kPi) d -= 2.0 * kPi;
        while (d < -kPi) d += 2.0 * kPi;
        return std::lround((total_ + d) / (2.0 * kPi));
    }

private:
    std::complex<double> center_;
    bool has_last_ = false;
    double first_ = 0.0;
    double last_ = 0.0;
    double total_ = 0.0;
};

inline OrbitFamily family_from_winding(long origin, long center) {
    if (origin != 0 && center != 0) return OrbitFamily::plus_collision;
    if (origin != 0) return OrbitFamily::minus_collision;
    if (center != 0) return OrbitFamily::center;
    return OrbitFamily::unresolved;
}

}  // namespace detail

/// Follow the reduced orbit through w0 until it returns to the hyperplane
/// through w0 orthogonal to the initial velocity (period), t_max, or a
/// collision neighbourhood. The family is read off the enclosure signature.
inline OrbitRecord trace_orbit(const SpherePoint& w0, const SystemParams& params, const OrbitOptions& opts = {}) {
    OrbitRecord rec;
    rec.initial = w0.vec();
    rec.energy = reduced_hamiltonian_w(w0, params);
    const double h_saddle = saddle_energy(params);
    const Vec3 x0 = detail::reduced_field(w0.vec(), params);

    const auto center_plane = stereographic(center_image(params).q);
    detail::WindingCounter wind_origin({0.0, 0.0});
    detail::WindingCounter wind_center(center_plane);

    auto add_sample = [&](double t, const Vec3& w) {
        const ReducedCoordinates r = reduce(w.normalized(), params);
        rec.samples.push_back({t, r.cyl.h, r.cyl.theta, r.energy});
        rec.max_energy_deviation = std::max(rec.max_energy_deviation, std::abs(r.energy - rec.energy));
        InvariantPoint on_sphere = r.p;
        on_sphere.p4 = 1.0;
        rec.max_relation_residual = std::max(rec.max_relation_residual, std::abs(on_sphere.relation_residual()));
        const auto z = stereographic(r.q);
        wind_origin.add(z);
        wind_center.add(z);
    };
    add_sample(0.0, w0.vec());

    if (x0.norm() == 0.0) return rec;  // equilibrium

    ode::StepControl control;
    control.rel_tol = opts.rel_tol;
    control.abs_tol = opts.abs_tol;
    auto rhs = detail::make_reduced_rhs(params);
    ode::DormandPrince853 stepper(rhs, control);
    stepper.reset(0.0, {w0.w1(), w0.w2(), w0.w3()});

    auto section_value = [&](const Vec3& w) { return (w - w0.vec()).dot(x0); };
    ode::State buf;
    double f_prev = 0.0;
    while (stepper.t() < opts.t_max) {
        try {
            stepper.step(opts.t_max);
        } catch (const StepFailure&) {
            rec.truncated = true;
            break;
        }
        const double ta = stepper.t_previous();
        const double tb = stepper.t();
        const Vec3 wb = detail::to_vec(stepper.y());
        const double f_b = section_value(wb);

        double t_stop = tb;
        bool returned = false;
        if (f_prev < 0.0 && f_b >= 0.0) {
            const double t_cross = ode::bisect_root(
                [&](double t) {
                    stepper.interpolate(t, buf);
                    return section_value(detail::to_vec(buf));
                },
                ta, tb, 1e-15);
            stepper.interpolate(t_cross, buf);
            const double dist = (detail::to_vec(buf) - w0.vec()).norm();
            if (dist < opts.return_radius) {
                returned = true;
                t_stop = t_cross;
                rec.period = t_cross;
                rec.closure = dist;
            }
        }

        const int n = std::max(1, opts.samples_per_step);
        for (int k = 1; k <= n; ++k) {
            const double t = ta + (t_stop - ta) * k / n;
            stepper.interpolate(t, buf);
            add_sample(t, detail::to_vec(buf));
        }
        if (returned) break;
        if (detail::min_l(wb) < opts.collision_l) {
            rec.truncated = true;
            break;
        }
        f_prev = f_b;
    }

    rec.winding_origin = wind_origin.turns();
    rec.winding_center = wind_center.turns();
    if (std::abs(rec.energy - h_saddle) < opts.homoclinic_band) {
        rec.family = OrbitFamily::near_homoclinic;
    } else if (rec.period) {
        rec.family = detail::family_from_winding(rec.winding_origin, rec.winding_center);
    } else {
        rec.family = OrbitFamily::unresolved;
    }
    return rec;
}

/// Point on the meridian w1 = 0, w = (0, sin s, -cos s).
inline SpherePoint meridian_point(double s) { return SpherePoint(0.0, std::sin(s), -std::cos(s)); }

/// Point on the meridian between the reference saddle and the +inf collision
/// with energy saddle_energy + delta_energy (delta_energy > 0).
inline SpherePoint saddle_neighbour(const SystemParams& params, double delta_energy) {
    if (!(delta_energy > 0.0)) throw std::invalid_argument("saddle_neighbour needs a positive energy offset");
    const double target = saddle_energy(params) + delta_energy;
    double lo = std::asin(std::numbers::sqrt3 - 1.0);
    double hi = 0.5 * kPi;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        (reduced_hamiltonian_w(meridian_point(mid), params) < target ? lo : hi) = mid;
    }
    return meridian_point(0.5 * (lo + hi));
}

/// Initial points for a portrait, stratified by energy along the meridian
/// w1 = 0: one third in the band between the saddle and centre energies,
/// the rest split between the bands below the saddle energy and above it,
/// each band clipped where min l reaches `clamp_l`.
inline std::vector<SpherePoint> portrait_seeds(const SystemParams& params, std::size_t n_orbits,
                                               double clamp_l = 1e-3) {
    if (n_orbits == 0) throw std::invalid_argument("portrait needs at least one orbit");
    const double s_saddle = std::asin(std::numbers::sqrt3 - 1.0);
    const double s_minus = std::asin(-1.0 + clamp_l / 2.0);  // l41 = clamp_l
    const double s_plus = std::asin(1.0 - clamp_l / 6.0);    // l23 = clamp_l
    auto energy = [&](double s) { return reduced_hamiltonian_w(meridian_point(s), params); };
    const double h_s = saddle_energy(params);
    const double h_c = center_energy(params);
    // Energy increases along both segments for either sign of Gamma^2 scale.
    auto solve = [&](double target, double lo, double hi) {
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            (energy(mid) < target ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    const std::size_t n_center = n_orbits / 3;
    const std::size_t n_minus = (n_orbits - n_center) / 2;
    const std::size_t n_plus = n_orbits - n_center - n_minus;
    std::vector<SpherePoint> seeds;
    auto band = [&](std::size_t m, double lo, double hi, double s_lo, double s_hi) {
        for (std::size_t k = 0; k < m; ++k) {
            const double target = lo + (hi - lo) * (static_cast<double>(k) + 0.5) / static_cast<double>(m);
            seeds.push_back(meridian_point(solve(target, s_lo, s_hi)));
        }
    };
    band(n_minus, energy(s_minus), h_s, s_minus, 0.0);
    band(n_center, h_s, h_c, s_minus, 0.0);
    band(n_plus, h_s, energy(s_plus), s_saddle, s_plus);
    return seeds;
}

/// Worker count: VORTEXRED_THREADS caps the hardware concurrency.
inline unsigned worker_count(std::size_t jobs) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("VORTEXRED_THREADS")) {
        try {
            const long cap = std::stol(env);
            if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
        } catch (const std::exception&) {
        }
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

struct PortraitOptions {
    std::size_t n_orbits = 40;
    OrbitOptions orbit;
    double clamp_l = 1e-3;
};

inline std::vector<OrbitRecord> portrait(const SystemParams& params, const PortraitOptions& opts = {}) {
    const auto seeds = portrait_seeds(params, opts.n_orbits, opts.clamp_l);
    std::vector<OrbitRecord> out(seeds.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
            out[i] = trace_orbit(seeds[i], params, opts.orbit);
            out[i].id = i;
        }
    };
    const unsigned n_workers = worker_count(seeds.size());
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n_workers; ++k) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return out;
}

struct StateClass {
    OrbitFamily family;
    double energy;
    /// True for a reduced equilibrium (branch endpoint or bifurcation point).
    bool equilibrium;
};

/// Place a reduced state in the orbit space: its orbit family and energy.
inline StateClass classify_state(const SpherePoint& w, const SystemParams& params, OrbitOptions opts = {}) {
    const double energy = reduced_hamiltonian_w(w, params);
    if (!std::isfinite(energy)) throw std::invalid_argument("classify_state: collision state");
    const double scale = detail::energy_scale(params);
    opts.homoclinic_band = 1e-9;
    if (std::abs(energy - saddle_energy(params)) < opts.homoclinic_band) {
        return {OrbitFamily::near_homoclinic, energy,
                tangential_gradient(w.vec(), params).norm() < 1e-9 * scale};
    }
    if (tangential_gradient(w.vec(), params).norm() < 1e-12 * scale) {
        const auto eq = classify_equilibrium(w, params);
        if (eq.kind == EquilibriumKind::center) return {OrbitFamily::center, energy, true};
        return {OrbitFamily::unresolved, energy, true};
    }
    const OrbitRecord rec = trace_orbit(w, params, opts);
    return {rec.family, energy, false};
}

struct Reconstruction {
    Trajectory trajectory;
    std::vector<ReducedCoordinates> reduced;
};

/// Integrate the full system from the lift of w0 and project every sample
/// back through the reduction chain.
inline Reconstruction reconstruct(const SpherePoint& w0, const SystemParams& params, double t_end,
                                  IntegrationSettings settings = {}) {
    settings.t_end = t_end;
    if (settings.collision_epsilon == IntegrationSettings{}.collision_epsilon) {
        settings.collision_epsilon = 1e-6 * params.alpha();
    }
    Reconstruction r{integrate(lift_sphere_point(w0, params), settings, params), {}};
    const double tol = 1e-7 * std::max(1.0, std::abs(params.gamma()) * params.alpha() * params.alpha());
    for (const auto& state : r.trajectory.states()) {
        r.reduced.push_back(reduce(reduce_config(state, params, tol).vec(), params));
    }
    return r;
}

/// Index (0..2) of the outer vortex nearest the central one.
inline int nearest_outer(const PlanarConfig& config) {
    int best = 0;
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        const double di = std::abs(config.position(i) - config.position(3));
        if (di < d) {
            d = di;
            best = i;
        }
    }
    return best;
}

}  // namespace vortexred
