#pragma once

// Adaptive integration of the full vortex flow with conservation diagnostics
// and collision-event termination.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vortexred/dop853.hpp"
#include "vortexred/errors.hpp"
#include "vortexred/ode.hpp"
#include "vortexred/vortex_dynamics.hpp"

namespace vortexred {

/// Embedded pair used by integrate().
enum class Method { dop853, dopri5 };

struct IntegrationSettings {
    Method method = Method::dop853;
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double collision_epsilon = 1e-6;
    double t_end = 1.0;
    /// Extra samples on a uniform grid k * sample_interval (0 disables).
    double sample_interval = 0.0;
    /// Re-impose the distinguished level set after every accepted step.
    bool project_to_level_set = false;

    /// Defaults tied to a system: collision_epsilon = 1e-6 alpha.
    static IntegrationSettings defaults(const SystemParams& params, double t_end) {
        IntegrationSettings s;
        s.collision_epsilon = 1e-6 * params.alpha();
        s.t_end = t_end;
        return s;
    }

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
        if (!(max_step > 0.0)) throw std::invalid_argument("max_step must be positive");
        if (!(collision_epsilon > 0.0)) throw std::invalid_argument("collision_epsilon must be positive");
        if (!std::isfinite(t_end)) throw std::invalid_argument("t_end must be finite");
        if (sample_interval < 0.0) throw std::invalid_argument("sample_interval must be non-negative");
    }
};

enum class TerminalStatus { completed, collision, step_failure };

inline const char* to_string(TerminalStatus s) {
    switch (s) {
        case TerminalStatus::completed: return "completed";
        case TerminalStatus::collision: return "collision";
        case TerminalStatus::step_failure: return "step-failure";
    }
    return "unknown";
}

struct CollisionEvent {
    std::size_t first = 0;
    std::size_t second = 0;
    double time = 0.0;
};

struct Diagnostics {
    double energy = 0.0;
    MomentumValue momentum;
};

/// Time-stamped configurations. Diagnostics are evaluated from each stored state.
class Trajectory {
public:
    explicit Trajectory(Strengths strengths) : strengths_(std::move(strengths)) {}

    void append(double t, const PlanarConfig& config) {
        if (!times_.empty() && !(t > times_.back())) {
            throw std::invalid_argument("trajectory times must be strictly increasing");
        }
        if (!(config.strengths() == strengths_)) {
            throw std::invalid_argument("trajectory sample has different strengths");
        }
        times_.push_back(t);
        diagnostics_.push_back(evaluate(config));
        states_.push_back(config);
    }

    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<PlanarConfig>& states() const noexcept { return states_; }
    const std::vector<Diagnostics>& diagnostics() const noexcept { return diagnostics_; }
    const Strengths& strengths() const noexcept { return strengths_; }

    TerminalStatus status() const noexcept { return status_; }
    const std::optional<CollisionEvent>& collision() const noexcept { return collision_; }
    const std::string& failure_message() const noexcept { return failure_; }

    void set_status(TerminalStatus s) noexcept { status_ = s; }
    void set_collision(CollisionEvent e) {
        status_ = TerminalStatus::collision;
        collision_ = e;
    }
    void set_failure(std::string message) {
        status_ = TerminalStatus::step_failure;
        failure_ = std::move(message);
    }

private:
    static Diagnostics evaluate(const PlanarConfig& config) {
        Diagnostics d;
        try {
            d.energy = hamiltonian(config);
        } catch (const CoincidentVortices&) {
            d.energy = std::numeric_limits<double>::quiet_NaN();
        }
        d.momentum = momentum(config);
        return d;
    }

    Strengths strengths_;
    std::vector<double> times_;
    std::vector<PlanarConfig> states_;
    std::vector<Diagnostics> diagnostics_;
    TerminalStatus status_ = TerminalStatus::completed;
    std::optional<CollisionEvent> collision_;
    std::string failure_;
};

struct DriftReport {
    double energy = 0.0;
    double rot = 0.0;
    double tx = 0.0;
    double ty = 0.0;

    double momentum() const noexcept { return std::max({rot, tx, ty}); }
};

inline DriftReport invariant_drift(const Trajectory& traj) {
    if (traj.empty()) throw std::invalid_argument("invariant_drift needs a nonempty trajectory");
    const auto& d = traj.diagnostics();
    DriftReport r;
    for (const auto& s : d) {
        r.energy = std::max(r.energy, std::abs(s.energy - d.front().energy));
        r.rot = std::max(r.rot, std::abs(s.momentum.rot - d.front().momentum.rot));
        r.tx = std::max(r.tx, std::abs(s.momentum.tx - d.front().momentum.tx));
        r.ty = std::max(r.ty, std::abs(s.momentum.ty - d.front().momentum.ty));
    }
    return r;
}

namespace detail {

inline double min_pair_distance(std::span<const double> state, std::size_t& first, std::size_t& second) {
    const std::size_t n = state.size() / 2;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t k = m + 1; k < n; ++k) {
            const double d = std::hypot(state[2 * k] - state[2 * m], state[2 * k + 1] - state[2 * m + 1]);
            if (d < best) {
                best = d;
                first = m;
                second = k;
            }
        }
    }
    return best;
}

/// Moves the central vortex (index 3) onto the outer centroid and rescales the
/// outer ring so that sum |z_i - z_4|^2 = 3 alpha^2.
inline void project_level_set(std::vector<double>& state, double alpha) {
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        cx += state[2 * i] / 3.0;
        cy += state[2 * i + 1] / 3.0;
    }
    double r2 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double dx = state[2 * i] - cx, dy = state[2 * i + 1] - cy;
        r2 += dx * dx + dy * dy;
    }
    const double scale = std::sqrt(3.0 * alpha * alpha / r2);
    for (std::size_t i = 0; i < 3; ++i) {
        state[2 * i] = cx + scale * (state[2 * i] - cx);
        state[2 * i + 1] = cy + scale * (state[2 * i + 1] - cy);
    }
    state[6] = cx;
    state[7] = cy;
}

}  // namespace detail

/// Integrate the full N-vortex flow from `config` until settings.t_end or a
/// collision (min pairwise distance reaching collision_epsilon).
///
/// With `project_to_level_set` the distinguished 4-vortex instance is pulled
/// back onto the level set of `params` after each step.
inline Trajectory integrate(const PlanarConfig& config, const IntegrationSettings& settings,
                            const std::optional<SystemParams>& params = std::nullopt) {
    settings.validate();
    if (settings.project_to_level_set && (config.size() != 4 || !params)) {
        throw std::invalid_argument("level-set projection needs the 4-vortex instance and its parameters");
    }
    const Strengths strengths = config.strengths();
    std::vector<double> gammas(strengths.values().begin(), strengths.values().end());
    auto rhs = [gammas](double, const ode::State& y, ode::State& dydt) {
        try {
            detail::vortex_velocity(gammas, y, dydt);
        } catch (const CoincidentVortices&) {
            std::fill(dydt.begin(), dydt.end(), std::numeric_limits<double>::quiet_NaN());
        }
    };

    Trajectory traj(strengths);
    traj.append(0.0, config);

    std::size_t i0 = 0, j0 = 0;
    const auto state0 = config.to_state();
    if (detail::min_pair_distance(state0, i0, j0) <= settings.collision_epsilon) {
        traj.set_collision({i0, j0, 0.0});
        return traj;
    }
    if (settings.t_end <= 0.0) return traj;

    ode::StepControl control;
    control.rel_tol = settings.rel_tol;
    control.abs_tol = settings.abs_tol;
    control.max_step = settings.max_step;
    auto run = [&](auto stepper) -> Trajectory {
        stepper.reset(0.0, state0);

        const double dt_grid = settings.sample_interval;
        std::size_t next_grid = 1;
        ode::State buffer;

        auto emit = [&](double t, const ode::State& y) {
            if (t > traj.times().back()) traj.append(t, PlanarConfig::from_state(y, strengths));
        };

        while (stepper.t() < settings.t_end) {
            try {
                stepper.step(settings.t_end);
            } catch (const StepFailure& e) {
                traj.set_failure(e.what());
                return traj;
            }
            const double ta = stepper.t_previous();
            const double tb = stepper.t();

            // Collision check at the step end and midpoint.
            std::size_t ci = 0, cj = 0;
            double d_end = detail::min_pair_distance(stepper.y(), ci, cj);
            stepper.interpolate(0.5 * (ta + tb), buffer);
            std::size_t mi = 0, mj = 0;
            const double d_mid = detail::min_pair_distance(buffer, mi, mj);
            double t_hit = std::numeric_limits<double>::quiet_NaN();
            if (d_mid <= settings.collision_epsilon || d_end <= settings.collision_epsilon) {
                const double tb_search = d_mid <= settings.collision_epsilon ? 0.5 * (ta + tb) : tb;
                ode::State tmp;
                std::size_t a = 0, b = 0;
                auto gap = [&](double t) {
                    stepper.interpolate(t, tmp);
                    return detail::min_pair_distance(tmp, a, b) - settings.collision_epsilon;
                };
                t_hit = ode::bisect_root(gap, ta, tb_search, 1e-10);
            }

            if (dt_grid > 0.0) {
                const double limit = std::isnan(t_hit) ? tb : t_hit;
                while (static_cast<double>(next_grid) * dt_grid < limit) {
                    const double tg = static_cast<double>(next_grid) * dt_grid;
                    stepper.interpolate(tg, buffer);
                    emit(tg, buffer);
                    ++next_grid;
                }
            }

            if (!std::isnan(t_hit)) {
                stepper.interpolate(t_hit, buffer);
                detail::min_pair_distance(buffer, ci, cj);
                emit(t_hit, buffer);
                traj.set_collision({ci, cj, t_hit});
                return traj;
            }

            if (settings.project_to_level_set) {
                ode::State y = stepper.y();
                detail::project_level_set(y, params->alpha());
                emit(tb, y);
                stepper.reset(tb, std::move(y), stepper.proposed_step());
            } else {
                emit(tb, stepper.y());
            }
        }
        traj.set_status(TerminalStatus::completed);
        return traj;
    };
    if (settings.method == Method::dopri5) return run(ode::DormandPrince45(rhs, control));
    return run(ode::DormandPrince853(rhs, control));
}

}  // namespace vortexred
