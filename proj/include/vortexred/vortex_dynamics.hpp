#pragma once

// Planar point-vortex model: energy, SE(2) momentum map, and the induced flow.
//
// Positions are complex numbers z_n = x_n + i y_n. With the area form
// sum_n Gamma_n dx_n ^ dy_n the Hamiltonian
//
//     H = -1/(4 pi) sum_{m<n} Gamma_m Gamma_n ln |z_n - z_m|^2
//
// generates  dz_n/dt = i/(2 pi) sum_{m != n} Gamma_m (z_n - z_m) / |z_n - z_m|^2,
// equivalently Gamma_n dx_n/dt = dH/dy_n and Gamma_n dy_n/dt = -dH/dx_n.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vortexred/errors.hpp"

namespace vortexred {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// se(2)* value identified with R^3: rotational part and translational pair.
struct MomentumValue {
    double rot = 0.0;
    double tx = 0.0;
    double ty = 0.0;

    double max_abs_difference(const MomentumValue& other) const noexcept {
        return std::max({std::abs(rot - other.rot), std::abs(tx - other.tx), std::abs(ty - other.ty)});
    }
};

/// Circulation scale Gamma and ring radius alpha of the distinguished 4-vortex system.
class SystemParams {
public:
    SystemParams(double gamma = 3.0, double alpha = 1.0) : gamma_(gamma), alpha_(alpha) {
        if (!std::isfinite(gamma) || gamma == 0.0) {
            throw std::invalid_argument("gamma must be finite and nonzero");
        }
        if (!std::isfinite(alpha) || !(alpha > 0.0)) {
            throw std::invalid_argument("alpha must be finite and positive");
        }
    }

    double gamma() const noexcept { return gamma_; }
    double alpha() const noexcept { return alpha_; }

    /// Momentum of the ring relative equilibrium: (Gamma alpha^2 / 2, 0, 0).
    MomentumValue mu_e() const noexcept { return {gamma_ * alpha_ * alpha_ / 2.0, 0.0, 0.0}; }

    /// Angular velocity of the rigidly rotating ring: Gamma / (3 pi alpha^2).
    double theta_dot_e() const noexcept { return gamma_ / (3.0 * kPi * alpha_ * alpha_); }

private:
    double gamma_;
    double alpha_;
};

class Strengths {
public:
    explicit Strengths(std::vector<double> values) : values_(std::move(values)) {
        for (double v : values_) {
            if (!std::isfinite(v) || v == 0.0) {
                throw std::invalid_argument("vortex strengths must be finite and nonzero");
            }
        }
    }

    /// (-Gamma/3, -Gamma/3, -Gamma/3, Gamma): three outer vortices then the central one.
    static Strengths distinguished(double gamma) {
        return Strengths({-gamma / 3.0, -gamma / 3.0, -gamma / 3.0, gamma});
    }

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    double total() const noexcept {
        double s = 0.0;
        for (double v : values_) s += v;
        return s;
    }

    bool operator==(const Strengths&) const = default;

private:
    std::vector<double> values_;
};

/// A point of the full phase space: N vortex positions with their strengths.
class PlanarConfig {
public:
    PlanarConfig(std::vector<Complex> positions, Strengths strengths)
        : positions_(std::move(positions)), strengths_(std::move(strengths)) {
        if (positions_.size() != strengths_.size()) {
            throw std::invalid_argument("position and strength counts differ");
        }
        if (positions_.empty()) {
            throw std::invalid_argument("configuration needs at least one vortex");
        }
        for (const Complex& z : positions_) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                throw std::invalid_argument("vortex coordinates must be finite");
            }
        }
    }

    /// Rebuild from a flat (x1, y1, x2, y2, ...) state vector.
    static PlanarConfig from_state(std::span<const double> state, Strengths strengths) {
        if (state.size() != 2 * strengths.size()) {
            throw std::invalid_argument("state length does not match strengths");
        }
        std::vector<Complex> z(strengths.size());
        for (std::size_t n = 0; n < z.size(); ++n) z[n] = {state[2 * n], state[2 * n + 1]};
        return PlanarConfig(std::move(z), std::move(strengths));
    }

    std::vector<double> to_state() const {
        std::vector<double> s(2 * positions_.size());
        for (std::size_t n = 0; n < positions_.size(); ++n) {
            s[2 * n] = positions_[n].real();
            s[2 * n + 1] = positions_[n].imag();
        }
        return s;
    }

    std::size_t size() const noexcept { return positions_.size(); }
    std::span<const Complex> positions() const noexcept { return positions_; }
    const Complex& position(std::size_t n) const { return positions_[n]; }
    const Strengths& strengths() const noexcept { return strengths_; }
    double strength(std::size_t n) const { return strengths_[n]; }

    PlanarConfig translated(Complex a) const {
        auto z = positions_;
        for (auto& zn : z) zn += a;
        return PlanarConfig(std::move(z), strengths_);
    }

    /// Counterclockwise rotation about the origin.
    PlanarConfig rotated(double angle) const {
        const Complex r = std::polar(1.0, angle);
        auto z = positions_;
        for (auto& zn : z) zn *= r;
        return PlanarConfig(std::move(z), strengths_);
    }

    PlanarConfig scaled(double factor) const {
        auto z = positions_;
        for (auto& zn : z) zn *= factor;
        return PlanarConfig(std::move(z), strengths_);
    }

    /// Smallest pairwise distance together with the pair realising it.
    std::pair<double, std::pair<std::size_t, std::size_t>> closest_pair() const {
        double best = std::numeric_limits<double>::infinity();
        std::pair<std::size_t, std::size_t> pair{0, 0};
        for (std::size_t m = 0; m < positions_.size(); ++m) {
            for (std::size_t n = m + 1; n < positions_.size(); ++n) {
                const double d = std::abs(positions_[n] - positions_[m]);
                if (d < best) {
                    best = d;
                    pair = {m, n};
                }
            }
        }
        return {best, pair};
    }

private:
    std::vector<Complex> positions_;
    Strengths strengths_;
};

namespace detail {

/// Velocity of every vortex written into `out` as (u1, v1, u2, v2, ...).
inline void vortex_velocity(std::span<const double> strengths, std::span<const double> state,
                            std::span<double> out) {
    const std::size_t n_vortex = strengths.size();
    for (double& o : out) o = 0.0;
    for (std::size_t m = 0; m < n_vortex; ++m) {
        for (std::size_t n = m + 1; n < n_vortex; ++n) {
            const double dx = state[2 * n] - state[2 * m];
            const double dy = state[2 * n + 1] - state[2 * m + 1];
            const double d2 = dx * dx + dy * dy;
            if (d2 == 0.0) throw CoincidentVortices(m, n);
            const double ux = -dy / d2;
            const double uy = dx / d2;
            // i (z_n - z_m) / |z_n - z_m|^2 acting on n, with the opposite sign on m.
            out[2 * n] += strengths[m] * ux;
            out[2 * n + 1] += strengths[m] * uy;
            out[2 * m] -= strengths[n] * ux;
            out[2 * m + 1] -= strengths[n] * uy;
        }
    }
    const double k = 1.0 / (2.0 * kPi);
    for (double& o : out) o *= k;
}

}  // namespace detail

inline double hamiltonian(const PlanarConfig& config) {
    const auto z = config.positions();
    double sum = 0.0;
    for (std::size_t m = 0; m < z.size(); ++m) {
        for (std::size_t n = m + 1; n < z.size(); ++n) {
            const double d2 = std::norm(z[n] - z[m]);
            if (d2 == 0.0) throw CoincidentVortices(m, n);
            sum += config.strength(m) * config.strength(n) * std::log(d2);
        }
    }
    return -sum / (4.0 * kPi);
}

/// J = -sum Gamma_n (|z_n|^2 / 2, i z_n); the translational part i z_n is read as (-y_n, x_n).
inline MomentumValue momentum(const PlanarConfig& config) {
    MomentumValue j;
    for (std::size_t n = 0; n < config.size(); ++n) {
        const double g = config.strength(n);
        const Complex& z = config.position(n);
        j.rot -= g * std::norm(z) / 2.0;
        j.tx += g * z.imag();
        j.ty -= g * z.real();
    }
    return j;
}

inline std::vector<Complex> velocity_field(const PlanarConfig& config) {
    const auto state = config.to_state();
    std::vector<double> out(state.size());
    detail::vortex_velocity(config.strengths().values(), state, out);
    std::vector<Complex> v(config.size());
    for (std::size_t n = 0; n < v.size(); ++n) v[n] = {out[2 * n], out[2 * n + 1]};
    return v;
}

/// Equilateral ring of radius alpha around a central vortex at the origin.
inline PlanarConfig canonical_relative_equilibrium(const SystemParams& params) {
    const double a = params.alpha();
    return PlanarConfig({Complex(a, 0.0), std::polar(a, 2.0 * kPi / 3.0), std::polar(a, -2.0 * kPi / 3.0),
                         Complex(0.0, 0.0)},
                        Strengths::distinguished(params.gamma()));
}

/// The canonical ring with outer vortices 2 and 3 exchanged.
inline PlanarConfig mirror_relative_equilibrium(const SystemParams& params) {
    const double a = params.alpha();
    return PlanarConfig({Complex(a, 0.0), std::polar(a, -2.0 * kPi / 3.0), std::polar(a, 2.0 * kPi / 3.0),
                         Complex(0.0, 0.0)},
                        Strengths::distinguished(params.gamma()));
}

/// Isosceles relative equilibrium sitting over one of the reduced saddles.
inline PlanarConfig saddle_relative_equilibrium(const SystemParams& params) {
    const double a = params.alpha();
    const double r4 = std::pow(3.0, 0.25);
    const double s3 = std::numbers::sqrt3;
    const Complex z2(-a / 2.0 * r4, a / (2.0 * std::numbers::sqrt2) * (s3 - 3.0));
    return PlanarConfig({Complex(a * r4, 0.0), z2, std::conj(z2), Complex(0.0, 0.0)},
                        Strengths::distinguished(params.gamma()));
}

}  // namespace vortexred
