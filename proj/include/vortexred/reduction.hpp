#pragma once

// Reduction of the distinguished 4-vortex system at the momentum mu_e.
//
// Translating the central vortex to the origin leaves the outer positions in
// the zero-sum subspace of C^3, coordinatised by the orthonormal basis E as
// (u1 + i v1, u2 + i v2). On the level set |u|^2 = 3 alpha^2 the diagonal
// rotation is quotiented by the Hopf variables w, giving the unit 2-sphere
// with area form (Gamma alpha^2 / 4) omega_S2.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "vortexred/errors.hpp"
#include "vortexred/symmetry.hpp"
#include "vortexred/vortex_dynamics.hpp"

namespace vortexred {

using Vec3 = Eigen::Vector3d;
using BasisMatrix = Eigen::Matrix<double, 6, 4>;

struct ChartPoint {
    double u1 = 0.0;
    double v1 = 0.0;
    double u2 = 0.0;
    double v2 = 0.0;

    Eigen::Vector4d vec() const { return {u1, v1, u2, v2}; }
    double norm2() const noexcept { return u1 * u1 + v1 * v1 + u2 * u2 + v2 * v2; }
};

class SpherePoint;

/// Image of the Hopf map: a point of the cone w1^2 + w2^2 + w3^2 = w4^2, w4 >= 0.
struct HopfImage {
    double w1 = 0.0;
    double w2 = 0.0;
    double w3 = 0.0;
    double w4 = 0.0;

    Vec3 direction() const { return {w1, w2, w3}; }
    double cone_residual() const noexcept { return w1 * w1 + w2 * w2 + w3 * w3 - w4 * w4; }
    /// Radial projection to the unit sphere (w4 = 1 on the level set).
    SpherePoint on_sphere() const;
};

/// A point of the reduced phase space, the unit 2-sphere.
class SpherePoint {
public:
    static constexpr double kTolerance = 1e-12;

    explicit SpherePoint(const Vec3& w) : w_(w) {
        if (!w.allFinite() || std::abs(w.squaredNorm() - 1.0) > kTolerance) {
            throw std::invalid_argument("sphere point must have unit norm");
        }
    }
    SpherePoint(double w1, double w2, double w3) : SpherePoint(Vec3(w1, w2, w3)) {}

    static SpherePoint normalized(const Vec3& v) {
        const double n = v.norm();
        if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("cannot normalise a zero vector");
        return SpherePoint(Vec3(v / n));
    }

    static SpherePoint south_pole() { return SpherePoint(0.0, 0.0, -1.0); }
    static SpherePoint north_pole() { return SpherePoint(0.0, 0.0, 1.0); }

    double w1() const noexcept { return w_.x(); }
    double w2() const noexcept { return w_.y(); }
    double w3() const noexcept { return w_.z(); }
    const Vec3& vec() const noexcept { return w_; }

    SpherePoint transformed(const Eigen::Matrix3d& rotation) const { return normalized(rotation * w_); }

private:
    Vec3 w_;
};

inline SpherePoint HopfImage::on_sphere() const { return SpherePoint::normalized(direction()); }

/// Orthonormal basis of the zero-sum outer-vortex subspace; rows (x1, y1, x2, y2, x3, y3).
inline const BasisMatrix& basis_matrix() {
    static const BasisMatrix e = [] {
        const double h = 0.5;
        const double r = std::numbers::sqrt3 / 2.0;
        BasisMatrix m;
        m << 1, 0, 1, 0,
             0, 1, 0, 1,
             -h, -r, -h, r,
             r, -h, -r, -h,
             -h, r, -h, -r,
             -r, -h, r, -h;
        return BasisMatrix(m / std::numbers::sqrt3);
    }();
    return e;
}

namespace detail {

inline void require_distinguished(const PlanarConfig& config, const SystemParams& params) {
    if (config.size() != 4) throw std::invalid_argument("reduction needs the 4-vortex instance");
    const auto expected = Strengths::distinguished(params.gamma());
    for (std::size_t n = 0; n < 4; ++n) {
        if (std::abs(config.strength(n) - expected[n]) > 1e-12 * std::abs(params.gamma())) {
            throw std::invalid_argument("strengths differ from (-G/3, -G/3, -G/3, G)");
        }
    }
}

}  // namespace detail

/// Coordinates of a level-set configuration in the zero-momentum chart.
///
/// Throws MomentumMismatch when momentum(config) differs from mu_e by more than
/// `tol` in any component, and CentroidResidual when the translated outer
/// vortices do not sum to zero within `tol` (relative to alpha).
inline ChartPoint to_chart(const PlanarConfig& config, const SystemParams& params, double tol = 1e-8) {
    detail::require_distinguished(config, params);
    const double residual = momentum(config).max_abs_difference(params.mu_e());
    if (!(residual <= tol)) throw MomentumMismatch(residual);

    const Complex z4 = config.position(3);
    Eigen::Matrix<double, 6, 1> x;
    Complex sum(0.0, 0.0);
    for (int i = 0; i < 3; ++i) {
        const Complex zi = config.position(i) - z4;
        x(2 * i) = zi.real();
        x(2 * i + 1) = zi.imag();
        sum += zi;
    }
    const double centroid = std::abs(sum) / 3.0;
    if (!(centroid <= tol * std::max(1.0, params.alpha()))) throw CentroidResidual(centroid);

    const Eigen::Vector4d u = basis_matrix().transpose() * x;
    return {u(0), u(1), u(2), u(3)};
}

inline HopfImage hopf(const ChartPoint& c, const SystemParams& params) {
    const double k = 1.0 / (3.0 * params.alpha() * params.alpha());
    const double a = c.u1 * c.u1 + c.v1 * c.v1;
    const double b = c.u2 * c.u2 + c.v2 * c.v2;
    return {2.0 * k * (c.u1 * c.v2 - c.u2 * c.v1), 2.0 * k * (c.u1 * c.u2 + c.v1 * c.v2), -k * (a - b),
            k * (a + b)};
}

/// Planar configuration with the central vortex at the origin and outer vortices E u.
inline PlanarConfig lift(const ChartPoint& c, const SystemParams& params) {
    const Eigen::Matrix<double, 6, 1> x = basis_matrix() * c.vec();
    return PlanarConfig({Complex(x(0), x(1)), Complex(x(2), x(3)), Complex(x(4), x(5)), Complex(0.0, 0.0)},
                        Strengths::distinguished(params.gamma()));
}

/// Partial section v1 = 0 of the Hopf map over the level set.
///
/// The coefficient alpha sqrt(3/2) puts the image on |u|^2 = 3 alpha^2, so
/// hopf(section(w)) = (w, 1). Undefined at the north pole; throws
/// NearNorthPole when w3 > 1 - delta.
inline ChartPoint section(const SpherePoint& w, const SystemParams& params, double delta = 1e-6) {
    if (w.w3() > 1.0 - delta) throw NearNorthPole(w.w3());
    const double c = params.alpha() * std::sqrt(1.5);
    const double s = std::sqrt(1.0 - w.w3());
    return {c * s, 0.0, c * w.w2() / s, c * w.w1() / s};
}

/// Section valid on the whole sphere: near the north pole the point is mapped
/// south by sigma_(23), sectioned, and outer vortices 2 and 3 are exchanged back.
inline ChartPoint section_any(const SpherePoint& w, const SystemParams& params, double delta = 1e-6) {
    if (w.w3() <= 1.0 - delta) return section(w, params, delta);
    const SpherePoint south = w.transformed(permutation_matrix(S3::t23));
    const PlanarConfig swapped = relabel_outer(lift(section(south, params, delta), params), S3::t23);
    return to_chart(swapped, params, 1e-9 * std::max(1.0, std::abs(params.gamma()) * params.alpha() * params.alpha()));
}

/// Full configuration over a reduced point (central vortex at the origin).
inline PlanarConfig lift_sphere_point(const SpherePoint& w, const SystemParams& params) {
    return lift(section_any(w, params), params);
}

/// Reduced point of a level-set configuration.
inline SpherePoint reduce_config(const PlanarConfig& config, const SystemParams& params, double tol = 1e-8) {
    return hopf(to_chart(config, params, tol), params).on_sphere();
}

/// Interparticle functionals; (alpha^2 / 2) l_ij is the squared distance |z_i - z_j|^2
/// (index 4 is the central vortex).
struct LFunctionals {
    double l12 = 0.0;
    double l13 = 0.0;
    double l23 = 0.0;
    double l41 = 0.0;
    double l42 = 0.0;
    double l43 = 0.0;

    std::array<double, 6> values() const noexcept { return {l12, l13, l23, l41, l42, l43}; }
    double min() const noexcept { return std::min({l12, l13, l23, l41, l42, l43}); }

    /// Zero-based vortex pairs in the order of values().
    static constexpr std::array<std::array<int, 2>, 6> kPairs{
        {{0, 1}, {0, 2}, {1, 2}, {3, 0}, {3, 1}, {3, 2}}};
};

namespace detail {

/// l = a1 w1 + a2 w2 + b, weighted by c in the reduced energy (c = -1 outer pair, +3 central pair).
struct LinearL {
    double a1, a2, b, c;
};

inline const std::array<LinearL, 6>& l_table() {
    static const std::array<LinearL, 6> t = [] {
        const double s3 = std::numbers::sqrt3;
        return std::array<LinearL, 6>{{{-3.0 * s3, 3.0, 6.0, -1.0},
                                       {3.0 * s3, 3.0, 6.0, -1.0},
                                       {0.0, -6.0, 6.0, -1.0},
                                       {0.0, 2.0, 2.0, 3.0},
                                       {-s3, -1.0, 2.0, 3.0},
                                       {s3, -1.0, 2.0, 3.0}}};
    }();
    return t;
}

inline std::array<double, 6> l_values(const Vec3& w) {
    std::array<double, 6> l{};
    const auto& t = l_table();
    for (std::size_t k = 0; k < 6; ++k) l[k] = t[k].a1 * w.x() + t[k].a2 * w.y() + t[k].b;
    return l;
}

/// l values (and q-distances) below this are collisions at double precision:
/// they are O(1) quantities carrying rounding of a few ulps, and 1e-13
/// corresponds to a pair distance far inside any collision epsilon.
inline constexpr double kCollisionSnap = 1e-13;

inline double energy_scale(const SystemParams& params) {
    return params.gamma() * params.gamma() / (36.0 * kPi);
}

inline double reduced_energy(const Vec3& w, const SystemParams& params) {
    const auto l = l_values(w);
    const auto& t = l_table();
    double s = 0.0;
    for (std::size_t k = 0; k < 6; ++k) {
        const double lk = l[k] <= kCollisionSnap ? 0.0 : l[k];
        s += t[k].c * std::log(lk);
    }
    const double a2 = params.alpha() * params.alpha();
    return energy_scale(params) * (s + 6.0 * std::log(a2 / 2.0));
}

/// Ambient gradient of the reduced energy (the w3 component vanishes).
inline Vec3 reduced_energy_gradient(const Vec3& w, const SystemParams& params) {
    const auto l = l_values(w);
    const auto& t = l_table();
    Vec3 g = Vec3::Zero();
    for (std::size_t k = 0; k < 6; ++k) {
        g.x() += t[k].c * t[k].a1 / l[k];
        g.y() += t[k].c * t[k].a2 / l[k];
    }
    return energy_scale(params) * g;
}

inline Eigen::Matrix3d reduced_energy_hessian(const Vec3& w, const SystemParams& params) {
    const auto l = l_values(w);
    const auto& t = l_table();
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (std::size_t k = 0; k < 6; ++k) {
        const Eigen::Vector3d a(t[k].a1, t[k].a2, 0.0);
        h -= t[k].c * a * a.transpose() / (l[k] * l[k]);
    }
    return energy_scale(params) * h;
}

inline Vec3 reduced_field(const Vec3& w, const SystemParams& params) {
    const double k = 4.0 / (params.gamma() * params.alpha() * params.alpha());
    return k * w.cross(reduced_energy_gradient(w, params));
}

}  // namespace detail

inline LFunctionals l_functionals(const SpherePoint& w) {
    const auto l = detail::l_values(w.vec());
    return {l[0], l[1], l[2], l[3], l[4], l[5]};
}

/// Reduced energy on the sphere. Collision states return +inf (outer-outer)
/// or -inf (outer-central).
inline double reduced_hamiltonian_w(const SpherePoint& w, const SystemParams& params) {
    return detail::reduced_energy(w.vec(), params);
}

/// Hamiltonian vector field of the reduced energy for the area form
/// (Gamma alpha^2 / 4) omega_S2: X = 4/(Gamma alpha^2) w x grad H.
inline Vec3 reduced_vector_field(const SpherePoint& w, const SystemParams& params, double min_l = 1e-8) {
    const auto l = detail::l_values(w.vec());
    const double lmin = *std::min_element(l.begin(), l.end());
    if (lmin < min_l) throw NearCollision(lmin);
    return detail::reduced_field(w.vec(), params);
}

/// Uniformly distributed point of the reduced sphere.
template <class Rng>
SpherePoint sample_sphere(Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    for (;;) {
        const Vec3 v(n(rng), n(rng), n(rng));
        if (v.norm() > 1e-8) return SpherePoint::normalized(v);
    }
}

/// Uniform point of the 3-sphere |u|^2 = 3 alpha^2 lifted through E with the
/// central vortex at the origin; deterministic in `seed`.
inline PlanarConfig sample_level_set(const SystemParams& params, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Vector4d u;
    do {
        u = Eigen::Vector4d(n(rng), n(rng), n(rng), n(rng));
    } while (u.norm() < 1e-8);
    u *= std::sqrt(3.0) * params.alpha() / u.norm();
    return lift({u(0), u(1), u(2), u(3)}, params);
}

}  // namespace vortexred
