#pragma once

// Quotient of the reduced sphere by S3: invariant polynomials p, the deformed
// surface q, and the cylinder coordinates (h, theta).

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "vortexred/errors.hpp"
#include "vortexred/reduction.hpp"

namespace vortexred {

struct InvariantPoint {
    double p1 = 0.0;
    double p2 = 0.0;
    double p3 = 0.0;
    double p4 = 0.0;

    /// p1 ((p1 - p4)^3 + p2^2) + p3^2, zero on the image of the invariant map.
    double relation_residual() const noexcept {
        const double d = p1 - p4;
        return p1 * (d * d * d + p2 * p2) + p3 * p3;
    }
};

struct DeformedPoint {
    double q1 = 0.0;
    double q2 = 0.0;
    double q3 = 0.0;

    double norm() const noexcept { return std::sqrt(q1 * q1 + q2 * q2 + q3 * q3); }
};

/// h in [-inf, +inf]; theta in [0, 2 pi).
struct CylinderPoint {
    double h = 0.0;
    double theta = 0.0;
};

namespace detail {

/// Two-step factorisation: (w3, (-w2 + i w1)^3, |w|^2), then
/// p1 = w3^2, p2 = Re, p3 = w3 Im, p4 = |w|^2.
inline InvariantPoint invariants_of(double w1, double w2, double w3) {
    const double pt1 = w3;
    const std::complex<double> base(-w2, w1);
    const std::complex<double> cube = base * base * base;
    const double pt4 = w1 * w1 + w2 * w2 + w3 * w3;
    return {pt1 * pt1, cube.real(), pt1 * cube.imag(), pt4};
}

}  // namespace detail

inline InvariantPoint invariants(const SpherePoint& w) { return detail::invariants_of(w.w1(), w.w2(), w.w3()); }
inline InvariantPoint invariants(const HopfImage& w) { return detail::invariants_of(w.w1, w.w2, w.w3); }
inline InvariantPoint invariants(const Vec3& w) { return detail::invariants_of(w.x(), w.y(), w.z()); }

/// Reduced energy in invariant coordinates. Throws RelationViolation when p is
/// off the quotient set {relation = 0, 0 <= p1 <= 1, p4 = 1} by more than `tol`.
inline double reduced_hamiltonian_p(const InvariantPoint& p, const SystemParams& params, double tol = 1e-8) {
    const double rel = p.relation_residual();
    if (std::abs(p.p4 - 1.0) > tol) throw RelationViolation(p.p4 - 1.0);
    if (std::abs(rel) > tol) throw RelationViolation(rel);
    if (p.p1 < -tol || p.p1 > p.p4 + tol) throw RelationViolation(p.p1 < 0.0 ? p.p1 : p.p1 - p.p4);

    auto snapped = [](double x) { return x <= detail::kCollisionSnap ? 0.0 : x; };
    const double num = snapped(1.0 + 3.0 * p.p1 - p.p2);
    const double den = snapped(1.0 + 3.0 * p.p1 + p.p2);
    const double a = params.alpha();
    const double prefactor = 12.0 * std::log(a) - std::log(432.0);  // alpha^12 / (2^4 3^3)
    return detail::energy_scale(params) * (prefactor + 3.0 * std::log(num) - std::log(den));
}

inline DeformedPoint deform(const InvariantPoint& p) {
    return {p.p1 - 0.25 * (1.0 - p.p2 * p.p2), p.p2, p.p3};
}

/// h = (1/2) ln((q1^2 + q3^2) / (q2 + |q|)), theta = atan2(q3, q1).
/// The two collision states (q1, q3) = (0, 0) map to h = -inf (q2 > 0) and h = +inf (q2 < 0).
/// The limit of h at the +inf state is finite, so that point is matched with
/// the rounding tolerance detail::kCollisionSnap rather than exactly.
inline CylinderPoint cylinder(const DeformedPoint& q) {
    CylinderPoint c;
    const double r2 = q.q1 * q.q1 + q.q3 * q.q3;
    if (std::sqrt(r2) <= detail::kCollisionSnap) {
        c.h = q.q2 > 0.0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
        c.theta = 0.0;
        return c;
    }
    const double n = q.norm();
    // (q1^2 + q3^2) / (q2 + |q|) = |q| - q2; pick the form without cancellation.
    c.h = q.q2 > 0.0 ? 0.5 * std::log(r2 / (q.q2 + n)) : 0.5 * std::log(n - q.q2);
    double theta = std::atan2(q.q3, q.q1);
    if (theta < 0.0) theta += 2.0 * kPi;
    if (theta >= 2.0 * kPi) theta = 0.0;
    c.theta = theta;
    return c;
}

/// Stereographic image, from (0, -1, 0), of the radial projection of the
/// deformed surface. A homeomorphic planar picture of the quotient used for
/// enclosure tests: the -inf collision sits at 0, the +inf collision at infinity.
inline std::complex<double> stereographic(const DeformedPoint& q) {
    const double n = q.norm();
    const double denom = n + q.q2;
    if (denom <= 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
    return {q.q1 / denom, q.q3 / denom};
}

/// Every coordinate level for one reduced point.
struct ReducedCoordinates {
    Vec3 w;
    InvariantPoint p;
    DeformedPoint q;
    CylinderPoint cyl;
    double energy = 0.0;
};

inline ReducedCoordinates reduce(const Vec3& w, const SystemParams& params) {
    ReducedCoordinates r;
    r.w = w;
    r.p = invariants(w);
    r.q = deform(r.p);
    r.cyl = cylinder(r.q);
    r.energy = detail::reduced_energy(w, params);
    return r;
}

/// Image of both poles (the stable relative equilibria) in every quotient chart.
inline ReducedCoordinates center_image(const SystemParams& params) {
    return reduce(Vec3(0.0, 0.0, -1.0), params);
}

}  // namespace vortexred
