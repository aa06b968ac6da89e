#pragma once

// Equilibria of the reduced flow: critical points of the reduced energy on the
// sphere, located by projected Newton iteration from a grid of seeds.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "vortexred/reduction.hpp"
#include "vortexred/symmetry.hpp"

namespace vortexred {

enum class EquilibriumKind { center, saddle, degenerate };

inline const char* to_string(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::center: return "center";
        case EquilibriumKind::saddle: return "saddle";
        case EquilibriumKind::degenerate: return "degenerate";
    }
    return "unknown";
}

struct EquilibriumReport {
    SpherePoint point;
    EquilibriumKind kind;
    double energy;
    std::array<double, 2> hessian_eigs;  ///< ascending
};

/// Orthonormal basis of the tangent plane at w.
struct TangentFrame {
    Vec3 e1;
    Vec3 e2;
};

inline TangentFrame tangent_frame(const Vec3& w) {
    const Vec3 n = w.normalized();
    Vec3 axis = Vec3::UnitX();
    if (std::abs(n.x()) > 0.6) axis = Vec3::UnitY();
    const Vec3 e1 = (axis - axis.dot(n) * n).normalized();
    return {e1, n.cross(e1)};
}

inline Vec3 tangential_gradient(const Vec3& w, const SystemParams& params) {
    const Vec3 g = detail::reduced_energy_gradient(w, params);
    return g - w.dot(g) * w;
}

/// Riemannian Hessian of the reduced energy in the tangent_frame(w) basis.
inline Eigen::Matrix2d tangential_hessian(const Vec3& w, const SystemParams& params) {
    const TangentFrame f = tangent_frame(w);
    const Vec3 g = detail::reduced_energy_gradient(w, params);
    const Eigen::Matrix3d h = detail::reduced_energy_hessian(w, params) - w.dot(g) * Eigen::Matrix3d::Identity();
    Eigen::Matrix2d m;
    m << f.e1.dot(h * f.e1), f.e1.dot(h * f.e2), f.e2.dot(h * f.e1), f.e2.dot(h * f.e2);
    return m;
}

/// Tangential Hessian by central differences of the energy along great circles.
inline Eigen::Matrix2d tangential_hessian_fd(const Vec3& w, const SystemParams& params, double step = 1e-5) {
    const TangentFrame f = tangent_frame(w);
    auto energy_at = [&](double a, double b) {
        const Vec3 v = a * f.e1 + b * f.e2;
        const double t = v.norm();
        const Vec3 p = t == 0.0 ? w : Vec3(std::cos(t) * w + std::sin(t) * v / t);
        return detail::reduced_energy(p, params);
    };
    const double h = step;
    const double f0 = energy_at(0, 0);
    Eigen::Matrix2d m;
    m(0, 0) = (energy_at(h, 0) - 2 * f0 + energy_at(-h, 0)) / (h * h);
    m(1, 1) = (energy_at(0, h) - 2 * f0 + energy_at(0, -h)) / (h * h);
    m(0, 1) = m(1, 0) = (energy_at(h, h) - energy_at(h, -h) - energy_at(-h, h) + energy_at(-h, -h)) / (4 * h * h);
    return m;
}

inline std::array<double, 2> symmetric_eigenvalues(const Eigen::Matrix2d& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m, Eigen::EigenvaluesOnly);
    return {es.eigenvalues()(0), es.eigenvalues()(1)};
}

/// The reduced saddle lying under saddle_relative_equilibrium: (0, sqrt3 - 1, sqrt(2 sqrt3 - 3)).
inline SpherePoint reference_saddle() {
    const double s3 = std::numbers::sqrt3;
    const double w2 = s3 - 1.0;
    return SpherePoint::normalized(Vec3(0.0, w2, std::sqrt(2.0 * s3 - 3.0)));
}

/// The six saddles: the S3 orbit of reference_saddle().
inline std::vector<SpherePoint> saddle_orbit() {
    std::vector<SpherePoint> out;
    for (S3 g : kS3Elements) out.push_back(reference_saddle().transformed(permutation_matrix(g)));
    return out;
}

inline double center_energy(const SystemParams& params) {
    return reduced_hamiltonian_w(SpherePoint::south_pole(), params);
}

/// Common energy of the six unstable equilibria.
inline double saddle_energy(const SystemParams& params) {
    return reduced_hamiltonian_w(reference_saddle(), params);
}

struct CriticalPointOptions {
    int n_polar = 32;
    int n_azimuth = 64;
    double dedupe_distance = 1e-6;
    /// Seeds with min l below this are skipped.
    double seed_min_l = 1e-3;
    int max_iterations = 100;
    /// Convergence when |tangential gradient| <= gradient_tol * Gamma^2 / (36 pi).
    double gradient_tol = 1e-11;
    /// Hessian eigenvalues below this (relative to Gamma^2 / (36 pi)) mark a degenerate point.
    double degenerate_tol = 1e-8;
    std::ostream* log = nullptr;
};

/// Newton iteration for a zero of the tangential gradient, retracting to the
/// sphere by normalisation and backtracking on |grad|^2.
inline std::optional<Vec3> newton_on_sphere(Vec3 w, const SystemParams& params, const CriticalPointOptions& opts) {
    const double scale = detail::energy_scale(params);
    auto merit = [&](const Vec3& p) {
        const auto l = detail::l_values(p);
        if (*std::min_element(l.begin(), l.end()) <= 1e-12) return std::numeric_limits<double>::infinity();
        return tangential_gradient(p, params).squaredNorm();
    };
    w.normalize();
    double phi = merit(w);
    for (int it = 0; it < opts.max_iterations; ++it) {
        if (!std::isfinite(phi)) return std::nullopt;
        if (std::sqrt(phi) <= opts.gradient_tol * scale) return w;

        const TangentFrame f = tangent_frame(w);
        const Vec3 g = tangential_gradient(w, params);
        const Eigen::Vector2d gt(f.e1.dot(g), f.e2.dot(g));
        const Eigen::Matrix2d h = tangential_hessian(w, params);
        Eigen::Vector2d s;
        if (std::abs(h.determinant()) > 1e-14 * h.squaredNorm()) {
            s = -h.inverse() * gt;
        } else {
            s = -(h * gt);  // descent on |g|^2
            if (s.norm() == 0.0) s = -gt;
        }
        Vec3 step = s(0) * f.e1 + s(1) * f.e2;
        if (step.norm() > 0.5) step *= 0.5 / step.norm();

        double lambda = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            const Vec3 trial = (w + lambda * step).normalized();
            const double phi_trial = merit(trial);
            if (phi_trial < phi) {
                w = trial;
                phi = phi_trial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            // Stalled at rounding level: accept if the gradient is already small.
            if (std::sqrt(phi) <= 1e3 * opts.gradient_tol * scale) return w;
            return std::nullopt;
        }
    }
    return std::sqrt(phi) <= 1e3 * opts.gradient_tol * scale ? std::optional<Vec3>(w) : std::nullopt;
}

inline EquilibriumReport classify_equilibrium(const SpherePoint& w, const SystemParams& params,
                                              double degenerate_tol = 1e-8) {
    const auto eig = symmetric_eigenvalues(tangential_hessian(w.vec(), params));
    const double scale = detail::energy_scale(params);
    EquilibriumKind kind;
    if (std::abs(eig[0]) < degenerate_tol * scale || std::abs(eig[1]) < degenerate_tol * scale) {
        kind = EquilibriumKind::degenerate;
    } else if ((eig[0] > 0.0) == (eig[1] > 0.0)) {
        kind = EquilibriumKind::center;
    } else {
        kind = EquilibriumKind::saddle;
    }
    return {w, kind, reduced_hamiltonian_w(w, params), eig};
}

/// Critical points of the reduced energy from an n_polar x n_azimuth seed grid.
inline std::vector<EquilibriumReport> find_critical_points(const SystemParams& params,
                                                           const CriticalPointOptions& opts = {}) {
    std::vector<std::pair<Vec3, double>> found;  // point, |gradient|
    std::size_t failures = 0;
    for (int i = 0; i < opts.n_polar; ++i) {
        const double polar = kPi * (i + 0.5) / opts.n_polar;
        for (int j = 0; j < opts.n_azimuth; ++j) {
            const double az = 2.0 * kPi * j / opts.n_azimuth;
            const Vec3 seed(std::sin(polar) * std::cos(az), std::sin(polar) * std::sin(az), std::cos(polar));
            const auto l = detail::l_values(seed);
            if (*std::min_element(l.begin(), l.end()) < opts.seed_min_l) continue;
            const auto root = newton_on_sphere(seed, params, opts);
            if (!root) {
                ++failures;
                continue;
            }
            const double gnorm = tangential_gradient(*root, params).norm();
            bool duplicate = false;
            for (auto& [p, g] : found) {
                const double d = std::atan2(p.cross(*root).norm(), p.dot(*root));
                if (d < opts.dedupe_distance) {
                    if (gnorm < g) {
                        p = *root;
                        g = gnorm;
                    }
                    duplicate = true;
                    break;
                }
            }
            if (!duplicate) found.emplace_back(*root, gnorm);
        }
    }
    if (opts.log && failures > 0) {
        *opts.log << "find_critical_points: " << failures << " seeds did not converge\n";
    }

    std::vector<EquilibriumReport> out;
    out.reserve(found.size());
    for (const auto& [p, g] : found) {
        out.push_back(classify_equilibrium(SpherePoint::normalized(p), params, opts.degenerate_tol));
    }
    std::sort(out.begin(), out.end(), [](const EquilibriumReport& a, const EquilibriumReport& b) {
        const Vec3& x = a.point.vec();
        const Vec3& y = b.point.vec();
        if (std::abs(x.z() - y.z()) > 1e-9) return x.z() < y.z();
        return std::atan2(x.y(), x.x()) < std::atan2(y.y(), y.x());
    });
    return out;
}

}  // namespace vortexred
