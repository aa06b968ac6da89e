#pragma once

// The permutation group S3 of the three identical outer vortices and its
// linear representation on the reduced sphere.

#include <array>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "vortexred/vortex_dynamics.hpp"

namespace vortexred {

/// Elements of S3 in cycle notation on the outer labels 1, 2, 3.
enum class S3 : std::uint8_t { e, t12, t13, t23, c123, c132 };

inline constexpr std::array<S3, 6> kS3Elements{S3::e, S3::t12, S3::t13, S3::t23, S3::c123, S3::c132};

inline constexpr std::string_view name(S3 g) {
    switch (g) {
        case S3::e: return "e";
        case S3::t12: return "(12)";
        case S3::t13: return "(13)";
        case S3::t23: return "(23)";
        case S3::c123: return "(123)";
        case S3::c132: return "(132)";
    }
    return "?";
}

/// Zero-based images (g(0), g(1), g(2)).
inline constexpr std::array<int, 3> images(S3 g) {
    switch (g) {
        case S3::e: return {0, 1, 2};
        case S3::t12: return {1, 0, 2};
        case S3::t13: return {2, 1, 0};
        case S3::t23: return {0, 2, 1};
        case S3::c123: return {1, 2, 0};
        case S3::c132: return {2, 0, 1};
    }
    return {0, 1, 2};
}

inline constexpr S3 from_images(std::array<int, 3> im) {
    for (S3 g : kS3Elements) {
        if (images(g) == im) return g;
    }
    throw std::invalid_argument("not a permutation of three labels");
}

/// (g h)(i) = g(h(i)).
inline constexpr S3 compose(S3 g, S3 h) {
    const auto gi = images(g);
    const auto hi = images(h);
    return from_images({gi[hi[0]], gi[hi[1]], gi[hi[2]]});
}

inline constexpr S3 inverse(S3 g) {
    const auto gi = images(g);
    std::array<int, 3> inv{};
    for (int i = 0; i < 3; ++i) inv[gi[i]] = i;
    return from_images(inv);
}

/// Relabeling the outer vortices by g (the vortex at slot i moves to slot g(i))
/// acts on the reduced sphere by permutation_matrix(g), i.e. g -> sigma_g is a
/// homomorphism for this action. Settled by brute force over all six elements
/// (see test_symmetry.cpp) and asserted by the equivariance suite.
inline constexpr bool kSigmaIsHomomorphism = true;

inline Eigen::Matrix3d permutation_matrix(S3 g) {
    const double h = 0.5;
    const double r = std::numbers::sqrt3 / 2.0;
    Eigen::Matrix3d m;
    switch (g) {
        case S3::e: m.setIdentity(); break;
        case S3::t12: m << h, -r, 0, -r, -h, 0, 0, 0, -1; break;
        case S3::t13: m << h, r, 0, r, -h, 0, 0, 0, -1; break;
        case S3::t23: m << -1, 0, 0, 0, 1, 0, 0, 0, -1; break;
        case S3::c123: m << -h, -r, 0, r, -h, 0, 0, 0, 1; break;
        case S3::c132: m << -h, r, 0, -r, -h, 0, 0, 0, 1; break;
    }
    return m;
}

/// Outer vortex at slot i is moved to slot g(i); the central vortex (slot 3) stays.
inline PlanarConfig relabel_outer(const PlanarConfig& config, S3 g) {
    if (config.size() != 4) throw std::invalid_argument("relabel_outer needs the 4-vortex instance");
    std::vector<Complex> z(config.positions().begin(), config.positions().end());
    const auto gi = images(g);
    for (int i = 0; i < 3; ++i) z[gi[i]] = config.position(i);
    return PlanarConfig(std::move(z), config.strengths());
}

}  // namespace vortexred
