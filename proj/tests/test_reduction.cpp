#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vortexred/reduction.hpp"

using namespace vortexred;

namespace {

const SystemParams kUnit(3.0, 1.0);
const double kS3 = std::numbers::sqrt3;

void expect_close(const Vec3& a, const Vec3& b, double tol) {
    EXPECT_LT((a - b).norm(), tol) << a.transpose() << " vs " << b.transpose();
}

}  // namespace

TEST(BasisMatrix, Orthonormal) {
    const auto& e = basis_matrix();
    EXPECT_LT((e.transpose() * e - Eigen::Matrix4d::Identity()).norm(), 1e-15);
    // Each column has zero complex sum over the three outer vortices.
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(e(0, k) + e(2, k) + e(4, k), 0.0, 1e-15);
        EXPECT_NEAR(e(1, k) + e(3, k) + e(5, k), 0.0, 1e-15);
    }
}

TEST(Chart, CanonicalRingSitsAtTheSouthPole) {
    const ChartPoint u = to_chart(canonical_relative_equilibrium(kUnit), kUnit);
    EXPECT_NEAR(u.u1, kS3, 1e-15);
    EXPECT_NEAR(u.v1, 0.0, 1e-15);
    EXPECT_NEAR(u.u2, 0.0, 1e-15);
    EXPECT_NEAR(u.v2, 0.0, 1e-15);
    const HopfImage w = hopf(u, kUnit);
    EXPECT_NEAR(w.w3, -1.0, 1e-15);
    EXPECT_NEAR(w.w4, 1.0, 1e-15);
    expect_close(reduce_config(mirror_relative_equilibrium(kUnit), kUnit).vec(), Vec3(0, 0, 1), 1e-15);
}

TEST(Chart, TranslationDoesNotMatter) {
    const PlanarConfig c = sample_level_set(kUnit, 5);
    const ChartPoint a = to_chart(c, kUnit);
    const ChartPoint b = to_chart(c.translated({0.7, -2.0}), kUnit);
    EXPECT_LT((a.vec() - b.vec()).norm(), 1e-14);
    EXPECT_NEAR(a.norm2(), 3.0, 1e-13);
}

TEST(Chart, RejectsOffLevelSetInput) {
    const PlanarConfig c = canonical_relative_equilibrium(kUnit);
    EXPECT_THROW(to_chart(c.scaled(1.1), kUnit), MomentumMismatch);
    EXPECT_THROW(to_chart(c, SystemParams(3.0, 2.0)), MomentumMismatch);
    EXPECT_THROW(to_chart(c, SystemParams(-3.0, 1.0)), std::invalid_argument);
    const PlanarConfig shifted({c.position(0) + 0.1, c.position(1), c.position(2), c.position(3)}, c.strengths());
    EXPECT_THROW(to_chart(shifted, kUnit), MomentumMismatch);
}

TEST(Chart, LiftInvertsToChart) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const PlanarConfig c = sample_level_set(kUnit, seed).translated({1.0, 2.0});
        const PlanarConfig back = lift(to_chart(c, kUnit), kUnit);
        for (std::size_t n = 0; n < 4; ++n) {
            EXPECT_LT(std::abs(back.position(n) - (c.position(n) - c.position(3))), 1e-14);
        }
    }
}

TEST(Hopf, LandsOnTheCone) {
    const SystemParams p(2.0, 1.7);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const HopfImage w = hopf(to_chart(sample_level_set(p, seed), p), p);
        EXPECT_NEAR(w.cone_residual(), 0.0, 1e-14);
        EXPECT_NEAR(w.w4, 1.0, 1e-14);
    }
    // Off the level set the cone still holds with w4 = |u|^2 / (3 alpha^2).
    const HopfImage w = hopf({1.0, 2.0, -0.5, 0.3}, kUnit);
    EXPECT_NEAR(w.cone_residual(), 0.0, 1e-14);
    EXPECT_NEAR(w.w4, (1.0 + 4.0 + 0.25 + 0.09) / 3.0, 1e-15);
}

TEST(Section, RoundTripsThroughHopf) {
    std::mt19937_64 rng(17);
    for (const SystemParams& p : {kUnit, SystemParams(-1.0, 0.4)}) {
        for (int k = 0; k < 200; ++k) {
            const SpherePoint w = sample_sphere(rng);
            if (w.w3() > 0.99) continue;
            const ChartPoint u = section(w, p);
            EXPECT_EQ(u.v1, 0.0);
            EXPECT_NEAR(u.norm2(), 3.0 * p.alpha() * p.alpha(), 1e-12);
            const HopfImage h = hopf(u, p);
            expect_close(h.direction(), w.vec(), 1e-13);
            EXPECT_NEAR(h.w4, 1.0, 1e-13);
        }
    }
}

TEST(Section, SouthPole) {
    const ChartPoint u = section(SpherePoint::south_pole(), SystemParams(3.0, 2.0));
    EXPECT_NEAR(u.u1, 2.0 * kS3, 1e-14);
    EXPECT_EQ(u.u2, 0.0);
    EXPECT_EQ(u.v2, 0.0);
}

TEST(Section, UndefinedAtTheNorthPole) {
    EXPECT_THROW(section(SpherePoint::north_pole(), kUnit), NearNorthPole);
    EXPECT_THROW(section(SpherePoint::normalized(Vec3(1e-4, 0, 1)), kUnit), NearNorthPole);
    const ChartPoint u = section_any(SpherePoint::north_pole(), kUnit);
    expect_close(hopf(u, kUnit).direction(), Vec3(0, 0, 1), 1e-14);
    const SpherePoint near = SpherePoint::normalized(Vec3(3e-4, -2e-4, 1));
    expect_close(hopf(section_any(near, kUnit), kUnit).direction(), near.vec(), 1e-12);
}

TEST(SpherePoint, RejectsNonUnitVectors) {
    EXPECT_THROW(SpherePoint(1.0, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(SpherePoint::normalized(Vec3::Zero()), std::invalid_argument);
    EXPECT_NO_THROW(SpherePoint(0.6, 0.0, 0.8));
}

TEST(LFunctionals, KnownPoints) {
    const LFunctionals s = l_functionals(SpherePoint::south_pole());
    for (double v : {s.l12, s.l13, s.l23}) EXPECT_NEAR(v, 6.0, 1e-15);
    for (double v : {s.l41, s.l42, s.l43}) EXPECT_NEAR(v, 2.0, 1e-15);

    const LFunctionals e = l_functionals(SpherePoint(0.0, 1.0, 0.0));
    EXPECT_EQ(e.l23, 0.0);
    EXPECT_NEAR(e.l12, 9.0, 1e-15);
    EXPECT_NEAR(e.l41, 4.0, 1e-15);
    EXPECT_NEAR(e.l42, 1.0, 1e-15);

    const LFunctionals w = l_functionals(SpherePoint::normalized(Vec3(0.0, kS3 - 1.0, std::sqrt(2 * kS3 - 3))));
    EXPECT_NEAR(w.l23, 12.0 - 6.0 * kS3, 1e-14);
    EXPECT_NEAR(w.l41, 2.0 * kS3, 1e-14);
}

// Oracle: squared distances of the lifted configuration.
TEST(LFunctionals, MatchPairDistances) {
    const SystemParams p(1.0, 1.3);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const PlanarConfig c = sample_level_set(p, seed);
        const auto l = l_functionals(reduce_config(c, p)).values();
        for (std::size_t k = 0; k < 6; ++k) {
            const auto [i, j] = LFunctionals::kPairs[k];
            EXPECT_NEAR(0.5 * p.alpha() * p.alpha() * l[k], std::norm(c.position(i) - c.position(j)), 1e-12);
        }
    }
}

TEST(ReducedEnergy, MatchesTheFullHamiltonian) {
    for (const SystemParams& p : {kUnit, SystemParams(-2.0, 0.6)}) {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const PlanarConfig c = sample_level_set(p, seed);
            const double h = hamiltonian(c);
            EXPECT_NEAR(reduced_hamiltonian_w(reduce_config(c, p), p), h, 1e-11 * std::max(1.0, std::abs(h)));
        }
    }
}

TEST(ReducedEnergy, CollisionsAreSignedInfinities) {
    EXPECT_EQ(reduced_hamiltonian_w(SpherePoint(0.0, 1.0, 0.0), kUnit), std::numeric_limits<double>::infinity());
    EXPECT_EQ(reduced_hamiltonian_w(SpherePoint(0.0, -1.0, 0.0), kUnit), -std::numeric_limits<double>::infinity());
}

TEST(ReducedVectorField, VanishesAtThePolesAndTheSaddle) {
    const double s = std::sqrt(2 * kS3 - 3);
    for (const Vec3& w : {Vec3(0, 0, -1), Vec3(0, 0, 1), Vec3(Vec3(0, kS3 - 1, s).normalized())}) {
        EXPECT_LT(reduced_vector_field(SpherePoint::normalized(w), kUnit).norm(), 1e-14);
    }
}

TEST(ReducedVectorField, TangentAndEnergyPreserving) {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 200; ++k) {
        const SpherePoint w = sample_sphere(rng);
        if (l_functionals(w).min() < 1e-3) continue;
        const Vec3 x = reduced_vector_field(w, kUnit);
        EXPECT_NEAR(x.dot(w.vec()), 0.0, 1e-12 * std::max(1.0, x.norm()));
        const double h = 1e-6;
        const double dh = (reduced_hamiltonian_w(SpherePoint::normalized(w.vec() + h * x), kUnit) -
                           reduced_hamiltonian_w(SpherePoint::normalized(w.vec() - h * x), kUnit)) /
                          (2 * h);
        EXPECT_LT(std::abs(dh), 1e-6 * std::max(1.0, x.squaredNorm()));
    }
}

// At the canonical ring the rigid rotation is pure symmetry, so nearby
// reduced motion is slow; at a generic point the field must match the
// projection of the full velocity.
TEST(ReducedVectorField, MatchesProjectedFullVelocity) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const PlanarConfig c = sample_level_set(kUnit, seed);
        const SpherePoint w = reduce_config(c, kUnit);
        if (l_functionals(w).min() < 1e-2) continue;
        const auto v = velocity_field(c);
        const double dt = 1e-6;
        auto moved = [&](double s) {
            std::vector<Complex> z(c.positions().begin(), c.positions().end());
            for (std::size_t n = 0; n < 4; ++n) z[n] += s * v[n];
            return hopf(to_chart(PlanarConfig(z, c.strengths()), kUnit, 1e-6), kUnit).direction();
        };
        const Vec3 fd = (moved(dt) - moved(-dt)) / (2 * dt);
        const Vec3 x = reduced_vector_field(w, kUnit);
        EXPECT_LT((fd - x).norm(), 1e-6 * std::max(1.0, x.norm())) << seed;
    }
}

TEST(ReducedVectorField, RefusesCollisionNeighbourhoods) {
    EXPECT_THROW(reduced_vector_field(SpherePoint(0.0, 1.0, 0.0), kUnit), NearCollision);
    EXPECT_THROW(reduced_vector_field(SpherePoint(0.0, -1.0, 0.0), kUnit), NearCollision);
}

TEST(SampleLevelSet, OnTheLevelSetAndDeterministic) {
    const SystemParams p(2.5, 0.8);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const PlanarConfig c = sample_level_set(p, seed);
        EXPECT_LT(momentum(c).max_abs_difference(p.mu_e()), 1e-14);
        EXPECT_LT(std::abs(c.position(0) + c.position(1) + c.position(2) - 3.0 * c.position(3)), 1e-14);
        const PlanarConfig d = sample_level_set(p, seed);
        for (std::size_t n = 0; n < 4; ++n) EXPECT_EQ(c.position(n), d.position(n));
    }
    EXPECT_NE(sample_level_set(p, 1).position(0), sample_level_set(p, 2).position(0));
}
