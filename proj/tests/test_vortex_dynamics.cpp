#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "vortexred/vortex_dynamics.hpp"

using namespace vortexred;

namespace {

const SystemParams kUnit(3.0, 1.0);

PlanarConfig random_four(std::mt19937_64& rng, double spread = 1.5) {
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<Complex> z;
    for (int i = 0; i < 4; ++i) z.emplace_back(u(rng), u(rng));
    return PlanarConfig(z, Strengths::distinguished(3.0));
}

}  // namespace

TEST(SystemParams, RejectsDegenerateValues) {
    EXPECT_THROW(SystemParams(0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(SystemParams(3.0, 0.0), std::invalid_argument);
    EXPECT_THROW(SystemParams(3.0, -1.0), std::invalid_argument);
    EXPECT_THROW(SystemParams(std::nan(""), 1.0), std::invalid_argument);
}

TEST(SystemParams, DerivedConstants) {
    const SystemParams p(2.0, 1.5);
    EXPECT_DOUBLE_EQ(p.mu_e().rot, 2.0 * 2.25 / 2.0);
    EXPECT_EQ(p.mu_e().tx, 0.0);
    EXPECT_DOUBLE_EQ(p.theta_dot_e(), 2.0 / (3.0 * std::numbers::pi * 2.25));
    EXPECT_NEAR(kUnit.theta_dot_e(), 1.0 / std::numbers::pi, 1e-16);
}

TEST(Strengths, DistinguishedInstance) {
    const auto s = Strengths::distinguished(3.0);
    ASSERT_EQ(s.size(), 4u);
    EXPECT_EQ(s[0], -1.0);
    EXPECT_EQ(s[3], 3.0);
    EXPECT_EQ(s.total(), 0.0);
    EXPECT_THROW(Strengths({1.0, 0.0}), std::invalid_argument);
}

TEST(PlanarConfig, Validation) {
    EXPECT_THROW(PlanarConfig({Complex(0, 0)}, Strengths({1.0, 1.0})), std::invalid_argument);
    EXPECT_THROW(PlanarConfig({Complex(std::nan(""), 0)}, Strengths({1.0})), std::invalid_argument);
    const auto c = canonical_relative_equilibrium(kUnit);
    const auto back = PlanarConfig::from_state(c.to_state(), c.strengths());
    for (std::size_t n = 0; n < 4; ++n) EXPECT_EQ(back.position(n), c.position(n));
}

TEST(Hamiltonian, TwoUnitVorticesAtUnitDistance) {
    const PlanarConfig c({Complex(0, 0), Complex(1, 0)}, Strengths({1.0, 1.0}));
    EXPECT_EQ(hamiltonian(c), 0.0);
}

TEST(Hamiltonian, CanonicalRing) {
    EXPECT_NEAR(hamiltonian(canonical_relative_equilibrium(kUnit)), -3.0 * std::log(3.0) / (4.0 * std::numbers::pi),
                1e-15);
}

TEST(Hamiltonian, ScalingShift) {
    const auto c = canonical_relative_equilibrium(kUnit);
    const double shift = hamiltonian(c.scaled(2.0)) - hamiltonian(c);
    EXPECT_NEAR(shift, 9.0 / (3.0 * std::numbers::pi) * std::log(2.0), 1e-14);
}

TEST(Hamiltonian, CoincidentPairIsReported) {
    const PlanarConfig c({Complex(0, 0), Complex(1, 0), Complex(1, 0)}, Strengths({1.0, 1.0, 1.0}));
    try {
        hamiltonian(c);
        FAIL() << "expected CoincidentVortices";
    } catch (const CoincidentVortices& e) {
        EXPECT_EQ(e.first(), 1u);
        EXPECT_EQ(e.second(), 2u);
    }
    EXPECT_THROW(velocity_field(c), CoincidentVortices);
}

TEST(Momentum, SingleVortexAtOrigin) {
    const auto m = momentum(PlanarConfig({Complex(0, 0)}, Strengths({1.0})));
    EXPECT_EQ(m.rot, 0.0);
    EXPECT_EQ(m.tx, 0.0);
    EXPECT_EQ(m.ty, 0.0);
}

TEST(Momentum, CanonicalRingIsMuE) {
    const auto m = momentum(canonical_relative_equilibrium(kUnit));
    EXPECT_NEAR(m.rot, 1.5, 1e-15);
    EXPECT_NEAR(m.tx, 0.0, 1e-15);
    EXPECT_NEAR(m.ty, 0.0, 1e-15);
    const SystemParams p(-2.0, 0.7);
    EXPECT_LT(momentum(canonical_relative_equilibrium(p)).max_abs_difference(p.mu_e()), 1e-15);
}

TEST(Momentum, CanonicalRingTranslated) {
    const auto m = momentum(canonical_relative_equilibrium(kUnit).translated({1.0, 0.0}));
    EXPECT_NEAR(m.rot, 1.5, 1e-14);
    EXPECT_NEAR(m.tx, 0.0, 1e-14);
    EXPECT_NEAR(m.ty, 0.0, 1e-14);
}

// With total strength zero the translational part is invariant; the
// rotational part is invariant only when the translational part vanishes,
// and otherwise shifts by -Re(conj(a) sum Gamma z).
TEST(Momentum, TranslationProperty) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 100; ++k) {
        const auto c = random_four(rng);
        const Complex a(u(rng), u(rng));
        const auto m0 = momentum(c);
        const auto m1 = momentum(c.translated(a));
        Complex s(0, 0);
        for (std::size_t n = 0; n < 4; ++n) s += c.strength(n) * c.position(n);
        EXPECT_NEAR(m1.tx, m0.tx, 1e-12);
        EXPECT_NEAR(m1.ty, m0.ty, 1e-12);
        EXPECT_NEAR(m1.rot, m0.rot - (std::conj(a) * s).real(), 1e-12);

        // Centre the weighted positions (tr = 0): then rot is invariant too.
        std::vector<Complex> z(c.positions().begin(), c.positions().end());
        z[3] -= s / c.strength(3);
        const PlanarConfig centred(z, c.strengths());
        ASSERT_NEAR(momentum(centred).tx, 0.0, 1e-12);
        EXPECT_NEAR(momentum(centred.translated(a)).rot, momentum(centred).rot, 1e-12);
    }
}

TEST(VelocityField, SingleVortexIsFixed) {
    const auto v = velocity_field(PlanarConfig({Complex(0.3, -1.0)}, Strengths({2.0})));
    EXPECT_EQ(v[0], Complex(0.0, 0.0));
}

TEST(VelocityField, CanonicalRingValues) {
    const auto v = velocity_field(canonical_relative_equilibrium(kUnit));
    EXPECT_NEAR(v[0].real(), 0.0, 1e-15);
    EXPECT_NEAR(v[0].imag(), 1.0 / std::numbers::pi, 1e-15);
    EXPECT_NEAR(std::abs(v[3]), 0.0, 1e-15);
}

TEST(VelocityField, CanonicalRingRotatesRigidly) {
    for (const SystemParams& p : {kUnit, SystemParams(-1.7, 2.3)}) {
        const auto c = canonical_relative_equilibrium(p);
        const auto v = velocity_field(c);
        for (std::size_t n = 0; n < 4; ++n) {
            const Complex rigid = p.theta_dot_e() * Complex(0.0, 1.0) * c.position(n);
            EXPECT_NEAR(std::abs(v[n] - rigid), 0.0, 1e-14);
        }
    }
}

TEST(VelocityField, EqualPairOnUnitCircle) {
    const PlanarConfig c({Complex(1, 0), Complex(-1, 0)}, Strengths({1.0, 1.0}));
    const auto v = velocity_field(c);
    EXPECT_NEAR(v[0].real(), 0.0, 1e-16);
    EXPECT_NEAR(v[0].imag(), 1.0 / (4.0 * std::numbers::pi), 1e-16);
    EXPECT_NEAR(v[1].imag(), -1.0 / (4.0 * std::numbers::pi), 1e-16);
}

TEST(VelocityField, EnergyIsConstantAlongTheField) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 100; ++k) {
        const auto c = random_four(rng);
        if (c.closest_pair().first < 0.05) continue;
        const auto v = velocity_field(c);
        auto energy_at = [&](double eps) {
            std::vector<Complex> z(c.positions().begin(), c.positions().end());
            for (std::size_t n = 0; n < 4; ++n) z[n] += eps * v[n];
            return hamiltonian(PlanarConfig(z, c.strengths()));
        };
        const double h = 1e-6;
        EXPECT_LT(std::abs(energy_at(h) - energy_at(-h)) / (2 * h), 1e-7);
    }
}

// Gamma_n xdot_n = dH/dy_n and Gamma_n ydot_n = -dH/dx_n.
TEST(VelocityField, HamiltonianGradientConsistency) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 100; ++k) {
        const auto c = random_four(rng);
        if (c.closest_pair().first < 0.05) continue;
        const auto v = velocity_field(c);
        const auto state = c.to_state();
        for (std::size_t i = 0; i < state.size(); ++i) {
            const double h = 1e-6;
            auto shifted = state;
            shifted[i] += h;
            const double hp = hamiltonian(PlanarConfig::from_state(shifted, c.strengths()));
            shifted[i] -= 2 * h;
            const double hm = hamiltonian(PlanarConfig::from_state(shifted, c.strengths()));
            const double dh = (hp - hm) / (2 * h);
            const std::size_t n = i / 2;
            const double expected = (i % 2 == 1) ? c.strength(n) * v[n].real() : -c.strength(n) * v[n].imag();
            EXPECT_LT(std::abs(dh - expected), 1e-6 * std::max(1.0, std::abs(expected)));
        }
    }
}

TEST(Configurations, CanonicalCoordinates) {
    const auto c = canonical_relative_equilibrium(kUnit);
    EXPECT_NEAR(c.position(1).real(), -0.5, 1e-15);
    EXPECT_NEAR(c.position(1).imag(), std::numbers::sqrt3 / 2, 1e-15);
    EXPECT_NEAR(c.position(2).imag(), -std::numbers::sqrt3 / 2, 1e-15);
    EXPECT_EQ(c.position(3), Complex(0, 0));
    const auto m = mirror_relative_equilibrium(kUnit);
    EXPECT_EQ(m.position(1), c.position(2));
}

TEST(Configurations, SaddleRelativeEquilibrium) {
    const auto c = saddle_relative_equilibrium(kUnit);
    EXPECT_NEAR(c.position(0).real(), 1.316074, 1e-6);
    EXPECT_NEAR(c.position(1).real(), -0.658037, 1e-6);
    EXPECT_NEAR(c.position(1).imag(), -0.448288, 1e-6);
    EXPECT_NEAR(c.position(2).imag(), 0.448288, 1e-6);
    EXPECT_NEAR(std::norm(c.position(1) - c.position(2)), 6.0 - 3.0 * std::numbers::sqrt3, 1e-14);
    EXPECT_NEAR(std::norm(c.position(3) - c.position(0)), std::numbers::sqrt3, 1e-14);
    EXPECT_LT(momentum(c).max_abs_difference(kUnit.mu_e()), 1e-14);
}

TEST(Configurations, SaddleIsARelativeEquilibrium) {
    const auto c = saddle_relative_equilibrium(kUnit);
    const auto v = velocity_field(c);
    // Rigid motion: v_n - v_4 = omega i (z_n - z_4) with a common omega.
    const Complex z4 = c.position(3);
    const double omega = ((v[0] - v[3]) / (Complex(0, 1) * (c.position(0) - z4))).real();
    for (std::size_t n = 0; n < 3; ++n) {
        EXPECT_NEAR(std::abs(v[n] - v[3] - omega * Complex(0, 1) * (c.position(n) - z4)), 0.0, 1e-14);
    }
}
