#include <gtest/gtest.h>

#include <Eigen/LU>

#include "vortexred/reduction.hpp"
#include "vortexred/symmetry.hpp"

using namespace vortexred;

namespace {

const SystemParams kUnit(3.0, 1.0);

}  // namespace

TEST(S3, GroupTable) {
    for (S3 g : kS3Elements) {
        EXPECT_EQ(compose(g, inverse(g)), S3::e) << name(g);
        EXPECT_EQ(compose(S3::e, g), g);
        for (S3 h : kS3Elements) {
            for (S3 k : kS3Elements) EXPECT_EQ(compose(compose(g, h), k), compose(g, compose(h, k)));
        }
    }
    EXPECT_EQ(compose(S3::c123, compose(S3::c123, S3::c123)), S3::e);
    EXPECT_EQ(compose(S3::t12, S3::t12), S3::e);
}

TEST(PermutationMatrix, RotationsFixingTheAxisOrFlippingIt) {
    for (S3 g : kS3Elements) {
        const Eigen::Matrix3d m = permutation_matrix(g);
        EXPECT_NEAR(m.determinant(), 1.0, 1e-15) << name(g);
        EXPECT_LT((m * m.transpose() - Eigen::Matrix3d::Identity()).norm(), 1e-15);
    }
    const Eigen::Matrix3d c = permutation_matrix(S3::c123);
    EXPECT_LT((c * c * c - Eigen::Matrix3d::Identity()).norm(), 1e-15);
    EXPECT_EQ(permutation_matrix(S3::t23), Eigen::Vector3d(-1, 1, -1).asDiagonal().toDenseMatrix());
}

TEST(PermutationMatrix, IsAHomomorphism) {
    ASSERT_TRUE(kSigmaIsHomomorphism);
    for (S3 g : kS3Elements) {
        for (S3 h : kS3Elements) {
            const Eigen::Matrix3d lhs = permutation_matrix(compose(g, h));
            EXPECT_LT((lhs - permutation_matrix(g) * permutation_matrix(h)).norm(), 1e-15)
                << name(g) << " " << name(h);
        }
    }
}

// Relabel actual configurations and reduce: the matrices must match what the
// reduction sees, element by element.
TEST(PermutationMatrix, MatchesRelabelledConfigurations) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const PlanarConfig c = sample_level_set(kUnit, seed);
        const Vec3 w = reduce_config(c, kUnit).vec();
        for (S3 g : kS3Elements) {
            const Vec3 wg = reduce_config(relabel_outer(c, g), kUnit).vec();
            EXPECT_LT((wg - permutation_matrix(g) * w).norm(), 1e-12) << name(g) << " seed " << seed;
        }
    }
}

TEST(RelabelOuter, MovesSlotsAndKeepsTheCentre) {
    const PlanarConfig c = sample_level_set(kUnit, 3);
    const PlanarConfig r = relabel_outer(c, S3::c123);
    EXPECT_EQ(r.position(1), c.position(0));
    EXPECT_EQ(r.position(2), c.position(1));
    EXPECT_EQ(r.position(0), c.position(2));
    EXPECT_EQ(r.position(3), c.position(3));
    EXPECT_THROW(relabel_outer(PlanarConfig({Complex(0, 0)}, Strengths({1.0})), S3::e), std::invalid_argument);
}
