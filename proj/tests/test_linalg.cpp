#include "dfsctl/linalg.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dfsctl;

TEST(Svd, RankDeficientProductKeepsRank)
{
    // low-rank inputs with many exactly repeated zero singular values
    std::mt19937_64 rng(1);
    for (int r : {1, 7, 40}) {
        const RMatrix a = RMatrix::NullaryExpr(300, r, [&] { return std::normal_distribution<double>()(rng); }) *
                          RMatrix::NullaryExpr(r, 200, [&] { return std::normal_distribution<double>()(rng); });
        EXPECT_EQ(linalg::numerical_rank(a, 1e-9).rank, r);
        const auto svd = linalg::svd(a);
        EXPECT_LT((svd.u * svd.s.asDiagonal() * svd.v.transpose() - a).norm(), 1e-9 * a.norm());
        const RMatrix n = linalg::null_space(a, 1e-9);
        EXPECT_EQ(n.cols(), 200 - r);
        EXPECT_LT((a * n).norm(), 1e-9 * a.norm());
        EXPECT_EQ(linalg::orth(a, 1e-9).cols(), r);
    }
}

TEST(Svd, WideMatrixNullSpace)
{
    const CMatrix a = (CMatrix(1, 3) << 1.0, cplx(0, 1), 0.0).finished();
    const CMatrix n = linalg::null_space(a, 1e-12);
    EXPECT_EQ(n.cols(), 2);
    EXPECT_LT((a * n).norm(), 1e-14);
}

TEST(PrincipalAngles, KnownAnglesAndTinyOnes)
{
    RMatrix a = RMatrix::Zero(3, 1);
    a(0, 0) = 1.0;
    RMatrix b = RMatrix::Zero(3, 1);
    b(0, 0) = std::cos(0.3);
    b(1, 0) = std::sin(0.3);
    EXPECT_NEAR(linalg::principal_angles(a, b)(0), 0.3, 1e-14);
    b(0, 0) = std::cos(1e-11);
    b(1, 0) = std::sin(1e-11);
    EXPECT_NEAR(linalg::principal_angles(a, b)(0), 1e-11, 1e-15);
    RMatrix plane = RMatrix::Zero(3, 2);
    plane(0, 0) = plane(1, 1) = 1.0;
    RMatrix c = RMatrix::Zero(3, 1);
    c(2, 0) = 1.0;
    EXPECT_NEAR(linalg::principal_angles(plane, c)(0), M_PI / 2, 1e-14);
    EXPECT_NEAR(linalg::principal_angles(c, plane)(0), M_PI / 2, 1e-14);
}

TEST(Intersection, PlanesMeetInLine)
{
    RMatrix a = RMatrix::Zero(3, 2);
    a(0, 0) = a(1, 1) = 1.0;
    RMatrix b = RMatrix::Zero(3, 2);
    b(0, 0) = 1.0;
    b(1, 1) = b(2, 1) = std::sqrt(0.5);
    const RMatrix i = linalg::intersection(a, b, 1e-8);
    ASSERT_EQ(i.cols(), 1);
    EXPECT_NEAR(std::abs(i(0, 0)), 1.0, 1e-12);
}

TEST(Rref, PivotsAndReducedForm)
{
    RMatrix a(2, 3);
    a << 2, 4, 0, 1, 2, 1;
    const auto piv = linalg::rref(a, 1e-12);
    EXPECT_EQ(piv, (std::vector<Index>{0, 2}));
    EXPECT_NEAR(a(0, 1), 2.0, 1e-14);
    EXPECT_NEAR(a(1, 2), 1.0, 1e-14);
    EXPECT_NEAR(a(0, 2), 0.0, 1e-14);
}

TEST(HermitianUnits, OrthonormalAndSpanning)
{
    for (int n : {1, 2, 3, 5}) {
        const auto u = linalg::hermitian_units(n);
        ASSERT_EQ(static_cast<int>(u.size()), n * n);
        for (std::size_t i = 0; i < u.size(); ++i) {
            EXPECT_LT((u[i] - u[i].adjoint()).norm(), 1e-15);
            for (std::size_t j = 0; j < u.size(); ++j) EXPECT_NEAR(std::abs((u[i] * u[j]).trace()), i == j ? 1.0 : 0.0, 1e-14);
        }
        const auto t = linalg::traceless_hermitian_basis(n);
        ASSERT_EQ(static_cast<int>(t.size()), n * n - 1);
        for (const auto& x : t) EXPECT_LT(std::abs(x.trace()), 1e-14);
    }
}
