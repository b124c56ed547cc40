#include "dfsctl/cvs.hpp"
#include "dfsctl/linalg.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace dfsctl;
using namespace dfsctl::cvs;

namespace {

double maxdiff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

RMatrix gram(const HermitianBasis& b)
{
    RMatrix g(b.dim(), b.dim());
    for (int j = 0; j < b.dim(); ++j) {
        const CVector c = b.complex_coefficients(b.element(j));  // tr(F_i F_j)
        EXPECT_LT(c.imag().cwiseAbs().maxCoeff(), 1e-13);
        g.col(j) = c.real();
    }
    return g;
}

model::LindbladModel random_model(int n, int nc, int nd, std::mt19937_64& rng)
{
    model::LindbladModel m;
    m.hilbert_dim = n;
    m.drift = oracle::random_hermitian(n, rng);
    for (int k = 0; k < nc; ++k) m.controls.push_back(oracle::random_hermitian(n, rng));
    std::uniform_real_distribution<double> rate(0.1, 1.0);
    for (int j = 0; j < nd; ++j) m.noise.push_back({rate(rng), oracle::random_complex(n, rng) / std::sqrt(2.0 * n)});
    return m;
}

}  // namespace

TEST(Basis, QubitBlochIsNormalizedPauli)
{
    const auto b = HermitianBasis::make(2, BasisKind::bloch_ball);
    ASSERT_EQ(b.dim(), 4);
    EXPECT_EQ(b.identity_index(), 0);
    const char order[] = {'I', 'X', 'Y', 'Z'};
    for (int j = 0; j < 4; ++j) EXPECT_LT(maxdiff(b.element(j), oracle::pauli(order[j]) / std::sqrt(2.0)), 1e-15);
}

TEST(Basis, TwoQubitOrderIsLexicographic)
{
    const auto b = HermitianBasis::make(4, BasisKind::bloch_ball);
    // index 4*a + b holds sigma_a (x) sigma_b
    EXPECT_LT(maxdiff(b.element(4 * 2 + 3), oracle::pauli_string("YZ") / 2.0), 1e-15);
    EXPECT_LT(maxdiff(b.element(1), oracle::pauli_string("IX") / 2.0), 1e-15);
}

TEST(Basis, FiveQubitTraceOrthonormal)
{
    const auto b = HermitianBasis::make(32, BasisKind::bloch_ball);
    ASSERT_EQ(b.dim(), 1024);
    EXPECT_LT((gram(b) - RMatrix::Identity(1024, 1024)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(maxdiff(b.element(b.identity_index()), CMatrix::Identity(32, 32) / std::sqrt(32.0)), 1e-15);
    for (int j : {1, 77, 512, 1023}) EXPECT_LT(linalg::hermitian_defect(b.element(j)), 1e-15);
}

TEST(Basis, GellMannQutrit)
{
    const auto b = HermitianBasis::make(3, BasisKind::gell_mann);
    ASSERT_EQ(b.dim(), 9);
    EXPECT_LT((gram(b) - RMatrix::Identity(9, 9)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(maxdiff(b.element(b.identity_index()), CMatrix::Identity(3, 3) / std::sqrt(3.0)), 1e-15);
    int identity_like = 0;
    for (int j = 0; j < 9; ++j) {
        const CMatrix f = b.element(j);
        EXPECT_LT(linalg::hermitian_defect(f), 1e-15);
        if ((f - f(0, 0) * CMatrix::Identity(3, 3)).norm() < 1e-12) ++identity_like;
    }
    EXPECT_EQ(identity_like, 1);
}

TEST(Basis, BlochRequiresPowerOfTwo)
{
    EXPECT_THROW(HermitianBasis::make(3, BasisKind::bloch_ball), InputError);
    EXPECT_THROW(HermitianBasis::make(1, BasisKind::gell_mann), InputError);
}

TEST(CoherenceVector, MaximallyMixed)
{
    for (int n : {2, 3, 4}) {
        const auto b = default_basis(n);
        const RVector v = rho_to_v(CMatrix::Identity(n, n) / n, *b);
        RVector e = RVector::Zero(n * n);
        e(b->identity_index()) = 1.0 / std::sqrt(static_cast<double>(n));
        EXPECT_LT((v - e).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(CoherenceVector, QubitGroundState)
{
    const auto b = default_basis(2);
    CMatrix rho = CMatrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    const RVector v = rho_to_v(rho, *b);
    const double h = 1.0 / std::sqrt(2.0);
    EXPECT_LT((v - (RVector(4) << h, 0, 0, h).finished()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CoherenceVector, RoundTripAndNorm)
{
    std::mt19937_64 rng(11);
    for (int n : {2, 3, 4, 8}) {
        const auto b = default_basis(n);
        for (int t = 0; t < 5; ++t) {
            const CMatrix rho = oracle::random_density(n, rng);
            const RVector v = rho_to_v(rho, *b);
            EXPECT_LE(v.norm(), 1.0 + 1e-9);
            EXPECT_LT((v_to_rho(v, *b) - rho).norm(), 1e-12);
        }
    }
}

TEST(CoherenceVector, RejectsInvalidStates)
{
    const auto b = default_basis(2);
    EXPECT_THROW(rho_to_v(CMatrix::Identity(2, 2), *b), InputError);
    CMatrix neg = CMatrix::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    EXPECT_THROW(rho_to_v(neg, *b), InputError);
}

TEST(HToG, IdentityMapsToZero)
{
    const auto b = default_basis(4);
    EXPECT_LT(h_to_g(2.5 * CMatrix::Identity(4, 4), *b).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(HToG, QubitZCouplesOnlyXY)
{
    const auto b = default_basis(2);
    const RMatrix g = h_to_g(oracle::pauli('Z') / std::sqrt(2.0), *b);
    // -i tr([s_z/sqrt2, s_x/sqrt2] s_y/sqrt2) = sqrt2, and the mirror entry
    RMatrix expect = RMatrix::Zero(4, 4);
    expect(2, 1) = std::sqrt(2.0);
    expect(1, 2) = -std::sqrt(2.0);
    EXPECT_LT((g - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(HToG, LinearAndSkew)
{
    std::mt19937_64 rng(3);
    const auto b = default_basis(3);
    for (int t = 0; t < 5; ++t) {
        const CMatrix h1 = oracle::random_hermitian(3, rng);
        const CMatrix h2 = oracle::random_hermitian(3, rng);
        const RMatrix g = h_to_g(0.3 * h1 - 1.7 * h2, *b);
        EXPECT_LT((g - (0.3 * h_to_g(h1, *b) - 1.7 * h_to_g(h2, *b))).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((g + g.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(HToG, LieIsomorphismWithPhase)
{
    std::mt19937_64 rng(5);
    for (int n : {2, 3, 4}) {
        const auto b = default_basis(n);
        for (int t = 0; t < 10; ++t) {
            const CMatrix x1 = oracle::random_hermitian(n, rng);
            const CMatrix x2 = oracle::random_hermitian(n, rng);
            // [X1, X2] is anti-Hermitian; extend h_to_g complex-linearly via i*K
            const CMatrix k = cplx(0, -1) * (x1 * x2 - x2 * x1);
            const RMatrix g1 = h_to_g(x1, *b);
            const RMatrix g2 = h_to_g(x2, *b);
            const CMatrix lhs = cplx(0, 1) * h_to_g(k, *b).cast<cplx>();
            const CMatrix rhs = cplx(0, 1) * (g1 * g2 - g2 * g1).cast<cplx>();
            EXPECT_LT(maxdiff(lhs, rhs), 1e-9);
        }
    }
}

TEST(Liouvillian, NoiselessDriftIsHamiltonian)
{
    std::mt19937_64 rng(9);
    const auto m = random_model(4, 2, 0, rng);
    const auto g = liouvillian_to_g(m);
    EXPECT_LT((g.g0 - h_to_g(m.drift, *g.basis)).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((g.g0 + g.g0.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(g.noiseless());
    ASSERT_EQ(g.n_controls(), 2);
    EXPECT_LT((g.gc[1] + g.gc[1].transpose()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Liouvillian, QubitDephasingIsDiagonal)
{
    model::LindbladModel m;
    m.hilbert_dim = 2;
    m.drift = CMatrix::Zero(2, 2);
    const double gamma = 0.8;
    m.noise.push_back({gamma, oracle::pauli('Z') / std::sqrt(2.0)});
    const auto g = liouvillian_to_g(m);
    RMatrix expect = RMatrix::Zero(4, 4);
    expect(1, 1) = -gamma;
    expect(2, 2) = -gamma;
    EXPECT_LT((g.g0 - expect).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_FALSE(g.noiseless());
}

TEST(Liouvillian, TracePreservationAndDissipativeSpectrum)
{
    std::mt19937_64 rng(13);
    for (int n : {2, 3, 4}) {
        const auto m = random_model(n, 1, 2, rng);
        const auto g = liouvillian_to_g(m);
        EXPECT_LT(g.g0.row(g.basis->identity_index()).cwiseAbs().maxCoeff(), 1e-12);
        Eigen::EigenSolver<RMatrix> es(g.g0, false);
        EXPECT_LE(es.eigenvalues().real().maxCoeff(), 1e-9);
    }
}

TEST(Liouvillian, MatchesDensityMatrixOracle)
{
    std::mt19937_64 rng(17);
    for (int n : {2, 4, 8}) {
        const auto m = random_model(n, 2, 2, rng);
        const auto g = liouvillian_to_g(m);
        oracle::Lindblad lo{m.drift, m.controls, {m.noise[0].rate, m.noise[1].rate}, {m.noise[0].op, m.noise[1].op}};
        const std::vector<double> u{0.4, -0.9};
        const CMatrix rho0 = oracle::random_density(n, rng);
        const double t = 0.3;
        const CMatrix rho_ref = oracle::integrate(lo, [&](double) { return u; }, rho0, 0.0, t, 2000);
        const RVector v0 = rho_to_v(rho0, *g.basis);
        const RVector u_vec = (RVector(2) << u[0], u[1]).finished();
        const RMatrix prop = (g.g(u_vec) * t).exp();
        const CMatrix rho = v_to_rho(prop * v0, *g.basis);
        EXPECT_LT((rho - rho_ref).norm(), 1e-6) << "N=" << n;
    }
}

TEST(GModelExport, SparseTriplets)
{
    model::LindbladModel m;
    m.hilbert_dim = 2;
    m.drift = CMatrix::Zero(2, 2);
    m.noise.push_back({0.5, oracle::pauli('Z') / std::sqrt(2.0)});
    const auto doc = gmodel_to_json(liouvillian_to_g(m));
    EXPECT_EQ(doc["dim"], 4);
    EXPECT_EQ(doc["g0"]["triplets"].size(), 2u);
    EXPECT_TRUE(doc["gc"].empty());
    EXPECT_EQ(doc["basis"]["kind"], "bloch_ball");
}
