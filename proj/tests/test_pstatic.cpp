#include "dfsctl/pstatic.hpp"
#include "fixtures.hpp"
#include "ion_oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace dfsctl;

namespace {

cvs::GModel noiseless_qubit()
{
    model::LindbladModel m;
    m.hilbert_dim = 2;
    m.drift = oracle::pauli('Z');
    m.controls = {oracle::pauli('X'), oracle::pauli('Y')};
    return cvs::liouvillian_to_g(m);
}

Subspace full_space(int b) { return Subspace(RMatrix::Identity(b, b)); }

}  // namespace

TEST(Difs, IonSchemeMatchesHilbertSpaceOracle)
{
    const auto& ion = fixture::ion();
    const auto d = pstatic::compute_difs(ion.g, ion.s.core(3));
    EXPECT_TRUE(d.drift_invariant);
    EXPECT_EQ(d.n_eff, 4);
    EXPECT_EQ(d.rank_z, 3);
    EXPECT_EQ(d.zoff.norm(), 0.0);
    EXPECT_LT((d.Z * d.zN).norm(), 1e-9);
    EXPECT_LT((d.zN.transpose() * d.zN - RMatrix::Identity(4, 4)).norm(), 1e-9);
    const RMatrix want = oracle::ion_difs_basis();
    ASSERT_EQ(want.cols(), 4);
    const RMatrix q = linalg::orth(d.zN, 1e-12);
    EXPECT_LT(linalg::principal_angles(q, want).maxCoeff(), 1e-8);
}

TEST(Difs, CanonicalZnIsSeedAndBasisIndependent)
{
    const auto& ion = fixture::ion();
    const auto a = pstatic::compute_difs(ion.g, ion.s.core(3));
    // a rotated basis of the same P gives the same canonical zN
    std::mt19937_64 rng(3);
    RMatrix r = RMatrix::NullaryExpr(64, 64, [&] { return std::normal_distribution<double>()(rng); });
    Eigen::HouseholderQR<RMatrix> qr(r);
    const RMatrix rot = qr.householderQ() * RMatrix::Identity(64, 64);
    const auto b = pstatic::compute_difs(ion.g, Subspace(ion.s.core(3).basis * rot));
    EXPECT_LT((a.zN - b.zN).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Difs, NoiselessFullSpaceHasNoConstraint)
{
    const auto g = noiseless_qubit();
    const auto d = pstatic::compute_difs(g, full_space(4));
    EXPECT_EQ(d.rank_z, 0);
    EXPECT_EQ(d.n_eff, 2);
    EXPECT_TRUE(d.drift_invariant);
    EXPECT_EQ(d.Z.norm(), 0.0);
}

TEST(Difs, RandomSubProjectionIsNotInvariant)
{
    const auto& ion = fixture::ion();
    std::mt19937_64 rng(11);
    RMatrix w = RMatrix::NullaryExpr(280, 10, [&] { return std::normal_distribution<double>()(rng); });
    const Subspace p(linalg::orth(RMatrix(ion.s.pi_nc.basis * w), 1e-12));
    EXPECT_THROW(pstatic::compute_difs(ion.g, p), NotInvariant);
}

TEST(Difs, AffineOffsetForNonInvariantDrift)
{
    // qubit, drift X, control X: P = span{I, X} needs no help, P = span{I, Z} needs u = -1
    model::LindbladModel m;
    m.hilbert_dim = 2;
    m.drift = oracle::pauli('X');
    m.controls = {oracle::pauli('X'), oracle::pauli('Z')};
    const auto g = cvs::liouvillian_to_g(m);
    RMatrix q = RMatrix::Zero(4, 2);
    q(0, 0) = 1.0;
    q(3, 1) = 1.0;  // z direction
    const auto d = pstatic::compute_difs(g, Subspace(q));
    EXPECT_FALSE(d.drift_invariant);
    EXPECT_NEAR(d.zoff(0), -1.0, 1e-12);
    EXPECT_NEAR(d.zoff(1), 0.0, 1e-12);
    EXPECT_EQ(d.n_eff, 1);
    EXPECT_NEAR(std::abs(d.zN(1, 0)), 1.0, 1e-12);
    EXPECT_GT(d.zN(1, 0), 0.0);
    EXPECT_LT(d.residual, 1e-12);
}

TEST(Frame, IonPartitionAndBlockTypes)
{
    const auto& ion = fixture::ion();
    const auto code = codes::derive_code(ion.s, 3, 4, CMatrix::Identity(8, 8), 1);
    const auto& p = ion.s.core(3);
    EXPECT_TRUE(pstatic::protective_chain(code, p, ion.s).ok);
    const auto f = pstatic::canonical_frame(code, p);
    EXPECT_EQ(f.d_cs, 16);
    EXPECT_EQ(f.d_p - f.d_cs, 48);
    EXPECT_EQ(pstatic::reported_dim(p, ion.s), 63);
    EXPECT_LT((f.rotation.transpose() * f.rotation - RMatrix::Identity(1024, 1024)).cwiseAbs().maxCoeff(), 1e-10);

    const RMatrix pp = f.rotate(p.projector());
    const RMatrix pc = f.rotate(code.pi_cs.projector());
    RMatrix ip = RMatrix::Zero(1024, 1024);
    ip.topLeftCorner(64, 64).setIdentity();
    RMatrix ic = RMatrix::Zero(1024, 1024);
    ic.topLeftCorner(16, 16).setIdentity();
    EXPECT_LT((pp - ip).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((pc - ic).cwiseAbs().maxCoeff(), 1e-10);

    const auto d = pstatic::compute_difs(ion.g, p);
    const auto samples = pstatic::difs_samples(d, 7);
    EXPECT_EQ(samples.size(), 13u);
    for (std::size_t i = 0; i < samples.size(); i += 4) {
        const auto r = pstatic::block_report(ion.g.g(samples[i]), f);
        EXPECT_LT(r.aa_skew, 1e-9);
        EXPECT_LT(r.bb_skew, 1e-9);
        EXPECT_LT(r.leak, 1e-9);
    }
}

TEST(Frame, DephasingQubitPartitionIsLossyOutsideP)
{
    model::LindbladModel m;
    m.hilbert_dim = 2;
    m.drift = CMatrix::Zero(2, 2);
    m.noise.push_back({1.0, oracle::pauli('Z') / std::sqrt(2.0)});
    const auto g = cvs::liouvillian_to_g(m);
    RMatrix q = RMatrix::Zero(4, 2);
    q(0, 0) = 1.0;
    q(3, 1) = 1.0;
    const auto f = pstatic::canonical_frame(Subspace(q));
    EXPECT_EQ(f.d_p, 2);
    EXPECT_EQ(f.bdim - f.d_p, 2);
    const auto r = pstatic::block_report(g.g0, f, true);
    EXPECT_LT(r.leak, 1e-12);
    EXPECT_LT(r.cc_max_real, 0.0);
}

TEST(Frame, RejectsCodeOutsideP)
{
    const auto& ion = fixture::ion();
    const auto code = codes::derive_code(ion.s, 3, 4, CMatrix::Identity(8, 8), 1);
    EXPECT_THROW(pstatic::canonical_frame(code, ion.s.core(4)), InputError);
    EXPECT_FALSE(pstatic::protective_chain(code, ion.s.core(4), ion.s).ok);
}

TEST(Invariance, DifsInputsPassUnitInputFails)
{
    const auto& ion = fixture::ion();
    const auto f = pstatic::canonical_frame(ion.s.core(3));
    const auto d = pstatic::compute_difs(ion.g, ion.s.core(3));
    const auto good = pstatic::check_sufficient_invariance(ion.g, f, pstatic::difs_samples(d, 1));
    EXPECT_TRUE(good.ok);
    EXPECT_LE(good.max_residual, 1e-9);
    RVector e1 = RVector::Zero(7);
    e1(0) = 1.0;
    EXPECT_GT((d.Z * e1).norm(), 1e-3);
    const auto bad = pstatic::check_sufficient_invariance(ion.g, f, {e1});
    EXPECT_FALSE(bad.ok);
    EXPECT_GT(bad.max_residual, 1e-3);

    // affine closure of the DIFS
    const auto s = pstatic::difs_samples(d, 2);
    for (double th : {0.0, 0.3, 1.0}) {
        const RVector u = th * s[9] + (1.0 - th) * s[10];
        EXPECT_LT((d.Z * u + d.z0).norm(), 1e-9);
    }
}

TEST(Invariance, NoiselessFullSpaceIsTrivial)
{
    const auto g = noiseless_qubit();
    const auto f = pstatic::canonical_frame(full_space(4));
    std::mt19937_64 rng(5);
    const auto r = pstatic::check_sufficient_invariance(g, f, {RVector::Random(2), RVector::Random(2)});
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(r.max_residual, 0.0);
}

TEST(Effective, NoiselessEqualsOriginalGenerators)
{
    const auto g = noiseless_qubit();
    const auto p = full_space(4);
    const auto f = pstatic::canonical_frame(p);
    const auto d = pstatic::compute_difs(g, p);
    const auto h = pstatic::effective_hamiltonians(g, f, d);
    const auto gens = h.generators();
    ASSERT_EQ(gens.size(), 3u);
    EXPECT_LT((gens[0] - g.g0).norm(), 1e-12);
    // zN is the identity up to canonical row order
    EXPECT_LT((gens[1] - g.gc[0]).norm() + (gens[2] - g.gc[1]).norm(), 1e-12);
}

TEST(Effective, IonHasOneDriftAndFourControls)
{
    const auto& ion = fixture::ion();
    const auto f = pstatic::canonical_frame(ion.s.core(3));
    const auto d = pstatic::compute_difs(ion.g, ion.s.core(3));
    const auto h = pstatic::effective_hamiltonians(ion.g, f, d);
    EXPECT_EQ(h.hc.size(), 4u);
    EXPECT_EQ(h.h0.rows(), 64);
    for (const auto& x : h.hc) EXPECT_LT((x - x.adjoint()).norm(), 1e-10);
    EXPECT_LT((h.h0 - h.h0.adjoint()).norm(), 1e-10);
    // -i H is the P-erasure of an admissible G
    const RVector u = d.realize(RVector::Ones(4));
    RMatrix sum = h.generators()[0];
    for (int j = 1; j <= 4; ++j) sum += h.generators()[static_cast<std::size_t>(j)];
    EXPECT_LT((sum - f.p_block().transpose() * ion.g.g(u) * f.p_block()).norm(), 1e-9);
}

TEST(Effective, ZeroControlDriftInvariant)
{
    model::LindbladModel m;
    m.hilbert_dim = 2;
    m.drift = oracle::pauli('Z');
    const auto g = cvs::liouvillian_to_g(m);
    const auto d = pstatic::compute_difs(g, full_space(4));
    const auto h = pstatic::effective_hamiltonians(g, pstatic::canonical_frame(full_space(4)), d);
    EXPECT_TRUE(h.hc.empty());
    EXPECT_EQ(d.n_eff, 0);
}

TEST(Decoupling, IonSectorThree)
{
    const auto& ion = fixture::ion();
    const auto d = pstatic::compute_difs(ion.g, ion.s.core(3));
    EXPECT_LE(pstatic::k_sector_decoupling(ion.g, ion.s, 3, pstatic::difs_samples(d, 4)), 1e-8);
}

TEST(Decoupling, NoiselessAndAdversarial)
{
    const auto g = noiseless_qubit();
    const auto s = commutant::commutant_structure(commutant::generated_algebra(2, {}), g.basis, 0);
    EXPECT_EQ(pstatic::k_sector_decoupling(g, s, 1, {RVector::Ones(2)}), 0.0);

    // two order-1 sectors; a hand-built G moving sector 1 into sector 2
    model::LindbladModel m;
    m.hilbert_dim = 2;
    m.drift = CMatrix::Zero(2, 2);
    m.noise.push_back({1.0, oracle::pauli('Z')});
    const auto sd = commutant::commutant_structure(commutant::interaction_algebra(m), cvs::default_basis(2), 0);
    cvs::GModel bad;
    bad.basis = sd.basis;
    bad.g0 = sd.core(2).basis * sd.core(1).basis.transpose();
    EXPECT_GT(pstatic::k_sector_decoupling(bad, sd, 1, {RVector(0)}), 0.5);
    EXPECT_LT(pstatic::k_sector_decoupling(bad, sd, 2, {RVector(0)}), 1e-12);
}

TEST(DifsReport, Fields)
{
    const auto g = noiseless_qubit();
    const auto j = pstatic::difs_report(pstatic::compute_difs(g, full_space(4)));
    EXPECT_EQ(j["n_eff"], 2);
    EXPECT_EQ(j["rank_Z"], 0);
    EXPECT_EQ(j["drift_invariant"], true);
    EXPECT_EQ(j["zN"].size(), 2u);
}
