#include "dfsctl/pstatic.hpp"

#include <cmath>
#include <random>

namespace dfsctl::pstatic {

using nlohmann::json;

namespace {

RVector vec(const RMatrix& x) { return Eigen::Map<const RVector>(x.data(), x.size()); }

// (I - Q Q^T) X
RMatrix perp_part(const RMatrix& q, const RMatrix& x) { return x - q * (q.transpose() * x); }

}  // namespace

ChainCheck protective_chain(const codes::SubsystemCode& code, const Subspace& p, const commutant::CommutantStructure& s, double tol)
{
    ChainCheck c;
    c.cs_in_p = p.containment_residual(code.pi_cs);
    c.p_in_nc = s.pi_nc.containment_residual(p);
    c.ok = c.cs_in_p <= tol && c.p_in_nc <= tol;
    return c;
}

CanonicalFrame canonical_frame(const codes::SubsystemCode& code, const Subspace& p, double tol)
{
    const RMatrix& q = p.basis;
    const RMatrix& c = code.pi_cs.basis;
    if (c.rows() != q.rows()) throw InputError("code and projection live in different coherence-vector spaces");
    const double r = p.containment_residual(code.pi_cs);
    if (r > tol) throw InputError("protective chain violated: code core leaves im Pi_P (residual " + std::to_string(r) + ")");
    CanonicalFrame f;
    f.bdim = static_cast<int>(q.rows());
    f.d_cs = static_cast<int>(c.cols());
    f.d_p = static_cast<int>(q.cols());
    f.rotation = RMatrix(f.bdim, f.bdim);
    f.rotation.leftCols(f.d_cs) = c;
    f.rotation.middleCols(f.d_cs, f.d_p - f.d_cs) = q * linalg::complement(RMatrix(q.transpose() * c));
    f.rotation.rightCols(f.bdim - f.d_p) = linalg::complement(q);
    return f;
}

CanonicalFrame canonical_frame(const Subspace& p)
{
    CanonicalFrame f;
    f.bdim = static_cast<int>(p.ambient());
    f.d_p = static_cast<int>(p.rank());
    f.rotation = RMatrix(f.bdim, f.bdim);
    f.rotation.leftCols(f.d_p) = p.basis;
    f.rotation.rightCols(f.bdim - f.d_p) = linalg::complement(p.basis);
    return f;
}

int reported_dim(const Subspace& p, const commutant::CommutantStructure& s, double tol)
{
    int inside = 0;
    for (Index k = 0; k < s.sector_units.cols(); ++k) {
        if (p.leakage(s.sector_units.col(k)) <= tol) ++inside;
    }
    return static_cast<int>(p.rank()) - inside;
}

BlockReport block_report(const RMatrix& g, const CanonicalFrame& f, bool spectrum)
{
    BlockReport r;
    const RMatrix gp = g * f.p_block();
    const RMatrix inner = f.p_block().transpose() * gp;
    const auto aa = inner.topLeftCorner(f.d_cs, f.d_cs);
    const auto bb = inner.bottomRightCorner(f.d_p - f.d_cs, f.d_p - f.d_cs);
    r.aa_skew = (aa + aa.transpose()).norm();
    r.bb_skew = (bb + bb.transpose()).norm();
    r.leak = (gp - f.p_block() * inner).norm();
    if (spectrum && f.bdim > f.d_p) {
        const RMatrix cc = f.perp_block().transpose() * g * f.perp_block();
        Eigen::EigenSolver<RMatrix> es(cc, false);
        r.cc_max_real = es.eigenvalues().real().maxCoeff();
    }
    return r;
}

DIFSResult compute_difs(const cvs::GModel& g, const Subspace& p, const Tolerances& tol)
{
    const RMatrix& q = p.basis;
    if (q.rows() != g.dim()) throw InputError("projection dimension differs from the G model");
    if (q.cols() == 0) throw InputError("empty projection");
    const int nc = g.n_controls();
    DIFSResult d;
    d.z0 = vec(perp_part(q, g.g0 * q));
    d.Z = RMatrix(d.z0.size(), nc);
    for (int k = 0; k < nc; ++k) d.Z.col(k) = vec(perp_part(q, g.gc[static_cast<std::size_t>(k)] * q));

    double scale = 1.0;
    for (int k = 0; k < nc; ++k) scale = std::max(scale, d.Z.col(k).norm());
    scale = std::max(scale, d.z0.norm());
    const double floor = tol.rank * scale;

    d.rank_z = nc ? static_cast<int>(linalg::numerical_rank(d.Z, tol.rank, floor).rank) : 0;
    RMatrix aug(d.Z.rows(), nc + 1);
    aug << d.Z, d.z0;
    const int rank_aug = static_cast<int>(linalg::numerical_rank(aug, tol.rank, floor).rank);
    if (rank_aug > d.rank_z) {
        throw NotInvariant("rank[Z z0] = " + std::to_string(rank_aug) + " exceeds rank Z = " + std::to_string(d.rank_z) +
                           ": no control input keeps the projection invariant");
    }

    d.drift_invariant = d.z0.norm() <= floor;
    d.zoff = RVector::Zero(nc);
    if (!d.drift_invariant) {
        const auto svd = linalg::svd(d.Z, true);
        for (int i = 0; i < d.rank_z; ++i) d.zoff -= svd.v.col(i) * (svd.u.col(i).dot(d.z0) / svd.s(i));
    }
    d.residual = (d.Z * d.zoff + d.z0).norm();
    if (d.residual > tol.invariance * std::max(1.0, d.z0.norm())) {
        throw NotInvariant("offset solve leaves residual " + std::to_string(d.residual));
    }

    d.n_eff = nc - d.rank_z;
    if (d.n_eff > 0) {
        RMatrix rows = linalg::null_space(d.Z, tol.rank, floor).transpose();
        if (rows.rows() != d.n_eff) throw NumericalError("null space of Z disagrees with its rank");
        linalg::rref(rows, 1e-10);
        for (Index i = 0; i < rows.rows(); ++i) rows.row(i).normalize();
        d.zN = rows.transpose();
    } else {
        d.zN = RMatrix(nc, 0);
    }
    return d;
}

json difs_report(const DIFSResult& d)
{
    auto dense = [](const RMatrix& m) {
        json rows = json::array();
        for (Index i = 0; i < m.rows(); ++i) {
            json row = json::array();
            for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    json zoff = json::array();
    for (Index i = 0; i < d.zoff.size(); ++i) zoff.push_back(d.zoff(i));
    return json{{"drift_invariant", d.drift_invariant}, {"n_eff", d.n_eff}, {"rank_Z", d.rank_z},
                {"zN", dense(d.zN)}, {"zoff", std::move(zoff)}, {"residual", d.residual}};
}

std::vector<RVector> difs_samples(const DIFSResult& d, std::uint64_t seed, int n_random)
{
    std::vector<RVector> out{d.zoff};
    for (int j = 0; j < d.n_eff; ++j) out.push_back(d.zoff + d.zN.col(j));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    for (int r = 0; r < n_random; ++r) {
        RVector w(d.n_eff);
        for (int j = 0; j < d.n_eff; ++j) w(j) = nd(rng);
        out.push_back(d.realize(w));
    }
    return out;
}

InvarianceCheck check_sufficient_invariance(const cvs::GModel& g, const CanonicalFrame& f, const std::vector<RVector>& u_samples, double tol)
{
    InvarianceCheck out;
    const RMatrix q = f.p_block();
    const RMatrix base = perp_part(q, g.g0 * q);
    std::vector<RMatrix> parts;
    for (const auto& gk : g.gc) parts.push_back(perp_part(q, gk * q));
    for (const auto& u : u_samples) {
        if (u.size() != g.n_controls()) throw InputError("input sample length differs from control count");
        RMatrix x = base;
        for (int k = 0; k < g.n_controls(); ++k) x += u(k) * parts[static_cast<std::size_t>(k)];
        const double r = x.norm();
        out.residuals.push_back(r);
        out.max_residual = std::max(out.max_residual, r);
    }
    out.ok = out.max_residual <= tol;
    return out;
}

std::vector<RMatrix> EffectiveHamiltonians::generators() const
{
    std::vector<RMatrix> out;
    out.push_back((cplx(0, -1) * h0).real());
    for (const auto& h : hc) out.push_back((cplx(0, -1) * h).real());
    return out;
}

EffectiveHamiltonians effective_hamiltonians(const cvs::GModel& g, const CanonicalFrame& f, const DIFSResult& d)
{
    const RMatrix q = f.p_block();
    std::vector<RMatrix> erased;
    for (const auto& gk : g.gc) erased.push_back(q.transpose() * gk * q);
    RMatrix drift = q.transpose() * g.g0 * q;
    for (int k = 0; k < g.n_controls(); ++k) drift += d.zoff(k) * erased[static_cast<std::size_t>(k)];
    EffectiveHamiltonians h;
    h.h0 = cplx(0, 1) * drift.cast<cplx>();
    for (int j = 0; j < d.n_eff; ++j) {
        RMatrix x = RMatrix::Zero(f.d_p, f.d_p);
        for (int k = 0; k < g.n_controls(); ++k) x += d.zN(k, j) * erased[static_cast<std::size_t>(k)];
        h.hc.push_back(cplx(0, 1) * x.cast<cplx>());
    }
    return h;
}

double k_sector_decoupling(const cvs::GModel& g, const commutant::CommutantStructure& s, int k, const std::vector<RVector>& u_samples)
{
    const RMatrix& qk = s.core(k).basis;
    const RMatrix& qn = s.pi_nc.basis;
    const RMatrix base = g.g0 * qk;
    std::vector<RMatrix> parts;
    for (const auto& gk : g.gc) parts.push_back(gk * qk);
    double worst = 0.0;
    for (const auto& u : u_samples) {
        if (u.size() != g.n_controls()) throw InputError("input sample length differs from control count");
        RMatrix x = base;
        for (int c = 0; c < g.n_controls(); ++c) x += u(c) * parts[static_cast<std::size_t>(c)];
        worst = std::max(worst, (qn * (qn.transpose() * x) - qk * (qk.transpose() * x)).norm());
    }
    return worst;
}

}  // namespace dfsctl::pstatic
