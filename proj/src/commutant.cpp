#include "dfsctl/commutant.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dfsctl::commutant {

using nlohmann::json;

namespace {

CVector vec(const CMatrix& x) { return Eigen::Map<const CVector>(x.data(), x.size()); }

CMatrix unvec(const CVector& v, Index n) { return Eigen::Map<const CMatrix>(v.data(), n, n); }

// Gram-Schmidt accumulator over vectorized matrices.
class SpanBuilder {
public:
    explicit SpanBuilder(Index len) : q_(len, 0) {}

    Index size() const { return q_.cols(); }
    const CMatrix& q() const { return q_; }

    bool add(const CVector& c, double rel)
    {
        const double nc = c.norm();
        if (nc <= 1e-14) return false;
        CVector r = c;
        for (int pass = 0; pass < 2; ++pass) r -= q_ * (q_.adjoint() * r);
        const double nr = r.norm();
        if (nr <= rel * nc) return false;
        q_.conservativeResize(Eigen::NoChange, q_.cols() + 1);
        q_.col(q_.cols() - 1) = r / nr;
        return true;
    }

private:
    CMatrix q_;
};

CMatrix random_combination(const std::vector<CMatrix>& basis, std::mt19937_64& rng)
{
    std::normal_distribution<double> nd;
    CMatrix z = CMatrix::Zero(basis.front().rows(), basis.front().cols());
    for (const auto& b : basis) z += cplx(nd(rng), nd(rng)) * b;
    return z;
}

std::vector<std::vector<Index>> cluster_ascending(const RVector& ev, double gap)
{
    std::vector<std::vector<Index>> out;
    for (Index i = 0; i < ev.size(); ++i) {
        if (i == 0 || ev(i) - ev(i - 1) > gap) out.emplace_back();
        out.back().push_back(i);
    }
    return out;
}

// For a multiplicity-free block: orthonormalize P e_i in order of decreasing
// weight (ties by index), then sort by pivot index with the pivot entry real
// positive. Computational-basis blocks come out as their own basis vectors.
CMatrix canonical_block_basis(const CMatrix& w)
{
    const Index n = w.rows();
    const Index d = w.cols();
    const RVector weight = w.rowwise().squaredNorm();
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return weight(a) > weight(b) + 1e-12; });
    std::vector<std::pair<Index, CVector>> picked;
    CMatrix q(n, 0);
    for (Index i : order) {
        if (static_cast<Index>(picked.size()) == d) break;
        CVector c = w * w.row(i).adjoint();  // P e_i
        for (int pass = 0; pass < 2; ++pass) c -= q * (q.adjoint() * c);
        const double nc = c.norm();
        if (nc < 1e-6) continue;
        c /= nc;
        q.conservativeResize(Eigen::NoChange, q.cols() + 1);
        q.col(q.cols() - 1) = c;
        picked.emplace_back(i, c);
    }
    if (static_cast<Index>(picked.size()) != d) throw NumericalError("sector basis canonicalization failed");
    std::sort(picked.begin(), picked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    CMatrix out(n, d);
    for (Index j = 0; j < d; ++j) {
        CVector c = picked[static_cast<std::size_t>(j)].second;
        const cplx piv = c(picked[static_cast<std::size_t>(j)].first);
        if (std::abs(piv) > 0) c *= std::conj(piv) / std::abs(piv);
        out.col(j) = c;
    }
    return out;
}

struct ClusterAttempt {
    bool ok = false;
    std::vector<CMatrix> blocks;
    std::vector<double> values;
};

ClusterAttempt cluster_center(const std::vector<CMatrix>& center, int n, std::mt19937_64& rng, double gap)
{
    ClusterAttempt out;
    CMatrix z = random_combination(center, rng);
    z = 0.5 * (z + z.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(z);
    const RVector ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (const auto& idx : cluster_ascending(ev, gap * scale)) {
        CMatrix w(n, static_cast<Index>(idx.size()));
        double mean = 0.0;
        for (std::size_t c = 0; c < idx.size(); ++c) {
            w.col(static_cast<Index>(c)) = es.eigenvectors().col(idx[c]);
            mean += ev(idx[c]);
        }
        out.blocks.push_back(w);
        out.values.push_back(mean / static_cast<double>(idx.size()));
    }
    // every central element must be scalar on every block
    for (const auto& w : out.blocks) {
        for (const auto& c : center) {
            const CMatrix r = w.adjoint() * c * w;
            const cplx avg = r.trace() / static_cast<double>(r.rows());
            if ((r - avg * CMatrix::Identity(r.rows(), r.rows())).norm() > 1e-7 * std::max(1.0, c.norm())) return out;
        }
    }
    out.ok = true;
    return out;
}

Sector build_sector(const CMatrix& w, double value, const std::vector<CMatrix>& comm, std::mt19937_64& rng, double rank_rel)
{
    const Index d = w.cols();
    SpanBuilder span(d * d);
    for (const auto& x : comm) span.add(vec(w.adjoint() * x * w), rank_rel);
    const Index c = span.size();
    const int kbar = static_cast<int>(std::lround(std::sqrt(static_cast<double>(c))));
    if (static_cast<Index>(kbar) * kbar != c || d % kbar != 0) {
        throw NumericalError("compressed commutant of dimension " + std::to_string(c) + " on a block of size " +
                             std::to_string(d) + " is not a full matrix factor");
    }
    Sector s;
    s.order = kbar;
    s.multiplicity = static_cast<int>(d / kbar);
    s.central_value = value;
    if (s.multiplicity == 1) {
        s.frame = canonical_block_basis(w);
    } else {
        std::vector<CMatrix> cb;
        for (Index j = 0; j < c; ++j) cb.push_back(unvec(span.q().col(j), d));
        CMatrix b = random_combination(cb, rng);
        b = 0.5 * (b + b.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(b);
        const RVector ev = es.eigenvalues();
        const auto groups = cluster_ascending(ev, 1e-6 * std::max(1.0, ev.cwiseAbs().maxCoeff()));
        if (static_cast<int>(groups.size()) != kbar) throw NumericalError("tensor split: eigenvalue clusters do not match sector order");
        const int m = s.multiplicity;
        std::vector<CMatrix> spaces;
        for (const auto& g : groups) {
            if (static_cast<int>(g.size()) != m) throw NumericalError("tensor split: unequal cluster sizes");
            CMatrix e(d, m);
            for (int a = 0; a < m; ++a) e.col(a) = es.eigenvectors().col(g[static_cast<std::size_t>(a)]);
            spaces.push_back(e);
        }
        const CMatrix r = random_combination(cb, rng);
        CMatrix t(d, d);
        for (int a = 0; a < m; ++a) t.col(static_cast<Index>(a) * kbar) = spaces[0].col(a);
        for (int j = 1; j < kbar; ++j) {
            const CMatrix& e = spaces[static_cast<std::size_t>(j)];
            const CMatrix moved = e * (e.adjoint() * (r * spaces[0]));
            const double scale = moved.col(0).norm();
            if (scale < 1e-8) throw NumericalError("tensor split: random commutant element does not connect levels");
            for (int a = 0; a < m; ++a) t.col(static_cast<Index>(a) * kbar + j) = moved.col(a) / scale;
        }
        if ((t.adjoint() * t - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-8) {
            throw NumericalError("tensor split: constructed sector frame is not unitary");
        }
        s.frame = w * t;
    }
    const RVector weight = s.frame.rowwise().squaredNorm();
    for (Index i = 0; i < weight.size(); ++i) {
        if (weight(i) > 1e-8) {
            s.first_support = i;
            break;
        }
    }
    return s;
}

}  // namespace

double MatrixAlgebra::residual(const CMatrix& x) const
{
    const double nx = x.norm();
    if (nx == 0.0) return 0.0;
    CMatrix r = x;
    for (const auto& b : basis) r -= (b.adjoint() * x).trace() * b;
    return r.norm() / nx;
}

MatrixAlgebra generated_algebra(int n, const std::vector<CMatrix>& gens, double tol)
{
    MatrixAlgebra alg;
    alg.hilbert_dim = n;
    for (const auto& g : gens) {
        if (g.rows() != n || g.cols() != n) throw InputError("algebra generator has wrong dimension");
        if (g.norm() <= 1e-14) continue;
        alg.generators.push_back(g);
        if ((g - g.adjoint()).norm() > tol * g.norm()) alg.generators.push_back(g.adjoint());
    }
    SpanBuilder span(static_cast<Index>(n) * n);
    span.add(vec(CMatrix::Identity(n, n)), tol);
    for (Index i = 0; i < span.size(); ++i) {
        const CMatrix b = unvec(span.q().col(i), n);
        for (const auto& g : alg.generators) span.add(vec(b * g), tol);
    }
    for (Index i = 0; i < span.size(); ++i) alg.basis.push_back(unvec(span.q().col(i), n));
    return alg;
}

MatrixAlgebra interaction_algebra(const model::LindbladModel& m, double tol)
{
    if (m.noise.empty()) throw InputError("interaction algebra needs at least one noise channel");
    std::vector<CMatrix> gens;
    for (const auto& ch : m.noise) gens.push_back(ch.op);
    return generated_algebra(m.hilbert_dim, gens, tol);
}

std::vector<CMatrix> commutant_basis(int n, const std::vector<CMatrix>& ops, double rank_rel)
{
    const Index nn = static_cast<Index>(n) * n;
    const CMatrix id = CMatrix::Identity(n, n);
    std::vector<const CMatrix*> use;
    double scale = 0.0;
    for (const auto& a : ops) {
        if ((a - a(0, 0) * id).norm() > 1e-14 * std::max(1.0, a.norm())) use.push_back(&a);
        scale = std::max(scale, a.norm());
    }
    std::vector<CMatrix> out;
    if (use.empty()) {
        for (Index j = 0; j < nn; ++j) {
            CMatrix e = CMatrix::Zero(n, n);
            e(j % n, j / n) = 1.0;
            out.push_back(e);
        }
        return out;
    }
    // vec(XA - AX) = (A^T (x) I - I (x) A) vec(X)
    CMatrix k(nn * static_cast<Index>(use.size()), nn);
    for (std::size_t i = 0; i < use.size(); ++i) {
        k.middleRows(static_cast<Index>(i) * nn, nn) = linalg::kron(use[i]->transpose(), id) - linalg::kron(id, *use[i]);
    }
    const CMatrix ns = linalg::null_space(k, rank_rel, 1e-13 * scale);
    for (Index j = 0; j < ns.cols(); ++j) out.push_back(unvec(ns.col(j), n));
    return out;
}

const Sector& CommutantStructure::sector(int k) const
{
    if (k < 1 || k > sector_count()) throw InputError("sector index " + std::to_string(k) + " out of range 1.." + std::to_string(sector_count()));
    return sectors[static_cast<std::size_t>(k - 1)];
}

const Subspace& CommutantStructure::core(int k) const
{
    sector(k);
    return pi_k[static_cast<std::size_t>(k - 1)];
}

CommutantStructure commutant_structure(const MatrixAlgebra& alg, cvs::BasisPtr basis, std::uint64_t seed, const Tolerances& tol)
{
    const int n = alg.hilbert_dim;
    if (!basis || basis->hilbert_dim() != n) throw InputError("commutant structure: basis dimension differs from algebra");
    if (alg.basis.empty()) throw InputError("commutant structure: empty algebra");

    const auto& ops = alg.generators.empty() ? alg.basis : alg.generators;
    const std::vector<CMatrix> comm = commutant_basis(n, ops, tol.rank);

    // center = algebra intersect commutant
    const Index nn = static_cast<Index>(n) * n;
    CMatrix qa(nn, alg.dim());
    for (int i = 0; i < alg.dim(); ++i) qa.col(i) = vec(alg.basis[static_cast<std::size_t>(i)]);
    CMatrix qc(nn, static_cast<Index>(comm.size()));
    for (std::size_t i = 0; i < comm.size(); ++i) qc.col(static_cast<Index>(i)) = vec(comm[i]);
    Eigen::JacobiSVD<CMatrix> svd(qa.adjoint() * qc, Eigen::ComputeFullU);
    std::vector<CMatrix> center;
    for (Index i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) < 1.0 - 1e-8) break;
        center.push_back(unvec(qa * svd.matrixU().col(i), n));
    }
    if (center.empty()) throw NumericalError("commutant structure: algebra center is empty");

    CommutantStructure s;
    s.hilbert_dim = n;
    s.basis = basis;
    s.seed = seed;
    std::mt19937_64 rng(seed);
    ClusterAttempt att = cluster_center(center, n, rng, tol.cluster);
    if (!att.ok) {
        s.resamples = 1;
        rng.seed(seed ^ 0x9e3779b97f4a7c15ULL);
        att = cluster_center(center, n, rng, tol.cluster);
        if (!att.ok) {
            throw NumericalError("degenerate clustering of the central element; resample with a different seed");
        }
    }
    for (std::size_t b = 0; b < att.blocks.size(); ++b) s.sectors.push_back(build_sector(att.blocks[b], att.values[b], comm, rng, tol.rank));
    std::stable_sort(s.sectors.begin(), s.sectors.end(), [](const Sector& a, const Sector& b) {
        if (a.order != b.order) return a.order < b.order;
        if (a.multiplicity != b.multiplicity) return a.multiplicity < b.multiplicity;
        if (a.first_support != b.first_support) return a.first_support < b.first_support;
        return a.central_value < b.central_value;
    });

    s.lambda = CMatrix(n, n);
    Index col = 0;
    int total = 0;
    for (const auto& sec : s.sectors) {
        s.lambda.middleRows(col, sec.frame.cols()) = sec.frame.adjoint();
        col += sec.frame.cols();
        total += sec.order * sec.order;
    }
    s.nc_dim = total;
    if (static_cast<std::size_t>(total) != comm.size()) {
        throw NumericalError("sector orders account for " + std::to_string(total) + " commutant dimensions, kernel has " +
                             std::to_string(comm.size()));
    }

    const int bdim = basis->dim();
    s.sector_units = RMatrix(bdim, s.sector_count());
    for (int k = 0; k < s.sector_count(); ++k) {
        const Sector& sec = s.sectors[static_cast<std::size_t>(k)];
        const auto units = linalg::hermitian_units(sec.order);
        RMatrix q(bdim, static_cast<Index>(units.size()));
        const double norm = 1.0 / std::sqrt(static_cast<double>(sec.multiplicity));
        for (std::size_t b = 0; b < units.size(); ++b) {
            CMatrix amp = CMatrix::Zero(n, n);
            for (int a = 0; a < sec.multiplicity; ++a) {
                const CMatrix f = sec.frame.middleCols(static_cast<Index>(a) * sec.order, sec.order);
                amp += f * units[b] * f.adjoint();
            }
            q.col(static_cast<Index>(b)) = basis->coefficients(norm * amp);
        }
        s.pi_k.emplace_back(q);
        const RVector u = basis->coefficients(sec.frame * sec.frame.adjoint());
        s.sector_units.col(k) = u / u.norm();
    }

    RMatrix herm(bdim, 2 * static_cast<Index>(comm.size()));
    for (std::size_t i = 0; i < comm.size(); ++i) {
        herm.col(2 * static_cast<Index>(i)) = basis->coefficients(0.5 * (comm[i] + comm[i].adjoint()));
        herm.col(2 * static_cast<Index>(i) + 1) = basis->coefficients(cplx(0, -0.5) * (comm[i] - comm[i].adjoint()));
    }
    s.pi_nc = Subspace(linalg::orth(herm, tol.rank, 1e-12));
    if (s.pi_nc.rank() != s.nc_dim) throw NumericalError("Pi_NC rank differs from commutant dimension");
    return s;
}

json structure_report(const CommutantStructure& s)
{
    json secs = json::array();
    for (const auto& sec : s.sectors) secs.push_back({{"order", sec.order}, {"multiplicity", sec.multiplicity}});
    return json{{"sectors", std::move(secs)},
                {"nc_dim", s.nc_dim},
                {"seed", s.seed},
                {"sector_ordering", "order, multiplicity, first computational index"}};
}

DriftSplit drift_block_split(const RMatrix& g0, double tol)
{
    const Index n = g0.rows();
    Eigen::EigenSolver<RMatrix> es(g0);
    if (es.info() != Eigen::Success) throw NumericalError("drift split: eigendecomposition failed");
    const CVector ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    std::vector<Index> lossless;
    DriftSplit out;
    out.max_perp_real = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
        if (std::abs(ev(i).real()) <= tol * scale) lossless.push_back(i);
        else out.max_perp_real = std::max(out.max_perp_real, ev(i).real());
    }
    CMatrix v(n, static_cast<Index>(lossless.size()));
    for (std::size_t c = 0; c < lossless.size(); ++c) v.col(static_cast<Index>(c)) = es.eigenvectors().col(lossless[c]);
    const CMatrix ql = linalg::orth(v, 1e-9);
    if (ql.cols() != static_cast<Index>(lossless.size())) {
        throw NumericalError("drift split: lossless eigenvectors are linearly dependent (defective eigenstructure)");
    }
    const CMatrix g = g0.cast<cplx>();
    const CMatrix m = ql.adjoint() * g * ql;
    out.skew_residual = (m + m.adjoint()).norm();
    const CMatrix h = cplx(0, -0.5) * (m - m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> hs(h);
    const CMatrix qlu = ql * hs.eigenvectors();
    const CMatrix qp = linalg::complement(ql);
    out.d = hs.eigenvalues();
    out.g_perp = qp.adjoint() * g * qp;
    out.lossless_dim = static_cast<int>(ql.cols());
    out.offdiag_residual = std::max((ql.adjoint() * g * qp).norm(), (qp.adjoint() * g * ql).norm());
    out.lambda = CMatrix(n, n);
    out.lambda.topRows(qlu.cols()) = qlu.adjoint();
    out.lambda.bottomRows(qp.cols()) = qp.adjoint();
    if (qp.cols() == 0) out.max_perp_real = 0.0;
    const double bound = 1e-7 * scale;
    if (out.offdiag_residual > bound || out.skew_residual > bound) {
        throw NumericalError("drift split: lossless block does not decouple (off-diagonal residual " +
                             std::to_string(out.offdiag_residual) + ", skew residual " + std::to_string(out.skew_residual) + ")");
    }
    return out;
}

NcCheck nc_projection_check(const CommutantStructure& s, const RMatrix& g0, double tol)
{
    NcCheck out;
    const RMatrix& q = s.pi_nc.basis;
    const RMatrix x = g0 * q;
    const RMatrix inner = q.transpose() * x;
    out.leakage = (x - q * inner).norm();
    out.skew_defect = (inner + inner.transpose()).norm();
    out.residual = std::max(out.leakage, out.skew_defect);
    out.ok = out.residual <= tol * std::max(1.0, x.norm());
    return out;
}

}  // namespace dfsctl::commutant
