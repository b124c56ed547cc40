#pragma once

#include "dfsctl/types.hpp"

#include <vector>

namespace dfsctl {

// Column space of an orthonormal basis; the projector is basis * basis^T.
struct Subspace {
    RMatrix basis;

    Subspace() = default;
    explicit Subspace(RMatrix q) : basis(std::move(q)) {}

    Index ambient() const { return basis.rows(); }
    Index rank() const { return basis.cols(); }
    RMatrix projector() const { return basis * basis.transpose(); }
    RVector project(const RVector& v) const { return basis * (basis.transpose() * v); }
    // ||(I - P) x|| column-wise maximum
    double leakage(const RMatrix& x) const;
    // Largest distance of a unit vector of `inner` from this subspace.
    double containment_residual(const Subspace& inner) const;
};

namespace linalg {

struct SvdRank {
    Index rank = 0;
    double sigma_max = 0.0;
    double cutoff = 0.0;
};

// Thin SVD, singular values descending; u and v are empty unless vectors.
template <typename Mat>
struct SvdResult {
    Mat u;
    RVector s;
    Mat v;
};
SvdResult<RMatrix> svd(const RMatrix& a, bool vectors = true);
SvdResult<CMatrix> svd(const CMatrix& a, bool vectors = true);

// Singular values <= max(rel * sigma_max, abs_floor) count as zero.
SvdRank numerical_rank(const RMatrix& a, double rel, double abs_floor = 0.0);

RMatrix orth(const RMatrix& a, double rel, double abs_floor = 0.0);
CMatrix orth(const CMatrix& a, double rel, double abs_floor = 0.0);

RMatrix null_space(const RMatrix& a, double rel, double abs_floor = 0.0);
CMatrix null_space(const CMatrix& a, double rel, double abs_floor = 0.0);

// Orthonormal basis of the orthogonal complement of span(q) (q orthonormal).
RMatrix complement(const RMatrix& q);
CMatrix complement(const CMatrix& q);

// Principal angles between spans of two orthonormal bases, ascending.
RVector principal_angles(const RMatrix& a, const RMatrix& b);

// Directions common to span(a) and span(b) (orthonormal inputs); cosines
// >= 1 - tol are kept.
RMatrix intersection(const RMatrix& a, const RMatrix& b, double tol);

// Reduced row echelon form in place with partial pivoting; returns pivot columns.
std::vector<Index> rref(RMatrix& a, double tol);

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }
inline RMatrix commutator(const RMatrix& a, const RMatrix& b) { return a * b - b * a; }

inline double hermitian_defect(const CMatrix& x) { return (x - x.adjoint()).cwiseAbs().maxCoeff(); }
bool is_hermitian(const CMatrix& x, double rel);
bool is_unitary(const CMatrix& u, double tol);

CMatrix kron(const CMatrix& a, const CMatrix& b);

// Hermitian matrix units of order n, HS-orthonormal: E_aa first, then for
// a < b the pair (E_ab + E_ba)/sqrt2, -i(E_ab - E_ba)/sqrt2.
std::vector<CMatrix> hermitian_units(Index n);
// Traceless part of the above: off-diagonal pairs plus n-1 diagonal
// generalized Gell-Mann matrices. Spans su(n) after multiplying by -i.
std::vector<CMatrix> traceless_hermitian_basis(Index n);

}  // namespace linalg
}  // namespace dfsctl
