#pragma once

// Hilbert-space derivations for the ion scheme, independent of the CVS pipeline.

#include "fixtures.hpp"
#include "oracles.hpp"

#include <algorithm>

namespace oracle {

// u keeps the sector-3 core invariant iff sum_k u_k H_k has no block from the
// sector states to their complement.
inline Eigen::MatrixXd ion_difs_basis()
{
    const auto& in = fixture::kSector3States;
    std::vector<int> out;
    for (int i = 0; i < 32; ++i)
        if (std::find(in.begin(), in.end(), i) == in.end()) out.push_back(i);
    const Eigen::Index rows = static_cast<Eigen::Index>(out.size() * in.size());
    Eigen::MatrixXd a(2 * rows, 7);
    for (int k = 0; k < 7; ++k) {
        const CMat h = pauli_string(fixture::kIonControls[static_cast<std::size_t>(k)]);
        Eigen::Index r = 0;
        for (int i : out)
            for (int j : in) {
                a(r, k) = h(i, j).real();
                a(rows + r, k) = h(i, j).imag();
                ++r;
            }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    int rank = 0;
    while (rank < 7 && svd.singularValues()(rank) > 1e-9 * svd.singularValues()(0)) ++rank;
    return svd.matrixV().rightCols(7 - rank);
}

inline CMat compress(const CMat& h, const std::vector<int>& idx)
{
    CMat x(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b) x(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = h(idx[a], idx[b]);
    return x;
}

// Closure of -i times the drift and DIFS control Hamiltonians on the sector-3
// states (traceless parts, as 8 x 8 matrices).
inline RealSpan ion_sector_algebra(const CMat& drift)
{
    const Eigen::MatrixXd zn = ion_difs_basis();
    std::vector<CMat> gens{cplx(0, -1) * compress(drift, fixture::kSector3States)};
    for (Eigen::Index j = 0; j < zn.cols(); ++j) {
        CMat h = CMat::Zero(32, 32);
        for (int k = 0; k < 7; ++k) h += zn(k, j) * pauli_string(fixture::kIonControls[static_cast<std::size_t>(k)]);
        gens.push_back(cplx(0, -1) * compress(h, fixture::kSector3States));
    }
    return su_closure(gens);
}

// Dimension of the code-preserving part of alg restricted to the code levels
// `code` (indices into the 8 sector levels), modulo the identity.
inline int logical_subalgebra_dim(const RealSpan& alg, const std::vector<int>& code)
{
    std::vector<int> rest;
    for (int i = 0; i < 8; ++i)
        if (std::find(code.begin(), code.end(), i) == code.end()) rest.push_back(i);
    const Eigen::Index nb = static_cast<Eigen::Index>(code.size() * rest.size());
    Eigen::MatrixXd m(4 * nb, alg.dim());
    for (int e = 0; e < alg.dim(); ++e) {
        Eigen::Index r = 0;
        for (int a : code)
            for (int b : rest) {
                const cplx x = alg.q[static_cast<std::size_t>(e)](a, b);
                const cplx y = alg.q[static_cast<std::size_t>(e)](b, a);
                m(r, e) = x.real();
                m(nb + r, e) = x.imag();
                m(2 * nb + r, e) = y.real();
                m(3 * nb + r, e) = y.imag();
                ++r;
            }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    int rank = 0;
    while (rank < svd.singularValues().size() && svd.singularValues()(rank) > 1e-9 * std::max(1.0, svd.singularValues()(0))) ++rank;
    const Eigen::MatrixXd null = svd.matrixV().rightCols(alg.dim() - rank);
    RealSpan logical;
    for (Eigen::Index c = 0; c < null.cols(); ++c) {
        CMat x = CMat::Zero(8, 8);
        for (int e = 0; e < alg.dim(); ++e) x += null(e, c) * alg.q[static_cast<std::size_t>(e)];
        logical.add(traceless(compress(x, code)));
    }
    return logical.dim();
}

}  // namespace oracle
