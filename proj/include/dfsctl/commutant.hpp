#pragma once

#include "dfsctl/cvs.hpp"
#include "dfsctl/linalg.hpp"
#include "dfsctl/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace dfsctl::commutant {

struct MatrixAlgebra {
    int hilbert_dim = 0;
    std::vector<CMatrix> basis;       // HS-orthonormal
    std::vector<CMatrix> generators;  // adjoint-closed generating set

    int dim() const { return static_cast<int>(basis.size()); }
    // Distance of x from the span, relative to ||x||.
    double residual(const CMatrix& x) const;
};

// Unital *-algebra generated by gens: words in gens and their adjoints.
MatrixAlgebra generated_algebra(int n, const std::vector<CMatrix>& gens, double tol = 1e-9);
MatrixAlgebra interaction_algebra(const model::LindbladModel& m, double tol = 1e-9);

// HS-orthonormal basis of {X : [X, A] = 0 for all A in ops}.
std::vector<CMatrix> commutant_basis(int n, const std::vector<CMatrix>& ops, double rank_rel = 1e-9);

struct Sector {
    int order = 0;         // kbar
    int multiplicity = 0;  // m
    // N x (m * kbar) isometry; column a*kbar + j carries copy a, level j, so
    // the sector's commutant part reads I_m (x) M in these coordinates.
    CMatrix frame;
    double central_value = 0.0;
    Index first_support = 0;  // lowest computational index with weight on the sector
};

struct CommutantStructure {
    int hilbert_dim = 0;
    cvs::BasisPtr basis;
    std::vector<Sector> sectors;
    CMatrix lambda;  // rows: Lambda X Lambda^dag is block diagonal for X in the commutant
    int nc_dim = 0;
    Subspace pi_nc;
    std::vector<Subspace> pi_k;
    // v(unit of sector k) / norm, one column per sector
    RMatrix sector_units;
    std::uint64_t seed = 0;
    int resamples = 0;

    // 1-based sector lookup
    const Sector& sector(int k) const;
    const Subspace& core(int k) const;
    int sector_count() const { return static_cast<int>(sectors.size()); }
};

CommutantStructure commutant_structure(const MatrixAlgebra& alg, cvs::BasisPtr basis, std::uint64_t seed = 0,
                                       const Tolerances& tol = {});

nlohmann::json structure_report(const CommutantStructure& s);

struct DriftSplit {
    CMatrix lambda;  // unitary; g0 = lambda^dag (iD (+) G_perp) lambda
    RVector d;
    CMatrix g_perp;
    int lossless_dim = 0;
    double offdiag_residual = 0.0;   // coupling between the two blocks
    double skew_residual = 0.0;      // ||M + M^dag|| of the lossless block
    double max_perp_real = 0.0;      // largest Re(lambda) of G_perp
};

// Dense eigendecomposition; O(Bdim^3).
DriftSplit drift_block_split(const RMatrix& g0, double tol = 1e-9);

struct NcCheck {
    double leakage = 0.0;      // ||(I - Pi_NC) g0 Pi_NC||
    double skew_defect = 0.0;  // ||Q^T g0 Q + (Q^T g0 Q)^T||
    double residual = 0.0;
    bool ok = false;
};

// im Pi_NC is g0-invariant with skew restriction, hence inside the lossless
// invariant subspace.
NcCheck nc_projection_check(const CommutantStructure& s, const RMatrix& g0, double tol = 1e-8);

}  // namespace dfsctl::commutant
