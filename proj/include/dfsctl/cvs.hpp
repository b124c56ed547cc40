#pragma once

#include "dfsctl/model.hpp"
#include "dfsctl/types.hpp"

#include <json.hpp>

#include <memory>
#include <string>
#include <vector>

namespace dfsctl::cvs {

enum class BasisKind { bloch_ball, gell_mann };

std::string to_string(BasisKind k);
BasisKind basis_kind_from_string(const std::string& s);

// Hermitian, trace-orthonormal operator basis {F_j} of an N-level system.
// Every element is stored as a generalized permutation: row r has a single
// nonzero entry value(j)[r] in column r ^ xmask (bloch_ball) or as a dense
// matrix (gell_mann).
class HermitianBasis {
public:
    static HermitianBasis make(int n, BasisKind kind);

    int hilbert_dim() const { return n_; }
    int dim() const { return n_ * n_; }
    BasisKind kind() const { return kind_; }
    int identity_index() const { return identity_index_; }

    CMatrix element(int j) const;

    // c_j = tr(F_j X)
    CVector complex_coefficients(const CMatrix& x) const;
    // Re tr(F_j X); exact for Hermitian X
    RVector coefficients(const CMatrix& x) const;
    CMatrix synthesize(const RVector& v) const;
    CMatrix synthesize(const CVector& c) const;

private:
    int n_ = 0;
    BasisKind kind_ = BasisKind::gell_mann;
    int identity_index_ = 0;
    std::vector<int> xmask_;
    std::vector<CVector> value_;
    std::vector<CMatrix> dense_;
};

using BasisPtr = std::shared_ptr<const HermitianBasis>;

BasisPtr make_basis(int n, BasisKind kind);
// bloch_ball when N is a power of two, gell_mann otherwise
BasisPtr default_basis(int n);

// Checks Hermiticity, unit trace and positivity (min eigenvalue >= -tol).
RVector rho_to_v(const CMatrix& rho, const HermitianBasis& basis, double tol = 1e-9);
CMatrix v_to_rho(const RVector& v, const HermitianBasis& basis);

// G_{jl} = -i tr([H, F_l] F_j)
RMatrix h_to_g(const CMatrix& h, const HermitianBasis& basis);

// Columns are coefficients of superop(F_l).
template <typename F>
RMatrix superoperator_matrix(const HermitianBasis& basis, F&& superop)
{
    RMatrix g(basis.dim(), basis.dim());
    for (int l = 0; l < basis.dim(); ++l) g.col(l) = basis.coefficients(superop(basis.element(l)));
    return g;
}

// Lindblad generator applied to x (drift and dissipators, no controls).
CMatrix lindblad_drift(const model::LindbladModel& m, const CMatrix& x);

struct GModel {
    BasisPtr basis;
    RMatrix g0;
    std::vector<RMatrix> gc;
    std::vector<std::string> control_labels;

    int dim() const { return static_cast<int>(g0.rows()); }
    int n_controls() const { return static_cast<int>(gc.size()); }
    RMatrix g(const RVector& u) const;
    // Sub-model keeping only the listed control channels.
    GModel restrict_controls(const std::vector<int>& idx) const;
    // Purely Hamiltonian drift
    bool noiseless(double tol = 1e-10) const;
};

GModel liouvillian_to_g(const model::LindbladModel& m, BasisPtr basis);
GModel liouvillian_to_g(const model::LindbladModel& m);

// Sparse triplet export; entries with |x| <= drop are skipped.
nlohmann::json gmodel_to_json(const GModel& g, double drop = 1e-14);

}  // namespace dfsctl::cvs
