#pragma once

#include "dfsctl/codes.hpp"
#include "dfsctl/pstatic.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace dfsctl::liealg {

class DimensionCapExceeded : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Real span of order x order matrices, orthonormal under Re tr(A^dag B).
template <typename Mat>
class LieBasis {
public:
    explicit LieBasis(Index order = 0) : order_(order), q_(coord_len(order), 0) {}

    Index order() const { return order_; }
    int dim() const { return static_cast<int>(el_.size()); }
    const std::vector<Mat>& elements() const { return el_; }
    const Mat& operator[](int i) const { return el_[static_cast<std::size_t>(i)]; }
    // orthonormal coordinate columns, one per element
    const RMatrix& coordinates() const { return q_; }

    RVector coords(const Mat& x) const;
    Mat from_coords(const RVector& c) const;
    // ||x - proj(x)||
    double residual(const Mat& x) const;
    // Adds the normalized residual of x when it exceeds max(rel ||x||, abs).
    bool add(const Mat& x, double rel = 1e-8, double abs = 1e-10);

    static Index coord_len(Index order);

private:
    Index order_;
    std::vector<Mat> el_;
    RMatrix q_;
};

using RealLie = LieBasis<RMatrix>;
using ComplexLie = LieBasis<CMatrix>;

// max_dim < 0 means order^2 (real) or 2 order^2 (complex).
template <typename Mat>
LieBasis<Mat> lie_closure(const std::vector<Mat>& gens, int max_dim = -1, double rel = 1e-8);

template <typename Mat>
LieBasis<Mat> span_of(const std::vector<Mat>& set, double rel = 1e-8);

// Upper-left p-blocks of the p-diagonal part of span(set).
template <typename Mat>
LieBasis<Mat> p_erasure(const std::vector<Mat>& set, Index p, double tol = 1e-9);

// The p-diagonal part itself (full size).
template <typename Mat>
LieBasis<Mat> p_diagonal_part(const std::vector<Mat>& set, Index p, double tol = 1e-9);

// ext_m(S) = { A (+) B : A in span S, B arbitrary }. Only used through intersections.
template <typename Mat>
struct ExtensionHandle {
    LieBasis<Mat> s;
    Index m = 0;
};

template <typename Mat>
ExtensionHandle<Mat> m_extension(const std::vector<Mat>& set, Index m);

// ext_m(S) intersected with span(t)
template <typename Mat>
LieBasis<Mat> intersect(const ExtensionHandle<Mat>& ext, const std::vector<Mat>& t, double tol = 1e-9);

// span(a) intersected with span(b); cosines >= 1 - tol count as shared.
template <typename Mat>
LieBasis<Mat> intersect(const LieBasis<Mat>& a, const LieBasis<Mat>& b, double tol = 1e-8);

// dim span{[x, y] : y in b}
template <typename Mat>
int commutator_span_dim(const Mat& x, const LieBasis<Mat>& b, double rel = 1e-8);

extern template class LieBasis<RMatrix>;
extern template class LieBasis<CMatrix>;

// Logical Hamiltonian -> its generator on the code block, in the coordinates
// given by the columns of code_block (Bdim x d_cs, spanning im Pi_cs):
// chi(J)_ab = Re tr(Y_a (-i [Phi^-1(J), Y_b])), Y_a the operator of column a.
RMatrix chi(const codes::SubsystemCode& code, const RMatrix& code_block, const CMatrix& j);
std::vector<RMatrix> chi_su(const codes::SubsystemCode& code, const RMatrix& code_block);

struct ControllabilityReport {
    std::string standard;  // OC, ESC, L-OC, L-ESC
    bool verdict = false;
    std::map<std::string, int> dims;
    std::string branch;

    nlohmann::json to_json() const;
};

// Full-space tests on noiseless models (InputError otherwise).
ControllabilityReport test_oc(const cvs::GModel& g, const Tolerances& tol = {});
ControllabilityReport test_esc(const cvs::GModel& g, const Tolerances& tol = {});

// lie_P in some orthonormal coordinates p_basis of im Pi_P.
struct LieP {
    RMatrix p_basis;
    RealLie algebra;
    pstatic::DIFSResult difs;
};
LieP lie_p(const cvs::GModel& g, const Subspace& p, const Tolerances& tol = {});

struct LogicalAnalysis {
    RealLie lie_cs;       // d_cs-erasure of lie_P in code coordinates
    RealLie lie_cs_prime;  // chi(su(n))
    RealLie lie_cs_star;   // their intersection
    RMatrix code_block;   // Bdim x d_cs coordinates used for chi
};
// Code must sit inside the P of `lp`.
LogicalAnalysis analyze_code(const LieP& lp, const codes::SubsystemCode& code, const Tolerances& tol = {});

ControllabilityReport loc_report(const LieP& lp, const LogicalAnalysis& a, const codes::SubsystemCode& code);
ControllabilityReport lesc_report(const LieP& lp, const LogicalAnalysis& a, const codes::SubsystemCode& code, const Tolerances& tol = {});

ControllabilityReport test_loc(const pstatic::PStaticScheme& scheme, const cvs::GModel& g, const Tolerances& tol = {});
ControllabilityReport test_lesc(const pstatic::PStaticScheme& scheme, const cvs::GModel& g, const Tolerances& tol = {});

}  // namespace dfsctl::liealg
