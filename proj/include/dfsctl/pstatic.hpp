#pragma once

#include "dfsctl/codes.hpp"
#include "dfsctl/commutant.hpp"
#include "dfsctl/cvs.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace dfsctl::pstatic {

struct PStaticScheme {
    codes::SubsystemCode code;
    Subspace p;
    std::vector<int> controls;  // indices into GModel::gc; empty keeps all

    cvs::GModel resources(const cvs::GModel& g) const { return controls.empty() ? g : g.restrict_controls(controls); }
};

struct ChainCheck {
    double cs_in_p = 0.0;
    double p_in_nc = 0.0;
    bool ok = false;
};

// im Pi_cs in im Pi_P in im Pi_NC
ChainCheck protective_chain(const codes::SubsystemCode& code, const Subspace& p, const commutant::CommutantStructure& s,
                            double tol = 1e-9);

// Orthonormal CVS frame [code | P minus code | P-perp].
struct CanonicalFrame {
    RMatrix rotation;
    int d_cs = 0;
    int d_p = 0;
    int bdim = 0;

    auto code_block() const { return rotation.leftCols(d_cs); }
    auto p_block() const { return rotation.leftCols(d_p); }
    auto perp_block() const { return rotation.rightCols(bdim - d_p); }
    // R^T X R
    RMatrix rotate(const RMatrix& x) const { return rotation.transpose() * x * rotation; }
};

// Throws InputError when the code is not inside P.
CanonicalFrame canonical_frame(const codes::SubsystemCode& code, const Subspace& p, double tol = 1e-9);
// Frame for P alone (d_cs = 0)
CanonicalFrame canonical_frame(const Subspace& p);

// Rank of P minus the sector identity directions it contains; the convention
// under which an order-8 sector core reports 63.
int reported_dim(const Subspace& p, const commutant::CommutantStructure& s, double tol = 1e-9);

struct BlockReport {
    double aa_skew = 0.0;     // ||G_aa + G_aa^T|| (code block)
    double bb_skew = 0.0;     // ||G_bb + G_bb^T|| (P minus code)
    double leak = 0.0;        // ||G_{perp,P}||, zero iff P is invariant
    double cc_max_real = 0.0;  // largest real part of the spectrum of G_cc
};
BlockReport block_report(const RMatrix& g, const CanonicalFrame& f, bool spectrum = false);

struct DIFSResult {
    RMatrix Z;   // (Bdim d_P) x n_c, column k = vec(Pi_perp G_k Q_P)
    RVector z0;  // vec(Pi_perp G_0 Q_P)
    RMatrix zN;  // n_c x n_eff, canonical: reduced row echelon rows, normalized
    RVector zoff;
    int n_eff = 0;
    int rank_z = 0;
    bool drift_invariant = false;
    double residual = 0.0;  // ||Z zoff + z0||

    RVector realize(const RVector& u_eff) const { return zN * u_eff + zoff; }
};

// Throws NotInvariant when no admissible input keeps P invariant.
DIFSResult compute_difs(const cvs::GModel& g, const Subspace& p, const Tolerances& tol = {});

nlohmann::json difs_report(const DIFSResult& d);

// zoff, zoff + zN e_j, then `n_random` seeded points zoff + zN w, w ~ N(0, 1).
std::vector<RVector> difs_samples(const DIFSResult& d, std::uint64_t seed, int n_random = 8);

struct InvarianceCheck {
    bool ok = false;
    double max_residual = 0.0;
    std::vector<double> residuals;
};
// ||Pi_perp G(u) Pi_P|| for each sample
InvarianceCheck check_sufficient_invariance(const cvs::GModel& g, const CanonicalFrame& f, const std::vector<RVector>& u_samples,
                                            double tol = 1e-9);

struct EffectiveHamiltonians {
    CMatrix h0;               // d_P x d_P
    std::vector<CMatrix> hc;  // n_eff of them

    // -i H, real skew matrices
    std::vector<RMatrix> generators() const;
};

// In the frame's P coordinates.
EffectiveHamiltonians effective_hamiltonians(const cvs::GModel& g, const CanonicalFrame& f, const DIFSResult& d);

// max ||(Pi_NC - Pi_k) G(u) Pi_k|| over the samples
double k_sector_decoupling(const cvs::GModel& g, const commutant::CommutantStructure& s, int k, const std::vector<RVector>& u_samples);

}  // namespace dfsctl::pstatic
