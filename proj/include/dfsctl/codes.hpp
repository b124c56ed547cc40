#pragma once

#include "dfsctl/commutant.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace dfsctl::codes {

// Order-n logical algebra sitting in k-sector `sector`. In the sector's level
// space the code occupies rows [(slot-1) n, slot n) after rotation by u_star,
// and is ampliated over all m copies of the sector.
struct SubsystemCode {
    int sector = 0;  // 1-based
    int order = 0;
    int slot = 1;    // multiplicity index m_cs, 1-based
    CMatrix u_star;  // kbar x kbar unitary
    std::uint64_t seed = 0;

    int hilbert_dim = 0;
    int copies = 1;             // multiplicity of the host sector
    std::vector<CMatrix> embed;  // per copy, N x n isometry V_a
    cvs::BasisPtr basis;
    Subspace pi_cs;  // columns v(Phi^-1(J_b)) / sqrt(copies), J_b the Hermitian units

    int dim() const { return order * order; }
    // logical n x n -> physical N x N
    CMatrix phi_inv(const CMatrix& j) const;
    // physical N x N -> logical n x n (reads the first copy)
    CMatrix phi(const CMatrix& x) const;
};

SubsystemCode derive_code(const commutant::CommutantStructure& s, int sector, int order, const CMatrix& u_star, int slot = 1);

// Largest sector order, 0 if every sector has order < 2.
int max_code_order(const commutant::CommutantStructure& s);

nlohmann::json code_descriptor(const SubsystemCode& c);
SubsystemCode code_from_descriptor(const commutant::CommutantStructure& s, const nlohmann::json& doc);

// Dense complex matrix as [[[re, im], ...], ...]
nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& doc);

CMatrix haar_unitary(Index n, std::uint64_t seed);

}  // namespace dfsctl::codes
