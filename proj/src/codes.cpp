#include "dfsctl/codes.hpp"

#include <cmath>
#include <random>

namespace dfsctl::codes {

using nlohmann::json;

CMatrix SubsystemCode::phi_inv(const CMatrix& j) const
{
    if (j.rows() != order || j.cols() != order) throw InputError("logical operator must be " + std::to_string(order) + "x" + std::to_string(order));
    CMatrix x = CMatrix::Zero(hilbert_dim, hilbert_dim);
    for (const auto& v : embed) x += v * j * v.adjoint();
    return x;
}

CMatrix SubsystemCode::phi(const CMatrix& x) const
{
    if (x.rows() != hilbert_dim || x.cols() != hilbert_dim) throw InputError("physical operator has wrong dimension");
    return embed.front().adjoint() * x * embed.front();
}

SubsystemCode derive_code(const commutant::CommutantStructure& s, int sector, int order, const CMatrix& u_star, int slot)
{
    const commutant::Sector& sec = s.sector(sector);
    const int kbar = sec.order;
    if (kbar < 2) throw InputError("sector " + std::to_string(sector) + " has order " + std::to_string(kbar) + "; codes need order >= 2");
    if (order < 2 || order > kbar) {
        throw InputError("code order " + std::to_string(order) + " outside [2, " + std::to_string(kbar) + "] for sector " + std::to_string(sector));
    }
    if (slot < 1 || slot > kbar / order) {
        throw InputError("multiplicity index " + std::to_string(slot) + " outside [1, " + std::to_string(kbar / order) + "]");
    }
    if (u_star.rows() != kbar || u_star.cols() != kbar) throw InputError("u_star must be " + std::to_string(kbar) + "x" + std::to_string(kbar));
    if (!linalg::is_unitary(u_star, 1e-9)) throw InputError("u_star is not unitary");

    SubsystemCode c;
    c.sector = sector;
    c.order = order;
    c.slot = slot;
    c.u_star = u_star;
    c.seed = s.seed;
    c.hilbert_dim = s.hilbert_dim;
    c.copies = sec.multiplicity;
    c.basis = s.basis;

    // W = u*^dag E_slot
    const CMatrix w = u_star.adjoint().middleCols(static_cast<Index>(slot - 1) * order, order);
    for (int a = 0; a < sec.multiplicity; ++a) c.embed.push_back(sec.frame.middleCols(static_cast<Index>(a) * kbar, kbar) * w);

    const auto units = linalg::hermitian_units(order);
    RMatrix q(s.basis->dim(), static_cast<Index>(units.size()));
    const double norm = 1.0 / std::sqrt(static_cast<double>(c.copies));
    for (std::size_t b = 0; b < units.size(); ++b) q.col(static_cast<Index>(b)) = norm * s.basis->coefficients(c.phi_inv(units[b]));
    c.pi_cs = Subspace(std::move(q));
    return c;
}

int max_code_order(const commutant::CommutantStructure& s)
{
    int best = 0;
    for (const auto& sec : s.sectors) best = std::max(best, sec.order);
    return best >= 2 ? best : 0;
}

json matrix_to_json(const CMatrix& m)
{
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix matrix_from_json(const json& doc)
{
    if (!doc.is_array() || doc.empty() || !doc[0].is_array()) throw InputError("matrix: expected array of rows");
    const Index r = static_cast<Index>(doc.size());
    const Index c = static_cast<Index>(doc[0].size());
    CMatrix m(r, c);
    for (Index i = 0; i < r; ++i) {
        const json& row = doc[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != c) throw InputError("matrix: ragged row " + std::to_string(i));
        for (Index j = 0; j < c; ++j) {
            const json& e = row[static_cast<std::size_t>(j)];
            if (e.is_number()) m(i, j) = e.get<double>();
            else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) m(i, j) = cplx(e[0].get<double>(), e[1].get<double>());
            else throw InputError("matrix: entry (" + std::to_string(i) + ", " + std::to_string(j) + ") is not a number or [re, im]");
        }
    }
    return m;
}

json code_descriptor(const SubsystemCode& c)
{
    return json{{"sector", c.sector}, {"order", c.order}, {"multiplicity_index", c.slot}, {"u_star", matrix_to_json(c.u_star)}, {"seed", c.seed}};
}

SubsystemCode code_from_descriptor(const commutant::CommutantStructure& s, const json& doc)
{
    if (!doc.is_object()) throw InputError("code descriptor must be an object");
    for (const char* key : {"sector", "order", "u_star"}) {
        if (!doc.contains(key)) throw InputError(std::string("code descriptor: missing \"") + key + "\"");
    }
    if (!doc["sector"].is_number_integer() || !doc["order"].is_number_integer()) throw InputError("code descriptor: sector and order must be integers");
    const int slot = doc.contains("multiplicity_index") ? doc["multiplicity_index"].get<int>() : 1;
    SubsystemCode c = derive_code(s, doc["sector"].get<int>(), doc["order"].get<int>(), matrix_from_json(doc["u_star"]), slot);
    if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
    return c;
}

CMatrix haar_unitary(Index n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    CMatrix z(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) z(i, j) = cplx(nd(rng), nd(rng));
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j) {
        const cplx d = r(j, j);
        if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

}  // namespace dfsctl::codes
