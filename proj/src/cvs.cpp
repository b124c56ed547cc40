#include "dfsctl/cvs.hpp"
#include "dfsctl/linalg.hpp"

#include <cmath>

namespace dfsctl::cvs {

using nlohmann::json;

std::string to_string(BasisKind k) { return k == BasisKind::bloch_ball ? "bloch_ball" : "gell_mann"; }

BasisKind basis_kind_from_string(const std::string& s)
{
    if (s == "bloch_ball") return BasisKind::bloch_ball;
    if (s == "gell_mann") return BasisKind::gell_mann;
    throw InputError("unknown basis kind: " + s);
}

HermitianBasis HermitianBasis::make(int n, BasisKind kind)
{
    if (n < 2) throw InputError("basis: N must be >= 2");
    HermitianBasis b;
    b.n_ = n;
    b.kind_ = kind;
    if (kind == BasisKind::bloch_ball) {
        int q = 0;
        while ((1 << q) < n) ++q;
        if ((1 << q) != n) throw InputError("bloch_ball basis requires N = 2^n, got " + std::to_string(n));
        const double norm = std::pow(2.0, -0.5 * q);
        const int count = n * n;
        b.xmask_.resize(static_cast<std::size_t>(count));
        b.value_.resize(static_cast<std::size_t>(count));
        for (int j = 0; j < count; ++j) {
            // base-4 digits of j, qubit 1 most significant; 0=I 1=X 2=Y 3=Z
            int xm = 0;
            std::vector<int> sym(static_cast<std::size_t>(q));
            for (int k = 0; k < q; ++k) {
                const int s = (j >> (2 * (q - 1 - k))) & 3;
                sym[static_cast<std::size_t>(k)] = s;
                if (s == 1 || s == 2) xm |= 1 << (q - 1 - k);
            }
            CVector val(n);
            for (int r = 0; r < n; ++r) {
                cplx v = norm;
                for (int k = 0; k < q; ++k) {
                    const int bit = (r >> (q - 1 - k)) & 1;
                    const int s = sym[static_cast<std::size_t>(k)];
                    if (s == 2) v *= bit ? cplx(0, 1) : cplx(0, -1);
                    else if (s == 3 && bit) v = -v;
                }
                val(r) = v;
            }
            b.xmask_[static_cast<std::size_t>(j)] = xm;
            b.value_[static_cast<std::size_t>(j)] = std::move(val);
        }
        b.identity_index_ = 0;
    } else {
        b.dense_.push_back(CMatrix::Identity(n, n) / std::sqrt(static_cast<double>(n)));
        for (auto& x : linalg::traceless_hermitian_basis(n)) b.dense_.push_back(std::move(x));
        b.identity_index_ = 0;
    }
    return b;
}

CMatrix HermitianBasis::element(int j) const
{
    if (kind_ == BasisKind::gell_mann) return dense_[static_cast<std::size_t>(j)];
    CMatrix m = CMatrix::Zero(n_, n_);
    const int xm = xmask_[static_cast<std::size_t>(j)];
    const CVector& v = value_[static_cast<std::size_t>(j)];
    for (int r = 0; r < n_; ++r) m(r, r ^ xm) = v(r);
    return m;
}

CVector HermitianBasis::complex_coefficients(const CMatrix& x) const
{
    if (x.rows() != n_ || x.cols() != n_) throw InputError("basis: operator dimension mismatch");
    CVector c(dim());
    if (kind_ == BasisKind::gell_mann) {
        for (int j = 0; j < dim(); ++j) c(j) = dense_[static_cast<std::size_t>(j)].transpose().cwiseProduct(x).sum();
        return c;
    }
    for (int j = 0; j < dim(); ++j) {
        const int xm = xmask_[static_cast<std::size_t>(j)];
        const CVector& v = value_[static_cast<std::size_t>(j)];
        cplx acc = 0.0;
        for (int r = 0; r < n_; ++r) acc += v(r) * x(r ^ xm, r);
        c(j) = acc;
    }
    return c;
}

RVector HermitianBasis::coefficients(const CMatrix& x) const { return complex_coefficients(x).real(); }

CMatrix HermitianBasis::synthesize(const CVector& c) const
{
    if (c.size() != dim()) throw InputError("basis: coefficient vector has wrong length");
    CMatrix m = CMatrix::Zero(n_, n_);
    if (kind_ == BasisKind::gell_mann) {
        for (int j = 0; j < dim(); ++j) m += c(j) * dense_[static_cast<std::size_t>(j)];
        return m;
    }
    for (int j = 0; j < dim(); ++j) {
        if (c(j) == cplx(0.0)) continue;
        const int xm = xmask_[static_cast<std::size_t>(j)];
        const CVector& v = value_[static_cast<std::size_t>(j)];
        for (int r = 0; r < n_; ++r) m(r, r ^ xm) += c(j) * v(r);
    }
    return m;
}

CMatrix HermitianBasis::synthesize(const RVector& v) const { return synthesize(CVector(v.cast<cplx>())); }

BasisPtr make_basis(int n, BasisKind kind) { return std::make_shared<const HermitianBasis>(HermitianBasis::make(n, kind)); }

BasisPtr default_basis(int n)
{
    const bool pow2 = n >= 2 && (n & (n - 1)) == 0;
    return make_basis(n, pow2 ? BasisKind::bloch_ball : BasisKind::gell_mann);
}

RVector rho_to_v(const CMatrix& rho, const HermitianBasis& basis, double tol)
{
    if (rho.rows() != basis.hilbert_dim() || rho.cols() != basis.hilbert_dim()) {
        throw InputError("rho_to_v: dimension mismatch");
    }
    if (!linalg::is_hermitian(rho, 1e-10)) throw InputError("rho_to_v: density matrix is not Hermitian");
    if (std::abs(rho.trace() - cplx(1.0)) > tol) throw InputError("rho_to_v: density matrix must have unit trace");
    const CMatrix h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) throw InputError("rho_to_v: density matrix is not positive semidefinite");
    return basis.coefficients(h);
}

CMatrix v_to_rho(const RVector& v, const HermitianBasis& basis) { return basis.synthesize(v); }

RMatrix h_to_g(const CMatrix& h, const HermitianBasis& basis)
{
    const cplx mi(0.0, -1.0);
    return superoperator_matrix(basis, [&](const CMatrix& f) { return CMatrix(mi * (h * f - f * h)); });
}

CMatrix lindblad_drift(const model::LindbladModel& m, const CMatrix& x)
{
    const cplx mi(0.0, -1.0);
    CMatrix out = mi * (m.drift * x - x * m.drift);
    for (const auto& ch : m.noise) {
        if (ch.rate == 0.0) continue;
        const CMatrix dd = ch.op.adjoint() * ch.op;
        out += ch.rate * (ch.op * x * ch.op.adjoint() - 0.5 * (dd * x + x * dd));
    }
    return out;
}

RMatrix GModel::g(const RVector& u) const
{
    if (u.size() != n_controls()) throw InputError("control vector length differs from control count");
    RMatrix out = g0;
    for (int k = 0; k < n_controls(); ++k) {
        if (u(k) != 0.0) out += u(k) * gc[static_cast<std::size_t>(k)];
    }
    return out;
}

GModel GModel::restrict_controls(const std::vector<int>& idx) const
{
    GModel out;
    out.basis = basis;
    out.g0 = g0;
    for (int k : idx) {
        if (k < 0 || k >= n_controls()) throw InputError("control index out of range: " + std::to_string(k));
        out.gc.push_back(gc[static_cast<std::size_t>(k)]);
        if (!control_labels.empty()) out.control_labels.push_back(control_labels[static_cast<std::size_t>(k)]);
    }
    return out;
}

bool GModel::noiseless(double tol) const
{
    return (g0 + g0.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, g0.norm());
}

GModel liouvillian_to_g(const model::LindbladModel& m, BasisPtr basis)
{
    model::validate(m);
    if (!basis || basis->hilbert_dim() != m.hilbert_dim) throw InputError("basis dimension differs from model");
    GModel g;
    g.basis = basis;
    g.g0 = superoperator_matrix(*basis, [&](const CMatrix& f) { return lindblad_drift(m, f); });
    for (const auto& h : m.controls) g.gc.push_back(h_to_g(h, *basis));
    g.control_labels = m.control_labels;
    return g;
}

GModel liouvillian_to_g(const model::LindbladModel& m) { return liouvillian_to_g(m, default_basis(m.hilbert_dim)); }

namespace {

json sparse_json(const RMatrix& a, double drop)
{
    json trip = json::array();
    for (Index j = 0; j < a.cols(); ++j) {
        for (Index i = 0; i < a.rows(); ++i) {
            if (std::abs(a(i, j)) > drop) trip.push_back({i, j, a(i, j)});
        }
    }
    return json{{"rows", a.rows()}, {"cols", a.cols()}, {"triplets", std::move(trip)}};
}

}  // namespace

json gmodel_to_json(const GModel& g, double drop)
{
    json doc;
    doc["basis"] = {{"kind", to_string(g.basis->kind())}, {"hilbert_dim", g.basis->hilbert_dim()},
                    {"identity_index", g.basis->identity_index()}};
    doc["dim"] = g.dim();
    doc["g0"] = sparse_json(g.g0, drop);
    doc["gc"] = json::array();
    for (const auto& c : g.gc) doc["gc"].push_back(sparse_json(c, drop));
    doc["control_labels"] = g.control_labels;
    return doc;
}

}  // namespace dfsctl::cvs
