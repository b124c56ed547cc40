#include "dfsctl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace dfsctl {

void Tolerances::set(const std::string& name, double value)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InputError("tolerance " + name + " must be positive and finite");
    }
    if (name == "herm") herm = value;
    else if (name == "rank") rank = value;
    else if (name == "cluster") cluster = value;
    else if (name == "closure") closure = value;
    else if (name == "intersect") intersect = value;
    else if (name == "invariance") invariance = value;
    else if (name == "ode_rtol") ode_rtol = value;
    else if (name == "ode_atol") ode_atol = value;
    else throw InputError("unknown tolerance name: " + name);
}

double Subspace::leakage(const RMatrix& x) const
{
    if (x.cols() == 0) return 0.0;
    RMatrix r = x - basis * (basis.transpose() * x);
    return r.colwise().norm().maxCoeff();
}

double Subspace::containment_residual(const Subspace& inner) const
{
    if (inner.rank() == 0) return 0.0;
    RMatrix r = inner.basis - basis * (basis.transpose() * inner.basis);
    return r.jacobiSvd().singularValues()(0);
}

namespace linalg {

namespace {

double cutoff_of(const RVector& s, double rel, double abs_floor)
{
    const double smax = s.size() ? s(0) : 0.0;
    return std::max(rel * smax, abs_floor);
}

lapack_int gesdd(char job, lapack_int m, lapack_int n, double* a, double* s, double* u, lapack_int ldu, double* vt, lapack_int ldvt)
{
    return LAPACKE_dgesdd(LAPACK_COL_MAJOR, job, m, n, a, m, s, u, ldu, vt, ldvt);
}

lapack_int gesdd(char job, lapack_int m, lapack_int n, cplx* a, double* s, cplx* u, lapack_int ldu, cplx* vt, lapack_int ldvt)
{
    return LAPACKE_zgesdd(LAPACK_COL_MAJOR, job, m, n, a, m, s, u, ldu, vt, ldvt);
}

// Eigen 3.4.0's BDCSVD reads out of bounds in perturbCol0 on strongly
// rank-deficient input, so the divide-and-conquer SVD goes through LAPACK.
template <typename Mat>
SvdResult<Mat> svd_impl(const Mat& a, bool vectors)
{
    SvdResult<Mat> out;
    const Index m = a.rows(), n = a.cols(), k = std::min(m, n);
    out.s = RVector(k);
    if (k == 0) {
        out.u = Mat(m, 0);
        out.v = Mat(n, 0);
        return out;
    }
    Mat work = a;
    Mat u, vt;
    if (vectors) {
        u.resize(m, k);
        vt.resize(k, n);
    }
    const lapack_int info = gesdd(vectors ? 'S' : 'N', static_cast<lapack_int>(m), static_cast<lapack_int>(n), work.data(), out.s.data(),
                                  vectors ? u.data() : nullptr, static_cast<lapack_int>(vectors ? m : 1), vectors ? vt.data() : nullptr,
                                  static_cast<lapack_int>(vectors ? k : 1));
    if (info != 0) throw NumericalError("SVD failed to converge (gesdd info " + std::to_string(info) + ")");
    if (vectors) {
        out.u = std::move(u);
        out.v = vt.adjoint();
    }
    return out;
}

template <typename Mat>
Mat orth_impl(const Mat& a, double rel, double abs_floor)
{
    if (a.cols() == 0 || a.rows() == 0) return Mat(a.rows(), 0);
    const auto svd = svd_impl(a, true);
    const double cut = cutoff_of(svd.s, rel, abs_floor);
    Index r = 0;
    while (r < svd.s.size() && svd.s(r) > cut) ++r;
    return svd.u.leftCols(r);
}

template <typename Mat>
Mat null_impl(const Mat& a, double rel, double abs_floor)
{
    const Index n = a.cols();
    if (n == 0) return Mat(0, 0);
    if (a.rows() == 0) return Mat::Identity(n, n);
    // thin V is the full V once there are at least as many rows as columns
    Mat padded;
    const Mat* src = &a;
    if (a.rows() < n) {
        padded = Mat::Zero(n, n);
        padded.topRows(a.rows()) = a;
        src = &padded;
    }
    const auto svd = svd_impl(*src, true);
    const double cut = cutoff_of(svd.s, rel, abs_floor);
    Index r = 0;
    while (r < svd.s.size() && svd.s(r) > cut) ++r;
    return svd.v.rightCols(n - r);
}

template <typename Mat>
Mat complement_impl(const Mat& q)
{
    const Index n = q.rows();
    const Index r = q.cols();
    if (r == 0) return Mat::Identity(n, n);
    Eigen::HouseholderQR<Mat> qr(q);
    Mat full = qr.householderQ() * Mat::Identity(n, n);
    return full.rightCols(n - r);
}

}  // namespace

SvdRank numerical_rank(const RMatrix& a, double rel, double abs_floor)
{
    SvdRank out;
    if (a.size() == 0) return out;
    const RVector s = svd_impl(a, false).s;
    out.sigma_max = s.size() ? s(0) : 0.0;
    out.cutoff = std::max(rel * out.sigma_max, abs_floor);
    while (out.rank < s.size() && s(out.rank) > out.cutoff) ++out.rank;
    return out;
}

SvdResult<RMatrix> svd(const RMatrix& a, bool vectors) { return svd_impl(a, vectors); }
SvdResult<CMatrix> svd(const CMatrix& a, bool vectors) { return svd_impl(a, vectors); }
RMatrix orth(const RMatrix& a, double rel, double abs_floor) { return orth_impl(a, rel, abs_floor); }
CMatrix orth(const CMatrix& a, double rel, double abs_floor) { return orth_impl(a, rel, abs_floor); }
RMatrix null_space(const RMatrix& a, double rel, double abs_floor) { return null_impl(a, rel, abs_floor); }
CMatrix null_space(const CMatrix& a, double rel, double abs_floor) { return null_impl(a, rel, abs_floor); }
RMatrix complement(const RMatrix& q) { return complement_impl(q); }
CMatrix complement(const CMatrix& q) { return complement_impl(q); }

RVector principal_angles(const RMatrix& a, const RMatrix& b)
{
    const Index k = std::min(a.cols(), b.cols());
    if (k == 0) return RVector(0);
    // cosines lose resolution near zero angle, so pair them with sines
    const RMatrix& small = a.cols() <= b.cols() ? a : b;
    const RMatrix& large = a.cols() <= b.cols() ? b : a;
    const RVector c = (large.transpose() * small).jacobiSvd().singularValues();
    const RVector s = (small - large * (large.transpose() * small)).jacobiSvd().singularValues();
    RVector ang(k);
    for (Index i = 0; i < k; ++i) ang(i) = std::atan2(s(k - 1 - i), c(i));
    return ang;
}

RMatrix intersection(const RMatrix& a, const RMatrix& b, double tol)
{
    if (a.cols() == 0 || b.cols() == 0) return RMatrix(a.rows(), 0);
    RMatrix m = a.transpose() * b;
    Eigen::JacobiSVD<RMatrix> svd(m, Eigen::ComputeFullU);
    const RVector s = svd.singularValues();
    Index c = 0;
    while (c < s.size() && s(c) >= 1.0 - tol) ++c;
    if (c == 0) return RMatrix(a.rows(), 0);
    RMatrix common = a * svd.matrixU().leftCols(c);
    // re-orthonormalize against rounding
    Eigen::HouseholderQR<RMatrix> qr(common);
    return qr.householderQ() * RMatrix::Identity(common.rows(), c);
}

std::vector<Index> rref(RMatrix& a, double tol)
{
    std::vector<Index> pivots;
    Index row = 0;
    for (Index col = 0; col < a.cols() && row < a.rows(); ++col) {
        Index best;
        const double mag = a.col(col).segment(row, a.rows() - row).cwiseAbs().maxCoeff(&best);
        if (mag <= tol) {
            a.col(col).segment(row, a.rows() - row).setZero();
            continue;
        }
        best += row;
        a.row(row).swap(a.row(best));
        a.row(row) /= a(row, col);
        for (Index r = 0; r < a.rows(); ++r) {
            if (r != row) a.row(r) -= a(r, col) * a.row(row);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

bool is_hermitian(const CMatrix& x, double rel)
{
    if (x.rows() != x.cols()) return false;
    return hermitian_defect(x) <= rel * std::max(1.0, x.norm());
}

bool is_unitary(const CMatrix& u, double tol)
{
    if (u.rows() != u.cols()) return false;
    return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

CMatrix kron(const CMatrix& a, const CMatrix& b)
{
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

std::vector<CMatrix> hermitian_units(Index n)
{
    std::vector<CMatrix> out;
    const double h = 1.0 / std::sqrt(2.0);
    for (Index a = 0; a < n; ++a) {
        CMatrix e = CMatrix::Zero(n, n);
        e(a, a) = 1.0;
        out.push_back(e);
    }
    for (Index a = 0; a < n; ++a) {
        for (Index b = a + 1; b < n; ++b) {
            CMatrix s = CMatrix::Zero(n, n);
            s(a, b) = h;
            s(b, a) = h;
            out.push_back(s);
            CMatrix t = CMatrix::Zero(n, n);
            t(a, b) = cplx(0.0, -h);
            t(b, a) = cplx(0.0, h);
            out.push_back(t);
        }
    }
    return out;
}

std::vector<CMatrix> traceless_hermitian_basis(Index n)
{
    std::vector<CMatrix> out;
    const double h = 1.0 / std::sqrt(2.0);
    for (Index a = 0; a < n; ++a) {
        for (Index b = a + 1; b < n; ++b) {
            CMatrix s = CMatrix::Zero(n, n);
            s(a, b) = h;
            s(b, a) = h;
            out.push_back(s);
            CMatrix t = CMatrix::Zero(n, n);
            t(a, b) = cplx(0.0, -h);
            t(b, a) = cplx(0.0, h);
            out.push_back(t);
        }
    }
    for (Index l = 1; l < n; ++l) {
        CMatrix d = CMatrix::Zero(n, n);
        const double c = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
        for (Index i = 0; i < l; ++i) d(i, i) = c;
        d(l, l) = -static_cast<double>(l) * c;
        out.push_back(d);
    }
    return out;
}

}  // namespace linalg
}  // namespace dfsctl
