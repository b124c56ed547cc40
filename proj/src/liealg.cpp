#include "dfsctl/liealg.hpp"

#include <cmath>
#include <type_traits>

namespace dfsctl::liealg {

using nlohmann::json;

namespace {

template <typename Mat>
constexpr bool is_complex = std::is_same_v<Mat, CMatrix>;

template <typename Mat>
RVector flatten(const Mat& x)
{
    if constexpr (is_complex<Mat>) {
        RVector c(2 * x.size());
        const auto v = Eigen::Map<const CVector>(x.data(), x.size());
        c.head(x.size()) = v.real();
        c.tail(x.size()) = v.imag();
        return c;
    } else {
        return Eigen::Map<const RVector>(x.data(), x.size());
    }
}

template <typename Mat>
RVector offdiag_coords(const Mat& x, Index p)
{
    const Index m = x.rows();
    Mat ur = x.topRightCorner(p, m - p);
    Mat ll = x.bottomLeftCorner(m - p, p);
    RVector a = flatten<Mat>(ur), b = flatten<Mat>(ll);
    RVector c(a.size() + b.size());
    c << a, b;
    return c;
}

}  // namespace

template <typename Mat>
Index LieBasis<Mat>::coord_len(Index order)
{
    return (is_complex<Mat> ? 2 : 1) * order * order;
}

template <typename Mat>
RVector LieBasis<Mat>::coords(const Mat& x) const
{
    if (x.rows() != order_ || x.cols() != order_) throw InputError("matrix order differs from the Lie basis order");
    return flatten<Mat>(x);
}

template <typename Mat>
Mat LieBasis<Mat>::from_coords(const RVector& c) const
{
    const Index nn = order_ * order_;
    if constexpr (is_complex<Mat>) {
        CVector v(nn);
        v.real() = c.head(nn);
        v.imag() = c.tail(nn);
        return Eigen::Map<const CMatrix>(v.data(), order_, order_);
    } else {
        return Eigen::Map<const RMatrix>(c.data(), order_, order_);
    }
}

template <typename Mat>
double LieBasis<Mat>::residual(const Mat& x) const
{
    const RVector c = coords(x);
    return (c - q_ * (q_.transpose() * c)).norm();
}

template <typename Mat>
bool LieBasis<Mat>::add(const Mat& x, double rel, double abs)
{
    RVector c = coords(x);
    const double nx = c.norm();
    if (nx == 0.0) return false;
    for (int pass = 0; pass < 2; ++pass) c -= q_ * (q_.transpose() * c);
    const double nr = c.norm();
    if (nr <= std::max(rel * nx, abs)) return false;
    c /= nr;
    q_.conservativeResize(Eigen::NoChange, q_.cols() + 1);
    q_.col(q_.cols() - 1) = c;
    el_.push_back(from_coords(c));
    return true;
}

template class LieBasis<RMatrix>;
template class LieBasis<CMatrix>;

template <typename Mat>
LieBasis<Mat> span_of(const std::vector<Mat>& set, double rel)
{
    if (set.empty()) return LieBasis<Mat>(0);
    LieBasis<Mat> b(set.front().rows());
    for (const auto& x : set) {
        if (x.rows() != b.order() || x.cols() != b.order()) throw InputError("matrix set mixes orders");
        b.add(x, rel);
    }
    return b;
}

template <typename Mat>
LieBasis<Mat> lie_closure(const std::vector<Mat>& gens, int max_dim, double rel)
{
    LieBasis<Mat> b = span_of(gens, rel);
    const Index order = b.order();
    const long cap = max_dim >= 0 ? max_dim : static_cast<long>(LieBasis<Mat>::coord_len(order));
    if (b.dim() > cap) throw DimensionCapExceeded("generators already span more than the cap of " + std::to_string(cap));
    for (int i = 0; i < b.dim(); ++i) {
        for (int j = 0; j < i; ++j) {
            if (b.add(linalg::commutator(b[i], b[j]), rel) && b.dim() > cap) {
                throw DimensionCapExceeded("Lie closure exceeded the dimension cap of " + std::to_string(cap));
            }
        }
    }
    return b;
}

template <typename Mat>
LieBasis<Mat> p_diagonal_part(const std::vector<Mat>& set, Index p, double tol)
{
    const LieBasis<Mat> s = span_of(set);
    if (s.dim() == 0) return s;
    const Index m = s.order();
    if (p < 0 || p > m) throw InputError("erasure block size " + std::to_string(p) + " outside [0, " + std::to_string(m) + "]");
    LieBasis<Mat> out(m);
    if (p == m || p == 0) {
        for (const auto& x : s.elements()) out.add(x);
        return out;
    }
    RMatrix o(offdiag_coords<Mat>(s[0], p).size(), s.dim());
    for (int j = 0; j < s.dim(); ++j) o.col(j) = offdiag_coords<Mat>(s[j], p);
    const RMatrix combos = linalg::null_space(o, tol, tol);
    for (Index c = 0; c < combos.cols(); ++c) {
        Mat x = Mat::Zero(m, m);
        for (int j = 0; j < s.dim(); ++j) x += combos(j, c) * s[j];
        x.topRightCorner(p, m - p).setZero();
        x.bottomLeftCorner(m - p, p).setZero();
        out.add(x);
    }
    return out;
}

template <typename Mat>
LieBasis<Mat> p_erasure(const std::vector<Mat>& set, Index p, double tol)
{
    const LieBasis<Mat> d = p_diagonal_part(set, p, tol);
    LieBasis<Mat> out(p);
    for (const auto& x : d.elements()) out.add(Mat(x.topLeftCorner(p, p)));
    return out;
}

template <typename Mat>
ExtensionHandle<Mat> m_extension(const std::vector<Mat>& set, Index m)
{
    ExtensionHandle<Mat> h{span_of(set), m};
    if (h.s.order() > m) throw InputError("extension order below the set's order");
    return h;
}

template <typename Mat>
LieBasis<Mat> intersect(const ExtensionHandle<Mat>& ext, const std::vector<Mat>& t, double tol)
{
    const Index p = ext.s.order();
    const LieBasis<Mat> d = p_diagonal_part(t, p, tol);
    LieBasis<Mat> out(ext.m);
    if (d.dim() == 0) return out;
    if (d.order() != ext.m) throw InputError("extension order differs from the intersected set");
    const RMatrix& qs = ext.s.coordinates();
    RMatrix cons(LieBasis<Mat>::coord_len(p), d.dim());
    for (int j = 0; j < d.dim(); ++j) {
        const RVector c = flatten<Mat>(Mat(d[j].topLeftCorner(p, p)));
        cons.col(j) = c - qs * (qs.transpose() * c);
    }
    const RMatrix combos = linalg::null_space(cons, tol, tol);
    for (Index c = 0; c < combos.cols(); ++c) {
        Mat x = Mat::Zero(ext.m, ext.m);
        for (int j = 0; j < d.dim(); ++j) x += combos(j, c) * d[j];
        out.add(x);
    }
    return out;
}

template <typename Mat>
LieBasis<Mat> intersect(const LieBasis<Mat>& a, const LieBasis<Mat>& b, double tol)
{
    LieBasis<Mat> out(a.order());
    if (a.dim() == 0 || b.dim() == 0) return out;
    if (a.order() != b.order()) throw InputError("intersecting spans of different orders");
    const RMatrix common = linalg::intersection(a.coordinates(), b.coordinates(), tol);
    for (Index c = 0; c < common.cols(); ++c) out.add(out.from_coords(common.col(c)));
    return out;
}

template <typename Mat>
int commutator_span_dim(const Mat& x, const LieBasis<Mat>& b, double rel)
{
    LieBasis<Mat> c(b.order());
    const double abs = 1e-10 * std::max(1.0, static_cast<double>(x.norm()));
    for (const auto& y : b.elements()) c.add(linalg::commutator(x, y), rel, abs);
    return c.dim();
}

#define DFSCTL_INSTANTIATE(Mat)                                                                       \
    template LieBasis<Mat> span_of(const std::vector<Mat>&, double);                                   \
    template LieBasis<Mat> lie_closure(const std::vector<Mat>&, int, double);                          \
    template LieBasis<Mat> p_diagonal_part(const std::vector<Mat>&, Index, double);                    \
    template LieBasis<Mat> p_erasure(const std::vector<Mat>&, Index, double);                          \
    template ExtensionHandle<Mat> m_extension(const std::vector<Mat>&, Index);                         \
    template LieBasis<Mat> intersect(const ExtensionHandle<Mat>&, const std::vector<Mat>&, double);    \
    template LieBasis<Mat> intersect(const LieBasis<Mat>&, const LieBasis<Mat>&, double);              \
    template int commutator_span_dim(const Mat&, const LieBasis<Mat>&, double);

DFSCTL_INSTANTIATE(RMatrix)
DFSCTL_INSTANTIATE(CMatrix)
#undef DFSCTL_INSTANTIATE

RMatrix chi(const codes::SubsystemCode& code, const RMatrix& code_block, const CMatrix& j)
{
    const cvs::HermitianBasis& basis = *code.basis;
    if (code_block.rows() != basis.dim()) throw InputError("code block rows differ from the basis dimension");
    const CMatrix x = code.phi_inv(j);
    RMatrix out(code_block.cols(), code_block.cols());
    for (Index b = 0; b < code_block.cols(); ++b) {
        const CMatrix y = basis.synthesize(RVector(code_block.col(b)));
        const CMatrix c = cplx(0, -1) * (x * y - y * x);
        out.col(b) = code_block.transpose() * basis.coefficients(c);
    }
    return out;
}

std::vector<RMatrix> chi_su(const codes::SubsystemCode& code, const RMatrix& code_block)
{
    std::vector<RMatrix> out;
    for (const auto& j : linalg::traceless_hermitian_basis(code.order)) out.push_back(chi(code, code_block, j));
    return out;
}

json ControllabilityReport::to_json() const
{
    json d = json::object();
    for (const auto& [k, v] : dims) d[k] = v;
    return json{{"standard", standard}, {"verdict", verdict}, {"dims", std::move(d)}, {"branch", branch}};
}

namespace {

RealLie full_space_algebra(const cvs::GModel& g, const Tolerances& tol)
{
    if (!g.noiseless(tol.herm)) {
        throw InputError("OC/ESC apply to noiseless models only; use the L-OC/L-ESC tests with a code and projection");
    }
    std::vector<RMatrix> gens{g.g0};
    for (const auto& x : g.gc) gens.push_back(x);
    return lie_closure(gens, g.dim() * g.dim(), tol.closure);
}

}  // namespace

ControllabilityReport test_oc(const cvs::GModel& g, const Tolerances& tol)
{
    const RealLie lie = full_space_algebra(g, tol);
    const int target = g.dim() - 1;
    ControllabilityReport r;
    r.standard = "OC";
    r.dims = {{"lie", lie.dim()}, {"target", target}};
    r.verdict = lie.dim() >= target;
    r.branch = r.verdict ? "dimension" : "none";
    return r;
}

ControllabilityReport test_esc(const cvs::GModel& g, const Tolerances& tol)
{
    const RealLie lie = full_space_algebra(g, tol);
    const int n = g.basis->hilbert_dim();
    ControllabilityReport r;
    r.standard = "ESC";
    r.dims = {{"lie", lie.dim()}, {"target", 2 * (n - 1)}};
    if (lie.dim() >= g.dim() - 1) {
        r.verdict = true;
        r.branch = "oc";
        return r;
    }
    CMatrix e11 = CMatrix::Zero(n, n);
    e11(0, 0) = 1.0;
    const int k = commutator_span_dim(cvs::h_to_g(e11, *g.basis), lie, tol.closure);
    r.dims["e11_commutator"] = k;
    r.verdict = k == 2 * (n - 1);
    r.branch = r.verdict ? "e11-commutator-span" : "none";
    return r;
}

LieP lie_p(const cvs::GModel& g, const Subspace& p, const Tolerances& tol)
{
    LieP out;
    out.difs = pstatic::compute_difs(g, p, tol);
    const auto frame = pstatic::canonical_frame(p);
    const auto eff = pstatic::effective_hamiltonians(g, frame, out.difs);
    out.p_basis = p.basis;
    out.algebra = lie_closure(eff.generators(), static_cast<int>(p.rank() * p.rank()), tol.closure);
    return out;
}

LogicalAnalysis analyze_code(const LieP& lp, const codes::SubsystemCode& code, const Tolerances& tol)
{
    const RMatrix c = lp.p_basis.transpose() * code.pi_cs.basis;
    LogicalAnalysis a;
    a.code_block = lp.p_basis * c;
    const double leak = (a.code_block - code.pi_cs.basis).norm();
    if (leak > 1e-8) throw InputError("code core is not inside im Pi_P (residual " + std::to_string(leak) + ")");
    const Index d_cs = c.cols();
    const Index d_p = c.rows();
    RMatrix w(d_p, d_p);
    w.leftCols(d_cs) = c;
    w.rightCols(d_p - d_cs) = linalg::complement(c);
    std::vector<RMatrix> rotated;
    for (const auto& x : lp.algebra.elements()) rotated.push_back(w.transpose() * x * w);
    a.lie_cs = p_erasure(rotated, d_cs, tol.intersect);
    if (a.lie_cs.dim() == 0) a.lie_cs = RealLie(d_cs);
    a.lie_cs_prime = span_of(chi_su(code, a.code_block), tol.closure);
    a.lie_cs_star = intersect(a.lie_cs, a.lie_cs_prime, tol.intersect);
    return a;
}

ControllabilityReport loc_report(const LieP& lp, const LogicalAnalysis& a, const codes::SubsystemCode& code)
{
    const int target = code.dim() - 1;
    ControllabilityReport r;
    r.standard = "L-OC";
    r.dims = {{"lie_P", lp.algebra.dim()},
              {"lie_cs", a.lie_cs.dim()},
              {"lie_cs_prime", a.lie_cs_prime.dim()},
              {"lie_cs_star", a.lie_cs_star.dim()},
              {"target", target},
              {"n_eff", lp.difs.n_eff}};
    r.verdict = a.lie_cs_star.dim() == target;
    r.branch = r.verdict ? "intersection-dimension" : "none";
    return r;
}

ControllabilityReport lesc_report(const LieP& lp, const LogicalAnalysis& a, const codes::SubsystemCode& code, const Tolerances& tol)
{
    ControllabilityReport r = loc_report(lp, a, code);
    r.standard = "L-ESC";
    r.dims["target"] = 2 * (code.order - 1);
    if (r.verdict) {
        r.branch = "logical-oc";
        return r;
    }
    CMatrix e11 = CMatrix::Zero(code.order, code.order);
    e11(0, 0) = 1.0;
    const int k = commutator_span_dim(chi(code, a.code_block, e11), a.lie_cs_star, tol.closure);
    r.dims["e11_commutator"] = k;
    r.verdict = k == 2 * (code.order - 1);
    r.branch = r.verdict ? "e11-commutator-span" : "none";
    return r;
}

ControllabilityReport test_loc(const pstatic::PStaticScheme& scheme, const cvs::GModel& g, const Tolerances& tol)
{
    const LieP lp = lie_p(scheme.resources(g), scheme.p, tol);
    return loc_report(lp, analyze_code(lp, scheme.code, tol), scheme.code);
}

ControllabilityReport test_lesc(const pstatic::PStaticScheme& scheme, const cvs::GModel& g, const Tolerances& tol)
{
    const LieP lp = lie_p(scheme.resources(g), scheme.p, tol);
    return lesc_report(lp, analyze_code(lp, scheme.code, tol), scheme.code, tol);
}

}  // namespace dfsctl::liealg
