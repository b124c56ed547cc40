#include "dfsctl/search.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <random>

namespace dfsctl::codes {
namespace {

// per-candidate seed, independent of how many candidates came before
std::uint64_t sample_seed(std::uint64_t seed, int sample)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(sample)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

// u_star whose first n rows pick the levels in `first`, the rest in order
CMatrix subset_permutation(int kbar, const std::vector<int>& first)
{
    CMatrix u = CMatrix::Zero(kbar, kbar);
    std::vector<bool> used(static_cast<std::size_t>(kbar), false);
    int r = 0;
    for (int i : first) {
        u(r++, i) = 1.0;
        used[static_cast<std::size_t>(i)] = true;
    }
    for (int i = 0; i < kbar; ++i)
        if (!used[static_cast<std::size_t>(i)]) u(r++, i) = 1.0;
    return u;
}

// next k-subset of {0..n-1} in lexicographic order, false when exhausted
bool next_subset(std::vector<int>& c, int n)
{
    const int k = static_cast<int>(c.size());
    int i = k - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return false;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    return true;
}

CMatrix eigen_candidate(const std::vector<CMatrix>& compressed, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    const Index kbar = compressed.front().rows();
    CMatrix h = CMatrix::Zero(kbar, kbar);
    for (const auto& c : compressed) h += nd(rng) * c;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()));
    std::vector<int> idx(static_cast<std::size_t>(kbar));
    for (Index i = 0; i < kbar; ++i) idx[static_cast<std::size_t>(i)] = static_cast<int>(i);
    std::shuffle(idx.begin(), idx.end(), rng);
    // rows of u_star are conjugated eigenvectors; the code takes the first `order`
    CMatrix u(kbar, kbar);
    for (Index r = 0; r < kbar; ++r) u.row(r) = es.eigenvectors().col(idx[static_cast<std::size_t>(r)]).adjoint();
    return u;
}

}  // namespace

SearchResult search_codes(const commutant::CommutantStructure& s, const model::LindbladModel& m, const cvs::GModel& g,
                          const SearchOptions& opts)
{
    const auto& sec = s.sector(opts.sector);
    const int kbar = sec.order;
    const int hi = opts.max_order > 0 ? std::min(opts.max_order, kbar) : kbar;
    const int lo = std::max(opts.min_order, 2);
    if (lo > kbar) throw InputError("search: sector order " + std::to_string(kbar) + " below minimum code order " + std::to_string(lo));
    if (lo > hi) throw InputError("search: empty order range");
    if (opts.standard != "loc" && opts.standard != "lesc") throw InputError("search: standard must be loc or lesc");

    SearchResult res;
    if (opts.budget <= 0) return res;

    const Subspace& p = opts.p ? *opts.p : s.core(opts.sector);
    const auto lp = liealg::lie_p(g, p, opts.tol);
    res.lie_p_dim = lp.algebra.dim();

    auto evaluate = [&](const CMatrix& u, int order, const std::string& family) {
        auto code = derive_code(s, opts.sector, order, u, 1);
        code.seed = opts.seed;
        const auto a = liealg::analyze_code(lp, code, opts.tol);
        auto rep = opts.standard == "loc" ? liealg::loc_report(lp, a, code) : liealg::lesc_report(lp, a, code, opts.tol);
        const int sample = res.evaluated++;
        if (rep.verdict) res.hits.push_back({std::move(code), std::move(rep), sample, family});
    };
    auto done = [&] {
        return res.evaluated >= opts.budget || (opts.stop_after >= 0 && static_cast<int>(res.hits.size()) >= opts.stop_after);
    };

    for (int order = lo; order <= hi && !done(); ++order) {
        std::vector<int> c(static_cast<std::size_t>(order));
        for (int i = 0; i < order; ++i) c[static_cast<std::size_t>(i)] = i;
        do evaluate(subset_permutation(kbar, c), order, "permutation");
        while (!done() && next_subset(c, kbar));
    }

    const CMatrix frame = sec.frame.leftCols(kbar);
    std::vector<CMatrix> compressed{frame.adjoint() * m.drift * frame};
    for (const auto& h : m.controls) compressed.push_back(frame.adjoint() * h * frame);

    for (int i = 0; !done(); ++i) {
        const int order = lo + (i / 2) % (hi - lo + 1);
        const std::uint64_t sd = sample_seed(opts.seed, res.evaluated);
        if (i % 2 == 0) evaluate(eigen_candidate(compressed, sd), order, "eigenvector");
        else evaluate(haar_unitary(kbar, sd), order, "haar");
    }
    return res;
}

}  // namespace dfsctl::codes
