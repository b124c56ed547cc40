// dfsctl: command-line front end. Reports are JSON, trajectories CSV.
// Exit codes: 0 ok, 2 input error, 3 no protective inputs, 4 numerical failure.

#include "dfsctl/liealg.hpp"
#include "dfsctl/search.hpp"
#include "dfsctl/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace dfsctl;
using nlohmann::json;

namespace {

struct Config {
    std::string model_path;
    std::uint64_t seed = 0;
    std::vector<std::string> tol_overrides;
    std::string out;
    Tolerances tol;

    int sector = 0;
    int code_order = 0;
    int slot = 1;
    std::string u_star;  // PATH, "random", or empty for identity
    std::string p_file;
    std::string standard = "loc";
    int budget = 0;
    int min_order = 2;
    int max_order = 0;
    int stop_after = 1;
    bool search = false;

    std::string field = "difs";
    std::vector<double> u;
    double horizon = 1.0;
    int pieces = 4;
    double scale = 1.0;
    int state = 0;
    int samples = 4;
    int components = 4;
    std::string report;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_out(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

json tolerances_json(const Tolerances& t)
{
    return json{{"herm", t.herm},           {"rank", t.rank},           {"cluster", t.cluster},
                {"closure", t.closure},     {"intersect", t.intersect}, {"invariance", t.invariance},
                {"ode_rtol", t.ode_rtol},   {"ode_atol", t.ode_atol}};
}

void apply_overrides(Config& c)
{
    for (const auto& s : c.tol_overrides) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw InputError("--tol expects NAME=VALUE, got " + s);
        double v = 0.0;
        try {
            std::size_t used = 0;
            v = std::stod(s.substr(eq + 1), &used);
            if (used != s.size() - eq - 1) throw std::invalid_argument("trailing");
        } catch (const std::logic_error&) {
            throw InputError("--tol " + s + ": value is not a number");
        }
        c.tol.set(s.substr(0, eq), v);
    }
}

json envelope(const Config& c, const std::string& command, json result)
{
    return json{{"command", command}, {"model", c.model_path}, {"seed", c.seed},
                {"tolerances", tolerances_json(c.tol)}, {"result", std::move(result)}};
}

void emit(const Config& c, const std::string& command, json result)
{
    write_out(c.out, envelope(c, command, std::move(result)).dump(1) + "\n");
}

model::LindbladModel load_model(const Config& c)
{
    auto m = model::parse_model(read_file(c.model_path));
    model::validate(m, c.tol.herm);
    return m;
}

struct Pipeline {
    model::LindbladModel m;
    cvs::GModel g;
    commutant::CommutantStructure s;
};

Pipeline pipeline(const Config& c)
{
    Pipeline p;
    p.m = load_model(c);
    p.g = cvs::liouvillian_to_g(p.m);
    // noiseless: the algebra is span{I} and the whole space is one sector
    const auto alg = p.m.noise.empty() ? commutant::generated_algebra(p.m.hilbert_dim, {}, c.tol.rank)
                                       : commutant::interaction_algebra(p.m, c.tol.rank);
    p.s = commutant::commutant_structure(alg, p.g.basis, c.seed, c.tol);
    return p;
}

// Explicit projection: JSON array of Bdim rows; the columns are orthonormalized.
Subspace load_p(const Config& c, int bdim)
{
    const json doc = json::parse(read_file(c.p_file));
    if (!doc.is_array() || doc.empty() || !doc[0].is_array()) throw InputError(c.p_file + ": expected an array of rows");
    const Index rows = static_cast<Index>(doc.size()), cols = static_cast<Index>(doc[0].size());
    if (rows != bdim) throw InputError(c.p_file + ": expected " + std::to_string(bdim) + " rows");
    RMatrix a(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        if (static_cast<Index>(doc[static_cast<std::size_t>(i)].size()) != cols) throw InputError(c.p_file + ": ragged rows");
        for (Index j = 0; j < cols; ++j) a(i, j) = doc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
    }
    return Subspace(linalg::orth(a, c.tol.rank));
}

const Subspace& choose_p(const Config& c, const Pipeline& p, std::optional<Subspace>& holder)
{
    if (!c.p_file.empty()) {
        holder = load_p(c, p.g.dim());
        return *holder;
    }
    if (c.sector < 1) throw InputError("need --sector or --p-file");
    return p.s.core(c.sector);
}

CMatrix load_u_star(const Config& c, int kbar)
{
    if (c.u_star.empty()) return CMatrix::Identity(kbar, kbar);
    if (c.u_star == "random") return codes::haar_unitary(kbar, c.seed);
    return codes::matrix_from_json(json::parse(read_file(c.u_star)));
}

codes::SubsystemCode make_code(const Config& c, const Pipeline& p)
{
    if (c.sector < 1) throw InputError("need --sector");
    const int kbar = p.s.sector(c.sector).order;
    auto code = codes::derive_code(p.s, c.sector, c.code_order > 0 ? c.code_order : kbar, load_u_star(c, kbar), c.slot);
    code.seed = c.seed;
    return code;
}

codes::SearchOptions search_options(const Config& c)
{
    codes::SearchOptions o;
    o.sector = c.sector;
    o.min_order = c.code_order > 0 ? c.code_order : c.min_order;
    o.max_order = c.code_order > 0 ? c.code_order : c.max_order;
    o.standard = c.standard;
    o.budget = c.budget;
    o.stop_after = c.stop_after;
    o.seed = c.seed;
    o.tol = c.tol;
    return o;
}

json search_json(const codes::SearchResult& r)
{
    json hits = json::array();
    for (const auto& h : r.hits)
        hits.push_back({{"sample", h.sample}, {"family", h.family}, {"code", codes::code_descriptor(h.code)}, {"report", h.report.to_json()}});
    return json{{"evaluated", r.evaluated}, {"lie_P", r.lie_p_dim}, {"hits", std::move(hits)}};
}

void cmd_convert(const Config& c)
{
    const auto g = cvs::liouvillian_to_g(load_model(c));
    emit(c, "convert", cvs::gmodel_to_json(g));
}

void cmd_commutant(const Config& c)
{
    const auto p = pipeline(c);
    json r = commutant::structure_report(p.s);
    json cores = json::array();
    for (int k = 1; k <= p.s.sector_count(); ++k) cores.push_back(p.s.core(k).rank());
    r["core_ranks"] = std::move(cores);
    r["max_code_order"] = codes::max_code_order(p.s);
    emit(c, "commutant", std::move(r));
}

void cmd_codes(const Config& c)
{
    const auto p = pipeline(c);
    if (c.search) {
        if (c.sector < 1) throw InputError("need --sector");
        emit(c, "codes", search_json(codes::search_codes(p.s, p.m, p.g, search_options(c))));
        return;
    }
    const auto code = make_code(c, p);
    emit(c, "codes", json{{"code", codes::code_descriptor(code)}, {"dim", code.dim()}, {"copies", code.copies},
                          {"core_rank", code.pi_cs.rank()}});
}

void cmd_difs(const Config& c)
{
    const auto p = pipeline(c);
    std::optional<Subspace> holder;
    const Subspace& proj = choose_p(c, p, holder);
    json r = pstatic::difs_report(pstatic::compute_difs(p.g, proj, c.tol));
    r["p_rank"] = proj.rank();
    r["p_dim_reported"] = pstatic::reported_dim(proj, p.s, c.tol.rank);
    emit(c, "difs", std::move(r));
}

void cmd_test(const Config& c)
{
    if (c.standard == "oc" || c.standard == "esc") {
        const auto g = cvs::liouvillian_to_g(load_model(c));
        const auto r = c.standard == "oc" ? liealg::test_oc(g, c.tol) : liealg::test_esc(g, c.tol);
        emit(c, "test", json{{"report", r.to_json()}});
        return;
    }
    if (c.standard != "loc" && c.standard != "lesc") throw InputError("--standard must be loc, lesc, oc or esc");
    const auto p = pipeline(c);
    if (c.search) {
        if (c.sector < 1) throw InputError("need --sector");
        const auto r = codes::search_codes(p.s, p.m, p.g, search_options(c));
        json out{{"search", search_json(r)}};
        out["report"] = r.hits.empty() ? json(nullptr) : r.hits.front().report.to_json();
        emit(c, "test", std::move(out));
        return;
    }
    const auto code = make_code(c, p);
    std::optional<Subspace> holder;
    const Subspace& proj = c.p_file.empty() ? p.s.core(c.sector) : choose_p(c, p, holder);
    const auto lp = liealg::lie_p(p.g, proj, c.tol);
    const auto a = liealg::analyze_code(lp, code, c.tol);
    const auto r = c.standard == "loc" ? liealg::loc_report(lp, a, code) : liealg::lesc_report(lp, a, code, c.tol);
    emit(c, "test", json{{"code", codes::code_descriptor(code)}, {"difs", pstatic::difs_report(lp.difs)}, {"report", r.to_json()}});
}

void cmd_simulate(const Config& c)
{
    const auto p = pipeline(c);
    std::optional<Subspace> holder;
    const Subspace& proj = choose_p(c, p, holder);
    sim::ControlField f;
    if (c.field == "difs") {
        f = sim::ControlField::random_effective(pstatic::compute_difs(p.g, proj, c.tol), c.pieces, c.horizon, c.scale, c.seed);
    } else if (c.field == "constant") {
        if (static_cast<int>(c.u.size()) != p.g.n_controls())
            throw InputError("--u needs " + std::to_string(p.g.n_controls()) + " values");
        f = sim::ControlField::constant(Eigen::Map<const RVector>(c.u.data(), static_cast<Index>(c.u.size())), c.horizon);
    } else {
        throw InputError("--field must be difs or constant");
    }
    if (c.state < 0 || c.state >= p.m.hilbert_dim) throw InputError("--state out of range");
    CMatrix rho = CMatrix::Zero(p.m.hilbert_dim, p.m.hilbert_dim);
    rho(c.state, c.state) = 1.0;
    sim::SimOptions o;
    o.p = proj;
    o.nc = p.s.pi_nc;
    o.samples_per_interval = c.samples;
    const auto tr = sim::propagate(p.g, f, cvs::rho_to_v(rho, *p.g.basis), o, c.tol);
    write_out(c.out, tr.csv(c.components));
    json r = tr.summary();
    json us = json::array();
    for (int i = 0; i < f.intervals(); ++i) {
        const RVector u = f.u(i);
        us.push_back(std::vector<double>(u.data(), u.data() + u.size()));
    }
    r["field"] = {{"kind", c.field}, {"horizon", c.horizon}, {"times", std::vector<double>(f.times.data(), f.times.data() + f.times.size())}, {"u", std::move(us)}};
    if (!c.report.empty()) write_out(c.report, envelope(c, "simulate", std::move(r)).dump(1) + "\n");
}

}  // namespace

int main(int argc, char** argv)
{
    Config c;
    CLI::App app{"decoherence-free subsystem controllability tools"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand
    app.add_option("--model", c.model_path, "model JSON")->required();
    app.add_option("--seed", c.seed, "RNG seed");
    app.add_option("--tol", c.tol_overrides, "tolerance override NAME=VALUE (repeatable)");
    app.add_option("--out", c.out, "output path, stdout by default");

    auto* convert = app.add_subcommand("convert", "write the coherence-vector generators");
    auto* commutant = app.add_subcommand("commutant", "noise commutant sectors");
    auto* codes_cmd = app.add_subcommand("codes", "derive or search subsystem codes");
    auto* difs = app.add_subcommand("difs", "decoupling input function space for a projection");
    auto* test = app.add_subcommand("test", "controllability test");
    auto* simulate = app.add_subcommand("simulate", "propagate a computational basis state");

    for (auto* sc : {codes_cmd, difs, test, simulate}) {
        sc->add_option("--sector", c.sector, "host sector, 1-based");
        sc->add_option("--p-file", c.p_file, "explicit projection: JSON array of rows");
    }
    for (auto* sc : {codes_cmd, test}) {
        sc->add_option("--code-order", c.code_order, "code order (default: sector order)");
        sc->add_option("--slot", c.slot, "multiplicity index, 1-based");
        sc->add_option("--u-star", c.u_star, "u* as a JSON matrix file, or 'random'");
        sc->add_option("--budget", c.budget, "search: number of candidate codes")->check(CLI::NonNegativeNumber);
        sc->add_option("--min-order", c.min_order, "search: lowest code order");
        sc->add_option("--max-order", c.max_order, "search: highest code order");
        sc->add_option("--stop-after", c.stop_after, "search: stop after this many hits, -1 for none");
        sc->add_flag("--search", c.search, "search instead of deriving one code");
    }
    codes_cmd->add_option("--standard", c.standard, "loc or lesc");
    test->add_option("--standard", c.standard, "loc, lesc, oc or esc");
    simulate->add_option("--field", c.field, "difs (random effective field) or constant");
    simulate->add_option("--u", c.u, "constant field values")->delimiter(',');
    simulate->add_option("--horizon", c.horizon, "final time")->check(CLI::NonNegativeNumber);
    simulate->add_option("--pieces", c.pieces, "piecewise intervals of the random effective field");
    simulate->add_option("--scale", c.scale, "std dev of the random effective field");
    simulate->add_option("--state", c.state, "initial computational basis state");
    simulate->add_option("--samples", c.samples, "samples per interval");
    simulate->add_option("--components", c.components, "coherence-vector columns in the CSV");
    simulate->add_option("--report", c.report, "JSON summary path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        apply_overrides(c);
        if (*convert) cmd_convert(c);
        else if (*commutant) cmd_commutant(c);
        else if (*codes_cmd) cmd_codes(c);
        else if (*difs) cmd_difs(c);
        else if (*test) cmd_test(c);
        else if (*simulate) cmd_simulate(c);
        return 0;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const NotInvariant& e) {
        std::cerr << "not invariant: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 4;
    }
}
