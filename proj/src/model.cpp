#include "dfsctl/model.hpp"
#include "dfsctl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace dfsctl::model {

using nlohmann::json;

char pauli_char(Pauli p)
{
    static constexpr char chars[] = {'I', 'X', 'Y', 'Z'};
    return chars[static_cast<int>(p)];
}

int q_value(Pauli p)
{
    switch (p) {
    case Pauli::I:
    case Pauli::X: return 1;
    case Pauli::Y: return 0;
    case Pauli::Z: return -1;
    }
    return 0;
}

PauliString::PauliString(std::vector<Pauli> symbols) : symbols_(std::move(symbols)) {}

PauliString PauliString::parse(std::string_view text)
{
    if (text.empty()) throw InputError("Pauli string must be non-empty");
    std::vector<Pauli> s;
    s.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case 'I': case 'i': s.push_back(Pauli::I); break;
        case 'X': case 'x': s.push_back(Pauli::X); break;
        case 'Y': case 'y': s.push_back(Pauli::Y); break;
        case 'Z': case 'z': s.push_back(Pauli::Z); break;
        default:
            throw InputError("invalid Pauli symbol '" + std::string(1, c) + "' in \"" + std::string(text) + "\"");
        }
    }
    return PauliString(std::move(s));
}

std::string PauliString::str() const
{
    std::string out;
    for (Pauli p : symbols_) out.push_back(pauli_char(p));
    return out;
}

namespace {

CMatrix single_pauli(Pauli p)
{
    const double h = 1.0 / std::sqrt(2.0);
    CMatrix m(2, 2);
    switch (p) {
    case Pauli::I: m << h, 0, 0, h; break;
    case Pauli::X: m << 0, h, h, 0; break;
    case Pauli::Y: m << 0, cplx(0, -h), cplx(0, h), 0; break;
    case Pauli::Z: m << h, 0, 0, -h; break;
    }
    return m;
}

}  // namespace

CMatrix pauli_string_to_operator(const PauliString& p)
{
    if (p.size() == 0) throw InputError("Pauli string must be non-empty");
    CMatrix out = single_pauli(p[0]);
    for (std::size_t i = 1; i < p.size(); ++i) out = linalg::kron(out, single_pauli(p[i]));
    return out;
}

void validate(const LindbladModel& m, double herm_rel)
{
    const int n = m.hilbert_dim;
    if (n < 1) throw InputError("hilbert_dim: must be positive");
    if (m.qubits && (1 << *m.qubits) != n) throw InputError("qubits: 2^qubits must equal hilbert_dim");
    auto check_shape = [n](const CMatrix& x, const std::string& field) {
        if (x.rows() != n || x.cols() != n) {
            throw InputError(field + ": expected " + std::to_string(n) + "x" + std::to_string(n) + " matrix, got " +
                             std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
        }
    };
    auto check_herm = [&](const CMatrix& x, const std::string& field) {
        check_shape(x, field);
        if (!x.allFinite()) throw InputError(field + ": non-finite entries");
        if (!linalg::is_hermitian(x, herm_rel)) throw InputError(field + ": not Hermitian");
    };
    check_herm(m.drift, "drift");
    for (std::size_t k = 0; k < m.controls.size(); ++k) check_herm(m.controls[k], "controls[" + std::to_string(k) + "]");
    if (!m.control_labels.empty() && m.control_labels.size() != m.controls.size()) {
        throw InputError("control_labels: count differs from controls");
    }
    for (std::size_t j = 0; j < m.noise.size(); ++j) {
        const std::string f = "noise[" + std::to_string(j) + "]";
        if (!(m.noise[j].rate >= 0.0) || !std::isfinite(m.noise[j].rate)) throw InputError(f + ".rate: must be a finite nonnegative number");
        check_shape(m.noise[j].op, f + ".operator");
        if (!m.noise[j].op.allFinite()) throw InputError(f + ".operator: non-finite entries");
    }
}

namespace {

CMatrix operator_from_json(const json& spec, int n, const std::string& field)
{
    if (!spec.is_object()) throw InputError(field + ": operator must be an object");
    if (spec.contains("dense")) {
        const json& rows = spec.at("dense");
        if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
            throw InputError(field + ".dense: expected " + std::to_string(n) + " rows");
        }
        CMatrix x(n, n);
        for (int i = 0; i < n; ++i) {
            const json& row = rows[i];
            if (!row.is_array() || static_cast<int>(row.size()) != n) {
                throw InputError(field + ".dense[" + std::to_string(i) + "]: expected " + std::to_string(n) + " entries");
            }
            for (int j = 0; j < n; ++j) {
                const json& e = row[j];
                if (e.is_number()) {
                    x(i, j) = e.get<double>();
                } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                    x(i, j) = cplx(e[0].get<double>(), e[1].get<double>());
                } else {
                    throw InputError(field + ".dense[" + std::to_string(i) + "][" + std::to_string(j) + "]: expected [re, im]");
                }
            }
        }
        return x;
    }
    if (spec.contains("pauli_sum")) {
        const json& terms = spec.at("pauli_sum");
        if (!terms.is_array()) throw InputError(field + ".pauli_sum: expected array");
        CMatrix x = CMatrix::Zero(n, n);
        for (std::size_t t = 0; t < terms.size(); ++t) {
            const std::string tf = field + ".pauli_sum[" + std::to_string(t) + "]";
            const json& term = terms[t];
            if (!term.is_object() || !term.contains("coeff") || !term.contains("string") ||
                !term["coeff"].is_number() || !term["string"].is_string()) {
                throw InputError(tf + ": expected {\"coeff\": number, \"string\": text}");
            }
            PauliString p = PauliString::parse(term["string"].get<std::string>());
            if ((std::size_t{1} << p.size()) != static_cast<std::size_t>(n)) {
                throw InputError(tf + ".string: length does not match hilbert_dim");
            }
            x += term["coeff"].get<double>() * pauli_string_to_operator(p);
        }
        return x;
    }
    throw InputError(field + ": operator needs \"dense\" or \"pauli_sum\"");
}

json operator_to_json(const CMatrix& x)
{
    json rows = json::array();
    for (Index i = 0; i < x.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < x.cols(); ++j) row.push_back({x(i, j).real(), x(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return json{{"dense", std::move(rows)}};
}

std::string single_pauli_label(const json& spec)
{
    if (spec.contains("pauli_sum") && spec["pauli_sum"].is_array() && spec["pauli_sum"].size() == 1) {
        return spec["pauli_sum"][0].value("string", "");
    }
    return "";
}

}  // namespace

LindbladModel model_from_json(const json& doc)
{
    if (!doc.is_object()) throw InputError("model: top level must be an object");
    LindbladModel m;
    if (!doc.contains("hilbert_dim") || !doc["hilbert_dim"].is_number_integer()) {
        throw InputError("hilbert_dim: missing or not an integer");
    }
    m.hilbert_dim = doc["hilbert_dim"].get<int>();
    if (m.hilbert_dim < 1) throw InputError("hilbert_dim: must be positive");
    if (doc.contains("qubits")) {
        if (!doc["qubits"].is_number_integer()) throw InputError("qubits: must be an integer");
        m.qubits = doc["qubits"].get<int>();
    }
    if (!doc.contains("drift")) throw InputError("drift: missing");
    m.drift = operator_from_json(doc["drift"], m.hilbert_dim, "drift");
    if (doc.contains("controls")) {
        const json& cs = doc["controls"];
        if (!cs.is_array()) throw InputError("controls: expected array");
        std::vector<std::string> labels;
        for (std::size_t k = 0; k < cs.size(); ++k) {
            m.controls.push_back(operator_from_json(cs[k], m.hilbert_dim, "controls[" + std::to_string(k) + "]"));
            labels.push_back(single_pauli_label(cs[k]));
        }
        if (std::all_of(labels.begin(), labels.end(), [](const std::string& s) { return !s.empty(); })) {
            m.control_labels = std::move(labels);
        }
    }
    if (doc.contains("noise")) {
        const json& ns = doc["noise"];
        if (!ns.is_array()) throw InputError("noise: expected array");
        for (std::size_t j = 0; j < ns.size(); ++j) {
            const std::string f = "noise[" + std::to_string(j) + "]";
            if (!ns[j].is_object() || !ns[j].contains("rate") || !ns[j]["rate"].is_number()) {
                throw InputError(f + ".rate: missing or not a number");
            }
            if (!ns[j].contains("operator")) throw InputError(f + ".operator: missing");
            m.noise.push_back({ns[j]["rate"].get<double>(), operator_from_json(ns[j]["operator"], m.hilbert_dim, f + ".operator")});
        }
    }
    validate(m);
    return m;
}

LindbladModel parse_model(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw InputError(std::string("model: malformed JSON: ") + e.what());
    }
    return model_from_json(doc);
}

json model_to_json(const LindbladModel& m)
{
    json doc;
    doc["hilbert_dim"] = m.hilbert_dim;
    if (m.qubits) doc["qubits"] = *m.qubits;
    doc["drift"] = operator_to_json(m.drift);
    doc["controls"] = json::array();
    for (const auto& c : m.controls) doc["controls"].push_back(operator_to_json(c));
    doc["noise"] = json::array();
    for (const auto& ch : m.noise) doc["noise"].push_back({{"rate", ch.rate}, {"operator", operator_to_json(ch.op)}});
    return doc;
}

namespace {

PauliString z_string(int n, std::initializer_list<int> qubits)
{
    std::vector<Pauli> s(static_cast<std::size_t>(n), Pauli::I);
    for (int q : qubits) s[static_cast<std::size_t>(q)] = Pauli::Z;
    return PauliString(std::move(s));
}

}  // namespace

LindbladModel build_ion_model(const IonModelParams& p)
{
    if (p.n < 2) throw InputError("ion model: n must be >= 2");
    if (p.n > 12) throw InputError("ion model: n too large for dense representation");
    if (!(p.gamma_z > 0.0) || !std::isfinite(p.gamma_z)) throw InputError("ion model: gamma_z must be positive");
    if (!std::isfinite(p.nu) || !std::isfinite(p.mu)) throw InputError("ion model: nu and mu must be finite");

    const int dim = 1 << p.n;
    const double pi = std::numbers::pi;
    LindbladModel m;
    m.hilbert_dim = dim;
    m.qubits = p.n;
    m.drift = CMatrix::Zero(dim, dim);
    CMatrix d = CMatrix::Zero(dim, dim);
    for (int j = 1; j < p.n; ++j) {
        const CMatrix zj = pauli_string_to_operator(z_string(p.n, {j}));
        m.drift += pi * p.nu * zj;
        m.drift += 0.5 * pi * p.mu * pauli_string_to_operator(z_string(p.n, {0, j}));
        d += zj;
    }
    m.noise.push_back({p.gamma_z, d});
    return m;
}

std::vector<int> q_signature(const PauliString& p)
{
    if (p.size() < 2) throw InputError("q signature needs at least two qubits");
    std::vector<int> out;
    for (std::size_t j = 1; j < p.size(); ++j) out.push_back(q_value(p[j]));
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

int mod4(int x) { return ((x % 4) + 4) % 4; }

bool in_pool(const PauliString& p)
{
    const int r1 = mod4(q_value(p[0]));
    int rest = 0;
    for (std::size_t j = 1; j < p.size(); ++j) rest += q_value(p[j]);
    return r1 == mod4(rest) && (r1 == 0 || r1 == 3);
}

}  // namespace

std::vector<PauliString> enumerate_control_pool(int n)
{
    if (n < 2) throw InputError("control pool: n must be >= 2");
    if (n > 12) throw InputError("control pool: n too large");
    std::vector<PauliString> out;
    const long total = 1L << (2 * n);
    std::vector<Pauli> s(static_cast<std::size_t>(n));
    for (long code = 0; code < total; ++code) {
        long c = code;
        for (int j = n - 1; j >= 0; --j) {
            s[static_cast<std::size_t>(j)] = static_cast<Pauli>(c & 3);
            c >>= 2;
        }
        PauliString p(s);
        if (in_pool(p)) out.push_back(std::move(p));
    }
    return out;
}

long pool_size_formula(int n)
{
    const double v = std::pow(4.0, n) / 8.0 + std::pow(2.0, n / 2.0 - 1.0) * std::cos(std::numbers::pi * n / 4.0);
    return std::lround(v);
}

ResourceSetCheck validate_resource_set(const std::vector<PauliString>& set, int max_nc, int max_neff)
{
    ResourceSetCheck out;
    out.max_neff = max_neff;
    if (static_cast<int>(set.size()) > max_nc) {
        out.ok = false;
        out.reasons.push_back("set has " + std::to_string(set.size()) + " resources, limit " + std::to_string(max_nc));
    }
    std::set<std::vector<int>> bus_y;
    for (const auto& p : set) {
        if (p.size() < 2 || p.size() != set.front().size()) {
            out.ok = false;
            out.reasons.push_back(p.str() + ": inconsistent length");
            continue;
        }
        if (!in_pool(p)) {
            out.ok = false;
            out.reasons.push_back(p.str() + ": not in the control pool");
        }
        if (p[0] == Pauli::Y && !bus_y.insert(q_signature(p)).second) {
            out.ok = false;
            out.reasons.push_back(p.str() + ": q signature shared with another Y-bus resource");
        }
    }
    return out;
}

LindbladModel with_controls(LindbladModel m, std::vector<PauliString> set, ControlOrder order)
{
    if (order == ControlOrder::pool) std::sort(set.begin(), set.end());
    m.controls.clear();
    m.control_labels.clear();
    for (const auto& p : set) {
        if ((std::size_t{1} << p.size()) != static_cast<std::size_t>(m.hilbert_dim)) {
            throw InputError("control " + p.str() + ": length does not match hilbert_dim");
        }
        m.controls.push_back(pauli_string_to_operator(p));
        m.control_labels.push_back(p.str());
    }
    return m;
}

}  // namespace dfsctl::model
