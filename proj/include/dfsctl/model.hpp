#pragma once

#include "dfsctl/types.hpp"

#include <json.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dfsctl::model {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_char(Pauli p);
int q_value(Pauli p);

class PauliString {
public:
    PauliString() = default;
    explicit PauliString(std::vector<Pauli> symbols);

    static PauliString parse(std::string_view text);

    std::size_t size() const { return symbols_.size(); }
    Pauli operator[](std::size_t i) const { return symbols_[i]; }
    const std::vector<Pauli>& symbols() const { return symbols_; }
    std::string str() const;

    auto operator<=>(const PauliString&) const = default;

private:
    std::vector<Pauli> symbols_;
};

// Kronecker product of Frobenius-normalized Pauli factors; qubit 1 is the
// most significant tensor factor.
CMatrix pauli_string_to_operator(const PauliString& p);

struct NoiseChannel {
    double rate = 0.0;
    CMatrix op;
};

struct LindbladModel {
    int hilbert_dim = 0;
    std::optional<int> qubits;
    CMatrix drift;
    std::vector<CMatrix> controls;
    std::vector<std::string> control_labels;  // empty or one per control
    std::vector<NoiseChannel> noise;

    int n_controls() const { return static_cast<int>(controls.size()); }
    int n_noise() const { return static_cast<int>(noise.size()); }
};

// Throws InputError naming the offending field.
void validate(const LindbladModel& m, double herm_rel = 1e-10);

LindbladModel parse_model(std::string_view text);
LindbladModel model_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const LindbladModel& m);

struct IonModelParams {
    int n = 5;
    double nu = 19.0 / 3.0;
    double mu = 8.0 / 5.0;
    double gamma_z = 10.0 * 3.14159265358979323846 / 3.0;
};

// Drift and collective dephasing of an n-qubit chain with a bus qubit at
// position 1; controls are attached separately.
LindbladModel build_ion_model(const IonModelParams& p);

std::vector<int> q_signature(const PauliString& p);

std::vector<PauliString> enumerate_control_pool(int n);
long pool_size_formula(int n);

struct ResourceSetCheck {
    bool ok = true;
    std::vector<std::string> reasons;
    int max_neff = 0;  // checked after the DIFS is known
};

ResourceSetCheck validate_resource_set(const std::vector<PauliString>& set, int max_nc, int max_neff);

enum class ControlOrder { pool, as_given };

// Replaces the control list with the given Pauli strings (labels kept).
LindbladModel with_controls(LindbladModel m, std::vector<PauliString> set,
                            ControlOrder order = ControlOrder::pool);

}  // namespace dfsctl::model
