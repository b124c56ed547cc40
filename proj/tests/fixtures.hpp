#pragma once

// Shared model fixtures built through the library (the oracles stay in oracles.hpp).

#include "dfsctl/commutant.hpp"
#include "dfsctl/cvs.hpp"
#include "dfsctl/model.hpp"

#include <string>
#include <vector>

namespace fixture {

inline const std::vector<std::string> kIonControls{"YXIXI", "YXZXZ", "YZZZZ", "ZIIYX", "ZIYIX", "ZZYZX", "ZZZYX"};

inline dfsctl::model::LindbladModel ion_scheme_model()
{
    std::vector<dfsctl::model::PauliString> set;
    for (const auto& s : kIonControls) set.push_back(dfsctl::model::PauliString::parse(s));
    return dfsctl::model::with_controls(dfsctl::model::build_ion_model({}), set, dfsctl::model::ControlOrder::as_given);
}

struct Ion {
    dfsctl::model::LindbladModel model;
    dfsctl::cvs::GModel g;
    dfsctl::commutant::CommutantStructure s;
};

inline const Ion& ion()
{
    static const Ion x = [] {
        Ion i;
        i.model = ion_scheme_model();
        i.g = dfsctl::cvs::liouvillian_to_g(i.model);
        i.s = dfsctl::commutant::commutant_structure(dfsctl::commutant::interaction_algebra(i.model), i.g.basis, 0);
        return i;
    }();
    return x;
}

// weight-one states of qubits 2..5, the support of k-sector 3
inline const std::vector<int> kSector3States{1, 2, 4, 8, 17, 18, 20, 24};

}  // namespace fixture
