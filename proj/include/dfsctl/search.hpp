#pragma once

#include "dfsctl/liealg.hpp"
#include "dfsctl/model.hpp"

#include <optional>

namespace dfsctl::codes {

struct SearchOptions {
    int sector = 0;  // 1-based host sector
    int min_order = 2;
    int max_order = 0;  // 0: sector order
    std::string standard = "loc";  // loc or lesc
    int budget = 500;              // candidate codes evaluated
    int stop_after = -1;           // stop after this many hits, <0 for no limit
    std::uint64_t seed = 0;
    std::optional<Subspace> p;  // defaults to the host sector core
    Tolerances tol;
};

struct SearchHit {
    SubsystemCode code;
    liealg::ControllabilityReport report;
    int sample = 0;  // candidate index
    std::string family;
};

struct SearchResult {
    std::vector<SearchHit> hits;
    int evaluated = 0;
    int lie_p_dim = 0;
};

// Candidates in order: slot-1 permutations (all level subsets, lowest order
// first), then alternating eigenvector and Haar samples. The eigenvector
// family diagonalizes random combinations of the model Hamiltonians
// compressed to the sector levels.
SearchResult search_codes(const commutant::CommutantStructure& s, const model::LindbladModel& m, const cvs::GModel& g,
                          const SearchOptions& opts);

}  // namespace dfsctl::codes
