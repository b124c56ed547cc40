#pragma once

#include "dfsctl/pstatic.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace dfsctl::sim {

// Piecewise-constant input. Column i of `values` holds on [times(i), times(i+1)),
// the last column until the horizon. For kind effective the columns are u_eff
// samples realized through the DIFS map.
struct ControlField {
    enum class Kind { constant, piecewise, effective };
    Kind kind = Kind::constant;
    RVector times;
    RMatrix values;
    double horizon = 0.0;
    RMatrix zN;
    RVector zoff;

    static ControlField constant(const RVector& u, double horizon);
    static ControlField piecewise(const RVector& times, const RMatrix& values, double horizon);
    static ControlField effective(const pstatic::DIFSResult& d, const RVector& times, const RMatrix& u_eff, double horizon);
    // random piecewise effective field, `pieces` equal intervals, entries N(0, scale^2)
    static ControlField random_effective(const pstatic::DIFSResult& d, int pieces, double horizon, double scale, std::uint64_t seed);

    int intervals() const { return static_cast<int>(times.size()); }
    RVector u(int interval) const;
    RVector u_at(double t) const;
    double interval_end(int interval) const;
};

struct SimOptions {
    std::optional<Subspace> p;   // for the leakage diagnostic
    std::optional<Subspace> nc;  // likewise
    int samples_per_interval = 4;
    bool force_ode = false;
    int max_dense = 256;  // Bdim up to this uses matrix exponentials
};

struct Trajectory {
    std::vector<double> times;
    std::vector<RVector> states;
    std::vector<double> leak_p;   // ||Pi_P^perp v(t)||, empty without a P
    std::vector<double> leak_nc;  // ||(I - Pi_NC) v(t)||
    double max_norm_rate = 0.0;   // max d/dt ||v||^2 over accepted steps (or samples)
    int steps = 0;
    std::string method;  // expm or dopri5

    nlohmann::json summary() const;
    // time, the first `components` coordinates, then the diagnostics
    std::string csv(int components = 4) const;
};

Trajectory propagate(const cvs::GModel& g, const ControlField& field, const RVector& v0, const SimOptions& opt = {},
                     const Tolerances& tol = {});

// C(T) restricted to the columns of `columns` (all of them by default):
// dC/dt = G(t) C, C(0) = columns.
RMatrix channel_matrix(const cvs::GModel& g, const ControlField& field, const std::optional<RMatrix>& columns = std::nullopt,
                       const SimOptions& opt = {}, const Tolerances& tol = {});

}  // namespace dfsctl::sim
