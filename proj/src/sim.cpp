#include "dfsctl/sim.hpp"

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace dfsctl::sim {
namespace {

namespace ode = boost::numeric::odeint;
using State = std::vector<double>;

void check_grid(const RVector& times, Index columns, double horizon)
{
    if (times.size() == 0 || times.size() != columns) throw InputError("control field: need one value column per grid time");
    if (std::abs(times(0)) > 0.0) throw InputError("control field: grid must start at 0");
    for (Index i = 1; i < times.size(); ++i)
        if (!(times(i) > times(i - 1))) throw InputError("control field: grid times must be strictly increasing");
    if (horizon < times(times.size() - 1)) throw InputError("control field: horizon before the last grid time");
    if (!std::isfinite(horizon)) throw InputError("control field: horizon must be finite");
}

// Integrates dX/dt = G X over one constant interval, calling `sample(t, X)`
// at `n` equally spaced points after t0.
class Stepper {
public:
    Stepper(const Tolerances& tol, bool dense) : tol_(tol), dense_(dense) {}

    template <typename F>
    void run(const RMatrix& gm, RMatrix& x, double t0, double t1, int n, F&& sample)
    {
        const double h = (t1 - t0) / n;
        if (dense_) {
            const RMatrix e = (gm * h).exp();
            for (int i = 1; i <= n; ++i) {
                x = e * x;
                if (!x.allFinite()) throw NumericalError("propagate: non-finite state at t = " + std::to_string(t0 + i * h));
                ++steps_;
                sample(t0 + i * h, x);
            }
            return;
        }
        const Index rows = x.rows(), cols = x.cols();
        State s(x.data(), x.data() + x.size());
        auto rhs = [&](const State& in, State& out, double) {
            out.resize(in.size());
            Eigen::Map<const RMatrix> xi(in.data(), rows, cols);
            Eigen::Map<RMatrix> xo(out.data(), rows, cols);
            xo.noalias() = gm * xi;
        };
        auto stepper = ode::make_controlled(tol_.ode_atol, tol_.ode_rtol, ode::runge_kutta_dopri5<State>());
        double t = t0;
        for (int i = 1; i <= n; ++i) {
            const double target = (i == n) ? t1 : t0 + i * h;
            const double eps = 1e-13 * std::max(1.0, std::abs(target));
            while (target - t > eps) {
                const bool clamped = dt_ >= target - t;
                double dt = clamped ? target - t : dt_;
                const double floor = 1e-14 * std::max(1.0, std::abs(t));
                for (;;) {
                    if (dt < floor) throw NumericalError("propagate: step size underflow at t = " + std::to_string(t));
                    const State keep = s;
                    const double t_keep = t, before = dt;
                    if (stepper.try_step(rhs, s, t, dt) == ode::success) {
                        if (!std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); })) {
                            // a non-finite error estimate passes the controller's test
                            s = keep;
                            t = t_keep;
                            dt = 0.5 * before;
                            continue;
                        }
                        // try_step proposes the next size in dt
                        if (!clamped || dt > dt_) dt_ = dt;
                        ++steps_;
                        Eigen::Map<const RMatrix> xs(s.data(), rows, cols);
                        if (cols == 1) rate_ = std::max(rate_, 2.0 * xs.col(0).dot(gm * xs.col(0)));
                        break;
                    }
                    if (!(dt < before)) dt = 0.5 * before;
                }
            }
            t = target;
            x = Eigen::Map<const RMatrix>(s.data(), rows, cols);
            sample(target, x);
        }
    }

    int steps() const { return steps_; }
    double rate() const { return rate_; }
    void seed_step(double dt) { dt_ = dt; }

private:
    Tolerances tol_;
    bool dense_;
    double dt_ = 1e-3;
    int steps_ = 0;
    double rate_ = 0.0;
};

double perp_norm(const Subspace& s, const RVector& v) { return (v - s.basis * (s.basis.transpose() * v)).norm(); }

}  // namespace

ControlField ControlField::constant(const RVector& u, double horizon)
{
    if (horizon < 0.0) throw InputError("control field: negative horizon");
    ControlField f;
    f.kind = Kind::constant;
    f.times = RVector::Zero(1);
    f.values = u;
    f.horizon = horizon;
    return f;
}

ControlField ControlField::piecewise(const RVector& times, const RMatrix& values, double horizon)
{
    check_grid(times, values.cols(), horizon);
    ControlField f;
    f.kind = Kind::piecewise;
    f.times = times;
    f.values = values;
    f.horizon = horizon;
    return f;
}

ControlField ControlField::effective(const pstatic::DIFSResult& d, const RVector& times, const RMatrix& u_eff, double horizon)
{
    check_grid(times, u_eff.cols(), horizon);
    if (u_eff.rows() != d.n_eff) throw InputError("control field: u_eff has " + std::to_string(u_eff.rows()) + " rows, DIFS has n_eff = " + std::to_string(d.n_eff));
    ControlField f;
    f.kind = Kind::effective;
    f.times = times;
    f.values = u_eff;
    f.horizon = horizon;
    f.zN = d.zN;
    f.zoff = d.zoff;
    return f;
}

ControlField ControlField::random_effective(const pstatic::DIFSResult& d, int pieces, double horizon, double scale, std::uint64_t seed)
{
    if (pieces < 1) throw InputError("control field: need at least one piece");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, scale);
    RMatrix v(d.n_eff, pieces);
    for (Index j = 0; j < v.cols(); ++j)
        for (Index i = 0; i < v.rows(); ++i) v(i, j) = nd(rng);
    RVector t(pieces);
    for (int i = 0; i < pieces; ++i) t(i) = horizon * i / pieces;
    return effective(d, t, v, horizon);
}

RVector ControlField::u(int interval) const
{
    const RVector c = values.col(interval);
    return kind == Kind::effective ? RVector(zN * c + zoff) : c;
}

RVector ControlField::u_at(double t) const
{
    int i = 0;
    while (i + 1 < intervals() && times(i + 1) <= t) ++i;
    return u(i);
}

double ControlField::interval_end(int interval) const
{
    return interval + 1 < intervals() ? times(interval + 1) : horizon;
}

namespace {

template <typename F>
void drive(const cvs::GModel& g, const ControlField& field, RMatrix& x, const SimOptions& opt, Stepper& st, F&& sample)
{
    if (field.values.rows() != (field.kind == ControlField::Kind::effective ? field.zN.cols() : g.n_controls()) ||
        (field.kind == ControlField::Kind::effective && field.zN.rows() != g.n_controls()))
        throw InputError("control field does not match the model's " + std::to_string(g.n_controls()) + " controls");
    for (int i = 0; i < field.intervals(); ++i) {
        const double t0 = field.times(i), t1 = std::min(field.interval_end(i), field.horizon);
        if (t1 <= t0) continue;
        st.run(g.g(field.u(i)), x, t0, t1, std::max(1, opt.samples_per_interval), sample);
    }
}

}  // namespace

Trajectory propagate(const cvs::GModel& g, const ControlField& field, const RVector& v0, const SimOptions& opt, const Tolerances& tol)
{
    if (v0.size() != g.dim()) throw InputError("propagate: v0 has length " + std::to_string(v0.size()) + ", expected " + std::to_string(g.dim()));
    const bool dense = !opt.force_ode && g.dim() <= opt.max_dense;
    Trajectory tr;
    tr.method = dense ? "expm" : "dopri5";
    auto record = [&](double t, const RMatrix& x) {
        const RVector v = x.col(0);
        tr.times.push_back(t);
        tr.states.push_back(v);
        if (opt.p) tr.leak_p.push_back(perp_norm(*opt.p, v));
        if (opt.nc) tr.leak_nc.push_back(perp_norm(*opt.nc, v));
    };
    RMatrix x = v0;
    record(0.0, x);
    Stepper st(tol, dense);
    st.seed_step(std::max(field.horizon, 1e-6) * 1e-3);
    double rate = 0.0;
    drive(g, field, x, opt, st, [&](double t, const RMatrix& xs) {
        record(t, xs);
        if (dense) rate = std::max(rate, 2.0 * xs.col(0).dot(g.g(field.u_at(t)) * xs.col(0)));
    });
    tr.steps = st.steps();
    tr.max_norm_rate = dense ? rate : st.rate();
    return tr;
}

RMatrix channel_matrix(const cvs::GModel& g, const ControlField& field, const std::optional<RMatrix>& columns, const SimOptions& opt,
                       const Tolerances& tol)
{
    RMatrix x = columns ? *columns : RMatrix(RMatrix::Identity(g.dim(), g.dim()));
    if (x.rows() != g.dim()) throw InputError("channel_matrix: column block has the wrong row count");
    const bool dense = !opt.force_ode && g.dim() <= opt.max_dense;
    Stepper st(tol, dense);
    st.seed_step(std::max(field.horizon, 1e-6) * 1e-3);
    SimOptions o = opt;
    o.samples_per_interval = 1;
    drive(g, field, x, o, st, [](double, const RMatrix&) {});
    return x;
}

nlohmann::json Trajectory::summary() const
{
    auto maxof = [](const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); };
    nlohmann::json j;
    j["method"] = method;
    j["samples"] = times.size();
    j["steps"] = steps;
    j["t_final"] = times.empty() ? 0.0 : times.back();
    j["norm_initial"] = states.empty() ? 0.0 : states.front().norm();
    j["norm_final"] = states.empty() ? 0.0 : states.back().norm();
    j["max_norm_rate"] = max_norm_rate;
    if (!leak_p.empty()) j["max_leak_p"] = maxof(leak_p);
    if (!leak_nc.empty()) j["max_leak_nc"] = maxof(leak_nc);
    return j;
}

std::string Trajectory::csv(int components) const
{
    std::ostringstream os;
    os << std::setprecision(12);
    const int n = states.empty() ? 0 : std::min<int>(components, static_cast<int>(states.front().size()));
    os << "t";
    for (int i = 0; i < n; ++i) os << ",v" << i;
    if (!leak_p.empty()) os << ",leak_p";
    if (!leak_nc.empty()) os << ",leak_nc";
    os << '\n';
    for (std::size_t k = 0; k < times.size(); ++k) {
        os << times[k];
        for (int i = 0; i < n; ++i) os << ',' << states[k](i);
        if (!leak_p.empty()) os << ',' << leak_p[k];
        if (!leak_nc.empty()) os << ',' << leak_nc[k];
        os << '\n';
    }
    return os.str();
}

}  // namespace dfsctl::sim
