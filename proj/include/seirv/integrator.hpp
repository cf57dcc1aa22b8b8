#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include <Eigen/Core>

#include "seirv/error.hpp"
#include "seirv/model.hpp"
#include "seirv/schedule.hpp"

namespace seirv {

struct IntegratorConfig {
    double dt = 0.01;
    bool positivity_clamp = true;
    double tolerance = 1e-12;  ///< accepted negative undershoot, relative to N0

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be > 0");
        if (!(tolerance >= 0.0) || !std::isfinite(tolerance)) throw ValidationError("tolerance must be >= 0");
    }
};

/// States sampled on t_k = k dt, one row per grid point.
struct Trajectory {
    Eigen::VectorXd times;
    Eigen::Matrix<double, Eigen::Dynamic, kCompartments> states;
    double dt = 0.0;

    Eigen::Index size() const { return times.size(); }
    State state(Eigen::Index k) const { return states.row(k).transpose(); }
    auto column(Compartment c) const { return states.col(c); }
    double horizon() const { return times.size() ? times(times.size() - 1) : 0.0; }
};

/// Number of RK4 steps for a horizon; the effective step is horizon / steps.
std::size_t grid_steps(double horizon, double dt);

namespace detail {

inline ModelParams active_params(const ModelParams& p, const BetaSchedule* beta, const ControlSchedule* ctrl,
                                 double t, double slack) {
    ModelParams q = p;
    if (beta) q.beta = beta->at(t, slack);
    if (ctrl) {
        const ControlPair c = ctrl->at(t, slack);
        q.c1 = c.c1;
        q.c2 = c.c2;
    }
    return q;
}

inline State rk4_step(const State& x, const ModelParams& q, double h) {
    const State k1 = rhs_unchecked(x, q);
    const State k2 = rhs_unchecked((x + 0.5 * h * k1).eval(), q);
    const State k3 = rhs_unchecked((x + 0.5 * h * k2).eval(), q);
    const State k4 = rhs_unchecked((x + h * k3).eval(), q);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

/// RK4 over [0, horizon] calling visit(k, t_k, x_k) at every grid point, including k = 0.
/// Use this when only a functional of the trajectory is needed.
template <typename Visitor>
void integrate_visit(const ModelParams& p, const BetaSchedule* beta_sched, const ControlSchedule* ctrl_sched,
                     const State& init, double horizon, const IntegratorConfig& cfg, Visitor&& visit) {
    cfg.validate();
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("horizon must be > 0");
    if (!init.allFinite() || (init.array() < 0.0).any()) throw ValidationError("initial state must be finite and >= 0");
    if (beta_sched) beta_sched->validate();
    if (ctrl_sched) ctrl_sched->validate();
    p.validate();

    const std::size_t n = grid_steps(horizon, cfg.dt);
    const double h = horizon / static_cast<double>(n);
    const double slack = 1e-9 * h;
    const double floor = -cfg.tolerance * std::max(init.sum(), 1.0);

    State x = init;
    visit(std::size_t{0}, 0.0, static_cast<const State&>(x));
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * h;
        const ModelParams q = detail::active_params(p, beta_sched, ctrl_sched, t, slack);
        x = detail::rk4_step(x, q, h);
        if (!x.allFinite()) throw DivergenceError(k + 1, t + h);
        if (cfg.positivity_clamp)
            for (Eigen::Index c = 0; c < kCompartments; ++c)
                if (x(c) < 0.0 && x(c) > floor) x(c) = 0.0;
        visit(k + 1, static_cast<double>(k + 1) * h, static_cast<const State&>(x));
    }
}

Trajectory integrate(const ModelParams& p, const BetaSchedule* beta_sched, const ControlSchedule* ctrl_sched,
                     const State& init, double horizon, const IntegratorConfig& cfg = {});

inline Trajectory integrate(const ModelParams& p, const State& init, double horizon, const IntegratorConfig& cfg = {}) {
    return integrate(p, nullptr, nullptr, init, horizon, cfg);
}

/// Largest |N(t_k) - closed form| / N0 along a trajectory.
double conservation_error(const Trajectory& traj, const ModelParams& p);

}  // namespace seirv
