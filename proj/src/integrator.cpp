#include "seirv/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace seirv {

std::size_t grid_steps(double horizon, double dt) {
    const double ratio = horizon / dt;
    if (!std::isfinite(ratio) || ratio > 1e9) throw ValidationError("horizon/dt yields too many steps");
    return static_cast<std::size_t>(std::max<long long>(1, std::llround(ratio)));
}

Trajectory integrate(const ModelParams& p, const BetaSchedule* beta_sched, const ControlSchedule* ctrl_sched,
                     const State& init, double horizon, const IntegratorConfig& cfg) {
    cfg.validate();
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("horizon must be > 0");
    const std::size_t n = grid_steps(horizon, cfg.dt);
    Trajectory traj;
    traj.dt = horizon / static_cast<double>(n);
    traj.times.resize(static_cast<Eigen::Index>(n + 1));
    traj.states.resize(static_cast<Eigen::Index>(n + 1), kCompartments);
    integrate_visit(p, beta_sched, ctrl_sched, init, horizon, cfg, [&](std::size_t k, double t, const State& x) {
        const auto row = static_cast<Eigen::Index>(k);
        traj.times(row) = t;
        traj.states.row(row) = x.transpose();
    });
    return traj;
}

double conservation_error(const Trajectory& traj, const ModelParams& p) {
    if (traj.size() == 0) return 0.0;
    const double n0 = traj.states.row(0).sum();
    double worst = 0.0;
    for (Eigen::Index k = 0; k < traj.size(); ++k) {
        const double exact = population_closed_form(p, n0, traj.times(k));
        worst = std::max(worst, std::abs(traj.states.row(k).sum() - exact));
    }
    return worst / std::max(n0, 1.0);
}

}  // namespace seirv
