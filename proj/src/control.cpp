#include "seirv/control.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "seirv/equilibria.hpp"

namespace seirv {

void CostParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string("cost parameter ") + name + " must be > 0");
    };
    positive(m0, "m0");
    positive(k1, "k1");
    positive(k2, "k2");
    positive(horizon, "horizon");
    positive(n_tilde, "n_tilde");
}

CostParams make_cost_params(const ModelParams& p, const State& init, double m0, double k1, double k2,
                            double horizon) {
    CostParams cp{m0, k1, k2, horizon, compute_rc(p, total_population(init)).n_tilde};
    cp.validate();
    return cp;
}

namespace {

ModelParams controlled(const ModelParams& p, const Controls& c) {
    if (!c.allFinite() || (c.array() < 0.0).any() || (c.array() > 1.0).any())
        throw ValidationError("controls must lie in [0,1]^2");
    return p.with_controls(c(0), c(1));
}

}  // namespace

CostBreakdown cost_terms(const ModelParams& p, const CostParams& cp, const Controls& c, const State& init,
                         const IntegratorConfig& cfg) {
    cp.validate();
    const ModelParams q = controlled(p, c);
    double integral = 0.0, last_t = 0.0, last_i = 0.0;
    integrate_visit(q, nullptr, nullptr, init, cp.horizon, cfg, [&](std::size_t k, double t, const State& x) {
        if (k > 0) integral += 0.5 * (t - last_t) * (x(kI) + last_i);
        last_t = t;
        last_i = x(kI);
    });
    CostBreakdown b;
    b.infection = cp.k0() * integral;
    b.control = cp.k1 * c(0) + cp.k2 * c(1);
    b.total = b.infection + b.control;
    return b;
}

AdjointTrajectory solve_adjoint(const Trajectory& forward, const ModelParams& p, const Controls& c) {
    const Eigen::Index n = forward.size();
    if (n < 2 || forward.states.rows() != n || !(forward.dt > 0.0))
        throw ValidationError("adjoint: forward trajectory must have at least two grid points and dt > 0");
    for (Eigen::Index k = 0; k < n; ++k)
        if (std::abs(forward.times(k) - static_cast<double>(k) * forward.dt) > 1e-9 * std::max(1.0, forward.horizon()))
            throw ValidationError("adjoint: forward trajectory is not on a uniform grid");
    const ModelParams q = controlled(p, c);
    q.validate();

    Eigen::Matrix<double, Eigen::Dynamic, kCompartments> f(n, kCompartments);
    for (Eigen::Index k = 0; k < n; ++k) f.row(k) = detail::rhs_unchecked(forward.state(k), q).transpose();

    State e_i = State::Zero();
    e_i(kI) = 1.0;
    // In reversed time s = T - t the system reads dH/ds = A^T H - e_I.
    auto g = [&](const State& h, const State& x) -> State { return jacobian(x, q).transpose() * h - e_i; };

    AdjointTrajectory adj;
    adj.times = forward.times;
    adj.h.resize(n, kCompartments);
    State h = State::Zero();
    adj.h.row(n - 1) = h.transpose();
    for (Eigen::Index k = n - 1; k >= 1; --k) {
        const double step = forward.times(k) - forward.times(k - 1);
        const State x1 = forward.state(k), x0 = forward.state(k - 1);
        const State mid = 0.5 * (x0 + x1) + step / 8.0 * (f.row(k - 1) - f.row(k)).transpose();
        const State k1 = g(h, x1);
        const State k2 = g(h + 0.5 * step * k1, mid);
        const State k3 = g(h + 0.5 * step * k2, mid);
        const State k4 = g(h + step * k3, x0);
        h += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!h.allFinite()) throw DivergenceError(static_cast<std::size_t>(n - k), forward.times(k - 1));
        adj.h.row(k - 1) = h.transpose();
    }
    return adj;
}

Eigen::Vector2d gradient(const ModelParams& p, const CostParams& cp, const Controls& c, const State& init,
                         const IntegratorConfig& cfg) {
    cp.validate();
    const ModelParams q = controlled(p, c);
    const Trajectory fwd = integrate(q, init, cp.horizon, cfg);
    const AdjointTrajectory adj = solve_adjoint(fwd, p, c);

    const Eigen::VectorXd w1 = (adj.h.col(kV) - adj.h.col(kS)).cwiseProduct(fwd.states.col(kS));
    const Eigen::VectorXd w2 = (adj.h.col(kR) - adj.h.col(kI)).cwiseProduct(fwd.states.col(kI));
    auto trapz = [&](const Eigen::VectorXd& y) {
        const Eigen::Index n = y.size();
        return fwd.dt * (y.sum() - 0.5 * (y(0) + y(n - 1)));
    };
    return {cp.k1 - cp.k0() * trapz(w1), cp.k2 - cp.k0() * trapz(w2)};
}

void SAConfig::validate() const {
    if (!(t0 > 0.0)) throw ValidationError("annealing t0 must be > 0");
    if (!(cooling > 0.0 && cooling < 1.0)) throw ValidationError("cooling rate must lie in (0,1)");
    if (n_cool < 1 || n_perturb < 1 || max_outer < 1 || max_gradient_steps < 1 || max_halvings < 0)
        throw ValidationError("annealing counts must be >= 1");
    if (!(eps_k >= 0.0) || !(delta_k >= 0.0)) throw ValidationError("tolerances must be >= 0");
    if (!(step_eta > 0.0)) throw ValidationError("step size must be > 0");
}

double SAConfig::temperature(int k) const { return t0 * std::pow(cooling, k); }

const char* to_string(Phase ph) {
    switch (ph) {
        case Phase::start: return "start";
        case Phase::gradient: return "gradient";
        case Phase::anneal: return "anneal";
    }
    return "start";
}

ControlObjective make_cost_objective(const ModelParams& p, const CostParams& cp, const State& init,
                                     const IntegratorConfig& cfg) {
    return {[=](const Controls& c) { return cost(p, cp, c, init, cfg); },
            [=](const Controls& c) { return gradient(p, cp, c, init, cfg); }};
}

Controls project_unit_box(const Controls& c) { return c.cwiseMax(0.0).cwiseMin(1.0); }

void gradient_phase(const ControlObjective& f, Controls& c, double& j, const SAConfig& sa, OptimRun& run, int outer) {
    for (int step = 0; step < sa.max_gradient_steps; ++step) {
        const Eigen::Vector2d g = f.grad(c);
        if (!g.allFinite()) throw NumericalError("gradient is not finite");
        double eta = sa.step_eta;
        bool accepted = false;
        Controls cand;
        double jc = j;
        for (int halving = 0; halving <= sa.max_halvings; ++halving, eta *= 0.5) {
            cand = project_unit_box(c - eta * g);
            if (cand == c) break;
            jc = f.value(cand);
            ++run.evaluations;
            if (j - jc > sa.eps_k) {
                accepted = true;
                break;
            }
        }
        if (!accepted) return;
        c = cand;
        j = jc;
        run.history.push_back({c, j, Phase::gradient, outer, 0.0});
    }
}

OptimRun hybrid_optimize(const ControlObjective& f, const Controls& start, const SAConfig& sa) {
    sa.validate();
    if (!start.allFinite() || (start.array() < 0.0).any() || (start.array() > 1.0).any())
        throw ValidationError("start must lie in [0,1]^2");

    std::mt19937_64 rng(sa.rng_seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    OptimRun run;
    Controls c = start;
    double j = f.value(c);
    ++run.evaluations;
    run.history.push_back({c, j, Phase::start, 0, 0.0});

    for (int outer = 1; outer <= sa.max_outer; ++outer) {
        run.outer_iterations = outer;
        const std::size_t before = run.history.size();
        gradient_phase(f, c, j, sa, run, outer);
        const bool descended = run.history.size() > before;

        const double j_phase = j;
        double j_low = j;
        for (int k = 0; k < sa.n_cool; ++k) {
            const double temp = sa.temperature(k);
            run.temperatures.push_back(temp);
            for (int m = 0; m < sa.n_perturb; ++m) {
                Controls cand = c;
                if (unif(rng) < 0.5) {
                    cand(unif(rng) < 0.5 ? 0 : 1) = unif(rng);
                } else {
                    cand(0) = unif(rng);
                    cand(1) = unif(rng);
                }
                cand = project_unit_box(cand);
                const double jc = f.value(cand);
                ++run.evaluations;
                const double delta = jc - j;
                bool accept = delta < -sa.delta_k;
                if (!accept) {
                    const double boltz = std::exp(-delta / temp);
                    const double prob = std::min(1.0, sa.classical_acceptance ? boltz : temp * boltz);
                    accept = unif(rng) < prob;
                }
                if (accept) {
                    c = cand;
                    j = jc;
                    j_low = std::min(j_low, j);
                    run.history.push_back({c, j, Phase::anneal, outer, temp});
                }
            }
        }
        if (!descended && !(j_phase - j_low > sa.eps_k)) break;
    }

    const auto best = std::min_element(run.history.begin(), run.history.end(),
                                       [](const OptimStep& a, const OptimStep& b) { return a.j < b.j; });
    run.optimum = best->c;
    run.j_star = best->j;
    return run;
}

OptimRun hybrid_optimize(const ModelParams& p, const CostParams& cp, const Controls& start, const SAConfig& sa,
                         const State& init, const IntegratorConfig& cfg) {
    return hybrid_optimize(make_cost_objective(p, cp, init, cfg), start, sa);
}

std::pair<double, double> effort_split(const Controls& c) {
    const double total = c(0) + c(1);
    if (!(total > 0.0)) throw ValidationError("effort split undefined when both controls are zero");
    return {c(0) / total, c(1) / total};
}

}  // namespace seirv
