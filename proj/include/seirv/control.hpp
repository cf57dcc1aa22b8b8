#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "seirv/integrator.hpp"
#include "seirv/model.hpp"

namespace seirv {

using Controls = Eigen::Vector2d;  ///< (c1, c2)

/// Weights of J = k0 * int_0^T I dt + k1 c1 + k2 c2 with k0 = m0 / (T * n_tilde).
struct CostParams {
    double m0 = 1.0;
    double k1 = 0.2;
    double k2 = 0.3;
    double horizon = 2000.0;
    double n_tilde = 1e9 + 1.0;  ///< max(N0, lambda/mu)

    double k0() const { return m0 / (horizon * n_tilde); }
    void validate() const;
};

/// Cost weights with n_tilde taken from the model and the initial state.
CostParams make_cost_params(const ModelParams& p, const State& init, double m0 = 1.0, double k1 = 0.2,
                            double k2 = 0.3, double horizon = 2000.0);

struct CostBreakdown {
    double total = 0.0;
    double infection = 0.0;  ///< k0 * int I
    double control = 0.0;    ///< k1 c1 + k2 c2
};

CostBreakdown cost_terms(const ModelParams& p, const CostParams& cp, const Controls& c, const State& init,
                         const IntegratorConfig& cfg = {});

inline double cost(const ModelParams& p, const CostParams& cp, const Controls& c, const State& init,
                   const IntegratorConfig& cfg = {}) {
    return cost_terms(p, cp, c, init, cfg).total;
}

/// Adjoint H with dH/dt = -A(t)^T H + e_I, H(T) = 0, on the forward grid.
struct AdjointTrajectory {
    Eigen::VectorXd times;
    Eigen::Matrix<double, Eigen::Dynamic, kCompartments> h;
};

/// Backward RK4 on the forward grid. Forward states at half steps come from the cubic Hermite
/// interpolant built from grid values and the model derivatives there.
AdjointTrajectory solve_adjoint(const Trajectory& forward, const ModelParams& p, const Controls& c);

/// Adjoint gradient: g1 = k1 - k0 int (H5 - H1) S, g2 = k2 - k0 int (H4 - H3) I.
Eigen::Vector2d gradient(const ModelParams& p, const CostParams& cp, const Controls& c, const State& init,
                         const IntegratorConfig& cfg = {});

struct SAConfig {
    double t0 = 0.02;
    double cooling = 0.9;
    int n_cool = 30;
    int n_perturb = 20;
    double eps_k = 1e-6;
    double delta_k = 1e-6;
    double step_eta = 0.05;
    int max_halvings = 20;
    int max_gradient_steps = 500;  ///< per gradient phase
    std::uint64_t rng_seed = 1;
    int max_outer = 50;
    bool classical_acceptance = false;  ///< exp(-d/T) instead of T exp(-d/T)

    void validate() const;

    /// Temperature after k cooling steps, t0 * cooling^k.
    double temperature(int k) const;
};

enum class Phase { start, gradient, anneal };

const char* to_string(Phase ph);

struct OptimStep {
    Controls c;
    double j = 0.0;
    Phase phase = Phase::start;
    int outer = 0;
    double temperature = 0.0;  ///< annealing moves only
};

struct OptimRun {
    std::vector<OptimStep> history;  ///< every accepted move, starting point first
    Controls optimum = Controls::Zero();
    double j_star = 0.0;
    int outer_iterations = 0;
    std::size_t evaluations = 0;
    std::vector<double> temperatures;  ///< temperature used at each cooling step of every phase
};

/// Objective over [0,1]^2 with its gradient; lets the optimizer run on surrogates.
struct ControlObjective {
    std::function<double(const Controls&)> value;
    std::function<Eigen::Vector2d(const Controls&)> grad;
};

ControlObjective make_cost_objective(const ModelParams& p, const CostParams& cp, const State& init,
                                     const IntegratorConfig& cfg = {});

Controls project_unit_box(const Controls& c);

/// Projected descent with Armijo halving until no step beats eps_k; appends accepted moves to run.
void gradient_phase(const ControlObjective& f, Controls& c, double& j, const SAConfig& sa, OptimRun& run, int outer = 0);

OptimRun hybrid_optimize(const ControlObjective& f, const Controls& start, const SAConfig& sa);

OptimRun hybrid_optimize(const ModelParams& p, const CostParams& cp, const Controls& start, const SAConfig& sa,
                         const State& init, const IntegratorConfig& cfg = {});

/// Relative shares c1/(c1+c2), c2/(c1+c2).
std::pair<double, double> effort_split(const Controls& c);

}  // namespace seirv
