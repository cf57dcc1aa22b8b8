#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "seirv/integrator.hpp"
#include "seirv/model.hpp"

namespace seirv {

/// Elasticity (dR_c/dxi)(xi/R_c). `value` is empty when the index is undefined at the point (xi = 0 or R_c = 0).
struct SensitivityIndex {
    std::string parameter;
    std::optional<double> value;
};

/// Indices for sigma1, sigma2, c1, c2, beta, eta1, eta2, in that order.
std::vector<SensitivityIndex> sensitivity_indices(const ModelParams& p, double h_rel = 1e-6);

enum class Region { extinction, growth };

const char* to_string(Region r);

/// Growth iff beta S^0(c1) alpha > (c2 + mu)(alpha + eta2 + mu); relative ties within 1e-12 count as extinction.
Region classify_region(const ModelParams& p, double c1, double c2);

/// Treatment rate on the R_c = 1 curve for a given vaccination rate (may fall outside [0,1]).
double separatrix_c2(const ModelParams& p, double c1);

struct RegionMap {
    std::vector<double> c1_grid;
    std::vector<double> c2_grid;
    std::vector<Region> labels;     ///< labels[i * c2_grid.size() + j] for (c1_grid[i], c2_grid[j])
    std::vector<double> separatrix; ///< per c1; NaN where the curve leaves [0,1]

    Region label(std::size_t i, std::size_t j) const { return labels[i * c2_grid.size() + j]; }
    double growth_fraction() const;
};

RegionMap region_map(const ModelParams& p, int resolution);

struct EpidemicCharacteristics {
    double i_max = 0.0;
    double t_m = 0.0;
    double i_tot = 0.0;  ///< alpha times the trapezoidal integral of E
};

EpidemicCharacteristics characteristics(const Trajectory& traj, const ModelParams& p);

/// Streams grid points from integrate_visit into characteristics without keeping the trajectory.
class CharacteristicsAccumulator {
public:
    explicit CharacteristicsAccumulator(double alpha) : alpha_(alpha) {}

    void operator()(std::size_t k, double t, const State& x);

    EpidemicCharacteristics result() const { return {i_max_, t_m_, alpha_ * e_integral_}; }

private:
    double alpha_;
    double i_max_ = 0.0, t_m_ = 0.0, e_integral_ = 0.0;
    double last_t_ = 0.0, last_e_ = 0.0;
    bool started_ = false;
};

EpidemicCharacteristics simulate_characteristics(const ModelParams& p, const BetaSchedule* beta_sched,
                                                 const ControlSchedule* ctrl_sched, const State& init,
                                                 double horizon, const IntegratorConfig& cfg = {});

struct MonotonicityReport {
    bool i_max_nondecreasing = false;
    bool i_tot_nondecreasing = false;
    bool t_m_nonincreasing = false;
    double i_max_last_decade = 0.0;  ///< relative change of i_max across the last decade of the grid
    double i_tot_last_decade = 0.0;
};

struct BetaSweep {
    std::vector<double> beta_grid;
    std::vector<EpidemicCharacteristics> rows;
    MonotonicityReport diagnostics;
};

BetaSweep sweep_beta(const ModelParams& p, const std::vector<double>& beta_grid, const State& init, double horizon,
                     const IntegratorConfig& cfg = {});

enum class ControlKind { c1, c2 };

struct ControlSweepRow {
    double beta = 0.0;
    double control = 0.0;
    EpidemicCharacteristics stats;
};

/// Cross product of beta_values (outer) and the control grid (inner); the other control keeps p's value.
std::vector<ControlSweepRow> sweep_control(const ModelParams& p, ControlKind which, const std::vector<double>& grid,
                                           const std::vector<double>& beta_values, const State& init,
                                           double horizon, const IntegratorConfig& cfg = {});

/// True when every step of xs moves in the requested direction up to a relative slack.
bool is_monotone(const std::vector<double>& xs, bool increasing, double rel_slack = 1e-9);

}  // namespace seirv
