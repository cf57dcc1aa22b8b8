#include "seirv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seirv/equilibria.hpp"

namespace seirv {

namespace {

struct NamedRate {
    const char* name;
    double ModelParams::*field;
    bool is_control;
};

constexpr NamedRate kSensitivityOrder[] = {
    {"sigma1", &ModelParams::sigma1, false}, {"sigma2", &ModelParams::sigma2, false},
    {"c1", &ModelParams::c1, true},          {"c2", &ModelParams::c2, true},
    {"beta", &ModelParams::beta, false},     {"eta1", &ModelParams::eta1, false},
    {"eta2", &ModelParams::eta2, false},
};

}  // namespace

std::vector<SensitivityIndex> sensitivity_indices(const ModelParams& p, double h_rel) {
    p.validate();
    if (!(h_rel > 0.0) || h_rel >= 0.5) throw ValidationError("sensitivity step must lie in (0, 0.5)");
    const double rc = compute_rc(p).rc;

    std::vector<SensitivityIndex> out;
    for (const NamedRate& r : kSensitivityOrder) {
        SensitivityIndex idx{r.name, std::nullopt};
        const double xi = p.*r.field;
        if (xi > 0.0 && rc > 0.0) {
            auto rc_at = [&](double v) {
                ModelParams q = p;
                q.*r.field = v;
                return compute_rc(q).rc;
            };
            const double up = xi * (1.0 + h_rel), down = xi * (1.0 - h_rel);
            // Controls cannot leave [0,1]; fall back to a one-sided difference at the upper edge.
            if (r.is_control && up > 1.0)
                idx.value = (rc - rc_at(down)) / (xi - down) * xi / rc;
            else
                idx.value = (rc_at(up) - rc_at(down)) / (up - down) * xi / rc;
        }
        out.push_back(idx);
    }

    for (const auto& idx : out)
        if (idx.parameter == "beta" && idx.value && std::abs(*idx.value - 0.5) > 1e-6)
            throw NumericalError("sensitivity: beta index deviates from 1/2");
    return out;
}

const char* to_string(Region r) { return r == Region::growth ? "growth" : "extinction"; }

Region classify_region(const ModelParams& p, double c1, double c2) {
    const ModelParams q = p.with_controls(c1, c2);
    const double lhs = q.beta * compute_mfe(q).s0 * q.alpha;
    const double rhs = (q.c2 + q.mu) * (q.alpha + q.eta2 + q.mu);
    return lhs - rhs > 1e-12 * rhs ? Region::growth : Region::extinction;
}

double separatrix_c2(const ModelParams& p, double c1) {
    const ModelParams q = p.with_controls(c1, 0.0);
    return q.beta * compute_mfe(q).s0 * q.alpha / (q.alpha + q.eta2 + q.mu) - q.mu;
}

double RegionMap::growth_fraction() const {
    if (labels.empty()) return 0.0;
    const auto n = std::count(labels.begin(), labels.end(), Region::growth);
    return static_cast<double>(n) / static_cast<double>(labels.size());
}

RegionMap region_map(const ModelParams& p, int resolution) {
    if (resolution < 2) throw ValidationError("region map resolution must be >= 2");
    p.validate();
    RegionMap m;
    for (int k = 0; k < resolution; ++k) {
        const double c = static_cast<double>(k) / (resolution - 1);
        m.c1_grid.push_back(c);
        m.c2_grid.push_back(c);
    }
    m.labels.reserve(m.c1_grid.size() * m.c2_grid.size());
    for (double c1 : m.c1_grid) {
        for (double c2 : m.c2_grid) m.labels.push_back(classify_region(p, c1, c2));
        const double s = separatrix_c2(p, c1);
        m.separatrix.push_back(s >= 0.0 && s <= 1.0 ? s : std::numeric_limits<double>::quiet_NaN());
    }
    return m;
}

void CharacteristicsAccumulator::operator()(std::size_t, double t, const State& x) {
    const double i = x(kI), e = x(kE);
    if (!started_ || i > i_max_) {
        i_max_ = i;
        t_m_ = t;
    }
    if (started_) e_integral_ += 0.5 * (t - last_t_) * (e + last_e_);
    last_t_ = t;
    last_e_ = e;
    started_ = true;
}

EpidemicCharacteristics characteristics(const Trajectory& traj, const ModelParams& p) {
    if (traj.size() == 0) throw ValidationError("characteristics: empty trajectory");
    CharacteristicsAccumulator acc(p.alpha);
    for (Eigen::Index k = 0; k < traj.size(); ++k) acc(static_cast<std::size_t>(k), traj.times(k), traj.state(k));
    return acc.result();
}

EpidemicCharacteristics simulate_characteristics(const ModelParams& p, const BetaSchedule* beta_sched,
                                                 const ControlSchedule* ctrl_sched, const State& init,
                                                 double horizon, const IntegratorConfig& cfg) {
    CharacteristicsAccumulator acc(p.alpha);
    integrate_visit(p, beta_sched, ctrl_sched, init, horizon, cfg, acc);
    return acc.result();
}

bool is_monotone(const std::vector<double>& xs, bool increasing, double rel_slack) {
    for (std::size_t k = 1; k < xs.size(); ++k) {
        const double slack = rel_slack * std::max(std::abs(xs[k]), std::abs(xs[k - 1]));
        const double step = xs[k] - xs[k - 1];
        if (increasing ? step < -slack : step > slack) return false;
    }
    return true;
}

namespace {

// Relative change between the first grid point at or above beta_max/10 and the last one.
double last_decade_change(const std::vector<double>& grid, const std::vector<double>& xs) {
    if (grid.size() < 2) return 0.0;
    const double cut = grid.back() / 10.0 * (1.0 - 1e-12);
    const auto it = std::lower_bound(grid.begin(), grid.end(), cut);
    const double ref = xs[static_cast<std::size_t>(it - grid.begin())];
    return ref != 0.0 ? (xs.back() - ref) / std::abs(ref) : std::numeric_limits<double>::infinity();
}

}  // namespace

BetaSweep sweep_beta(const ModelParams& p, const std::vector<double>& beta_grid, const State& init, double horizon,
                     const IntegratorConfig& cfg) {
    if (beta_grid.empty()) throw ValidationError("beta grid is empty");
    for (std::size_t k = 0; k < beta_grid.size(); ++k) {
        if (!(beta_grid[k] > 0.0)) throw ValidationError("beta grid values must be > 0");
        if (k > 0 && !(beta_grid[k] > beta_grid[k - 1])) throw ValidationError("beta grid must be ascending");
    }
    BetaSweep s;
    s.beta_grid = beta_grid;
    std::vector<double> imax, itot, tm;
    for (double b : beta_grid) {
        const EpidemicCharacteristics c = simulate_characteristics(p.with_beta(b), nullptr, nullptr, init, horizon, cfg);
        s.rows.push_back(c);
        imax.push_back(c.i_max);
        itot.push_back(c.i_tot);
        tm.push_back(c.t_m);
    }
    s.diagnostics.i_max_nondecreasing = is_monotone(imax, true);
    s.diagnostics.i_tot_nondecreasing = is_monotone(itot, true);
    s.diagnostics.t_m_nonincreasing = is_monotone(tm, false);
    s.diagnostics.i_max_last_decade = last_decade_change(beta_grid, imax);
    s.diagnostics.i_tot_last_decade = last_decade_change(beta_grid, itot);
    return s;
}

std::vector<ControlSweepRow> sweep_control(const ModelParams& p, ControlKind which, const std::vector<double>& grid,
                                           const std::vector<double>& beta_values, const State& init,
                                           double horizon, const IntegratorConfig& cfg) {
    if (grid.empty() || beta_values.empty()) throw ValidationError("control sweep needs nonempty grids");
    std::vector<ControlSweepRow> rows;
    for (double b : beta_values) {
        for (double c : grid) {
            ModelParams q = p.with_beta(b);
            (which == ControlKind::c1 ? q.c1 : q.c2) = c;
            rows.push_back({b, c, simulate_characteristics(q, nullptr, nullptr, init, horizon, cfg)});
        }
    }
    return rows;
}

}  // namespace seirv
