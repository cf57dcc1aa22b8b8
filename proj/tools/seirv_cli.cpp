#include <cinttypes>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "config_file.hpp"
#include "seirv/analysis.hpp"
#include "seirv/calibration.hpp"
#include "seirv/control.hpp"
#include "seirv/equilibria.hpp"
#include "seirv/integrator.hpp"

using namespace seirv;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Settings {
    ModelParams model = default_params();
    State init = default_initial_state();
    IntegratorConfig integrator;
    double horizon = 2000.0;
    std::uint64_t seed = 1;
    std::string out;
    std::string input;

    std::vector<double> beta_segments;
    double segment_length = 7.0;
    std::optional<double> onset;
    int stride = 1;
    std::string beta_grid;
    int resolution = 101;

    double m0 = 1.0, k1 = 0.2, k2 = 0.3;
    Controls start{0.25, 0.2};
    SAConfig sa;

    NelderMeadConfig nm;
    FitOptions fit;
    SeriesKind kind = SeriesKind::cumulative;
    bool synthesize = false;
    std::string sample_times = "0:21:22";
    double noise_sigma = 0.0;
    NoiseModel noise = NoiseModel::multiplicative;

    std::string onset_grid = "0:200:11";
};

// ---- value parsing ----

double to_double(const std::string& v, const std::string& name) {
    double out = 0.0;
    const char* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (v.empty() || ec != std::errc() || ptr != end) throw ValidationError(name + ": '" + v + "' is not a number");
    return out;
}

long long to_integer(const std::string& v, const std::string& name) {
    long long out = 0;
    const char* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (v.empty() || ec != std::errc() || ptr != end) throw ValidationError(name + ": '" + v + "' is not an integer");
    return out;
}

int to_int(const std::string& v, const std::string& name) {
    const long long x = to_integer(v, name);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        throw ValidationError(name + ": out of range");
    return static_cast<int>(x);
}

bool to_bool(const std::string& v, const std::string& name) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ValidationError(name + ": '" + v + "' is not a boolean");
}

std::vector<double> to_list(const std::string& v, const std::string& name) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(item, name));
    if (out.empty()) throw ValidationError(name + ": empty list");
    return out;
}

/// "lo:hi:n" with n >= 1 points.
std::vector<double> to_grid(const std::string& v, const std::string& name, bool log_spaced) {
    std::stringstream ss(v);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c) )
        throw ValidationError(name + ": expected lo:hi:n");
    const double lo = to_double(a, name), hi = to_double(b, name);
    const int n = to_int(c, name);
    if (n < 1 || (n > 1 && !(hi > lo))) throw ValidationError(name + ": need n >= 1 and hi > lo");
    if (log_spaced && !(lo > 0.0)) throw ValidationError(name + ": log grid needs lo > 0");
    std::vector<double> out;
    for (int k = 0; k < n; ++k) {
        const double w = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
        out.push_back(log_spaced ? std::exp(std::log(lo) + w * (std::log(hi) - std::log(lo))) : lo + w * (hi - lo));
    }
    out.back() = n == 1 ? lo : hi;
    return out;
}

// ---- knob registry: one entry per config key / flag ----

using Setter = std::function<void(Settings&, const std::string&)>;

struct Knob {
    std::string key;   ///< config key, "section.name" or "name"
    std::string flag;  ///< without leading dashes
    std::string help;
    std::set<std::string> commands;  ///< empty: every subcommand
    Setter set;
    bool is_flag = false;
};

const std::vector<std::string> kCommands{"simulate", "equilibria", "sensitivity", "region",
                                         "characteristics", "optimize", "calibrate", "avert"};

Setter real(double Settings::*field) {
    return [field](Settings& s, const std::string& v) { s.*field = to_double(v, "value"); };
}

std::vector<Knob> knobs() {
    std::vector<Knob> k;
    auto model = [&](const char* name, double ModelParams::*field, const char* help) {
        k.push_back({std::string("model.") + name, name, help, {},
                     [field, name](Settings& s, const std::string& v) { s.model.*field = to_double(v, name); }});
    };
    model("lambda", &ModelParams::lambda, "new-device influx rate");
    model("beta", &ModelParams::beta, "transmission rate");
    model("alpha", &ModelParams::alpha, "E to I progression rate");
    model("eta1", &ModelParams::eta1, "S to R reset rate");
    model("eta2", &ModelParams::eta2, "E to R reset rate");
    model("sigma1", &ModelParams::sigma1, "R to S relapse rate");
    model("sigma2", &ModelParams::sigma2, "V to S waning rate");
    model("mu", &ModelParams::mu, "device retirement rate");
    model("c1", &ModelParams::c1, "vaccination rate in [0,1] (post-onset control for avert)");
    model("c2", &ModelParams::c2, "treatment rate in [0,1] (post-onset control for avert)");

    const char* comp[] = {"s0", "e0", "i0", "r0", "v0"};
    for (int c = 0; c < kCompartments; ++c) {
        const std::string name = comp[c];
        k.push_back({"init." + name, name, "initial " + std::string(1, static_cast<char>(std::toupper(name[0]))) + " count",
                     {}, [c, name](Settings& s, const std::string& v) { s.init(c) = to_double(v, name); }});
    }

    k.push_back({"integrator.dt", "dt", "RK4 step size", {}, [](Settings& s, const std::string& v) {
                     s.integrator.dt = to_double(v, "dt");
                 }});
    k.push_back({"integrator.positivity_clamp", "positivity-clamp", "clamp small negative undershoots (true/false)", {},
                 [](Settings& s, const std::string& v) { s.integrator.positivity_clamp = to_bool(v, "positivity-clamp"); }});
    k.push_back({"integrator.tolerance", "clamp-tolerance", "relative undershoot allowed before failing", {},
                 [](Settings& s, const std::string& v) { s.integrator.tolerance = to_double(v, "clamp-tolerance"); }});
    k.push_back({"horizon", "horizon", "simulation horizon", {}, real(&Settings::horizon)});
    k.push_back({"seed", "seed", "seed for every stochastic step", {}, [](Settings& s, const std::string& v) {
                     const long long x = to_integer(v, "seed");
                     if (x < 0) throw ValidationError("seed must be >= 0");
                     s.seed = static_cast<std::uint64_t>(x);
                 }});
    k.push_back({"io.out", "out", "output path (stdout when absent)", {},
                 [](Settings& s, const std::string& v) { s.out = v; }});

    const std::set<std::string> sched{"simulate", "characteristics", "calibrate"};
    k.push_back({"schedule.beta_segments", "beta-segments", "comma-separated beta per segment of --segment-length",
                 sched, [](Settings& s, const std::string& v) { s.beta_segments = to_list(v, "beta-segments"); }});
    k.push_back({"schedule.segment_length", "segment-length", "length of each beta segment", sched,
                 real(&Settings::segment_length)});
    k.push_back({"schedule.onset", "onset", "controls switch from (0,0) to (c1,c2) at this time",
                 {"simulate", "characteristics"},
                 [](Settings& s, const std::string& v) { s.onset = to_double(v, "onset"); }});
    k.push_back({"simulate.stride", "stride", "write every n-th grid point", {"simulate"},
                 [](Settings& s, const std::string& v) { s.stride = to_int(v, "stride"); }});
    k.push_back({"characteristics.beta_grid", "beta-grid", "log-spaced beta sweep lo:hi:n", {"characteristics"},
                 [](Settings& s, const std::string& v) { s.beta_grid = v; }});
    k.push_back({"region.resolution", "resolution", "grid points per control axis", {"region"},
                 [](Settings& s, const std::string& v) { s.resolution = to_int(v, "resolution"); }});

    const std::set<std::string> opt{"optimize"};
    k.push_back({"cost.m0", "m0", "infection cost weight", opt, real(&Settings::m0)});
    k.push_back({"cost.k1", "k1", "vaccination cost weight", opt, real(&Settings::k1)});
    k.push_back({"cost.k2", "k2", "treatment cost weight", opt, real(&Settings::k2)});
    k.push_back({"optimize.start", "start", "starting controls c1,c2", opt, [](Settings& s, const std::string& v) {
                     const std::vector<double> c = to_list(v, "start");
                     if (c.size() != 2) throw ValidationError("start: expected c1,c2");
                     s.start = Controls(c[0], c[1]);
                 }});
    auto sa_real = [&](const char* key, const char* flag, double SAConfig::*field, const char* help) {
        k.push_back({std::string("sa.") + key, flag, help, opt,
                     [field, flag](Settings& s, const std::string& v) { s.sa.*field = to_double(v, flag); }});
    };
    auto sa_int = [&](const char* key, const char* flag, int SAConfig::*field, const char* help) {
        k.push_back({std::string("sa.") + key, flag, help, opt,
                     [field, flag](Settings& s, const std::string& v) { s.sa.*field = to_int(v, flag); }});
    };
    sa_real("t0", "t0-temp", &SAConfig::t0, "initial annealing temperature");
    sa_real("cooling", "cooling", &SAConfig::cooling, "multiplicative cooling rate in (0,1)");
    sa_int("n_cool", "n-cool", &SAConfig::n_cool, "cooling steps per annealing phase");
    sa_int("n_perturb", "n-perturb", &SAConfig::n_perturb, "perturbations per cooling step");
    sa_real("eps_k", "eps-k", &SAConfig::eps_k, "gradient-phase acceptance tolerance");
    sa_real("delta_k", "delta-k", &SAConfig::delta_k, "annealing acceptance tolerance");
    sa_real("step_eta", "step-eta", &SAConfig::step_eta, "gradient step size");
    sa_int("max_halvings", "max-halvings", &SAConfig::max_halvings, "Armijo halvings per gradient step");
    sa_int("max_gradient_steps", "max-gradient-steps", &SAConfig::max_gradient_steps, "steps per gradient phase");
    sa_int("max_outer", "max-outer", &SAConfig::max_outer, "outer iteration cap");
    k.push_back({"sa.classical_acceptance", "classical-acceptance", "use exp(-d/T) instead of T exp(-d/T)", opt,
                 [](Settings& s, const std::string& v) { s.sa.classical_acceptance = to_bool(v, "classical-acceptance"); }});

    const std::set<std::string> cal{"calibrate"};
    k.push_back({"io.input", "input", "observation CSV (time,count)", cal,
                 [](Settings& s, const std::string& v) { s.input = v; }});
    k.push_back({"fit.kind", "kind", "input series kind: cumulative or daily", cal, [](Settings& s, const std::string& v) {
                     if (v == "cumulative") s.kind = SeriesKind::cumulative;
                     else if (v == "daily") s.kind = SeriesKind::daily;
                     else throw ValidationError("kind must be cumulative or daily");
                 }});
    k.push_back({"fit.target", "target", "fit to cumulative or daily counts", cal, [](Settings& s, const std::string& v) {
                     if (v == "cumulative") s.fit.target = FitTarget::cumulative;
                     else if (v == "daily") s.fit.target = FitTarget::daily;
                     else throw ValidationError("target must be cumulative or daily");
                 }});
    k.push_back({"fit.weighting", "weighting", "residual weighting: absolute or relative", cal,
                 [](Settings& s, const std::string& v) {
                     if (v == "absolute") s.fit.weighting = FitWeighting::absolute;
                     else if (v == "relative") s.fit.weighting = FitWeighting::relative;
                     else throw ValidationError("weighting must be absolute or relative");
                 }});
    k.push_back({"fit.beta_lower", "beta-lower", "lower bound on fitted beta", cal,
                 [](Settings& s, const std::string& v) { s.fit.beta_lower = to_double(v, "beta-lower"); }});
    k.push_back({"fit.beta_upper", "beta-upper", "upper bound on fitted beta", cal,
                 [](Settings& s, const std::string& v) { s.fit.beta_upper = to_double(v, "beta-upper"); }});
    k.push_back({"fit.prescan", "prescan", "coarse common-beta scan before the simplex (true/false)", cal,
                 [](Settings& s, const std::string& v) { s.fit.prescan = to_bool(v, "prescan"); }});
    k.push_back({"fit.prescan_points", "prescan-points", "points in the prescan", cal,
                 [](Settings& s, const std::string& v) { s.fit.prescan_points = to_int(v, "prescan-points"); }});
    auto nm_real = [&](const char* key, const char* flag, double NelderMeadConfig::*field, const char* help) {
        k.push_back({std::string("nm.") + key, flag, help, cal,
                     [field, flag](Settings& s, const std::string& v) { s.nm.*field = to_double(v, flag); }});
    };
    nm_real("alpha", "nm-alpha", &NelderMeadConfig::alpha, "simplex reflection coefficient");
    nm_real("gamma", "nm-gamma", &NelderMeadConfig::gamma, "simplex expansion coefficient");
    nm_real("rho", "nm-rho", &NelderMeadConfig::rho, "simplex contraction coefficient");
    nm_real("sigma", "nm-sigma", &NelderMeadConfig::sigma, "simplex shrink coefficient");
    nm_real("tol_f", "tol-f", &NelderMeadConfig::tol_f, "objective spread tolerance");
    nm_real("tol_x", "tol-x", &NelderMeadConfig::tol_x, "simplex diameter tolerance");
    nm_real("initial_spread", "initial-spread", &NelderMeadConfig::initial_spread, "initial simplex scale");
    k.push_back({"nm.max_iter", "max-iter", "simplex iteration cap", cal,
                 [](Settings& s, const std::string& v) { s.nm.max_iter = to_int(v, "max-iter"); }});
    k.push_back({"synthetic.enabled", "synthesize", "write a synthetic series from --beta-segments instead of fitting",
                 cal, [](Settings& s, const std::string& v) { s.synthesize = to_bool(v, "synthesize"); }, true});
    k.push_back({"synthetic.sample_times", "sample-times", "linear sample grid lo:hi:n", cal,
                 [](Settings& s, const std::string& v) { s.sample_times = v; }});
    k.push_back({"synthetic.noise_sigma", "noise-sigma", "observation noise standard deviation", cal,
                 real(&Settings::noise_sigma)});
    k.push_back({"synthetic.noise", "noise", "additive or multiplicative", cal, [](Settings& s, const std::string& v) {
                     if (v == "additive") s.noise = NoiseModel::additive;
                     else if (v == "multiplicative") s.noise = NoiseModel::multiplicative;
                     else throw ValidationError("noise must be additive or multiplicative");
                 }});

    k.push_back({"avert.onset_grid", "onset-grid", "linear onset grid lo:hi:n", {"avert"},
                 [](Settings& s, const std::string& v) { s.onset_grid = v; }});
    return k;
}

void command_defaults(const std::string& cmd, Settings& s) {
    if (cmd == "sensitivity") s.model = s.model.with_controls(0.1, 0.1);
    if (cmd == "avert") s.model = s.model.with_controls(0.01, 0.08);
}

// ---- output ----

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void emit(const Settings& s, const std::function<void(std::ostream&)>& write) {
    if (s.out.empty() || s.out == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream f(s.out, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + s.out);
    write(f);
    if (!f) throw ValidationError("failed writing " + s.out);
}

void emit_json(const Settings& s, const json& j) {
    emit(s, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json to_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(finite_or_null(x));
    return a;
}

json to_json(const BetaSchedule& b) { return {{"breakpoints", to_json(b.breakpoints)}, {"values", to_json(b.values)}}; }

// ---- commands ----

std::optional<BetaSchedule> beta_schedule(const Settings& s) {
    if (s.beta_segments.empty()) return std::nullopt;
    return BetaSchedule::uniform_segments(s.segment_length, s.beta_segments);
}

std::optional<ControlSchedule> control_schedule(const Settings& s) {
    if (!s.onset) return std::nullopt;
    return ControlSchedule{*s.onset, {0.0, 0.0}, {s.model.c1, s.model.c2}};
}

void cmd_simulate(const Settings& s) {
    if (s.stride < 1) throw ValidationError("stride must be >= 1");
    const auto beta = beta_schedule(s);
    const auto ctrl = control_schedule(s);
    // Buffered so a rejected request leaves no partial file behind.
    std::ostringstream o;
    {
        o << "time,S,E,I,R,V,N\n";
        std::string row;
        integrate_visit(s.model, beta ? &*beta : nullptr, ctrl ? &*ctrl : nullptr, s.init, s.horizon, s.integrator,
                        [&](std::size_t k, double t, const State& x) {
                            if (k % static_cast<std::size_t>(s.stride) != 0) return;
                            row = num(t);
                            for (int c = 0; c < kCompartments; ++c) row += ',' + num(x(c));
                            o << row << ',' << num(x.sum()) << '\n';
                        });
    }
    emit(s, [&](std::ostream& out) { out << o.str(); });
}

void cmd_equilibria(const Settings& s) {
    const ModelParams& p = s.model;
    p.validate();
    const MfePoint mfe = compute_mfe(p);
    const ThresholdResult th = compute_rc(p, s.init.sum());
    const MfeSpectrum sp = mfe_spectrum(p);
    json j;
    j["mfe"] = {{"s0", mfe.s0}, {"e0", mfe.e0}, {"i0", mfe.i0}, {"r0", mfe.r0}, {"v0", mfe.v0},
                {"denominator_d", mfe.denominator_d}};
    j["threshold"] = {{"rc", th.rc}, {"rc_squared", th.rc_squared}, {"n_tilde", th.n_tilde}};
    j["threshold_beta"] = finite_or_null(threshold_beta(p));
    j["mfe_spectrum"] = {{"l1", sp.l1}, {"l2", sp.l2}, {"l3", sp.l3}, {"l4", sp.l4},
                         {"eigenvalues", to_json(std::vector<double>(sp.eigenvalues.begin(), sp.eigenvalues.end()))},
                         {"verdict", to_string(sp.verdict)}};
    j["endemic"] = nullptr;
    j["endemic_stability"] = nullptr;
    if (const auto ee = compute_endemic(p)) {
        j["endemic"] = {{"se", ee->se}, {"ee", ee->ee}, {"ie", ee->ie}, {"re", ee->re}, {"ve", ee->ve},
                        {"a0", ee->a0}, {"a1", ee->a1}};
        const RouthHurwitzReport rh = endemic_stability(p);
        json eig = json::array();
        for (const auto& z : rh.eigenvalues) eig.push_back({z.real(), z.imag()});
        j["endemic_stability"] = {{"h", to_json(std::vector<double>(rh.h.begin(), rh.h.end()))},
                                  {"conditions", rh.conditions},
                                  {"stable", rh.stable},
                                  {"eigenvalues", eig},
                                  {"eigen_verdict", to_string(rh.eigen_verdict)},
                                  {"max_residual", rh.max_residual},
                                  {"consistent", rh.consistent()}};
    }
    emit_json(s, j);
}

void cmd_sensitivity(const Settings& s) {
    const std::vector<SensitivityIndex> idx = sensitivity_indices(s.model);
    emit(s, [&](std::ostream& o) {
        o << "parameter,value\n";
        for (const auto& i : idx) o << i.parameter << ',' << (i.value ? num(*i.value) : "nan") << '\n';
    });
}

void cmd_region(const Settings& s) {
    const RegionMap m = region_map(s.model, s.resolution);
    json labels = json::array();
    for (std::size_t i = 0; i < m.c1_grid.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.c2_grid.size(); ++j) row.push_back(to_string(m.label(i, j)));
        labels.push_back(row);
    }
    emit_json(s, {{"beta", s.model.beta},
                  {"c1_grid", to_json(m.c1_grid)},
                  {"c2_grid", to_json(m.c2_grid)},
                  {"labels", labels},
                  {"separatrix", to_json(m.separatrix)},
                  {"growth_fraction", m.growth_fraction()}});
}

void cmd_characteristics(const Settings& s) {
    std::vector<std::pair<double, EpidemicCharacteristics>> rows;
    if (!s.beta_grid.empty()) {
        const BetaSweep sw = sweep_beta(s.model, to_grid(s.beta_grid, "beta-grid", true), s.init, s.horizon, s.integrator);
        for (std::size_t k = 0; k < sw.rows.size(); ++k) rows.emplace_back(sw.beta_grid[k], sw.rows[k]);
    } else {
        const auto beta = beta_schedule(s);
        const auto ctrl = control_schedule(s);
        rows.emplace_back(s.model.beta, simulate_characteristics(s.model, beta ? &*beta : nullptr,
                                                                 ctrl ? &*ctrl : nullptr, s.init, s.horizon,
                                                                 s.integrator));
    }
    emit(s, [&](std::ostream& o) {
        o << "beta,i_max,t_m,i_tot\n";
        for (const auto& [b, r] : rows) o << num(b) << ',' << num(r.i_max) << ',' << num(r.t_m) << ',' << num(r.i_tot) << '\n';
    });
}

void cmd_optimize(const Settings& s) {
    const CostParams cp = make_cost_params(s.model, s.init, s.m0, s.k1, s.k2, s.horizon);
    SAConfig sa = s.sa;
    sa.rng_seed = s.seed;
    const OptimRun run = hybrid_optimize(s.model, cp, s.start, sa, s.init, s.integrator);

    json history = json::array(), tags = json::array();
    for (const OptimStep& st : run.history) {
        history.push_back({{"c1", st.c(0)}, {"c2", st.c(1)}, {"j", st.j}, {"phase", to_string(st.phase)},
                           {"outer", st.outer}, {"temperature", st.temperature}});
        tags.push_back(to_string(st.phase));
    }
    json j{{"start", {s.start(0), s.start(1)}},
           {"optimum", {run.optimum(0), run.optimum(1)}},
           {"j_star", run.j_star},
           {"outer_iterations", run.outer_iterations},
           {"evaluations", run.evaluations},
           {"cost", {{"m0", cp.m0}, {"k1", cp.k1}, {"k2", cp.k2}, {"horizon", cp.horizon}, {"n_tilde", cp.n_tilde},
                     {"k0", cp.k0()}}},
           {"effort_split", nullptr},
           {"history", history},
           {"phase_tags", tags}};
    if (run.optimum.sum() > 0.0) {
        const auto [a, b] = effort_split(run.optimum);
        j["effort_split"] = {a, b};
    }
    emit_json(s, j);
}

void cmd_calibrate(const Settings& s) {
    if (s.synthesize) {
        const auto beta = beta_schedule(s);
        if (!beta) throw ValidationError("--synthesize needs --beta-segments");
        SyntheticOptions opt;
        opt.noise_sigma = s.noise_sigma;
        opt.noise = s.noise;
        opt.seed = s.seed;
        opt.integrator = s.integrator;
        const ObservationSeries series = generate_synthetic(s.model.with_controls(0.0, 0.0), *beta, s.init,
                                                            to_grid(s.sample_times, "sample-times", false), opt);
        emit(s, [&](std::ostream& o) { write_series(o, s.kind == SeriesKind::daily ? to_daily(series) : series); });
        return;
    }
    if (s.input.empty()) throw ValidationError("calibrate needs --input (or --synthesize)");
    const ObservationSeries series = load_series(s.input, s.kind);
    FitOptions opt = s.fit;
    opt.integrator = s.integrator;
    const FitResult fit = fit_beta_segments(series, s.model, s.segment_length, s.init, s.nm, opt);
    for (const std::string& w : fit.warnings) std::cerr << "warning: " << w << '\n';

    json j{{"beta_segments", to_json(fit.beta_segments)},
           {"sse", fit.sse},
           {"objective", fit.objective},
           {"residuals", to_json(fit.residuals)},
           {"r_squared", finite_or_null(fit.r_squared)},
           {"fitted", to_json(fit.fitted)},
           {"times", to_json(series.times)},
           {"iterations", fit.iterations},
           {"converged", fit.converged},
           {"warnings", fit.warnings},
           {"goodness", nullptr}};
    try {
        const GoodnessReport g = goodness(fit, series);
        j["goodness"] = {{"r_squared", g.r_squared},
                         {"daily_observed", to_json(g.daily_observed)},
                         {"daily_fitted", to_json(g.daily_fitted)},
                         {"daily_r_squared", g.daily_r_squared}};
    } catch (const ValidationError& e) {
        std::cerr << "warning: " << e.what() << '\n';
    }
    emit_json(s, j);
}

void cmd_avert(const Settings& s) {
    const AvertedCurve c = averted_cases(s.model, {s.model.c1, s.model.c2}, to_grid(s.onset_grid, "onset-grid", false),
                                         s.init, s.horizon, s.integrator);
    emit_json(s, {{"controls", {s.model.c1, s.model.c2}},
                  {"onsets", to_json(c.onsets)},
                  {"averted", to_json(c.averted)},
                  {"baseline_i_tot", c.baseline_i_tot},
                  {"decay_fit", {c.decay_fit.first, c.decay_fit.second}},
                  {"decay_r2", finite_or_null(c.decay_r2)}});
}

const std::map<std::string, std::pair<std::string, void (*)(const Settings&)>> kDispatch{
    {"simulate", {"integrate the model and write time,S,E,I,R,V,N", cmd_simulate}},
    {"equilibria", {"equilibria, threshold, spectra and stability report (JSON)", cmd_equilibria}},
    {"sensitivity", {"normalized sensitivity indices of R_c (defaults c1 = c2 = 0.1)", cmd_sensitivity}},
    {"region", {"extinction/growth map over (c1, c2) (JSON)", cmd_region}},
    {"characteristics", {"peak, peak time and cumulative infections, optionally over a beta sweep", cmd_characteristics}},
    {"optimize", {"hybrid gradient + annealing search for optimal constant controls (JSON)", cmd_optimize}},
    {"calibrate", {"fit piecewise beta to a time,count series, or synthesize one", cmd_calibrate}},
    {"avert", {"cases averted versus intervention onset (defaults c1 = 0.01, c2 = 0.08)", cmd_avert}},
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Knob> all = knobs();
    CLI::App app{"SEIRV malware propagation toolkit"};
    app.require_subcommand(1, 1);

    std::map<std::string, std::string> config_path;
    std::map<std::string, std::map<std::string, std::string>> buffers;
    std::map<std::string, std::vector<std::pair<const Knob*, CLI::Option*>>> bound;
    for (const std::string& cmd : kCommands) {
        CLI::App* sub = app.add_subcommand(cmd, kDispatch.at(cmd).first);
        sub->add_option("--config", config_path[cmd], "key = value config file; flags override it")
            ->check(CLI::ExistingFile);
        for (const Knob& k : all) {
            if (!k.commands.empty() && !k.commands.count(cmd)) continue;
            const std::string help = k.help + " [" + k.key + "]";
            CLI::Option* o = k.is_flag ? sub->add_flag("--" + k.flag, help)
                                       : sub->add_option("--" + k.flag, buffers[cmd][k.key], help);
            bound[cmd].emplace_back(&k, o);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        Settings s;
        command_defaults(cmd, s);
        if (!config_path[cmd].empty()) {
            for (const auto& [key, value] : cli::load_config(config_path[cmd])) {
                const auto it = std::find_if(all.begin(), all.end(), [&](const Knob& k) { return k.key == key; });
                if (it == all.end()) throw ValidationError("unknown config key '" + key + "'");
                it->set(s, value);
            }
        }
        for (const auto& [knob, opt] : bound[cmd])
            if (opt->count() > 0) knob->set(s, knob->is_flag ? "true" : buffers[cmd][knob->key]);
        kDispatch.at(cmd).second(s);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
