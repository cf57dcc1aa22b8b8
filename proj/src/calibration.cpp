#include "seirv/calibration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "seirv/analysis.hpp"

namespace seirv {

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

bool parse_double(const std::string& field, double& out) {
    const std::string t = trim(field);
    if (t.empty()) return false;
    const char* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(t.data(), end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

void check_ascending(const std::vector<double>& times, const char* what) {
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k]) || times[k] < 0.0) throw ValidationError(std::string(what) + " must be finite and >= 0");
        if (k > 0 && !(times[k] > times[k - 1])) throw ValidationError(std::string(what) + " must be strictly increasing");
    }
}

}  // namespace

void ObservationSeries::validate() const {
    if (times.size() != cumulative.size()) throw ValidationError("series: times and counts differ in length");
    check_ascending(times, "observation times");
    for (std::size_t k = 0; k < cumulative.size(); ++k) {
        if (!std::isfinite(cumulative[k]) || cumulative[k] < 0.0) throw ValidationError("series: counts must be >= 0");
        if (kind == SeriesKind::cumulative && k > 0 && cumulative[k] < cumulative[k - 1])
            throw ValidationError("series: cumulative counts must be nondecreasing (row " + std::to_string(k + 2) + ")");
    }
}

ObservationSeries read_series(std::istream& in, SeriesKind kind) {
    ObservationSeries s;
    s.kind = kind;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        if (!header) {
            if (comma == std::string::npos || trim(line.substr(0, comma)) != "time" || trim(line.substr(comma + 1)) != "count")
                throw ParseError(lineno, "expected header 'time,count'");
            header = true;
            continue;
        }
        double t = 0.0, y = 0.0;
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw ParseError(lineno, "expected two comma-separated fields");
        if (!parse_double(line.substr(0, comma), t)) throw ParseError(lineno, "bad time value");
        if (!parse_double(line.substr(comma + 1), y)) throw ParseError(lineno, "bad count value");
        s.times.push_back(t);
        s.cumulative.push_back(y);
    }
    if (!header) throw ParseError(lineno, "missing header 'time,count'");
    s.validate();
    return s;
}

ObservationSeries load_series(const std::string& path, SeriesKind kind) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    return read_series(in, kind);
}

void write_series(std::ostream& out, const ObservationSeries& s) {
    out << "time,count\n" << std::setprecision(17);
    for (std::size_t k = 0; k < s.size(); ++k) out << s.times[k] << ',' << s.cumulative[k] << '\n';
}

ObservationSeries to_cumulative(const ObservationSeries& s) {
    ObservationSeries out = s;
    if (s.kind == SeriesKind::daily) {
        std::partial_sum(s.cumulative.begin(), s.cumulative.end(), out.cumulative.begin());
        out.kind = SeriesKind::cumulative;
    }
    return out;
}

ObservationSeries to_daily(const ObservationSeries& s) {
    ObservationSeries out = s;
    if (s.kind == SeriesKind::cumulative) {
        std::adjacent_difference(s.cumulative.begin(), s.cumulative.end(), out.cumulative.begin());
        out.kind = SeriesKind::daily;
    }
    return out;
}

std::vector<double> model_cumulative(const ModelParams& p, const BetaSchedule& beta_sched, const State& init,
                                     const std::vector<double>& times, const IntegratorConfig& cfg) {
    check_ascending(times, "prediction times");
    std::vector<double> out(times.size(), 0.0);
    if (times.empty() || times.back() == 0.0) return out;

    const double horizon = times.back();
    std::vector<double> grid_t, grid_c;
    double acc = 0.0, last_t = 0.0, last_e = 0.0;
    integrate_visit(p, &beta_sched, nullptr, init, horizon, cfg, [&](std::size_t k, double t, const State& x) {
        if (k > 0) acc += 0.5 * (t - last_t) * (x(kE) + last_e);
        last_t = t;
        last_e = x(kE);
        grid_t.push_back(t);
        grid_c.push_back(acc);
    });

    const double h = grid_t[1] - grid_t[0];
    const std::size_t n = grid_t.size() - 1;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(times[i] / h), n - 1);
        const double w = std::clamp((times[i] - grid_t[k]) / (grid_t[k + 1] - grid_t[k]), 0.0, 1.0);
        out[i] = p.alpha * ((1.0 - w) * grid_c[k] + w * grid_c[k + 1]);
    }
    return out;
}

namespace {

std::vector<double> differences(const std::vector<double>& v) {
    std::vector<double> d(v.size());
    std::adjacent_difference(v.begin(), v.end(), d.begin());
    return d;
}

double squared_error(const std::vector<double>& y, const std::vector<double>& yhat, FitTarget target,
                     FitWeighting weighting) {
    const std::vector<double> a = target == FitTarget::daily ? differences(y) : y;
    const std::vector<double> b = target == FitTarget::daily ? differences(yhat) : yhat;
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = weighting == FitWeighting::relative ? (a[i] - b[i]) / std::max(std::abs(a[i]), 1.0) : a[i] - b[i];
        s += r * r;
    }
    return s;
}

}  // namespace

double sse(const ObservationSeries& series, const ModelParams& p, const BetaSchedule& beta_sched, const State& init,
           const IntegratorConfig& cfg, FitTarget target, FitWeighting weighting) {
    const ObservationSeries s = to_cumulative(series);
    s.validate();
    return squared_error(s.cumulative, model_cumulative(p, beta_sched, init, s.times, cfg), target, weighting);
}

double r_squared(const std::vector<double>& observed, const std::vector<double>& fitted) {
    if (observed.size() != fitted.size() || observed.empty()) throw ValidationError("R^2: length mismatch");
    const double mean = std::accumulate(observed.begin(), observed.end(), 0.0) / static_cast<double>(observed.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        ss_res += (observed[i] - fitted[i]) * (observed[i] - fitted[i]);
        ss_tot += (observed[i] - mean) * (observed[i] - mean);
    }
    if (!(ss_tot > 0.0)) throw ValidationError("R^2 undefined: observations have zero variance");
    return 1.0 - ss_res / ss_tot;
}

FitResult fit_beta_segments(const ObservationSeries& series, const ModelParams& p, double segment_length,
                            const State& init, const NelderMeadConfig& nm, const FitOptions& opt) {
    if (!(segment_length > 0.0) || !std::isfinite(segment_length)) throw ValidationError("segment length must be > 0");
    if (!(opt.beta_lower > 0.0) || !(opt.beta_upper > opt.beta_lower)) throw ValidationError("bad beta bounds");
    const ObservationSeries s = to_cumulative(series);
    s.validate();
    if (s.size() == 0) throw ValidationError("series is empty");

    const double t_last = s.times.back();
    const auto n_seg = static_cast<std::size_t>(std::max(1.0, std::ceil(t_last / segment_length - 1e-12)));
    const ModelParams q = p.with_controls(0.0, 0.0);

    FitResult fit;
    // Observation y(t) depends on beta over [0, t), so it informs the segment containing t from the left.
    std::vector<int> per_segment(n_seg, 0);
    for (double t : s.times) {
        if (t <= 0.0) continue;
        const auto k = std::min(n_seg - 1, static_cast<std::size_t>(std::ceil(t / segment_length - 1e-12)) - 1);
        ++per_segment[k];
    }
    for (std::size_t k = 0; k < n_seg; ++k)
        if (per_segment[k] < 2)
            fit.warnings.push_back("segment " + std::to_string(k) + " has " + std::to_string(per_segment[k]) +
                                   " observations; its beta is under-determined");

    auto schedule_of = [&](const Eigen::VectorXd& theta) {
        std::vector<double> v(static_cast<std::size_t>(theta.size()));
        for (Eigen::Index k = 0; k < theta.size(); ++k) v[static_cast<std::size_t>(k)] = std::exp(theta(k));
        return BetaSchedule::uniform_segments(segment_length, std::move(v));
    };
    auto objective = [&](const Eigen::VectorXd& theta) {
        try {
            return sse(s, q, schedule_of(theta), init, opt.integrator, opt.target, opt.weighting);
        } catch (const NumericalError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const double lo = std::log(opt.beta_lower), hi = std::log(opt.beta_upper);
    const auto dim = static_cast<Eigen::Index>(n_seg);
    double start = std::clamp(std::log(std::max(p.beta, opt.beta_lower)), lo, hi);
    if (opt.prescan && opt.prescan_points >= 2) {
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < opt.prescan_points; ++k) {
            const double theta = lo + (hi - lo) * k / (opt.prescan_points - 1);
            const double v = objective(Eigen::VectorXd::Constant(dim, theta));
            if (v < best) {
                best = v;
                start = theta;
            }
        }
    }

    const Box box{Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi)};
    const NelderMeadResult r = nelder_mead(objective, Eigen::VectorXd::Constant(dim, start), box, nm);

    fit.beta_segments = schedule_of(r.argmin);
    fit.objective = r.min_value;
    fit.iterations = r.iterations;
    fit.converged = r.converged;
    if (!r.converged) fit.warnings.push_back("Nelder-Mead hit max_iter before converging");
    fit.fitted = model_cumulative(q, fit.beta_segments, init, s.times, opt.integrator);
    fit.sse = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        fit.residuals.push_back(s.cumulative[i] - fit.fitted[i]);
        fit.sse += fit.residuals.back() * fit.residuals.back();
    }
    try {
        fit.r_squared = r_squared(s.cumulative, fit.fitted);
    } catch (const ValidationError&) {
        fit.r_squared = std::numeric_limits<double>::quiet_NaN();
        fit.warnings.push_back("R^2 undefined: observations have zero variance");
    }
    return fit;
}

GoodnessReport goodness(const FitResult& fit, const ObservationSeries& series) {
    const ObservationSeries s = to_cumulative(series);
    if (fit.fitted.size() != s.size()) throw ValidationError("goodness: fit and series differ in length");
    GoodnessReport g;
    for (std::size_t i = 0; i < s.size(); ++i) g.residuals.push_back(s.cumulative[i] - fit.fitted[i]);
    g.r_squared = r_squared(s.cumulative, fit.fitted);
    g.daily_observed = differences(s.cumulative);
    g.daily_fitted = differences(fit.fitted);
    g.daily_r_squared = r_squared(g.daily_observed, g.daily_fitted);
    return g;
}

std::pair<double, double> fit_exponential_decay(const std::vector<double>& t, const std::vector<double>& y) {
    if (t.size() != y.size()) throw ValidationError("decay fit: length mismatch");
    double scale = 0.0;
    for (double v : y) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return {0.0, 0.0};

    // Log-linear start from the positive points.
    double a0 = 1.0, b0 = 0.0;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (y[i] > 0.0) pts.emplace_back(t[i], std::log(y[i] / scale));
    if (pts.size() >= 2) {
        double mt = 0.0, ml = 0.0;
        for (const auto& [ti, li] : pts) {
            mt += ti;
            ml += li;
        }
        mt /= static_cast<double>(pts.size());
        ml /= static_cast<double>(pts.size());
        double sxy = 0.0, sxx = 0.0;
        for (const auto& [ti, li] : pts) {
            sxy += (ti - mt) * (li - ml);
            sxx += (ti - mt) * (ti - mt);
        }
        if (sxx > 0.0) {
            b0 = -sxy / sxx;
            a0 = std::exp(ml + b0 * mt);
        }
    }

    auto sq = [&](const Eigen::VectorXd& ab) {
        double s = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double r = y[i] / scale - ab(0) * std::exp(-ab(1) * t[i]);
            s += r * r;
        }
        return s;
    };
    NelderMeadConfig cfg;
    cfg.tol_f = 1e-14;
    cfg.tol_x = 1e-12;
    cfg.max_iter = 5000;
    const NelderMeadResult r = nelder_mead(sq, Eigen::Vector2d(a0, b0), Box::unbounded(2), cfg);
    return {r.argmin(0) * scale, r.argmin(1)};
}

AvertedCurve averted_cases(const ModelParams& p, std::pair<double, double> controls, const std::vector<double>& onsets,
                           const State& init, double horizon, const IntegratorConfig& cfg) {
    check_ascending(onsets, "onsets");
    const ControlPair none{0.0, 0.0};
    const ControlPair after{controls.first, controls.second};
    const ControlSchedule baseline{0.0, none, none};
    baseline.validate();
    ControlSchedule{0.0, none, after}.validate();

    AvertedCurve curve;
    curve.onsets = onsets;
    curve.baseline_i_tot = simulate_characteristics(p, nullptr, &baseline, init, horizon, cfg).i_tot;
    for (double t0 : onsets) {
        const ControlSchedule sched{t0, none, after};
        curve.averted.push_back(curve.baseline_i_tot - simulate_characteristics(p, nullptr, &sched, init, horizon, cfg).i_tot);
    }

    curve.decay_fit = fit_exponential_decay(curve.onsets, curve.averted);
    std::vector<double> model;
    for (double t0 : onsets) model.push_back(curve.decay_fit.first * std::exp(-curve.decay_fit.second * t0));
    try {
        curve.decay_r2 = r_squared(curve.averted, model);
    } catch (const ValidationError&) {
        curve.decay_r2 = std::numeric_limits<double>::quiet_NaN();
    }
    return curve;
}

ObservationSeries generate_synthetic(const ModelParams& p, const BetaSchedule& beta_sched, const State& init,
                                     const std::vector<double>& sample_times, const SyntheticOptions& opt) {
    if (!(opt.noise_sigma >= 0.0)) throw ValidationError("noise sigma must be >= 0");
    beta_sched.validate();
    ObservationSeries s;
    s.times = sample_times;
    s.cumulative = model_cumulative(p, beta_sched, init, sample_times, opt.integrator);
    if (opt.noise_sigma > 0.0) {
        std::mt19937_64 rng(opt.seed);
        std::normal_distribution<double> z(0.0, 1.0);
        for (double& y : s.cumulative) {
            const double e = opt.noise_sigma * z(rng);
            y = opt.noise == NoiseModel::multiplicative ? y * (1.0 + e) : y + e;
        }
    }
    if (opt.keep_monotone) {
        double floor = 0.0;
        for (double& y : s.cumulative) floor = y = std::max(y, floor);
    }
    return s;
}

}  // namespace seirv
