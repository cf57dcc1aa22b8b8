#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "seirv/integrator.hpp"
#include "seirv/model.hpp"
#include "seirv/nelder_mead.hpp"
#include "seirv/schedule.hpp"

namespace seirv {

enum class SeriesKind { cumulative, daily };

/// Observed infection counts. `cumulative` holds the counts as read; `kind` says how to read them.
struct ObservationSeries {
    std::vector<double> times;
    std::vector<double> cumulative;
    SeriesKind kind = SeriesKind::cumulative;

    std::size_t size() const { return times.size(); }
    void validate() const;
};

/// CSV with header `time,count`.
ObservationSeries read_series(std::istream& in, SeriesKind kind = SeriesKind::cumulative);
ObservationSeries load_series(const std::string& path, SeriesKind kind = SeriesKind::cumulative);
void write_series(std::ostream& out, const ObservationSeries& s);

ObservationSeries to_cumulative(const ObservationSeries& s);  ///< prefix sum of a daily series
ObservationSeries to_daily(const ObservationSeries& s);       ///< first differences of a cumulative series

/// Model cumulative infections alpha * int_0^t E dt at the requested (ascending, >= 0) times.
std::vector<double> model_cumulative(const ModelParams& p, const BetaSchedule& beta_sched, const State& init,
                                     const std::vector<double>& times, const IntegratorConfig& cfg = {});

enum class FitTarget { cumulative, daily };

/// `relative` divides each residual by max(|y_i|, 1), the likelihood-matched choice under multiplicative noise.
enum class FitWeighting { absolute, relative };

/// Sum of squared errors between a cumulative series and the model prediction.
double sse(const ObservationSeries& series, const ModelParams& p, const BetaSchedule& beta_sched, const State& init,
           const IntegratorConfig& cfg = {}, FitTarget target = FitTarget::cumulative,
           FitWeighting weighting = FitWeighting::absolute);

struct FitOptions {
    double beta_lower = 1e-12;
    double beta_upper = 1e-6;
    FitTarget target = FitTarget::cumulative;
    FitWeighting weighting = FitWeighting::absolute;
    bool prescan = true;  ///< coarse log-grid scan for a common start value
    int prescan_points = 25;
    IntegratorConfig integrator{};
};

struct FitResult {
    BetaSchedule beta_segments;
    double sse = 0.0;        ///< unweighted sum of squared residuals
    double objective = 0.0;  ///< minimized value under the chosen target and weighting
    std::vector<double> residuals;  ///< y_i - yhat_i on the cumulative scale
    std::vector<double> fitted;
    double r_squared = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<std::string> warnings;
};

/// Piecewise beta on segments [k L, (k+1) L) covering the series, fitted jointly in log space.
/// Controls are held at zero during fitting.
FitResult fit_beta_segments(const ObservationSeries& series, const ModelParams& p, double segment_length,
                            const State& init, const NelderMeadConfig& nm = {}, const FitOptions& opt = {});

/// 1 - SS_res / SS_tot. Throws ValidationError when the observations have zero variance.
double r_squared(const std::vector<double>& observed, const std::vector<double>& fitted);

struct GoodnessReport {
    std::vector<double> residuals;
    double r_squared = 0.0;
    std::vector<double> daily_observed;
    std::vector<double> daily_fitted;
    double daily_r_squared = 0.0;
};

GoodnessReport goodness(const FitResult& fit, const ObservationSeries& series);

struct AvertedCurve {
    std::vector<double> onsets;
    std::vector<double> averted;
    double baseline_i_tot = 0.0;
    std::pair<double, double> decay_fit{0.0, 0.0};  ///< (amplitude, rate) of a exp(-b t0)
    double decay_r2 = 0.0;                          ///< NaN when the curve has no variance
};

AvertedCurve averted_cases(const ModelParams& p, std::pair<double, double> controls, const std::vector<double>& onsets,
                           const State& init, double horizon, const IntegratorConfig& cfg = {});

/// Least-squares a exp(-b t) fit, started from a log-linear fit and refined by Nelder-Mead.
std::pair<double, double> fit_exponential_decay(const std::vector<double>& t, const std::vector<double>& y);

enum class NoiseModel { additive, multiplicative };

struct SyntheticOptions {
    double noise_sigma = 0.0;
    NoiseModel noise = NoiseModel::additive;
    bool keep_monotone = true;
    std::uint64_t seed = 1;
    IntegratorConfig integrator{};
};

ObservationSeries generate_synthetic(const ModelParams& p, const BetaSchedule& beta_sched, const State& init,
                                     const std::vector<double>& sample_times, const SyntheticOptions& opt = {});

}  // namespace seirv
