#include "seirv/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "seirv/error.hpp"

namespace seirv {

BetaSchedule BetaSchedule::uniform_segments(double length, std::vector<double> values) {
    if (!(length > 0.0) || !std::isfinite(length)) throw ValidationError("segment length must be > 0");
    if (values.empty()) throw ValidationError("beta schedule needs at least one segment");
    BetaSchedule s;
    s.values = std::move(values);
    for (std::size_t k = 1; k < s.values.size(); ++k) s.breakpoints.push_back(length * static_cast<double>(k));
    return s;
}

void BetaSchedule::validate() const {
    if (values.size() != breakpoints.size() + 1)
        throw ValidationError("beta schedule: segment count must equal breakpoint count + 1");
    for (double b : breakpoints)
        if (!std::isfinite(b)) throw ValidationError("beta schedule: non-finite breakpoint");
    if (std::adjacent_find(breakpoints.begin(), breakpoints.end(), std::greater_equal<>()) != breakpoints.end())
        throw ValidationError("beta schedule: breakpoints must be strictly increasing");
    for (double v : values)
        if (!std::isfinite(v) || v < 0.0) throw ValidationError("beta schedule: values must be finite and >= 0");
}

std::size_t BetaSchedule::segment_at(double t, double slack) const {
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t + slack);
    return static_cast<std::size_t>(it - breakpoints.begin());
}

void ControlSchedule::validate() const {
    auto in_unit = [](ControlPair c) { return c.c1 >= 0.0 && c.c1 <= 1.0 && c.c2 >= 0.0 && c.c2 <= 1.0; };
    if (!std::isfinite(onset) || onset < 0.0) throw ValidationError("control schedule: onset must be >= 0");
    if (!in_unit(before) || !in_unit(after)) throw ValidationError("control schedule: controls must lie in [0,1]");
}

}  // namespace seirv
