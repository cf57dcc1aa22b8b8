#pragma once

#include <cstddef>
#include <vector>

namespace seirv {

/// Piecewise-constant transmission rate on right-open segments
/// (-inf, b0), [b0, b1), ..., [b_{n-1}, +inf).
struct BetaSchedule {
    std::vector<double> breakpoints;
    std::vector<double> values;

    static BetaSchedule constant(double beta) { return {{}, {beta}}; }

    /// Segments of equal `length` starting at t = 0, one value per segment.
    static BetaSchedule uniform_segments(double length, std::vector<double> values);

    void validate() const;

    std::size_t segment_count() const { return values.size(); }

    /// Segment active at time t. Breakpoints within `slack` above t already count as passed,
    /// which snaps breakpoints that sit on an integration grid point to that point.
    std::size_t segment_at(double t, double slack = 0.0) const;

    double at(double t, double slack = 0.0) const { return values[segment_at(t, slack)]; }
};

struct ControlPair {
    double c1 = 0.0;
    double c2 = 0.0;

    bool operator==(const ControlPair&) const = default;
};

/// Controls switch from `before` to `after` at `onset`.
struct ControlSchedule {
    double onset = 0.0;
    ControlPair before;
    ControlPair after;

    static ControlSchedule constant(ControlPair c) { return {0.0, c, c}; }

    void validate() const;

    ControlPair at(double t, double slack = 0.0) const { return t + slack >= onset ? after : before; }
};

}  // namespace seirv
