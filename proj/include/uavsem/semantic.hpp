#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "uavsem/errors.hpp"

namespace uavsem {

/// One linear piece of the compression-load curve: load = slope * ratio + intercept
/// on [lower_break, previous break). Slopes are negative: compressing harder
/// (smaller ratio) costs more compute.
struct LoadSegment {
    double slope = -1.0;       ///< A_s, dimensionless, < 0
    double intercept = 1.0;    ///< B_s, dimensionless
    double lower_break = 0.0;  ///< D_s, ratio at the lower end of the piece
};

/// Piecewise-linear computational load of semantic compression and its power
/// cost. Segment s (1-based) covers ratios [D_s, D_{s-1}) with D_0 = 1; ratio 1
/// belongs to segment 1. Construction validates shape: strictly decreasing
/// negative slopes, strictly decreasing breaks inside (0,1), nonnegative load,
/// and load nonincreasing across segment boundaries.
class PiecewiseLoadModel {
public:
    PiecewiseLoadModel(std::vector<LoadSegment> segments, double power_coeff);

    /// Two-segment continuous model with zero cost at ratio 1; used by the
    /// reference experiments when a config does not override it.
    static PiecewiseLoadModel default_model();

    int n_segments() const { return static_cast<int>(segments_.size()); }
    const LoadSegment& segment(int s) const;  ///< s is 1-based
    double power_coeff() const { return power_coeff_; }

    double min_ratio() const { return segments_.back().lower_break; }  ///< D_S
    double upper_break(int s) const;  ///< D_{s-1}, i.e. 1 for segment 1

    /// Computational load at the given ratio; domain is [D_S, 1].
    double load(double ratio) const;

    /// Compute power in watts: load(ratio) * power_coeff.
    double compression_power(double ratio) const;

    /// Invert compression_power on one segment: the ratio whose compute cost is
    /// `power` on segment s. Throws SegmentMismatchError if the result falls
    /// outside [D_s, D_{s-1}] (both endpoints accepted, result clamped).
    double ratio_from_power(double power, int s) const;

    /// Closed interval of transmit-power traces admissible on segment s under a
    /// total power budget, intersected with [0, p_max]. nullopt = segment
    /// infeasible at this budget.
    std::optional<std::pair<double, double>> trace_budget_bounds(int s, double p_max) const;

    bool operator==(const PiecewiseLoadModel& other) const;

private:
    int segment_of(double ratio) const;  // 1-based; throws DomainError outside [D_S, 1]

    std::vector<LoadSegment> segments_;
    double power_coeff_ = 1.0;
};

inline bool operator==(const LoadSegment& a, const LoadSegment& b) {
    return a.slope == b.slope && a.intercept == b.intercept && a.lower_break == b.lower_break;
}

}  // namespace uavsem
