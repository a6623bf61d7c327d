#include "uavsem/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace uavsem {

PiecewiseLoadModel::PiecewiseLoadModel(std::vector<LoadSegment> segments, double power_coeff)
    : segments_(std::move(segments)), power_coeff_(power_coeff) {
    if (segments_.empty()) throw InvalidInputError("load model: needs at least one segment");
    if (!(power_coeff_ > 0)) throw InvalidInputError("load model: power_coeff must be > 0");

    double prev_slope = 0.0;   // slopes must satisfy 0 > A_1 > A_2 > ...
    double prev_break = 1.0;   // breaks must satisfy 1 > D_1 > ... > D_S > 0
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const LoadSegment& seg = segments_[i];
        if (!(seg.slope < prev_slope))
            throw InvalidInputError("load model: slopes must be negative and strictly decreasing");
        if (!(seg.lower_break < prev_break) || !(seg.lower_break > 0))
            throw InvalidInputError(
                "load model: breaks must be strictly decreasing inside (0, 1)");
        // Slope < 0, so the infimum of the piece sits at its upper break.
        const double upper = prev_break;
        if (seg.slope * upper + seg.intercept < 0)
            throw InvalidInputError("load model: load must be nonnegative on segment " +
                                    std::to_string(i + 1));
        if (i > 0) {
            const LoadSegment& above = segments_[i - 1];
            const double boundary = above.lower_break;
            // Nonincreasing in the ratio across the boundary.
            if (seg.slope * boundary + seg.intercept < above.slope * boundary + above.intercept)
                throw InvalidInputError("load model: load increases across break " +
                                        std::to_string(i));
        }
        prev_slope = seg.slope;
        prev_break = seg.lower_break;
    }
}

PiecewiseLoadModel PiecewiseLoadModel::default_model() {
    return PiecewiseLoadModel({{-2.0, 2.0, 0.6}, {-5.0, 3.8, 0.4}}, 1.0);
}

const LoadSegment& PiecewiseLoadModel::segment(int s) const {
    if (s < 1 || s > n_segments()) throw InvalidInputError("load model: bad segment index");
    return segments_[s - 1];
}

double PiecewiseLoadModel::upper_break(int s) const {
    if (s < 1 || s > n_segments()) throw InvalidInputError("load model: bad segment index");
    return s == 1 ? 1.0 : segments_[s - 2].lower_break;
}

int PiecewiseLoadModel::segment_of(double ratio) const {
    if (!(ratio >= min_ratio()) || !(ratio <= 1.0))
        throw DomainError("load model: ratio outside [" + std::to_string(min_ratio()) + ", 1]");
    if (ratio == 1.0) return 1;
    for (int s = 1; s <= n_segments(); ++s)
        if (ratio >= segments_[s - 1].lower_break) return s;
    return n_segments();  // unreachable given the domain check
}

double PiecewiseLoadModel::load(double ratio) const {
    const LoadSegment& seg = segments_[segment_of(ratio) - 1];
    return seg.slope * ratio + seg.intercept;
}

double PiecewiseLoadModel::compression_power(double ratio) const {
    return load(ratio) * power_coeff_;
}

double PiecewiseLoadModel::ratio_from_power(double power, int s) const {
    const LoadSegment& seg = segment(s);
    if (!(power >= 0)) throw InvalidInputError("ratio_from_power: power must be >= 0");
    const double ratio = (power / power_coeff_ - seg.intercept) / seg.slope;
    const double lo = seg.lower_break;
    const double hi = upper_break(s);
    const double tol = 1e-9 * std::max(1.0, hi);
    if (ratio < lo - tol || ratio > hi + tol)
        throw SegmentMismatchError("ratio_from_power: power maps outside segment " +
                                   std::to_string(s));
    return std::clamp(ratio, lo, hi);
}

std::optional<std::pair<double, double>> PiecewiseLoadModel::trace_budget_bounds(
    int s, double p_max) const {
    if (!(p_max > 0)) throw InvalidInputError("trace_budget_bounds: p_max must be > 0");
    const LoadSegment& seg = segment(s);
    const double cost_low_ratio = seg.slope * seg.lower_break + seg.intercept;  // c(D_s)
    const double cost_high_ratio = seg.slope * upper_break(s) + seg.intercept;  // c(D_{s-1})
    double lo = p_max - power_coeff_ * cost_low_ratio;
    double hi = p_max - power_coeff_ * cost_high_ratio;
    lo = std::max(lo, 0.0);
    hi = std::min(hi, p_max);
    if (lo > hi) return std::nullopt;
    return std::make_pair(lo, hi);
}

bool PiecewiseLoadModel::operator==(const PiecewiseLoadModel& other) const {
    return power_coeff_ == other.power_coeff_ && segments_ == other.segments_;
}

}  // namespace uavsem
