#ifndef NEWSUM_INTERVAL_HPP
#define NEWSUM_INTERVAL_HPP

#include <optional>
#include <string>

#include "newsum/real.hpp"

namespace newsum {

// Right-unbounded-or-not interval with an optional finite lower endpoint.
// Newton expansions and indefinite sums require right_unbounded == true;
// classification windows are the bounded [lo, hi] case.
class Interval {
public:
    static Interval reals() { return Interval(std::nullopt, true, true); }

    static Interval positive_reals() {
        return Interval(Real::of(0L, Real::kMinPrecision), true, true);
    }

    static Interval right_unbounded(Real lower, bool open = true) {
        return Interval(std::move(lower), open, true);
    }

    static Interval bounded(Real lower, Real upper) {
        Interval iv(std::move(lower), false, false);
        iv.upper_ = std::move(upper);
        return iv;
    }

    bool right_unbounded_flag() const { return right_unbounded_; }
    bool lower_open() const { return lower_open_; }
    const std::optional<Real>& lower() const { return lower_; }
    const std::optional<Real>& upper() const { return upper_; }

    bool contains(const Real& x) const {
        if (!x.is_finite())
            return false;
        if (lower_) {
            if (lower_open_ ? !(x > *lower_) : !(x >= *lower_))
                return false;
        }
        if (!right_unbounded_ && upper_ && !(x <= *upper_))
            return false;
        return true;
    }

    std::string describe() const {
        std::string lo = lower_ ? lower_->to_string(10) : "-inf";
        std::string hi = right_unbounded_ ? "inf"
                         : (upper_ ? upper_->to_string(10) : "?");
        return (lower_ && !lower_open_ ? "[" : "(") + lo + ", " + hi + ")";
    }

private:
    Interval(std::optional<Real> lower, bool lower_open, bool right_unbounded)
        : lower_(std::move(lower)),
          lower_open_(lower_open),
          right_unbounded_(right_unbounded) {}

    std::optional<Real> lower_;
    std::optional<Real> upper_;
    bool lower_open_;
    bool right_unbounded_;
};

} // namespace newsum

#endif
