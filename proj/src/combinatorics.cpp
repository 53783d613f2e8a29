#include "newsum/combinatorics.hpp"

namespace newsum {

Real integer_detection_tolerance(long precision) {
    return Real::pow2(-precision + 16, 64);
}

Real falling_factorial(const Real& x, long k) {
    if (k < 0)
        throw InvalidArgument("falling factorial needs k >= 0");
    Real acc = Real::of(1L, x.precision());
    for (long i = 0; i < k; ++i)
        acc *= (x - i);
    return acc;
}

Real gen_binomial(const Real& x, long k) {
    if (k < 0)
        throw InvalidArgument("binomial needs k >= 0");
    // Integer x in [0, k) makes the product hit zero exactly.
    auto m = x.nearest_integer_within(integer_detection_tolerance(x.precision()));
    if (m && *m >= 0 && *m < k)
        return Real::of(0L, x.precision());
    Real acc = Real::of(1L, x.precision());
    for (long i = 0; i < k; ++i)
        acc *= (x - i) / (i + 1);
    return acc;
}

FallingRatioAccumulator::FallingRatioAccumulator(const Real& x, const Real& a,
                                                 const Real& b, long precision)
    : dx_((x.with_precision(precision)) - a.with_precision(precision)),
      db_((b.with_precision(precision)) - a.with_precision(precision)),
      log_magnitude_(Real::of(0L, precision)) {
    if (!(a > b))
        throw DomainError("falling-factorial ratio requires a > b");
    auto m = dx_.nearest_integer_within(integer_detection_tolerance(precision));
    if (m && *m >= 0)
        integer_hit_ = *m;
}

void FallingRatioAccumulator::advance() {
    const long i = n_;
    Real den = db_ - i; // always < 0 since b < a
    if (integer_hit_ == i) {
        sign_ = 0;
        log_magnitude_ -= log(abs(den));
    } else {
        Real num = dx_ - i;
        int s = num.sign();
        if (s == 0) {
            // Off-lattice exact zero (x - a integer but negative never lands
            // here; this is pure paranoia against rounding at construction).
            sign_ = 0;
            log_magnitude_ -= log(abs(den));
        } else {
            if (s < 0)
                sign_ = -sign_;
            log_magnitude_ += log(abs(num)) - log(abs(den));
        }
    }
    // each denominator factor is negative
    if (sign_ != 0)
        sign_ = -sign_;
    ++n_;
}

LogRatio log_abs_falling_ratio(const Real& x, const Real& a, const Real& b, long n) {
    if (n < 0)
        throw InvalidArgument("ratio order n must be >= 0");
    long prec = std::max({x.precision(), a.precision(), b.precision()}) + 32;
    FallingRatioAccumulator acc(x, a, b, prec);
    for (long i = 0; i < n; ++i)
        acc.advance();
    return LogRatio{acc.log_magnitude(), acc.sign_or_zero()};
}

} // namespace newsum
