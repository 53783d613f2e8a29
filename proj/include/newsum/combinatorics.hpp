#ifndef NEWSUM_COMBINATORICS_HPP
#define NEWSUM_COMBINATORICS_HPP

#include <vector>

#include "newsum/real.hpp"

namespace newsum {

// x(x-1)...(x-k+1); 1 for k = 0. Exact for integer x representable at the
// working precision.
Real falling_factorial(const Real& x, long k);

// falling_factorial(x, k) / k!. Zero exactly when x is a nonnegative integer
// below k.
Real gen_binomial(const Real& x, long k);

struct LogRatio {
    Real log_magnitude; // sum of log|factor| over the nonzero factors
    int sign_or_zero;   // 0 iff x - a hits {0, 1, ..., n-1}
};

// log |(x-a)^(n falling) / (b-a)^(n falling)|, accumulated factor by factor
// in log space so n up to 1e6 cannot overflow. Requires a > b, which keeps
// the denominator free of zeros. When x - a is a nonnegative integer below n
// the exact ratio is zero; the sign reports 0 and the log accumulates the
// remaining (nonzero) factors, which is the quantity whose decay the ratio
// tables track.
LogRatio log_abs_falling_ratio(const Real& x, const Real& a, const Real& b, long n);

// Incremental form of the same accumulation: advance() moves from n to n+1
// at O(1) cost. Used by the series evaluator and the ratio tables.
class FallingRatioAccumulator {
public:
    FallingRatioAccumulator(const Real& x, const Real& a, const Real& b,
                            long precision);

    long n() const { return n_; }
    const Real& log_magnitude() const { return log_magnitude_; }
    int sign_or_zero() const { return sign_; }
    void advance();

private:
    Real dx_;      // x - a
    Real db_;      // b - a
    Real log_magnitude_;
    long n_ = 0;
    int sign_ = 1;
    long integer_hit_ = -1; // index i with x - a == i, or -1
};

// Integer-detection tolerance used across the library: 2^(-precision + 16).
Real integer_detection_tolerance(long precision);

} // namespace newsum

#endif
