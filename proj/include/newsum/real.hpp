#ifndef NEWSUM_REAL_HPP
#define NEWSUM_REAL_HPP

#include <mpfr.h>

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "newsum/error.hpp"

namespace newsum {

// Configurable-precision real scalar backed by MPFR. Precision is the number
// of significand bits, never below 53. Values are immutable in spirit: all
// operations return fresh Reals, and a binary operation carries the larger of
// the two operand precisions.
class Real {
public:
    static constexpr long kMinPrecision = 53;
    static constexpr long kDefaultPrecision = 128;

    // Value-less construction yields NaN at the given precision.
    explicit Real(long precision = kDefaultPrecision);

    Real(const Real& other);
    Real(Real&& other) noexcept;
    Real& operator=(const Real& other);
    Real& operator=(Real&& other) noexcept;
    ~Real();

    static Real of(long value, long precision = kDefaultPrecision);
    static Real of(double value, long precision = kDefaultPrecision);
    // Parses a decimal string; throws InvalidArgument on malformed input.
    static Real parse(std::string_view text, long precision = kDefaultPrecision);

    static Real pi(long precision);
    static Real nan(long precision) { return Real(precision); }

    long precision() const { return mpfr_get_prec(v_); }
    // Same value re-rounded to a different precision.
    Real with_precision(long precision) const;

    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_inf() const { return mpfr_inf_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_integer() const { return mpfr_integer_p(v_) != 0; }
    int sign() const;

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long to_long() const;

    // Default digit count is floor(precision * 0.301) - 2, enough to show
    // everything meaningful without noise digits.
    std::string to_string() const;
    std::string to_string(int digits) const;
    // Enough digits that parse(to_string_exact()) round-trips bit for bit at
    // the same precision.
    std::string to_string_exact() const;

    // Nearest integer if the value is within `tol` of one.
    std::optional<long> nearest_integer_within(const Real& tol) const;

    Real operator-() const;
    Real& operator+=(const Real& rhs) { return *this = *this + rhs; }
    Real& operator-=(const Real& rhs) { return *this = *this - rhs; }
    Real& operator*=(const Real& rhs) { return *this = *this * rhs; }
    Real& operator/=(const Real& rhs) { return *this = *this / rhs; }

    friend Real operator+(const Real& a, const Real& b);
    friend Real operator-(const Real& a, const Real& b);
    friend Real operator*(const Real& a, const Real& b);
    friend Real operator/(const Real& a, const Real& b);

    friend Real operator+(const Real& a, long b);
    friend Real operator-(const Real& a, long b);
    friend Real operator*(const Real& a, long b);
    friend Real operator/(const Real& a, long b);
    friend Real operator+(long a, const Real& b) { return b + a; }
    friend Real operator*(long a, const Real& b) { return b * a; }
    friend Real operator-(long a, const Real& b);
    friend Real operator/(long a, const Real& b);

    // Exact comparisons (MPFR semantics; comparing a NaN throws).
    friend bool operator==(const Real& a, const Real& b) { return cmp(a, b) == 0; }
    friend bool operator!=(const Real& a, const Real& b) { return cmp(a, b) != 0; }
    friend bool operator<(const Real& a, const Real& b) { return cmp(a, b) < 0; }
    friend bool operator<=(const Real& a, const Real& b) { return cmp(a, b) <= 0; }
    friend bool operator>(const Real& a, const Real& b) { return cmp(a, b) > 0; }
    friend bool operator>=(const Real& a, const Real& b) { return cmp(a, b) >= 0; }

    friend Real abs(const Real& x);
    friend Real sqrt(const Real& x);
    friend Real exp(const Real& x);
    friend Real log(const Real& x);
    friend Real sin(const Real& x);
    friend Real cos(const Real& x);
    friend Real pow(const Real& base, const Real& exponent);
    friend Real pow(const Real& base, long exponent);
    friend Real floor(const Real& x);
    friend Real round_nearest(const Real& x);
    friend Real max(const Real& a, const Real& b);
    friend Real min(const Real& a, const Real& b);

    // 2^e at the given precision; e may be far outside double range.
    static Real pow2(long e, long precision);

    // Raw handle for the few places that talk to MPFR directly.
    mpfr_srcptr raw() const { return v_; }
    mpfr_ptr raw_mutable() { return v_; }

private:
    static long check_precision(long precision);
    static int cmp(const Real& a, const Real& b);
    static Real binary(const Real& a, const Real& b,
                       int (*op)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t));

    mpfr_t v_;
};

// Kahan-compensated accumulator. The working precision is fixed at
// construction; terms are rounded into it as they arrive.
class CompensatedSum {
public:
    explicit CompensatedSum(long precision);
    void add(const Real& term);
    const Real& value() const { return sum_; }

private:
    Real sum_;
    Real carry_;
};

} // namespace newsum

#endif
