#include "newsum/real.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

namespace newsum {

long Real::check_precision(long precision) {
    if (precision < kMinPrecision)
        throw InvalidArgument("precision must be at least 53 bits, got " +
                              std::to_string(precision));
    if (precision > (1L << 24))
        throw InvalidArgument("precision unreasonably large: " +
                              std::to_string(precision));
    return precision;
}

Real::Real(long precision) {
    mpfr_init2(v_, check_precision(precision));
    mpfr_set_nan(v_);
}

Real::Real(const Real& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_swap(v_, other.v_);
}

Real& Real::operator=(const Real& other) {
    if (this != &other) {
        mpfr_set_prec(v_, mpfr_get_prec(other.v_));
        mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
}

Real& Real::operator=(Real&& other) noexcept {
    if (this != &other)
        mpfr_swap(v_, other.v_);
    return *this;
}

Real::~Real() {
    mpfr_clear(v_);
}

Real Real::of(long value, long precision) {
    Real r(precision);
    mpfr_set_si(r.v_, value, MPFR_RNDN);
    return r;
}

Real Real::of(double value, long precision) {
    Real r(precision);
    mpfr_set_d(r.v_, value, MPFR_RNDN);
    return r;
}

Real Real::parse(std::string_view text, long precision) {
    Real r(precision);
    std::string buf(text);
    mpfr_ptr p = r.v_;
    char* end = nullptr;
    int rc = mpfr_strtofr(p, buf.c_str(), &end, 10, MPFR_RNDN);
    (void)rc;
    if (end == buf.c_str() || end == nullptr || *end != '\0' || buf.empty())
        throw InvalidArgument("not a decimal number: \"" + buf + "\"");
    return r;
}

Real Real::pi(long precision) {
    Real r(precision);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
}

Real Real::with_precision(long precision) const {
    Real r(precision);
    mpfr_set(r.v_, v_, MPFR_RNDN);
    return r;
}

int Real::sign() const {
    if (is_nan())
        throw DomainError("sign of NaN");
    return mpfr_sgn(v_);
}

long Real::to_long() const {
    if (!is_finite())
        throw DomainError("cannot convert non-finite value to integer");
    if (!mpfr_fits_slong_p(v_, MPFR_RNDN))
        throw DomainError("value does not fit in a machine integer");
    return mpfr_get_si(v_, MPFR_RNDN);
}

std::string Real::to_string() const {
    int digits = static_cast<int>(precision() * 0.301) - 2;
    if (digits < 5)
        digits = 5;
    return to_string(digits);
}

std::string Real::to_string(int digits) const {
    if (digits < 1)
        digits = 1;
    char* out = nullptr;
    mpfr_asprintf(&out, "%.*Rg", digits, v_);
    std::string s = out ? std::string(out) : std::string("nan");
    if (out)
        mpfr_free_str(out);
    return s;
}

std::string Real::to_string_exact() const {
    // ceil(p * log10(2)) + 2 digits guarantee a faithful decimal image.
    int digits = static_cast<int>(precision() * 0.30103) + 3;
    return to_string(digits);
}

std::optional<long> Real::nearest_integer_within(const Real& tol) const {
    if (!is_finite())
        return std::nullopt;
    Real r = round_nearest(*this);
    if (!mpfr_fits_slong_p(r.v_, MPFR_RNDN))
        return std::nullopt;
    if (abs(*this - r) <= tol)
        return mpfr_get_si(r.v_, MPFR_RNDN);
    return std::nullopt;
}

int Real::cmp(const Real& a, const Real& b) {
    if (a.is_nan() || b.is_nan())
        throw DomainError("comparison with NaN");
    return mpfr_cmp(a.v_, b.v_);
}

Real Real::binary(const Real& a, const Real& b,
                  int (*op)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)) {
    Real r(std::max(a.precision(), b.precision()));
    op(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
}

Real Real::operator-() const {
    Real r(precision());
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
}

Real operator+(const Real& a, const Real& b) { return Real::binary(a, b, mpfr_add); }
Real operator-(const Real& a, const Real& b) { return Real::binary(a, b, mpfr_sub); }
Real operator*(const Real& a, const Real& b) { return Real::binary(a, b, mpfr_mul); }
Real operator/(const Real& a, const Real& b) { return Real::binary(a, b, mpfr_div); }

Real operator+(const Real& a, long b) {
    Real r(a.precision());
    mpfr_add_si(r.v_, a.v_, b, MPFR_RNDN);
    return r;
}

Real operator-(const Real& a, long b) {
    Real r(a.precision());
    mpfr_sub_si(r.v_, a.v_, b, MPFR_RNDN);
    return r;
}

Real operator*(const Real& a, long b) {
    Real r(a.precision());
    mpfr_mul_si(r.v_, a.v_, b, MPFR_RNDN);
    return r;
}

Real operator/(const Real& a, long b) {
    Real r(a.precision());
    mpfr_div_si(r.v_, a.v_, b, MPFR_RNDN);
    return r;
}

Real operator-(long a, const Real& b) {
    Real r(b.precision());
    mpfr_si_sub(r.v_, a, b.v_, MPFR_RNDN);
    return r;
}

Real operator/(long a, const Real& b) {
    Real r(b.precision());
    mpfr_si_div(r.v_, a, b.v_, MPFR_RNDN);
    return r;
}

Real abs(const Real& x) {
    Real r(x.precision());
    mpfr_abs(r.v_, x.v_, MPFR_RNDN);
    return r;
}

Real sqrt(const Real& x) {
    Real r(x.precision());
    mpfr_sqrt(r.v_, x.v_, MPFR_RNDN);
    return r;
}

Real exp(const Real& x) {
    Real r(x.precision());
    mpfr_exp(r.v_, x.v_, MPFR_RNDN);
    return r;
}

Real log(const Real& x) {
    Real r(x.precision());
    mpfr_log(r.v_, x.v_, MPFR_RNDN);
    return r;
}

Real sin(const Real& x) {
    Real r(x.precision());
    mpfr_sin(r.v_, x.v_, MPFR_RNDN);
    return r;
}

Real cos(const Real& x) {
    Real r(x.precision());
    mpfr_cos(r.v_, x.v_, MPFR_RNDN);
    return r;
}

Real pow(const Real& base, const Real& exponent) {
    return Real::binary(base, exponent, mpfr_pow);
}

Real pow(const Real& base, long exponent) {
    Real r(base.precision());
    mpfr_pow_si(r.v_, base.v_, exponent, MPFR_RNDN);
    return r;
}

Real floor(const Real& x) {
    Real r(x.precision());
    mpfr_floor(r.v_, x.v_);
    return r;
}

Real round_nearest(const Real& x) {
    Real r(x.precision());
    mpfr_round(r.v_, x.v_);
    return r;
}

Real max(const Real& a, const Real& b) { return a >= b ? a : b; }
Real min(const Real& a, const Real& b) { return a <= b ? a : b; }

Real Real::pow2(long e, long precision) {
    Real r(precision);
    mpfr_set_si(r.v_, 1, MPFR_RNDN);
    mpfr_mul_2si(r.v_, r.v_, e, MPFR_RNDN);
    return r;
}

CompensatedSum::CompensatedSum(long precision)
    : sum_(Real::of(0L, precision)), carry_(Real::of(0L, precision)) {}

void CompensatedSum::add(const Real& term) {
    Real y = term - carry_;
    Real t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
}

} // namespace newsum
