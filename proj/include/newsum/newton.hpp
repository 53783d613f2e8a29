#ifndef NEWSUM_NEWTON_HPP
#define NEWSUM_NEWTON_HPP

#include <optional>
#include <vector>

#include "newsum/combinatorics.hpp"
#include "newsum/finite_diff.hpp"
#include "newsum/registry.hpp"

namespace newsum {

// Newton series of f anchored at a: sum_k C(x-a, k) Delta^k f(a). The
// coefficient stream comes from the difference table; handles with a
// closed-form difference can stream coefficients past the table order.
struct NewtonExpansion {
    FuncHandle f;
    Real anchor;
    DiffTable table;
    long precision = 0; // target precision the expansion was requested at
    bool streams_closed_form = false;
    // every tabulated coefficient is numerically indistinguishable from zero
    bool identically_zero_table = false;

    NewtonExpansion() : anchor(Real::kMinPrecision) {}

    // Delta^k f(a), from the table or the closed-form stream.
    Real coefficient(long k) const;
    long available_terms(long max_terms) const;
};

// Builds the table (closed form preferred, cross-checked against the
// numeric triangle for k <= 10). The domain must be right-unbounded: the
// series samples f at a, a+1, a+2, ...
NewtonExpansion expand(const FuncHandle& f, const Real& a, long max_order,
                       long precision);

enum class EvalStatus {
    converged_bounded,   // certified by the falling-factorial remainder bound
    converged_heuristic, // four consecutive terms under tolerance/4
    finite_exact,        // x - a a nonnegative integer: the sum is finite
    diverged,            // terms growing well past tolerance
    max_terms,
};

const char* to_string(EvalStatus s);

struct EvalReport {
    Real value;
    long terms_used = 0;
    EvalStatus status = EvalStatus::max_terms;
    std::optional<Real> remainder_bound;
    std::optional<Real> b_used;
    bool identically_zero_series = false;

    EvalReport() : value(Real::kMinPrecision) {}
};

struct EvalOptions {
    Real tolerance = Real::of(1e-10, 64);
    long max_terms = 100000;
    // Remainder certificate: valid when f (or the caller's hypothesis order
    // q) is completely monotone and b < min{a, x} lies in the domain. Both
    // must be supplied; the engine never infers the hypothesis.
    std::optional<Real> b;
    std::optional<long> q;
};

EvalReport newton_eval(const NewtonExpansion& expansion, const Real& x,
                       const EvalOptions& options);

// |lhs - rhs| of the partial-sum / divided-difference remainder identity
//   f(x) - sum_{k<n} C(x-a,k) Delta^k f(a)
//     = (x-a)^(n falling) f[a, a+1, ..., a+n-1, x],
// both sides computed independently.
Real remainder_identity_residual(const FuncHandle& f, const Real& a, const Real& x,
                                 long n, long precision);

enum class MonotoneKind { completely_monotone, absolutely_monotone };

struct TaylorResult {
    Real partial_sum;
    Real bound;
    Real b_used;

    TaylorResult()
        : partial_sum(Real::kMinPrecision),
          bound(Real::kMinPrecision),
          b_used(Real::kMinPrecision) {}
};

// Taylor comparison mode: partial sum of order n plus the geometric
// remainder bound |(x-a)/(b-a)|^n (f(b) - sum_{k<q} ...). For completely
// monotone hypotheses the estimate runs through the reflection x -> -x, so
// b sits left of min{a, x}; for absolutely monotone ones b sits right of
// max{a, x}.
TaylorResult taylor_eval(const FuncHandle& f, const Real& a, const Real& x, long n,
                         long q, MonotoneKind kind, std::optional<Real> b,
                         long precision);

struct RatioRow {
    long n;
    double log_magnitude;
    int sign_or_zero;
};

struct RatioTable {
    Real x, a, b;
    std::vector<RatioRow> rows;

    RatioTable()
        : x(Real::kMinPrecision), a(Real::kMinPrecision), b(Real::kMinPrecision) {}
};

// Tabulates log |(x-a)^(n falling) / (b-a)^(n falling)| at the requested n
// values (single incremental pass to the largest n).
RatioTable ratio_table(const Real& x, const Real& a, const Real& b,
                       std::vector<long> n_list, long precision = 128);

// Least-squares slope of log_magnitude against ln n over n in [n_lo, n_hi].
double fit_log_slope(const RatioTable& table, long n_lo, long n_hi);

} // namespace newsum

#endif
