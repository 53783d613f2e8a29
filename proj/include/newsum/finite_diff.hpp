#ifndef NEWSUM_FINITE_DIFF_HPP
#define NEWSUM_FINITE_DIFF_HPP

#include <vector>

#include "newsum/real.hpp"
#include "newsum/registry.hpp"

namespace newsum {

// Forward differences Delta^k f(a) for k = 0..K, computed by the triangular
// scheme at target_precision + K + 32 bits: the alternating weights of
// Delta^K sum to 2^K, so K bits are provably lost to cancellation and the
// rest absorbs evaluation rounding.
struct DiffTable {
    Real anchor;
    long max_order = 0;
    long working_precision = 0;
    std::vector<Real> values;      // values[k] = Delta^k f(a)
    std::vector<Real> error_bound; // per-entry absolute bound 2^k u max|f(a+j)|
    Real max_abs_sample;           // max_j |f(a+j)| over the whole table

    DiffTable() : anchor(Real::kMinPrecision), max_abs_sample(Real::kMinPrecision) {}
};

DiffTable build_table(const FuncHandle& f, const Real& a, long max_order,
                      long target_precision);

// Divided difference on pairwise-distinct nodes (sorted internally, so the
// value is exactly permutation invariant). Coincident nodes are rejected.
struct DividedDiff {
    std::vector<Real> nodes; // ascending
    Real value;

    DividedDiff() : value(Real::kMinPrecision) {}
};

DividedDiff divided_difference(const FuncHandle& f, std::vector<Real> nodes,
                               long target_precision);

// Evidence that n -> Delta^p g(n) tends to zero along the integers, sampled
// on the geometric schedule n in {8, 16, ..., n_max}. Membership in a limit
// class cannot be certified numerically; `inconclusive` is an honest result.
enum class DpVerdict { member, non_member, inconclusive };

struct DpSample {
    long n;
    double magnitude;
};

struct DpReport {
    DpVerdict verdict = DpVerdict::inconclusive;
    long order = 0;
    double threshold = 0;
    std::vector<DpSample> samples;
};

DpReport dp_membership(const FuncHandle& g, long p, long n_max, const Real& threshold,
                       long precision = Real::kDefaultPrecision);

const char* to_string(DpVerdict v);

} // namespace newsum

#endif
