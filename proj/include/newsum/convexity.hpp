#ifndef NEWSUM_CONVEXITY_HPP
#define NEWSUM_CONVEXITY_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "newsum/finite_diff.hpp"
#include "newsum/interval.hpp"
#include "newsum/registry.hpp"

namespace newsum {

// Sign of the order-p divided differences over the sampled window. A
// function is p-convex when every divided difference on p+2 points is >= 0;
// `zero` means both signs hold (numerically a polynomial of degree <= p),
// `mixed` means neither.
enum class OrderSign { plus, minus, zero, mixed };

const char* to_string(OrderSign s);

struct ConvexitySignature {
    long orders_tested = 0;             // P; per_order covers p = -1..P
    std::vector<OrderSign> per_order;   // index i holds order p = i - 1
    Interval window = Interval::positive_reals();
    long samples_per_order = 0;
    double tolerance = 0;
    std::uint64_t seed = 0;
    long precision = 0;
    bool eventual_evidence = false;     // window right end >= 10x left end
    std::vector<DpReport> dp;           // p = 0..P

    // Derived labels, reported as the class index p: "f^(p) is completely /
    // absolutely monotone" or "f^(p) is regularly monotone". Empty when the
    // sampled sign pattern never settles.
    std::optional<long> cm_plus_p, cm_minus_p, am_plus_p, am_minus_p, rm_p;

    OrderSign sign_at(long p) const { return per_order.at(static_cast<std::size_t>(p + 1)); }
};

// Divided-difference sign test at a single order; p = -1 degenerates to the
// pointwise nonnegativity test. Samples the consecutive windows of an
// equally spaced grid plus `samples` random increasing tuples from a
// fixed-seed generator.
OrderSign test_order(const FuncHandle& f, long p, const Interval& window,
                     long samples, const Real& tolerance, long precision,
                     std::uint64_t seed);

struct ClassifyOptions {
    long samples = 200;
    std::optional<Real> tolerance; // default: 2^(-precision/2) * max|f| sampled
    long precision = Real::kDefaultPrecision;
    std::uint64_t seed = 12345;
    bool with_dp = true;
    long dp_n_max = 1L << 16;
    double dp_threshold = 1e-4;
};

ConvexitySignature classify(const FuncHandle& f, long orders, const Interval& window,
                            const ClassifyOptions& options = {});

struct TransferReport {
    long order = 0;         // p at which f was classified
    OrderSign f_sign = OrderSign::mixed;
    OrderSign delta_sign = OrderSign::mixed; // Delta f at order p-1
    bool transfers = false;
};

// Checks that the sign of f at order p carries to Delta f at order p-1. A
// failed transfer points at tolerance or sampling artifacts; it is reported,
// not thrown.
TransferReport transfer_check(const FuncHandle& f, long p, const Interval& window,
                              long samples, const Real& tolerance, long precision,
                              std::uint64_t seed);

} // namespace newsum

#endif
