#include "newsum/convexity.hpp"

#include <algorithm>
#include <random>

namespace newsum {

const char* to_string(OrderSign s) {
    switch (s) {
    case OrderSign::plus: return "plus";
    case OrderSign::minus: return "minus";
    case OrderSign::zero: return "zero";
    case OrderSign::mixed: return "mixed";
    }
    return "?";
}

namespace {

OrderSign classify_values(const std::vector<Real>& values, const Real& tol) {
    bool all_small = true, all_ge = true, all_le = true;
    for (const Real& v : values) {
        if (abs(v) > tol)
            all_small = false;
        if (v < -tol)
            all_ge = false;
        if (v > tol)
            all_le = false;
    }
    if (all_small)
        return OrderSign::zero;
    if (all_ge)
        return OrderSign::plus;
    if (all_le)
        return OrderSign::minus;
    return OrderSign::mixed;
}

std::vector<Real> grid_points(const Interval& window, long count, long precision) {
    const Real lo = window.lower()->with_precision(precision);
    const Real hi = window.upper()->with_precision(precision);
    std::vector<Real> xs;
    xs.reserve(count);
    for (long i = 0; i < count; ++i)
        xs.push_back(lo + (hi - lo) * i / (count - 1));
    return xs;
}

// Random strictly increasing (p+2)-tuple inside the window. Drawn in double
// space; class verdicts do not need finer placement than that.
std::vector<Real> random_tuple(std::mt19937_64& rng, double lo, double hi,
                               long count, long precision) {
    std::uniform_real_distribution<double> dist(lo, hi);
    const double min_gap = (hi - lo) * 1e-9;
    for (int attempt = 0; attempt < 256; ++attempt) {
        std::vector<double> pts(count);
        for (double& p : pts)
            p = dist(rng);
        std::sort(pts.begin(), pts.end());
        bool ok = true;
        for (long i = 1; i < count; ++i)
            if (pts[i] - pts[i - 1] < min_gap)
                ok = false;
        if (!ok)
            continue;
        std::vector<Real> xs;
        xs.reserve(count);
        for (double p : pts)
            xs.push_back(Real::of(p, precision));
        return xs;
    }
    throw InternalError("could not draw a separated sample tuple");
}

void require_window(const FuncHandle& f, const Interval& window) {
    if (window.right_unbounded_flag() || !window.lower() || !window.upper())
        throw InvalidArgument("classification window must be bounded");
    if (!f.domain().contains(*window.lower()) || !f.domain().contains(*window.upper()))
        throw DomainError("window " + window.describe() + " leaves the domain of " +
                          f.name());
}

} // namespace

OrderSign test_order(const FuncHandle& f, long p, const Interval& window,
                     long samples, const Real& tolerance, long precision,
                     std::uint64_t seed) {
    if (p < -1)
        throw InvalidArgument("order must be >= -1");
    require_window(f, window);
    const long tuple = p + 2;
    if (samples < tuple)
        throw InvalidArgument("need at least p+2 samples, got " +
                              std::to_string(samples));

    const Real tol = tolerance.with_precision(precision);
    std::vector<Real> values;
    values.reserve(2 * samples);

    std::vector<Real> grid = grid_points(window, samples, precision);
    if (p == -1) {
        for (const Real& x : grid)
            values.push_back(f.eval(x, precision));
    } else {
        for (long i = 0; i + tuple <= samples; ++i) {
            std::vector<Real> nodes(grid.begin() + i, grid.begin() + i + tuple);
            values.push_back(divided_difference(f, std::move(nodes), precision).value);
        }
    }

    std::mt19937_64 rng(seed * 1315423911u + static_cast<std::uint64_t>(p + 2));
    const double lo = window.lower()->to_double();
    const double hi = window.upper()->to_double();
    for (long s = 0; s < samples; ++s) {
        std::vector<Real> nodes = random_tuple(rng, lo, hi, tuple, precision);
        if (p == -1)
            values.push_back(f.eval(nodes[0], precision));
        else
            values.push_back(divided_difference(f, std::move(nodes), precision).value);
    }

    return classify_values(values, tol);
}

namespace {

// Smallest start order q0 such that `accept(q, q0)` holds for all q in
// [q0, P]; wildcard `zero` entries are handled by the acceptors. A suffix of
// fewer than two orders is vacuous, so q0 stops at P-1.
template <typename Accept>
std::optional<long> first_settled(const std::vector<OrderSign>& per_order, long P,
                                  Accept accept) {
    for (long q0 = -1; q0 <= P - 1; ++q0) {
        bool ok = true;
        for (long q = q0; q <= P && ok; ++q)
            ok = accept(per_order[static_cast<std::size_t>(q + 1)], q - q0);
        if (ok)
            return q0;
    }
    return std::nullopt;
}

} // namespace

ConvexitySignature classify(const FuncHandle& f, long orders, const Interval& window,
                            const ClassifyOptions& options) {
    if (orders < 0)
        throw InvalidArgument("orders must be >= 0");
    require_window(f, window);

    ConvexitySignature sig;
    sig.orders_tested = orders;
    sig.window = window;
    sig.samples_per_order = options.samples;
    sig.seed = options.seed;
    sig.precision = options.precision;

    Real tol(options.precision);
    if (options.tolerance) {
        tol = options.tolerance->with_precision(options.precision);
    } else {
        // relative band: divided differences of order p lose about
        // p*log2(span/gap) bits, so half the precision is the honest floor
        Real max_abs = Real::of(0L, options.precision);
        for (const Real& x : grid_points(window, options.samples, options.precision))
            max_abs = max(max_abs, abs(f.eval(x, options.precision)));
        tol = Real::pow2(-options.precision / 2, 64) * max(max_abs, Real::of(1L, 64));
    }
    sig.tolerance = tol.to_double();

    for (long p = -1; p <= orders; ++p)
        sig.per_order.push_back(
            test_order(f, p, window, options.samples, tol, options.precision, options.seed));

    if (options.with_dp) {
        for (long p = 0; p <= orders; ++p)
            sig.dp.push_back(dp_membership(f, p, options.dp_n_max,
                                           Real::of(options.dp_threshold, 64),
                                           options.precision));
    }

    // right end >= 10x left end marks the verdict as evidence about the
    // eventual (asymptotic) classes rather than just this window
    sig.eventual_evidence = *window.upper() >= *window.lower() * 10;

    const auto& po = sig.per_order;
    auto is = [](OrderSign s, OrderSign want) { return s == want || s == OrderSign::zero; };
    if (auto q0 = first_settled(po, orders, [&](OrderSign s, long) {
            return is(s, OrderSign::plus);
        }))
        sig.am_plus_p = *q0 + 1;
    if (auto q0 = first_settled(po, orders, [&](OrderSign s, long) {
            return is(s, OrderSign::minus);
        }))
        sig.am_minus_p = *q0 + 1;
    if (auto q0 = first_settled(po, orders, [&](OrderSign s, long d) {
            return is(s, d % 2 == 0 ? OrderSign::plus : OrderSign::minus);
        }))
        sig.cm_plus_p = *q0 + 1;
    if (auto q0 = first_settled(po, orders, [&](OrderSign s, long d) {
            return is(s, d % 2 == 0 ? OrderSign::minus : OrderSign::plus);
        }))
        sig.cm_minus_p = *q0 + 1;
    if (auto q0 = first_settled(po, orders, [&](OrderSign s, long) {
            return s != OrderSign::mixed;
        }))
        sig.rm_p = *q0 + 1;

    return sig;
}

TransferReport transfer_check(const FuncHandle& f, long p, const Interval& window,
                              long samples, const Real& tolerance, long precision,
                              std::uint64_t seed) {
    if (p < 0)
        throw InvalidArgument("transfer check needs p >= 0");
    TransferReport report;
    report.order = p;
    report.f_sign = test_order(f, p, window, samples, tolerance, precision, seed);
    report.delta_sign = test_order(f.forward_difference(), p - 1, window, samples,
                                   tolerance, precision, seed);
    report.transfers = report.delta_sign == report.f_sign ||
                       report.delta_sign == OrderSign::zero;
    return report;
}

} // namespace newsum
