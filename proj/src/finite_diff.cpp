#include "newsum/finite_diff.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>

namespace newsum {

namespace {

bool fault_injection_enabled(const char* which) {
    const char* env = std::getenv("NEWSUM_FAULT_INJECT");
    return env != nullptr && std::strcmp(env, which) == 0;
}

} // namespace

DiffTable build_table(const FuncHandle& f, const Real& a, long max_order,
                      long target_precision) {
    if (max_order < 0)
        throw InvalidArgument("difference order must be >= 0");
    const long w = target_precision + max_order + 32;
    const Real aw = a.with_precision(w);

    std::vector<Real> row;
    row.reserve(max_order + 1);
    Real max_abs = Real::of(0L, w);
    std::vector<Real> running_max; // max_{j<=k} |f(a+j)|
    for (long j = 0; j <= max_order; ++j) {
        Real v = f.eval(aw + j, w);
        max_abs = max(max_abs, abs(v));
        running_max.push_back(max_abs);
        row.push_back(std::move(v));
    }

    DiffTable table;
    table.anchor = aw;
    table.max_order = max_order;
    table.working_precision = w;
    table.max_abs_sample = max_abs;
    table.values.reserve(max_order + 1);
    table.error_bound.reserve(max_order + 1);

    const Real unit = Real::pow2(-w, 64);
    table.values.push_back(row[0]);
    table.error_bound.push_back(running_max[0] * unit);
    for (long k = 1; k <= max_order; ++k) {
        for (long j = 0; j + k <= max_order; ++j)
            row[j] = row[j + 1] - row[j];
        table.values.push_back(row[0]);
        table.error_bound.push_back(Real::pow2(k, 64) * unit * running_max[k]);
    }

    // Test hook: deliberately corrupt one entry so the verification suites
    // can prove they detect a broken build.
    if (max_order >= 1 && fault_injection_enabled("diff-table"))
        table.values[1] += Real::of(1e-3, w);
    return table;
}

DividedDiff divided_difference(const FuncHandle& f, std::vector<Real> nodes,
                               long target_precision) {
    if (nodes.empty())
        throw InvalidArgument("divided difference needs at least one node");
    const long n = static_cast<long>(nodes.size()) - 1;
    const long w = target_precision + n + 32;

    std::vector<Real> xs;
    xs.reserve(nodes.size());
    for (const Real& x : nodes)
        xs.push_back(x.with_precision(w));
    std::sort(xs.begin(), xs.end());

    const Real min_gap = Real::pow2(-w / 2, 64);
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (abs(xs[i] - xs[i - 1]) <= min_gap)
            throw InvalidArgument(
                "divided difference nodes must be pairwise distinct; nodes " +
                xs[i - 1].to_string(20) + " and " + xs[i].to_string(20) +
                " are too close");

    std::vector<Real> dd;
    dd.reserve(xs.size());
    for (const Real& x : xs)
        dd.push_back(f.eval(x, w));
    for (long level = 1; level <= n; ++level)
        for (long i = 0; i + level <= n; ++i)
            dd[i] = (dd[i + 1] - dd[i]) / (xs[i + level] - xs[i]);

    DividedDiff out;
    out.nodes = std::move(xs);
    out.value = dd[0];
    return out;
}

const char* to_string(DpVerdict v) {
    switch (v) {
    case DpVerdict::member: return "member";
    case DpVerdict::non_member: return "non_member";
    case DpVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

DpReport dp_membership(const FuncHandle& g, long p, long n_max, const Real& threshold,
                       long precision) {
    if (p < 0)
        throw InvalidArgument("dp_membership needs p >= 0");
    if (n_max < 64)
        throw InvalidArgument("dp_membership needs n_max >= 64");

    DpReport report;
    report.order = p;
    report.threshold = threshold.to_double();

    std::vector<Real> mags;
    for (long n = 8; n <= n_max; n *= 2) {
        DiffTable t = build_table(g, Real::of(n, precision), p, precision);
        Real mag = abs(t.values[p]);
        mags.push_back(mag);
        report.samples.push_back({n, mag.to_double()});
    }

    const std::size_t count = mags.size();
    const Real thr = threshold.with_precision(precision);

    // non_member: the tail is bounded away from zero
    if (count >= 3) {
        bool tail_big = true, tail_nondecreasing = true;
        for (std::size_t i = count - 3; i < count; ++i) {
            if (!(mags[i] > thr * 10))
                tail_big = false;
            if (i > count - 3 && mags[i] < mags[i - 1])
                tail_nondecreasing = false;
        }
        if (tail_big && tail_nondecreasing) {
            report.verdict = DpVerdict::non_member;
            return report;
        }
    }

    // member: eventually decreasing and the final value under threshold
    bool final_small = mags.back() < thr;
    std::size_t tail_start = count / 2;
    bool tail_decreasing = true;
    for (std::size_t i = tail_start + 1; i < count; ++i)
        if (mags[i] > mags[i - 1])
            tail_decreasing = false;
    if (final_small && tail_decreasing) {
        report.verdict = DpVerdict::member;
        return report;
    }

    report.verdict = DpVerdict::inconclusive;
    return report;
}

} // namespace newsum
