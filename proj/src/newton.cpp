#include "newsum/newton.hpp"

#include <algorithm>
#include <deque>

namespace newsum {

const char* to_string(EvalStatus s) {
    switch (s) {
    case EvalStatus::converged_bounded: return "converged_bounded";
    case EvalStatus::converged_heuristic: return "converged_heuristic";
    case EvalStatus::finite_exact: return "finite_exact";
    case EvalStatus::diverged: return "diverged";
    case EvalStatus::max_terms: return "max_terms";
    }
    return "?";
}

Real NewtonExpansion::coefficient(long k) const {
    if (k <= table.max_order)
        return table.values[static_cast<std::size_t>(k)];
    if (streams_closed_form)
        return f.closed_form_diff(k, anchor, table.working_precision);
    throw InvalidArgument("coefficient index " + std::to_string(k) +
                          " beyond table order " + std::to_string(table.max_order));
}

long NewtonExpansion::available_terms(long max_terms) const {
    return streams_closed_form ? max_terms
                               : std::min(max_terms, table.max_order + 1);
}

NewtonExpansion expand(const FuncHandle& f, const Real& a, long max_order,
                       long precision) {
    if (!f.domain().right_unbounded_flag())
        throw DomainError("Newton expansion needs a right-unbounded domain; " +
                          f.name() + " lives on " + f.domain().describe());
    if (!f.domain().contains(a))
        throw DomainError("anchor " + a.to_string(20) + " outside the domain of " +
                          f.name());
    if (max_order < 0)
        throw InvalidArgument("expansion order must be >= 0");

    NewtonExpansion e;
    e.f = f;
    e.precision = precision;
    e.streams_closed_form = f.has_closed_form_diff();

    DiffTable numeric = build_table(f, a, max_order, precision);
    e.anchor = numeric.anchor;

    if (e.streams_closed_form) {
        // Closed form becomes the coefficient source; the numeric triangle
        // must agree with it at low orders or something is broken.
        const long w = numeric.working_precision;
        Real scale = max(max(numeric.max_abs_sample, Real::of(1L, 64)),
                         abs(e.anchor) + Real::of(max_order + 1, 64));
        for (long k = 0; k <= std::min<long>(max_order, 10); ++k) {
            Real closed = f.closed_form_diff(k, e.anchor, w);
            Real tol = Real::pow2(k - precision + 24, 64) * scale;
            if (abs(closed - numeric.values[static_cast<std::size_t>(k)]) > tol)
                throw InternalError(
                    "closed-form difference of " + f.name() + " disagrees with the "
                    "numeric table at k = " + std::to_string(k));
            numeric.values[static_cast<std::size_t>(k)] = std::move(closed);
        }
        for (long k = std::min<long>(max_order, 10) + 1; k <= max_order; ++k)
            numeric.values[static_cast<std::size_t>(k)] =
                f.closed_form_diff(k, e.anchor, w);
    }

    // Zero-table detection, used to flag series that sum to something other
    // than f (the aliasing failure mode of Newton series).
    const long w = numeric.working_precision;
    Real zero_scale = max(max(numeric.max_abs_sample, Real::of(1L, 64)),
                          abs(e.anchor) + max_order + 1);
    bool all_zero = true;
    for (long k = 0; k <= max_order && all_zero; ++k) {
        Real thr = Real::pow2(k + 24 - w, 64) * zero_scale;
        if (abs(numeric.values[static_cast<std::size_t>(k)]) > thr)
            all_zero = false;
    }
    e.identically_zero_table = all_zero;
    e.table = std::move(numeric);
    return e;
}

EvalReport newton_eval(const NewtonExpansion& expansion, const Real& x,
                       const EvalOptions& options) {
    const FuncHandle& f = expansion.f;
    if (!f.domain().contains(x))
        throw DomainError("x = " + x.to_string(20) + " outside the domain of " +
                          f.name());
    if (options.b.has_value() != options.q.has_value())
        throw InvalidArgument("remainder certificate needs both b and q");

    const long w = expansion.table.working_precision;
    const Real xw = x.with_precision(w);
    const Real& a = expansion.anchor;
    const Real dx = xw - a;
    const Real tol = options.tolerance.with_precision(w);
    if (!(tol > Real::of(0L, 64)))
        throw InvalidArgument("tolerance must be positive");

    // integer case: the series collapses to a finite sum, exactly
    std::optional<long> integer_m;
    if (auto m = dx.nearest_integer_within(integer_detection_tolerance(expansion.precision)))
        if (*m >= 0)
            integer_m = *m;

    // certificate setup
    std::optional<FallingRatioAccumulator> ratio;
    Real log_bound_factor(w);
    long q = 0;
    if (options.b) {
        q = *options.q;
        if (q < 0)
            throw InvalidArgument("certificate order q must be >= 0");
        if (q > expansion.table.max_order)
            throw InvalidArgument("certificate order q exceeds the table order");
        const Real b = options.b->with_precision(w);
        if (!f.domain().contains(b))
            throw DomainError("b = " + b.to_string(20) + " outside the domain of " +
                              f.name());
        if (!(b < min(a, xw)))
            throw DomainError("invalid b: the remainder bound needs b < min{a, x}");
        // |f(b) - sum_{k<q} C(b-a, k) Delta^k f(a)|, fixed in n
        Real factor = f.eval(b, w);
        Real binom_b = Real::of(1L, w);
        for (long k = 0; k < q; ++k) {
            factor -= binom_b * expansion.coefficient(k);
            binom_b *= (b - a - k) / (k + 1);
        }
        factor = abs(factor);
        if (factor.is_zero())
            factor = Real::pow2(-w, 64); // degenerate certificate, keep logs finite
        log_bound_factor = log(factor);
        ratio.emplace(xw, a, options.b->with_precision(w), w);
    }
    const Real log_tol = log(tol);

    CompensatedSum sum(w);
    Real binom = Real::of(1L, w); // C(x-a, k)
    std::deque<Real> window;      // last |term|s for divergence detection
    int small_run = 0;
    const long hard_cap = expansion.available_terms(options.max_terms);

    EvalReport report;
    report.identically_zero_series = expansion.identically_zero_table;
    if (options.b)
        report.b_used = options.b->with_precision(expansion.precision);

    for (long k = 0; k < hard_cap; ++k) {
        Real term = binom * expansion.coefficient(k);
        sum.add(term);
        const long terms = k + 1;

        if (integer_m && k == *integer_m) {
            report.value = sum.value().with_precision(expansion.precision);
            report.terms_used = terms;
            report.status = EvalStatus::finite_exact;
            return report;
        }

        if (ratio) {
            ratio->advance();
            if (terms >= std::max<long>(q, 1)) {
                Real log_bound = ratio->log_magnitude() + log_bound_factor;
                if (ratio->sign_or_zero() == 0 || log_bound < log_tol) {
                    report.value = sum.value().with_precision(expansion.precision);
                    report.terms_used = terms;
                    report.status = EvalStatus::converged_bounded;
                    report.remainder_bound =
                        ratio->sign_or_zero() == 0
                            ? Real::of(0L, expansion.precision)
                            : exp(log_bound).with_precision(expansion.precision);
                    return report;
                }
            }
        } else {
            // heuristic stop: CM-series terms decay like a power of n and can
            // have isolated near-zero terms at integer crossings, hence four
            // in a row
            if (abs(term) < tol / 4) {
                if (++small_run == 4) {
                    report.value = sum.value().with_precision(expansion.precision);
                    report.terms_used = terms;
                    report.status = EvalStatus::converged_heuristic;
                    return report;
                }
            } else {
                small_run = 0;
            }
        }

        // divergence: a 32-term window of nondecreasing magnitudes far above
        // tolerance
        window.push_back(abs(term));
        if (window.size() > 32)
            window.pop_front();
        if (window.size() == 32 && window.back() > tol * 1000000) {
            bool nondecreasing = true;
            for (std::size_t i = 1; i < window.size() && nondecreasing; ++i)
                if (window[i] < window[i - 1])
                    nondecreasing = false;
            if (nondecreasing) {
                report.value = sum.value().with_precision(expansion.precision);
                report.terms_used = terms;
                report.status = EvalStatus::diverged;
                return report;
            }
        }

        binom *= (dx - k) / (k + 1);
    }

    report.value = sum.value().with_precision(expansion.precision);
    report.terms_used = hard_cap;
    report.status = EvalStatus::max_terms;
    return report;
}

Real remainder_identity_residual(const FuncHandle& f, const Real& a, const Real& x,
                                 long n, long precision) {
    if (n < 0)
        throw InvalidArgument("remainder identity needs n >= 0");
    const long w = precision + n + 48;
    const Real aw = a.with_precision(w);
    const Real xw = x.with_precision(w);

    // node collision: x in {a, ..., a+n-1} makes the divided difference ill
    // posed here (coincident nodes are out of scope)
    Real offset = xw - aw;
    if (auto m = offset.nearest_integer_within(integer_detection_tolerance(precision)))
        if (*m >= 0 && *m < n)
            throw InvalidArgument("x collides with expansion node a + " +
                                  std::to_string(*m));

    // left side: f(x) minus the n-term partial sum from the numeric table
    DiffTable table = build_table(f, aw, std::max<long>(0, n - 1), precision);
    CompensatedSum partial(w);
    Real binom = Real::of(1L, w);
    for (long k = 0; k < n; ++k) {
        partial.add(binom * table.values[static_cast<std::size_t>(k)]);
        binom *= (offset - k) / (k + 1);
    }
    Real lhs = f.eval(xw, w) - partial.value();

    // right side: (x-a)^(n falling) * f[a, a+1, ..., a+n-1, x]
    std::vector<Real> nodes;
    nodes.reserve(n + 1);
    for (long i = 0; i < n; ++i)
        nodes.push_back(aw + i);
    nodes.push_back(xw);
    Real rhs = falling_factorial(offset, n) * divided_difference(f, nodes, precision).value;

    return abs(lhs - rhs).with_precision(precision);
}

TaylorResult taylor_eval(const FuncHandle& f, const Real& a, const Real& x, long n,
                         long q, MonotoneKind kind, std::optional<Real> b,
                         long precision) {
    if (!f.has_derivative())
        throw InvalidArgument(f.name() + " has no derivative evaluator; Taylor "
                              "comparison needs true derivatives");
    if (n < 1 || q < 0 || q > n)
        throw InvalidArgument("taylor_eval needs 1 <= n and 0 <= q <= n");
    const long w = precision + 32;
    const Real aw = a.with_precision(w);
    const Real xw = x.with_precision(w);
    const Real dist = abs(xw - aw);

    Real bw(w);
    if (b) {
        bw = b->with_precision(w);
    } else {
        Real step = max(dist, Real::of(1L, w) / 2) * 2;
        bw = kind == MonotoneKind::completely_monotone ? aw - step : aw + step;
    }
    if (!f.domain().contains(bw))
        throw DomainError("no valid b: " + bw.to_string(20) + " leaves the domain of " +
                          f.name());
    if (kind == MonotoneKind::completely_monotone) {
        if (!(bw < min(aw, xw) && dist < aw - bw))
            throw DomainError("no valid b: need b < min{a,x} and |x-a| < a-b");
    } else {
        if (!(bw > max(aw, xw) && dist < bw - aw))
            throw DomainError("no valid b: need b > max{a,x} and |x-a| < b-a");
    }

    CompensatedSum partial(w);
    Real pow_x = Real::of(1L, w);   // (x-a)^k / k!
    Real pow_b = Real::of(1L, w);   // (b-a)^k / k!
    Real factor = f.eval(bw, w);
    for (long k = 0; k < n; ++k) {
        Real deriv = f.derivative(k, aw, w);
        partial.add(deriv * pow_x);
        if (k < q)
            factor -= deriv * pow_b;
        pow_x *= (xw - aw) / (k + 1);
        pow_b *= (bw - aw) / (k + 1);
    }

    TaylorResult out;
    out.partial_sum = partial.value().with_precision(precision);
    out.bound = (pow(dist / abs(bw - aw), n) * abs(factor)).with_precision(precision);
    out.b_used = bw.with_precision(precision);
    return out;
}

RatioTable ratio_table(const Real& x, const Real& a, const Real& b,
                       std::vector<long> n_list, long precision) {
    std::sort(n_list.begin(), n_list.end());
    n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());
    if (!n_list.empty() && n_list.front() < 0)
        throw InvalidArgument("ratio table needs n >= 0");

    RatioTable out;
    out.x = x;
    out.a = a;
    out.b = b;
    FallingRatioAccumulator acc(x, a, b, precision + 32);
    for (long n : n_list) {
        while (acc.n() < n)
            acc.advance();
        out.rows.push_back({n, acc.log_magnitude().to_double(), acc.sign_or_zero()});
    }
    return out;
}

double fit_log_slope(const RatioTable& table, long n_lo, long n_hi) {
    std::vector<std::pair<double, double>> pts;
    for (const RatioRow& row : table.rows)
        if (row.n >= n_lo && row.n <= n_hi && row.n > 0)
            pts.emplace_back(std::log(static_cast<double>(row.n)), row.log_magnitude);
    if (pts.size() < 2)
        throw InvalidArgument("slope fit needs at least two rows in range");
    double mt = 0, my = 0;
    for (auto& [t, y] : pts) {
        mt += t;
        my += y;
    }
    mt /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double num = 0, den = 0;
    for (auto& [t, y] : pts) {
        num += (t - mt) * (y - my);
        den += (t - mt) * (t - mt);
    }
    return num / den;
}

} // namespace newsum
