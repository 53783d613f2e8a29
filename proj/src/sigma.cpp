#include "newsum/sigma.hpp"

#include <algorithm>
#include <cmath>

#include "newsum/combinatorics.hpp"

namespace newsum {

const char* to_string(SigmaStatus s) {
    switch (s) {
    case SigmaStatus::converged: return "converged";
    case SigmaStatus::max_n: return "max_n";
    case SigmaStatus::p_rejected: return "p_rejected";
    }
    return "?";
}

namespace {

void require_sigma_domain(const FuncHandle& g, const Real& x) {
    if (!x.is_finite() || x.sign() <= 0)
        throw DomainError("indefinite sums live on x > 0; got x = " + x.to_string(20));
    if (!g.domain().right_unbounded_flag())
        throw DomainError(g.name() + " must be defined on a right-unbounded interval");
    if (!g.domain().contains(Real::of(1L, 64)) || !g.domain().contains(x))
        throw DomainError(g.name() + " must cover x and the positive integers");
}

// Incrementally maintained blocks of f_n^p[g](x). Advancing from n to n+1
// costs one g(k) and one g(x+k); only the correction tail is recomputed.
class SigmaAccumulator {
public:
    SigmaAccumulator(const FuncHandle& g, const Real& x, long p, long w)
        : g_(g), x_(x.with_precision(w)), p_(p), w_(w), sum_gk_(w), sum_gxk_(w) {
        if (p_ < 0)
            throw InvalidArgument("sigma order p must be >= 0");
        if (auto m = x_.nearest_integer_within(integer_detection_tolerance(w)))
            if (*m >= 1)
                x_integer_ = *m;
        Real binom = Real::of(1L, w);
        for (long j = 1; j <= p_; ++j) {
            binom *= (x_ - (j - 1)) / j;
            binom_x_.push_back(binom); // C(x, j)
        }
        sum_gxk_.add(eval_shifted(0));
        n_ = 1;
    }

    long n() const { return n_; }

    void advance_to(long n) {
        for (; n_ < n; ++n_) {
            sum_gk_.add(g_.eval_integer(n_, w_));
            sum_gxk_.add(eval_shifted(n_));
        }
    }

    Real value() const {
        Real v = sum_gk_.value() - sum_gxk_.value();
        if (p_ > 0) {
            DiffTable tail = build_table(g_, Real::of(n_, w_), p_ - 1, w_);
            CompensatedSum corr(w_);
            for (long j = 1; j <= p_; ++j)
                corr.add(binom_x_[static_cast<std::size_t>(j - 1)] *
                         tail.values[static_cast<std::size_t>(j - 1)]);
            v += corr.value();
        }
        return v;
    }

private:
    Real eval_shifted(long k) {
        if (x_integer_)
            return g_.eval_integer(*x_integer_ + k, w_);
        return g_.eval(x_ + k, w_);
    }

    FuncHandle g_;
    Real x_;
    long p_;
    long w_;
    std::optional<long> x_integer_;
    CompensatedSum sum_gk_;  // sum_{k=1}^{n-1} g(k)
    CompensatedSum sum_gxk_; // sum_{k=0}^{n-1} g(x+k)
    std::vector<Real> binom_x_;
    long n_ = 1;
};

} // namespace

Real f_np(const FuncHandle& g, long p, long n, const Real& x, long precision) {
    if (n < 2)
        throw InvalidArgument("f_n^p needs n >= 2");
    require_sigma_domain(g, x);
    const long w = precision + 64;
    SigmaAccumulator acc(g, x, p, w);
    acc.advance_to(n);
    return acc.value().with_precision(precision);
}

SigmaResult sigma_eval(const FuncHandle& g, const Real& x, const SigmaOptions& options) {
    require_sigma_domain(g, x);
    const long w = options.precision + 64;
    const Real tol = options.tolerance.with_precision(w);
    if (!(tol > Real::of(0L, 64)))
        throw InvalidArgument("tolerance must be positive");
    if (options.n_max < 128)
        throw InvalidArgument("n_max must be at least 128");

    SigmaResult result;

    // p selection. Delta^p g(n) must plausibly sink below tolerance within
    // the n budget, otherwise the correction terms stall the limit.
    const Real dp_threshold = (tol / 4).with_precision(64);
    const long dp_n_max = std::max<long>(64, options.n_max);
    long p = -1;
    if (options.p) {
        p = *options.p;
        DpReport dp = dp_membership(g, p, dp_n_max, dp_threshold, options.precision);
        if (dp.verdict == DpVerdict::non_member) {
            result.p_used = p;
            result.status = SigmaStatus::p_rejected;
            result.value = Real::nan(options.precision);
            return result;
        }
    } else {
        for (long candidate = 0; candidate <= 8; ++candidate) {
            DpReport dp =
                dp_membership(g, candidate, dp_n_max, dp_threshold, options.precision);
            if (dp.verdict == DpVerdict::member) {
                p = candidate;
                break;
            }
        }
        if (p < 0) {
            result.status = SigmaStatus::p_rejected;
            result.value = Real::nan(options.precision);
            return result;
        }
    }
    result.p_used = p;

    SigmaAccumulator acc(g, x, p, w);
    acc.advance_to(64);
    Real prev = acc.value();
    Real prev_delta = Real::nan(w);
    for (long n = 128; n <= options.n_max; n *= 2) {
        acc.advance_to(n);
        Real v = acc.value();
        Real delta = abs(v - prev);
        if (!prev_delta.is_nan() && !delta.is_zero() && prev_delta > delta)
            result.empirical_rate =
                std::log2(prev_delta.to_double() / delta.to_double());
        if (delta < tol / 2) {
            result.value = v.with_precision(options.precision);
            result.n_final = n;
            result.successive_delta = delta.with_precision(options.precision);
            result.status = SigmaStatus::converged;
            if (options.extrapolate && result.empirical_rate &&
                *result.empirical_rate > 0.1) {
                Real factor = Real::of(std::exp2(*result.empirical_rate) - 1.0, w);
                result.richardson =
                    (v + (v - prev) / factor).with_precision(options.precision);
            }
            break;
        }
        prev = v;
        prev_delta = delta;
        if (n * 2 > options.n_max) {
            result.value = v.with_precision(options.precision);
            result.n_final = n;
            result.successive_delta = delta.with_precision(options.precision);
            result.status = SigmaStatus::max_n;
        }
    }

    // Normalization companion: the defining solution vanishes at 1, and so
    // does every approximant with p >= 1 (up to rounding); for p = 0 the
    // residual is |g(n_final)|, which membership in D^0 sends to zero.
    if (result.n_final >= 2) {
        SigmaAccumulator unit(g, Real::of(1L, w), p, w);
        unit.advance_to(result.n_final);
        result.normalization_residual =
            abs(unit.value()).with_precision(options.precision);
    }
    return result;
}

std::vector<Real> wellposedness_values(const FuncHandle& g, long p, long q,
                                       const Real& x, std::vector<long> n_list,
                                       long precision) {
    if (q < p)
        throw InvalidArgument("wellposedness check needs q >= p");
    require_sigma_domain(g, x);
    std::sort(n_list.begin(), n_list.end());
    const long w = precision + 64;
    SigmaAccumulator low(g, x, p, w);
    SigmaAccumulator high(g, x, q, w);
    std::vector<Real> out;
    out.reserve(n_list.size());
    for (long n : n_list) {
        if (n < 2)
            throw InvalidArgument("wellposedness check needs n >= 2");
        low.advance_to(n);
        high.advance_to(n);
        out.push_back(abs(high.value() - low.value()).with_precision(precision));
    }
    return out;
}

Real difference_equation_residual(const FuncHandle& g, const Real& x,
                                  const SigmaOptions& options) {
    SigmaResult at_x = sigma_eval(g, x, options);
    if (at_x.status != SigmaStatus::converged)
        throw Error("sigma did not converge at x = " + x.to_string(20) +
                    " (status " + to_string(at_x.status) + ")");
    SigmaOptions next = options;
    next.p = at_x.p_used;
    SigmaResult at_x1 = sigma_eval(g, x + 1, next);
    if (at_x1.status != SigmaStatus::converged)
        throw Error("sigma did not converge at x + 1");
    const long w = options.precision + 32;
    Real gx = g.eval(x.with_precision(w), w);
    return abs(at_x1.value.with_precision(w) - at_x.value.with_precision(w) - gx)
        .with_precision(options.precision);
}

SternResult stern_series(const Real& x, const Real& tolerance, long max_terms,
                         long precision) {
    if (!x.is_finite() || x.sign() <= 0)
        throw DomainError("Stern series needs x > 0");
    if (max_terms < 1)
        throw InvalidArgument("max_terms must be >= 1");
    const long w = precision + 48;
    const Real xw = x.with_precision(w);
    const Real tol = tolerance.with_precision(w);

    SternResult out;

    // integer x: C(x-1, k) vanishes beyond k = x-1 and the sum is finite
    std::optional<long> m;
    if (auto mm = (xw - 1).nearest_integer_within(integer_detection_tolerance(precision)))
        if (*mm >= 0)
            m = *mm;

    CompensatedSum sum(w);
    Real binom = Real::of(1L, w); // C(x-1, k), updated incrementally
    std::vector<double> term_log; // log|t_k| history for the tail estimate
    long small_since = 0;
    const long cap = m ? std::min(*m, max_terms) : max_terms;
    for (long k = 1; k <= cap; ++k) {
        binom *= (xw - k) / k; // now C(x-1, k)
        Real term = binom / k;
        if (k % 2 == 0)
            term = -term;
        sum.add(term);
        out.terms_used = k;

        if (m)
            continue; // run the finite sum to the end

        Real mag = abs(term);
        term_log.push_back(mag.is_zero() ? -1e9 : std::log(mag.to_double()));
        if (mag < tol / 4) {
            ++small_since;
            // integral tail bound from the locally fitted decay exponent
            if (small_since >= 2 && term_log.size() >= 9) {
                double s = -(term_log.back() - term_log[term_log.size() - 9]) /
                           (std::log(static_cast<double>(k)) -
                            std::log(static_cast<double>(k - 8)));
                if (s > 1.2) {
                    double tail_est = mag.to_double() * static_cast<double>(k) / (s - 1.0);
                    if (tail_est < tol.to_double() / 2) {
                        out.converged = true;
                        break;
                    }
                }
            }
        } else {
            small_since = 0;
        }
    }
    if (m)
        out.converged = true;
    out.value = sum.value().with_precision(precision);
    return out;
}

} // namespace newsum
