#include "newsum/oracles.hpp"

#include <gmp.h>

#include <map>
#include <mutex>
#include <vector>

namespace newsum::oracles {

namespace {

// Exact Bernoulli numbers via the defining recurrence
//   B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j,
// kept as rationals so the Stirling tails see no rounding at all.
class BernoulliCache {
public:
    ~BernoulliCache() {
        for (auto& q : values_)
            mpq_clear(q);
    }

    // Returns B_n rounded to `precision` bits.
    Real get(unsigned n, long precision) {
        std::lock_guard<std::mutex> lock(mutex_);
        extend(n);
        Real r(precision);
        mpfr_set_q(r.raw_mutable(), values_[n], MPFR_RNDN);
        return r;
    }

private:
    void extend(unsigned n) {
        if (n > 4096)
            throw InvalidArgument("Bernoulli index too large: " + std::to_string(n));
        while (values_.size() <= n) {
            unsigned m = static_cast<unsigned>(values_.size());
            values_.emplace_back();
            mpq_t& bm = values_.back();
            mpq_init(bm);
            if (m == 0) {
                mpq_set_ui(bm, 1, 1);
                continue;
            }
            if (m > 1 && m % 2 == 1) {
                mpq_set_ui(bm, 0, 1); // odd Bernoulli numbers vanish
                continue;
            }
            mpq_t acc, term;
            mpq_init(acc);
            mpq_init(term);
            mpz_t binom;
            mpz_init(binom);
            for (unsigned j = 0; j < m; ++j) {
                if (j > 1 && j % 2 == 1)
                    continue;
                mpz_bin_uiui(binom, m + 1, j);
                mpq_set_z(term, binom);
                mpq_mul(term, term, values_[j]);
                mpq_add(acc, acc, term);
            }
            mpq_set_si(bm, -1, m + 1);
            mpq_canonicalize(bm);
            mpq_mul(bm, bm, acc);
            mpq_clear(acc);
            mpq_clear(term);
            mpz_clear(binom);
        }
    }

    std::mutex mutex_;
    std::vector<mpq_t> values_;
};

BernoulliCache& bernoulli_cache() {
    static BernoulliCache cache;
    return cache;
}

// Shift so the asymptotic series is evaluated at y >= 20 * precision / 128,
// where its smallest term undershoots the error budget with margin.
long stirling_shift(const Real& x, long precision) {
    double target = 20.0 * static_cast<double>(precision) / 128.0;
    if (target < 20.0)
        target = 20.0;
    double xv = x.to_double();
    if (xv >= target)
        return 0;
    return static_cast<long>(target - xv) + 1;
}

struct SeriesTail {
    Real value;
    bool converged;
};

// sum_{k>=1} B_2k / ((2k)(2k-1) y^(2k-1)), stopped at the first term below
// eps. The terms of this divergent-asymptotic series must still be
// decreasing when we stop; growth before reaching eps means the shift was
// too small.
SeriesTail stirling_lngamma_tail(const Real& y, const Real& eps, long w) {
    Real y2 = y * y;
    Real ypow = y; // y^(2k-1)
    CompensatedSum tail(w);
    Real prev_mag = Real::nan(w);
    for (unsigned k = 1; k <= 2048; ++k) {
        Real b = bernoulli_cache().get(2 * k, w);
        Real term = b / (ypow * static_cast<long>(2 * k) * static_cast<long>(2 * k - 1));
        Real mag = abs(term);
        if (mag < eps) {
            tail.add(term);
            return {tail.value(), true};
        }
        if (!prev_mag.is_nan() && mag >= prev_mag)
            return {tail.value(), false};
        tail.add(term);
        prev_mag = mag;
        ypow *= y2;
    }
    return {tail.value(), false};
}

SeriesTail stirling_digamma_tail(const Real& y, const Real& eps, long w) {
    Real y2 = y * y;
    Real ypow = y2; // y^(2k)
    CompensatedSum tail(w);
    Real prev_mag = Real::nan(w);
    for (unsigned k = 1; k <= 2048; ++k) {
        Real b = bernoulli_cache().get(2 * k, w);
        Real term = b / (ypow * static_cast<long>(2 * k));
        Real mag = abs(term);
        if (mag < eps) {
            tail.add(term);
            return {tail.value(), true};
        }
        if (!prev_mag.is_nan() && mag >= prev_mag)
            return {tail.value(), false};
        tail.add(term);
        prev_mag = mag;
        ypow *= y2;
    }
    return {tail.value(), false};
}

std::mutex gamma_cache_mutex;
std::map<long, Real>& gamma_cache() {
    static std::map<long, Real> cache;
    return cache;
}

} // namespace

Real bernoulli_number(unsigned n, long precision) {
    return bernoulli_cache().get(n, precision);
}

Real log_gamma(const Real& x) {
    if (!x.is_finite() || x.sign() <= 0)
        throw DomainError("log_gamma requires x > 0");
    const long prec = x.precision();
    const long w = prec + 48;
    const Real xw = x.with_precision(w);
    const long m = stirling_shift(x, prec);
    const Real y = xw + m;

    Real eps = Real::pow2(-(prec + 24), 64);
    SeriesTail tail = stirling_lngamma_tail(y, eps, w);
    if (!tail.converged)
        throw InternalError("Stirling series for log_gamma failed to reach "
                            "the target accuracy; shift too small");

    Real half = Real::of(1L, w) / 2;
    Real ln2pi = log(Real::pi(w) * 2);
    Real value = (y - half) * log(y) - y + ln2pi / 2 + tail.value;

    // ln Gamma(x) = ln Gamma(x + m) - sum_{j<m} ln(x + j)
    CompensatedSum fold(w);
    for (long j = 0; j < m; ++j)
        fold.add(log(xw + j));
    value -= fold.value();
    return value.with_precision(prec);
}

Real digamma(const Real& x) {
    if (!x.is_finite() || x.sign() <= 0)
        throw DomainError("digamma requires x > 0");
    const long prec = x.precision();
    const long w = prec + 48;
    const Real xw = x.with_precision(w);
    const long m = stirling_shift(x, prec);
    const Real y = xw + m;

    Real eps = Real::pow2(-(prec + 24), 64);
    SeriesTail tail = stirling_digamma_tail(y, eps, w);
    if (!tail.converged)
        throw InternalError("Stirling series for digamma failed to reach "
                            "the target accuracy; shift too small");

    Real value = log(y) - 1L / (y * 2) - tail.value;

    // psi(x) = psi(x + m) - sum_{j<m} 1/(x + j)
    CompensatedSum fold(w);
    for (long j = 0; j < m; ++j)
        fold.add(1L / (xw + j));
    value -= fold.value();
    return value.with_precision(prec);
}

Real euler_gamma_stirling(long precision) {
    return -digamma(Real::of(1L, precision + 16)).with_precision(precision);
}

Real euler_gamma_bessel(long precision) {
    // Bessel-sum limit: with S = sum (n^k/k!)^2 H_k and I = sum (n^k/k!)^2,
    // S/I - ln n approaches gamma with error O(e^(-4n)).
    const long w = precision + 48;
    const long n = static_cast<long>(0.17329 * static_cast<double>(w)) + 4;
    const Real nr = Real::of(n, w);

    Real term = Real::of(1L, w); // (n^k/k!)^2
    Real h = Real::of(0L, w);    // H_k
    CompensatedSum s_sum(w), i_sum(w);
    i_sum.add(term);
    Real cutoff = Real::pow2(-(w + 8), 64);
    for (long k = 1; k <= 64 * n + 256; ++k) {
        Real f = nr / k;
        term *= f * f;
        h += Real::of(1L, w) / k;
        s_sum.add(term * h);
        i_sum.add(term);
        if (k > 2 * n && term < cutoff * i_sum.value())
            break;
    }
    Real value = s_sum.value() / i_sum.value() - log(nr);
    return value.with_precision(precision);
}

Real euler_gamma(long precision) {
    {
        std::lock_guard<std::mutex> lock(gamma_cache_mutex);
        auto it = gamma_cache().find(precision);
        if (it != gamma_cache().end())
            return it->second;
    }
    Real a = euler_gamma_stirling(precision);
    Real b = euler_gamma_bessel(precision);
    if (abs(a - b) > Real::pow2(-precision + 8, 64))
        throw InternalError("euler_gamma: independent schemes disagree at " +
                            std::to_string(precision) + " bits");
    std::lock_guard<std::mutex> lock(gamma_cache_mutex);
    auto [it, inserted] = gamma_cache().emplace(precision, b);
    (void)inserted;
    return it->second;
}

Real harmonic(const Real& x) {
    if (!x.is_finite() || !(x > Real::of(-1L, x.precision())))
        throw DomainError("harmonic requires x > -1");
    const long prec = x.precision();
    return digamma(x + 1) + euler_gamma(prec);
}

} // namespace newsum::oracles
