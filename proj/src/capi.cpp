#include "newsum/newsum.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <string>

#include <json.hpp>

#include "newsum/convexity.hpp"
#include "newsum/newton.hpp"
#include "newsum/oracles.hpp"
#include "newsum/sigma.hpp"
#include "newsum/verify.hpp"

using nlohmann::json;

struct newsum_fn {
    newsum::FuncHandle handle;
};

struct newsum_expansion {
    newsum::NewtonExpansion expansion;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out)
        std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// Runs the body, translating the exception taxonomy onto status codes.
template <typename Fn>
newsum_status guarded(Fn&& body) {
    try {
        body();
        return NEWSUM_OK;
    } catch (const newsum::ParseError& e) {
        g_last_error = e.what();
        return NEWSUM_ERR_PARSE;
    } catch (const newsum::NotFoundError& e) {
        g_last_error = e.what();
        return NEWSUM_ERR_PARSE;
    } catch (const newsum::DomainError& e) {
        g_last_error = e.what();
        return NEWSUM_ERR_DOMAIN;
    } catch (const newsum::InvalidArgument& e) {
        g_last_error = e.what();
        return NEWSUM_ERR_INVALID;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return NEWSUM_ERR_INTERNAL;
    }
}

newsum::Real parse_real(const char* text, long precision, const char* what) {
    if (!text)
        throw newsum::InvalidArgument(std::string(what) + " must not be null");
    return newsum::Real::parse(text, precision);
}

void require(bool ok, const char* message) {
    if (!ok)
        throw newsum::InvalidArgument(message);
}

} // namespace

extern "C" {

const char* newsum_version(void) { return "1.0.0"; }

const char* newsum_last_error(void) { return g_last_error.c_str(); }

void newsum_string_free(char* s) { std::free(s); }

newsum_status newsum_fn_lookup(const char* spec, newsum_fn** out) {
    return guarded([&] {
        require(spec && out, "lookup needs a name and an output pointer");
        auto handle = newsum::registry_lookup(spec);
        *out = new newsum_fn{std::move(handle)};
    });
}

newsum_status newsum_fn_from_expr(const char* expr, newsum_fn** out) {
    return guarded([&] {
        require(expr && out, "from_expr needs an expression and an output pointer");
        auto ast = newsum::parse_expr(expr);
        *out = new newsum_fn{newsum::handle_from_expr(
            ast, newsum::Interval::positive_reals())};
    });
}

void newsum_fn_free(newsum_fn* fn) { delete fn; }

const char* newsum_fn_name(const newsum_fn* fn) {
    return fn ? fn->handle.name().c_str() : "";
}

newsum_status newsum_fn_eval(const newsum_fn* fn, const char* x, long precision,
                             char** out_value) {
    return guarded([&] {
        require(fn && out_value, "fn_eval needs a handle and an output pointer");
        newsum::Real v = fn->handle.eval(parse_real(x, precision, "x"), precision);
        *out_value = dup_string(v.to_string());
    });
}

newsum_status newsum_expand(const newsum_fn* fn, const char* anchor, long order,
                            long precision, newsum_expansion** out) {
    return guarded([&] {
        require(fn && out, "expand needs a handle and an output pointer");
        auto e = newsum::expand(fn->handle, parse_real(anchor, precision, "anchor"),
                                order, precision);
        *out = new newsum_expansion{std::move(e)};
    });
}

void newsum_expansion_free(newsum_expansion* e) { delete e; }

long newsum_expansion_order(const newsum_expansion* e) {
    return e ? e->expansion.table.max_order : -1;
}

newsum_status newsum_expansion_coefficient(const newsum_expansion* e, long k,
                                           char** out_value) {
    return guarded([&] {
        require(e && out_value, "coefficient needs an expansion and an output pointer");
        *out_value = dup_string(
            e->expansion.coefficient(k).with_precision(e->expansion.precision).to_string());
    });
}

int newsum_expansion_zero_table(const newsum_expansion* e) {
    return e && e->expansion.identically_zero_table ? 1 : 0;
}

newsum_status newsum_eval(const newsum_expansion* e, const char* x,
                          const char* tolerance, long max_terms, const char* b,
                          long q, newsum_eval_report* out) {
    return guarded([&] {
        require(e && out, "eval needs an expansion and an output struct");
        require((b != nullptr) == (q >= 0),
                "certificate needs both b and q >= 0, or neither");
        std::memset(out, 0, sizeof *out);
        const long prec = e->expansion.precision;
        newsum::EvalOptions opt;
        opt.tolerance = parse_real(tolerance, 64, "tolerance");
        opt.max_terms = max_terms;
        if (b) {
            opt.b = parse_real(b, prec, "b");
            opt.q = q;
        }
        newsum::EvalReport r =
            newsum::newton_eval(e->expansion, parse_real(x, prec, "x"), opt);
        out->value = dup_string(r.value.to_string());
        out->terms_used = r.terms_used;
        out->identically_zero_series = r.identically_zero_series ? 1 : 0;
        out->status = newsum::to_string(r.status);
        if (r.remainder_bound)
            out->remainder_bound = dup_string(r.remainder_bound->to_string());
        if (r.b_used)
            out->b_used = dup_string(r.b_used->to_string());
    });
}

void newsum_eval_report_clear(newsum_eval_report* r) {
    if (!r)
        return;
    std::free(r->value);
    std::free(r->remainder_bound);
    std::free(r->b_used);
    std::memset(r, 0, sizeof *r);
}

newsum_status newsum_sigma(const newsum_fn* fn, const char* x, long p,
                           const char* tolerance, long n_max, long precision,
                           int extrapolate, newsum_sigma_result* out) {
    return guarded([&] {
        require(fn && out, "sigma needs a handle and an output struct");
        std::memset(out, 0, sizeof *out);
        newsum::SigmaOptions opt;
        if (p >= 0)
            opt.p = p;
        opt.tolerance = parse_real(tolerance, 64, "tolerance");
        opt.n_max = n_max;
        opt.precision = precision;
        opt.extrapolate = extrapolate != 0;
        newsum::SigmaResult r =
            newsum::sigma_eval(fn->handle, parse_real(x, precision, "x"), opt);
        out->value = dup_string(r.value.is_nan() ? "nan" : r.value.to_string());
        out->successive_delta =
            dup_string(r.successive_delta.is_nan() ? "nan"
                                                   : r.successive_delta.to_string());
        out->p_used = r.p_used;
        out->n_final = r.n_final;
        out->empirical_rate =
            r.empirical_rate ? *r.empirical_rate
                             : std::numeric_limits<double>::quiet_NaN();
        out->status = newsum::to_string(r.status);
        if (r.richardson)
            out->richardson = dup_string(r.richardson->to_string());
        if (r.normalization_residual)
            out->normalization_residual =
                dup_string(r.normalization_residual->to_string());
    });
}

void newsum_sigma_result_clear(newsum_sigma_result* r) {
    if (!r)
        return;
    std::free(r->value);
    std::free(r->successive_delta);
    std::free(r->richardson);
    std::free(r->normalization_residual);
    std::memset(r, 0, sizeof *r);
}

newsum_status newsum_diffeq_residual(const newsum_fn* fn, const char* x,
                                     const char* tolerance, long n_max,
                                     long precision, char** out_residual) {
    return guarded([&] {
        require(fn && out_residual, "diffeq needs a handle and an output pointer");
        newsum::SigmaOptions opt;
        opt.tolerance = parse_real(tolerance, 64, "tolerance");
        opt.n_max = n_max;
        opt.precision = precision;
        newsum::Real res = newsum::difference_equation_residual(
            fn->handle, parse_real(x, precision, "x"), opt);
        *out_residual = dup_string(res.to_string());
    });
}

newsum_status newsum_stern(const char* x, const char* tolerance, long max_terms,
                           long precision, char** out_value, long* out_terms,
                           int* out_converged) {
    return guarded([&] {
        require(out_value, "stern needs an output pointer");
        newsum::SternResult r =
            newsum::stern_series(parse_real(x, precision, "x"),
                                 parse_real(tolerance, 64, "tolerance"), max_terms,
                                 precision);
        *out_value = dup_string(r.value.to_string());
        if (out_terms)
            *out_terms = r.terms_used;
        if (out_converged)
            *out_converged = r.converged ? 1 : 0;
    });
}

newsum_status newsum_classify(const newsum_fn* fn, long orders,
                              const char* window_lo, const char* window_hi,
                              long samples, const char* tolerance, long precision,
                              uint64_t seed, char** out_json) {
    return guarded([&] {
        require(fn && out_json, "classify needs a handle and an output pointer");
        newsum::Interval window = newsum::Interval::bounded(
            parse_real(window_lo, precision, "window_lo"),
            parse_real(window_hi, precision, "window_hi"));
        newsum::ClassifyOptions opt;
        opt.samples = samples;
        opt.precision = precision;
        opt.seed = seed;
        if (tolerance)
            opt.tolerance = parse_real(tolerance, 64, "tolerance");
        newsum::ConvexitySignature sig =
            newsum::classify(fn->handle, orders, window, opt);

        json per_order = json::array();
        for (long p = -1; p <= sig.orders_tested; ++p)
            per_order.push_back({{"p", p}, {"sign", newsum::to_string(sig.sign_at(p))}});
        json dp = json::array();
        for (const auto& rep : sig.dp) {
            json samples_json = json::array();
            for (const auto& s : rep.samples)
                samples_json.push_back({{"n", s.n}, {"magnitude", s.magnitude}});
            dp.push_back({{"p", rep.order},
                          {"verdict", newsum::to_string(rep.verdict)},
                          {"threshold", rep.threshold},
                          {"samples", samples_json}});
        }
        json labels;
        auto put = [&labels](const char* key, const std::optional<long>& v) {
            if (v)
                labels[key] = *v;
            else
                labels[key] = nullptr;
        };
        put("cm_plus_p", sig.cm_plus_p);
        put("cm_minus_p", sig.cm_minus_p);
        put("am_plus_p", sig.am_plus_p);
        put("am_minus_p", sig.am_minus_p);
        put("rm_p", sig.rm_p);

        json doc = {{"function", fn->handle.name()},
                    {"orders_tested", sig.orders_tested},
                    {"window",
                     {{"lo", sig.window.lower()->to_string(17)},
                      {"hi", sig.window.upper()->to_string(17)}}},
                    {"samples_per_order", sig.samples_per_order},
                    {"tolerance", sig.tolerance},
                    {"seed", sig.seed},
                    {"precision", sig.precision},
                    {"eventual_evidence", sig.eventual_evidence},
                    {"per_order", per_order},
                    {"dp_evidence", dp},
                    {"labels", labels}};
        *out_json = dup_string(doc.dump());
    });
}

newsum_status newsum_ratio_table(const char* x, const char* a, const char* b,
                                 const long* n_values, size_t count, long precision,
                                 double* out_log_magnitude, int* out_sign) {
    return guarded([&] {
        require(n_values && out_log_magnitude && out_sign,
                "ratio_table needs n values and output arrays");
        std::vector<long> ns(n_values, n_values + count);
        newsum::RatioTable t = newsum::ratio_table(
            parse_real(x, precision, "x"), parse_real(a, precision, "a"),
            parse_real(b, precision, "b"), ns, precision);
        // ratio_table sorts and deduplicates; answer in caller order
        for (size_t i = 0; i < count; ++i) {
            for (const auto& row : t.rows) {
                if (row.n == n_values[i]) {
                    out_log_magnitude[i] = row.log_magnitude;
                    out_sign[i] = row.sign_or_zero;
                    break;
                }
            }
        }
    });
}

newsum_status newsum_ratio_slope(const char* x, const char* a, const char* b,
                                 long n_lo, long n_hi, long precision,
                                 double* out_slope) {
    return guarded([&] {
        require(out_slope, "ratio_slope needs an output pointer");
        require(n_lo >= 1 && n_hi > n_lo, "ratio_slope needs 1 <= n_lo < n_hi");
        std::vector<long> ns;
        const double steps = 32;
        for (int i = 0; i <= steps; ++i) {
            double t = static_cast<double>(i) / steps;
            ns.push_back(static_cast<long>(std::llround(
                std::exp(std::log(static_cast<double>(n_lo)) * (1 - t) +
                         std::log(static_cast<double>(n_hi)) * t))));
        }
        newsum::RatioTable table = newsum::ratio_table(
            parse_real(x, precision, "x"), parse_real(a, precision, "a"),
            parse_real(b, precision, "b"), ns, precision);
        *out_slope = newsum::fit_log_slope(table, n_lo, n_hi);
    });
}

newsum_status newsum_log_gamma(const char* x, long precision, char** out) {
    return guarded([&] {
        require(out, "log_gamma needs an output pointer");
        *out = dup_string(newsum::oracles::log_gamma(parse_real(x, precision, "x"))
                              .to_string());
    });
}

newsum_status newsum_digamma(const char* x, long precision, char** out) {
    return guarded([&] {
        require(out, "digamma needs an output pointer");
        *out = dup_string(newsum::oracles::digamma(parse_real(x, precision, "x"))
                              .to_string());
    });
}

newsum_status newsum_harmonic(const char* x, long precision, char** out) {
    return guarded([&] {
        require(out, "harmonic needs an output pointer");
        *out = dup_string(newsum::oracles::harmonic(parse_real(x, precision, "x"))
                              .to_string());
    });
}

newsum_status newsum_euler_gamma(long precision, char** out) {
    return guarded([&] {
        require(out, "euler_gamma needs an output pointer");
        *out = dup_string(newsum::oracles::euler_gamma(precision).to_string());
    });
}

newsum_status newsum_verify(const char* suite, newsum_line_callback cb, void* user,
                            int* out_failures) {
    return guarded([&] {
        require(suite, "verify needs a suite name");
        auto results = newsum::verify::run_suite(
            suite, cb ? newsum::verify::LineSink([cb, user](const std::string& line) {
                cb(line.c_str(), user);
            })
                      : newsum::verify::LineSink());
        if (out_failures) {
            int failures = 0;
            for (const auto& r : results)
                if (!r.passed)
                    ++failures;
            *out_failures = failures;
        }
    });
}

} // extern "C"
