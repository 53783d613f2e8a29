#include "newsum/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "newsum/convexity.hpp"
#include "newsum/newton.hpp"
#include "newsum/oracles.hpp"
#include "newsum/sigma.hpp"

namespace newsum::verify {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string sci(const Real& v) { return sci(v.to_double()); }

class Criterion {
public:
    Criterion(int id, std::string name) : start_(Clock::now()) {
        result_.id = id;
        result_.name = std::move(name);
        result_.passed = true;
    }

    void check(bool ok, const std::string& line) {
        result_.lines.push_back(std::string(ok ? "  [pass] " : "  [FAIL] ") + line);
        if (!ok)
            result_.passed = false;
    }

    void note(const std::string& line) { result_.lines.push_back("  " + line); }

    CriterionResult finish() {
        result_.seconds = seconds_since(start_);
        return std::move(result_);
    }

private:
    CriterionResult result_;
    Clock::time_point start_;
};

// ---------------------------------------------------------------- newton --

CriterionResult c1_newton_recip_golden() {
    Criterion c(1, "newton-recip-golden: certified 1/x values");
    FuncHandle recip = registry_lookup("recip");
    const long prec = 256;
    const Real target_err = Real::of(1e-10, 64);

    struct Cell {
        double a, x;
        double eval_tol; // chosen per cell so the loose a-priori bound can
                         // certify within the term budget; the value check
                         // below stays at 1e-10 against the oracle
    };
    const Cell cells[] = {
        {1.0, 0.5, 1e-10},  {1.0, 2.5, 5e-8},  {1.0, 7.3, 1e-10},
        {2.5, 0.5, 1e-10},  {2.5, 2.5, 1e-10}, {2.5, 7.3, 1e-10},
    };

    for (const Cell& cell : cells) {
        auto t0 = Clock::now();
        std::string label = "a=" + sci(cell.a) + " x=" + sci(cell.x);
        try {
            Real a = Real::of(cell.a, prec);
            Real x = Real::of(cell.x, prec);
            NewtonExpansion e = expand(recip, a, 64, prec);
            EvalOptions opt;
            opt.tolerance = Real::of(cell.eval_tol, 64);
            opt.max_terms = 10000;
            opt.b = a - Real::of(0.4, prec);
            opt.q = 0;
            EvalReport r = newton_eval(e, x, opt);
            double dt = seconds_since(t0);
            Real err = abs(r.value - Real::of(1L, prec) / x);
            bool ok = (r.status == EvalStatus::converged_bounded ||
                       r.status == EvalStatus::finite_exact) &&
                      err <= target_err && r.terms_used <= 10000 && dt < 5.0;
            c.check(ok, label + " value=" + r.value.to_string(14) + " err=" + sci(err) +
                            " status=" + to_string(r.status) +
                            " terms=" + std::to_string(r.terms_used) +
                            " t=" + sci(dt) + "s");
        } catch (const Error& e) {
            c.check(false, label + " error: " + e.what());
        }
    }
    return c.finish();
}

CriterionResult c2_remainder_identity() {
    Criterion c(2, "remainder-identity: partial sum vs divided difference");
    const long prec = 256;
    const Real budget = Real::of(1e-28, 64);
    const char* names[] = {"recip", "log", "neg_exp"};
    std::mt19937_64 rng(0xC2);
    std::uniform_real_distribution<double> ua(0.6, 3.0);
    std::uniform_real_distribution<double> ux(0.25, 7.25);
    std::uniform_int_distribution<long> un(0, 20);

    auto t0 = Clock::now();
    Real worst = Real::of(0L, prec);
    int failures = 0;
    for (int i = 0; i < 50; ++i) {
        FuncHandle f = registry_lookup(names[i % 3]);
        double a = ua(rng);
        long n = un(rng);
        double x = 0;
        for (int attempt = 0; attempt < 100; ++attempt) {
            x = ux(rng);
            bool clear = true;
            for (long j = 0; j < n; ++j)
                if (std::abs(x - (a + static_cast<double>(j))) < 0.05)
                    clear = false;
            if (clear)
                break;
        }
        Real res = remainder_identity_residual(f, Real::of(a, prec), Real::of(x, prec),
                                               n, prec);
        worst = max(worst, res);
        if (!(res <= budget))
            ++failures;
    }
    double dt = seconds_since(t0);
    c.check(failures == 0 && dt < 10.0,
            "50 random (f, a, x, n<=20) over {recip, log, neg_exp}: worst residual=" +
                sci(worst) + " budget=1e-28 t=" + sci(dt) + "s");
    return c.finish();
}

CriterionResult c3_divergence_detection() {
    Criterion c(3, "divergence-detection: binomial series at c=2 vs c=0.5");
    const long prec = 256;

    {
        FuncHandle f = registry_lookup("power_base[c=2]");
        NewtonExpansion e = expand(f, Real::of(0L, prec), 40, prec);
        EvalOptions opt;
        opt.tolerance = Real::of(1e-10, 64);
        opt.max_terms = 1000;
        EvalReport r = newton_eval(e, Real::of(0.5, prec), opt);
        c.check(r.status == EvalStatus::diverged && r.terms_used <= 1000,
                "power_base[c=2] a=0 x=0.5: status=" + std::string(to_string(r.status)) +
                    " after " + std::to_string(r.terms_used) + " terms");
    }
    {
        FuncHandle f = registry_lookup("power_base[c=0.5]");
        NewtonExpansion e = expand(f, Real::of(0L, prec), 40, prec);
        EvalOptions opt;
        opt.tolerance = Real::of(1e-11, 64);
        opt.max_terms = 10000;
        Real x = Real::of(0.3, prec);
        EvalReport r = newton_eval(e, x, opt);
        Real oracle = exp(x * log(Real::of(1.5, prec)));
        Real err = abs(r.value - oracle);
        c.check((r.status == EvalStatus::converged_heuristic ||
                 r.status == EvalStatus::converged_bounded) &&
                    err <= Real::of(1e-10, 64),
                "power_base[c=0.5] a=0 x=0.3: value=" + r.value.to_string(14) +
                    " err=" + sci(err) + " status=" + to_string(r.status));
    }
    return c.finish();
}

CriterionResult c4_ratio_decay_slope() {
    Criterion c(4, "ratio-decay-slope: falling-factorial ratio exponents");
    std::vector<long> ns;
    for (int i = 0; i <= 32; ++i)
        ns.push_back(static_cast<long>(std::llround(100.0 * std::pow(10.0, i / 16.0))));

    struct Case {
        double x, expected;
    };
    for (const Case& k : {Case{2.0, -1.5}, Case{3.0, -2.5}}) {
        RatioTable t = ratio_table(Real::of(k.x, 128), Real::of(1L, 128),
                                   Real::of(0.5, 128), ns, 128);
        double slope = fit_log_slope(t, 100, 10000);
        c.check(std::abs(slope - k.expected) <= 0.1,
                "x=" + sci(k.x) + " a=1 b=0.5: fitted slope=" + sci(slope) +
                    " expected=" + sci(k.expected) + " +/- 0.1");
    }
    return c.finish();
}

// ----------------------------------------------------------------- sigma --

CriterionResult c5_sigma_log_gamma() {
    Criterion c(5, "sigma-log-gamma: indefinite sum of ln vs ln Gamma");
    FuncHandle logf = registry_lookup("log");
    const long prec = 128;
    SigmaOptions opt;
    opt.tolerance = Real::of(1e-6, 64);
    opt.n_max = 1L << 20;
    opt.precision = prec;

    auto t0 = Clock::now();
    for (double xv : {0.5, 1.5, 4.2}) {
        Real x = Real::of(xv, prec);
        SigmaResult r = sigma_eval(logf, x, opt);
        Real oracle = oracles::log_gamma(x);
        Real err = abs(r.value - oracle);
        std::string rate = r.empirical_rate ? sci(*r.empirical_rate) : "n/a";
        c.check(r.status == SigmaStatus::converged && r.p_used >= 2 &&
                    err <= Real::of(1e-6, 64),
                "x=" + sci(xv) + ": value=" + r.value.to_string(12) + " err=" + sci(err) +
                    " p=" + std::to_string(r.p_used) + " n=" + std::to_string(r.n_final) +
                    " measured rate=" + rate);
    }
    SigmaResult unit = sigma_eval(logf, Real::of(1L, prec), opt);
    c.check(abs(unit.value) <= Real::of(1e-5, 64),
            "normalization at x=1: |value|=" + sci(abs(unit.value)) + " <= 1e-5");
    double dt = seconds_since(t0);
    c.check(dt < 60.0, "total time " + sci(dt) + "s < 60s");
    return c.finish();
}

CriterionResult c6_sigma_digamma_stern() {
    Criterion c(6, "sigma-digamma-stern: sum of 1/x vs digamma, Stern form");
    FuncHandle recip = registry_lookup("recip");
    const long prec = 128;
    SigmaOptions opt;
    opt.tolerance = Real::of(1e-6, 64);
    opt.n_max = 1L << 20;
    opt.precision = prec;

    for (double xv : {1.5, 2.0, 3.5}) {
        Real x = Real::of(xv, prec);
        SigmaResult r = sigma_eval(recip, x, opt);
        Real oracle = oracles::digamma(x) + oracles::euler_gamma(prec);
        Real err = abs(r.value - oracle);
        c.check(r.status == SigmaStatus::converged && err <= Real::of(1e-6, 64),
                "x=" + sci(xv) + ": value=" + r.value.to_string(12) + " err=" + sci(err) +
                    " p=" + std::to_string(r.p_used) + " n=" + std::to_string(r.n_final));
    }
    {
        Real x = Real::of(3.5, prec);
        SternResult s = stern_series(x, Real::of(1e-6, 64), 10000, prec);
        Real oracle = oracles::digamma(x) + oracles::euler_gamma(prec);
        Real err = abs(s.value - oracle);
        c.check(s.converged && s.terms_used <= 10000 && err <= Real::of(1e-6, 64),
                "stern x=3.5: value=" + s.value.to_string(12) + " err=" + sci(err) +
                    " terms=" + std::to_string(s.terms_used));
    }
    return c.finish();
}

CriterionResult c7_hermite_coefficients() {
    Criterion c(7, "hermite-coefficients: Newton table of the computed sum of ln");
    const long prec = 128;
    FuncHandle logf = registry_lookup("log");

    FuncHandle sigma_log = FuncHandle::make(
        "sigma(log)", Interval::positive_reals(),
        [logf](const Real& x, long precision) {
            SigmaOptions o;
            o.p = 3;
            o.tolerance = Real::of(1e-11, 64);
            o.n_max = 1L << 20;
            o.precision = std::max<long>(precision, 128);
            SigmaResult r = sigma_eval(logf, x, o);
            if (r.status != SigmaStatus::converged)
                throw Error("sigma(log) did not converge at x = " + x.to_string(16));
            return r.value.with_precision(precision);
        });

    DiffTable computed = build_table(sigma_log, Real::of(1L, prec), 12, prec);
    DiffTable reference = build_table(logf, Real::of(1L, prec), 11, prec);

    Real worst = Real::of(0L, prec);
    for (long k = 1; k <= 12; ++k)
        worst = max(worst, abs(computed.values[static_cast<std::size_t>(k)] -
                               reference.values[static_cast<std::size_t>(k - 1)]));
    c.check(worst <= Real::of(1e-6, 64),
            "first 12 coefficients vs forward differences of ln at 1: worst "
            "deviation=" + sci(worst));
    c.check(abs(computed.values[0]) <= Real::of(1e-6, 64),
            "order-0 entry (the normalization) = " + sci(abs(computed.values[0])));
    return c.finish();
}

CriterionResult c8_well_posedness() {
    Criterion c(8, "well-posedness: |f_n^3 - f_n^1| for ln shrinks");
    std::vector<long> ns;
    for (long n = 1L << 8; n <= 1L << 16; n *= 2)
        ns.push_back(n);
    std::vector<Real> diffs = wellposedness_values(registry_lookup("log"), 1, 3,
                                                   Real::of(2.5, 128), ns, 128);
    bool decreasing = true;
    for (std::size_t i = 1; i < diffs.size(); ++i)
        if (!(diffs[i] < diffs[i - 1]))
            decreasing = false;
    c.check(decreasing, "x=2.5, n in {2^8..2^16}: monotonically decreasing, first=" +
                            sci(diffs.front()) + " last=" + sci(diffs.back()));
    c.check(diffs.back() < Real::of(1e-4, 64),
            "final difference " + sci(diffs.back()) + " < 1e-4");
    return c.finish();
}

CriterionResult c10_difference_equation() {
    Criterion c(10, "difference-equation: Sigma g(x+1) - Sigma g(x) = g(x)");
    SigmaOptions opt;
    opt.tolerance = Real::of(1e-6, 64);
    opt.n_max = 1L << 20;
    opt.precision = 128;
    const Real budget = Real::of(4e-6, 64);

    for (const char* name : {"log", "recip", "log_over_x_neg"}) {
        FuncHandle g = registry_lookup(name);
        for (double xv : {1.5, 2.0, 3.3}) {
            Real res = difference_equation_residual(g, Real::of(xv, 128), opt);
            c.check(res < budget, std::string(name) + " x=" + sci(xv) +
                                      ": residual=" + sci(res) + " < 4e-6");
        }
    }
    return c.finish();
}

// -------------------------------------------------------------- classify --

CriterionResult c9_classifier_signatures() {
    Criterion c(9, "classifier-signatures: recip/log/sin_pi/neg_exp");
    auto t0 = Clock::now();
    Interval window = Interval::bounded(Real::of(1L, 128), Real::of(50L, 128));
    ClassifyOptions opt;
    opt.samples = 200;
    opt.precision = 128;
    opt.seed = 12345;
    opt.tolerance = Real::of(1e-20, 64);

    {
        ConvexitySignature s = classify(registry_lookup("recip"), 8, window, opt);
        c.check(s.cm_plus_p.has_value() && *s.cm_plus_p == 0,
                "recip: completely monotone signature through order 8 (class index " +
                    (s.cm_plus_p ? std::to_string(*s.cm_plus_p) : std::string("none")) +
                    ")");
    }
    {
        ConvexitySignature s = classify(registry_lookup("log"), 8, window, opt);
        c.check(s.cm_plus_p.has_value() && *s.cm_plus_p == 1,
                "log: derivative-CM pattern (class index " +
                    (s.cm_plus_p ? std::to_string(*s.cm_plus_p) : std::string("none")) +
                    ")");
    }
    {
        ConvexitySignature s = classify(registry_lookup("sin_pi"), 3, window, opt);
        bool all_mixed = true;
        for (long p = 0; p <= 3; ++p)
            if (s.sign_at(p) != OrderSign::mixed)
                all_mixed = false;
        c.check(all_mixed && !s.cm_plus_p && !s.cm_minus_p && !s.am_plus_p &&
                    !s.am_minus_p && !s.rm_p,
                "sin_pi: mixed at every order >= 0, no monotonicity label");
    }
    {
        ConvexitySignature s = classify(registry_lookup("neg_exp"), 8, window, opt);
        c.check(s.cm_plus_p.has_value() && *s.cm_plus_p == 0,
                "neg_exp: completely monotone signature (class index " +
                    (s.cm_plus_p ? std::to_string(*s.cm_plus_p) : std::string("none")) +
                    ")");
    }
    double dt = seconds_since(t0);
    c.check(dt < 30.0, "total time " + sci(dt) + "s < 30s (fixed seed 12345)");
    return c.finish();
}

// ---------------------------------------------------------------- oracle --

CriterionResult c11_oracle_self_tests() {
    Criterion c(11, "oracle-self-tests: recurrences, reflection, Euler gamma");
    const long prec = 128;
    const Real budget = Real::pow2(-prec + 20, 64);

    std::mt19937_64 rng(0xC11);
    std::uniform_real_distribution<double> ux(1e-3, 50.0);
    Real worst_lg = Real::of(0L, prec), worst_psi = Real::of(0L, prec);
    for (int i = 0; i < 100; ++i) {
        Real x = Real::of(ux(rng), prec);
        worst_lg = max(worst_lg, abs(oracles::log_gamma(x + 1) - oracles::log_gamma(x) -
                                     log(x)));
        worst_psi = max(worst_psi, abs(oracles::digamma(x + 1) - oracles::digamma(x) -
                                       Real::of(1L, prec) / x));
    }
    c.check(worst_lg <= budget,
            "log_gamma recurrence on 100 random x in (0,50]: worst=" + sci(worst_lg));
    c.check(worst_psi <= budget,
            "digamma recurrence on 100 random x in (0,50]: worst=" + sci(worst_psi));

    Real half = Real::of(0.5, prec);
    Real refl = abs(oracles::log_gamma(half) - log(Real::pi(prec)) / 2);
    c.check(refl <= budget, "log_gamma(1/2) = ln(pi)/2: deviation=" + sci(refl));

    Real gamma = oracles::euler_gamma(prec);
    Real psi1 = abs(oracles::digamma(Real::of(1L, prec)) + gamma);
    c.check(psi1 <= budget, "digamma(1) = -gamma: deviation=" + sci(psi1));

    Real a = oracles::euler_gamma_stirling(prec);
    Real b = oracles::euler_gamma_bessel(prec);
    Real agree = abs(a - b);
    c.check(agree <= Real::of(1e-30, 64),
            "independent gamma schemes agree to >= 30 digits: |diff|=" + sci(agree));
    return c.finish();
}

} // namespace

std::vector<std::string> suite_names() {
    return {"all", "newton", "sigma", "classify", "oracle"};
}

bool is_suite(const std::string& name) {
    for (const auto& s : suite_names())
        if (s == name)
            return true;
    return false;
}

std::vector<CriterionResult> run_suite(const std::string& suite, const LineSink& sink) {
    if (!is_suite(suite))
        throw InvalidArgument("unknown suite \"" + suite + "\" (all, newton, sigma, "
                              "classify, oracle)");

    std::vector<CriterionResult (*)()> runners;
    auto want = [&](const char* s) { return suite == "all" || suite == s; };
    if (want("newton")) {
        runners.push_back(&c1_newton_recip_golden);
        runners.push_back(&c2_remainder_identity);
        runners.push_back(&c3_divergence_detection);
        runners.push_back(&c4_ratio_decay_slope);
    }
    if (want("sigma")) {
        runners.push_back(&c5_sigma_log_gamma);
        runners.push_back(&c6_sigma_digamma_stern);
        runners.push_back(&c7_hermite_coefficients);
        runners.push_back(&c8_well_posedness);
        runners.push_back(&c10_difference_equation);
    }
    if (want("classify"))
        runners.push_back(&c9_classifier_signatures);
    if (want("oracle"))
        runners.push_back(&c11_oracle_self_tests);

    std::vector<CriterionResult> results;
    for (auto* run : runners) {
        CriterionResult r = run();
        if (sink) {
            for (const std::string& line : r.lines)
                sink(line);
            sink(std::string(r.passed ? "[PASS] " : "[FAIL] ") + "criterion " +
                 std::to_string(r.id) + " " + r.name + " (" + sci(r.seconds) + "s)");
        }
        results.push_back(std::move(r));
    }
    return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.passed)
            return false;
    return true;
}

} // namespace newsum::verify
