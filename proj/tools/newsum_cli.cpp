// Command-line surface over the C API: expand | eval | sigma | classify |
// ratio | verify. Results go to stdout (text, json, or csv); diagnostics go
// to stderr. Exit codes: 0 success or mathematical finding, 2 usage, 3
// domain/evaluation error.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "newsum/newsum.h"

using nlohmann::json;

namespace {

struct CommonOptions {
    long precision = 128;
    std::string format = "text";
    std::uint64_t seed = 12345;
};

struct FnSpec {
    std::string fn;
    std::string expr;
};

int fail_with(newsum_status status) {
    std::cerr << "error: " << newsum_last_error() << "\n";
    switch (status) {
    case NEWSUM_ERR_PARSE:
    case NEWSUM_ERR_INVALID:
        return 2;
    default:
        return 3;
    }
}

using FnPtr = std::unique_ptr<newsum_fn, decltype(&newsum_fn_free)>;

int open_function(const FnSpec& spec, FnPtr& out) {
    newsum_fn* raw = nullptr;
    newsum_status st;
    if (!spec.fn.empty())
        st = newsum_fn_lookup(spec.fn.c_str(), &raw);
    else
        st = newsum_fn_from_expr(spec.expr.c_str(), &raw);
    if (st != NEWSUM_OK)
        return fail_with(st);
    out = FnPtr(raw, &newsum_fn_free);
    return 0;
}

std::string take_string(char* s) {
    std::string out = s ? s : "";
    newsum_string_free(s);
    return out;
}

json base_record(const std::string& command, const CommonOptions& common,
                 json inputs) {
    return json{{"command", command},
                {"tool_version", newsum_version()},
                {"precision", common.precision},
                {"seed", common.seed},
                {"inputs", std::move(inputs)}};
}

void emit(const json& record) { std::cout << record.dump(2) << "\n"; }

// "C(x-a, k)" with the anchor folded in
std::string binomial_symbol(const std::string& anchor) {
    double a = 0;
    try {
        a = std::stod(anchor);
    } catch (...) {
        return "C(x-" + anchor + ",k)";
    }
    if (a == 0)
        return "C(x,k)";
    if (a < 0)
        return "C(x+" + anchor.substr(anchor.find('-') == 0 ? 1 : 0) + ",k)";
    return "C(x-" + anchor + ",k)";
}

// --------------------------------------------------------------- expand --

int run_expand(const CommonOptions& common, const FnSpec& spec,
               const std::string& anchor, long terms) {
    FnPtr fn(nullptr, &newsum_fn_free);
    if (int rc = open_function(spec, fn))
        return rc;

    newsum_expansion* raw = nullptr;
    newsum_status st = newsum_expand(fn.get(), anchor.c_str(), terms,
                                     common.precision, &raw);
    if (st != NEWSUM_OK)
        return fail_with(st);
    std::unique_ptr<newsum_expansion, decltype(&newsum_expansion_free)> expansion(
        raw, &newsum_expansion_free);

    std::vector<std::string> coeffs;
    for (long k = 0; k <= terms; ++k) {
        char* v = nullptr;
        st = newsum_expansion_coefficient(expansion.get(), k, &v);
        if (st != NEWSUM_OK)
            return fail_with(st);
        coeffs.push_back(take_string(v));
    }
    const bool zero_table = newsum_expansion_zero_table(expansion.get()) != 0;
    const std::string symbol = binomial_symbol(anchor);

    if (common.format == "csv") {
        std::cout << "k,delta,binomial\n";
        for (long k = 0; k <= terms; ++k)
            std::cout << k << "," << coeffs[static_cast<std::size_t>(k)] << "," << symbol
                      << "\n";
    } else if (common.format == "json") {
        json rows = json::array();
        for (long k = 0; k <= terms; ++k)
            rows.push_back({{"k", k}, {"delta", coeffs[static_cast<std::size_t>(k)]}});
        json rec = base_record("expand", common,
                               {{"fn", newsum_fn_name(fn.get())},
                                {"anchor", anchor},
                                {"terms", terms}});
        rec["status"] = "ok";
        rec["result"] = {{"coefficients", rows},
                         {"binomial", symbol},
                         {"zero_table", zero_table}};
        emit(rec);
    } else {
        std::cout << "Newton coefficients of " << newsum_fn_name(fn.get())
                  << " at anchor " << anchor << " (terms " << symbol << " * delta):\n";
        for (long k = 0; k <= terms; ++k)
            std::cout << "  k=" << k << "  delta=" << coeffs[static_cast<std::size_t>(k)]
                      << "\n";
        if (zero_table)
            std::cout << "  note: every coefficient is numerically zero; the series "
                         "does not represent the function away from the anchor\n";
    }
    return 0;
}

// ----------------------------------------------------------------- eval --

int run_eval(const CommonOptions& common, const FnSpec& spec, const std::string& anchor,
             long terms, const std::string& x, const std::string& tol, long max_terms,
             const std::string& b, long q) {
    FnPtr fn(nullptr, &newsum_fn_free);
    if (int rc = open_function(spec, fn))
        return rc;

    newsum_expansion* raw = nullptr;
    newsum_status st =
        newsum_expand(fn.get(), anchor.c_str(), terms, common.precision, &raw);
    if (st != NEWSUM_OK)
        return fail_with(st);
    std::unique_ptr<newsum_expansion, decltype(&newsum_expansion_free)> expansion(
        raw, &newsum_expansion_free);

    newsum_eval_report report;
    st = newsum_eval(expansion.get(), x.c_str(), tol.c_str(), max_terms,
                     b.empty() ? nullptr : b.c_str(), b.empty() ? -1 : q, &report);
    if (st != NEWSUM_OK)
        return fail_with(st);

    std::string value = report.value ? report.value : "";
    std::string bound = report.remainder_bound ? report.remainder_bound : "";
    std::string b_used = report.b_used ? report.b_used : "";
    std::string status = report.status;
    long used = report.terms_used;
    bool zero_series = report.identically_zero_series != 0;
    newsum_eval_report_clear(&report);

    if (common.format == "csv") {
        std::cout << "value,status,terms_used,remainder_bound,b_used,identically_zero_"
                     "series\n";
        std::cout << value << "," << status << "," << used << "," << bound << ","
                  << b_used << "," << (zero_series ? 1 : 0) << "\n";
    } else if (common.format == "json") {
        json rec = base_record("eval", common, {{"fn", newsum_fn_name(fn.get())},
                                                {"anchor", anchor},
                                                {"terms", terms},
                                                {"x", x},
                                                {"tol", tol},
                                                {"max_terms", max_terms},
                                                {"b", b},
                                                {"q", b.empty() ? -1 : q}});
        rec["status"] = status;
        json result = {{"value", value},
                       {"terms_used", used},
                       {"identically_zero_series", zero_series}};
        if (!bound.empty())
            result["remainder_bound"] = bound;
        if (!b_used.empty())
            result["b_used"] = b_used;
        rec["result"] = result;
        emit(rec);
    } else {
        std::cout << "value  = " << value << "\n";
        std::cout << "status = " << status << " (terms used: " << used << ")\n";
        if (!bound.empty())
            std::cout << "remainder bound = " << bound << " (b = " << b_used << ")\n";
        if (zero_series)
            std::cout << "note: identically zero series; the sum is not f(x)\n";
    }
    return 0;
}

// ---------------------------------------------------------------- sigma --

int run_sigma(const CommonOptions& common, const FnSpec& spec, const std::string& x,
              long p, const std::string& tol, long max_n, bool extrapolate,
              bool diffeq) {
    FnPtr fn(nullptr, &newsum_fn_free);
    if (int rc = open_function(spec, fn))
        return rc;

    newsum_sigma_result result;
    newsum_status st = newsum_sigma(fn.get(), x.c_str(), p, tol.c_str(), max_n,
                                    common.precision, extrapolate ? 1 : 0, &result);
    if (st != NEWSUM_OK)
        return fail_with(st);

    std::string value = result.value ? result.value : "";
    std::string delta = result.successive_delta ? result.successive_delta : "";
    std::string richardson = result.richardson ? result.richardson : "";
    std::string norm = result.normalization_residual ? result.normalization_residual : "";
    std::string status = result.status;
    long p_used = result.p_used;
    long n_final = result.n_final;
    double rate = result.empirical_rate;
    newsum_sigma_result_clear(&result);

    std::string residual;
    if (diffeq && status == std::string("converged")) {
        char* res = nullptr;
        st = newsum_diffeq_residual(fn.get(), x.c_str(), tol.c_str(), max_n,
                                    common.precision, &res);
        if (st != NEWSUM_OK)
            return fail_with(st);
        residual = take_string(res);
    }

    if (common.format == "csv") {
        std::cout << "value,p_used,n_final,successive_delta,status,richardson,"
                     "normalization_residual,diffeq_residual\n";
        std::cout << value << "," << p_used << "," << n_final << "," << delta << ","
                  << status << "," << richardson << "," << norm << "," << residual
                  << "\n";
    } else if (common.format == "json") {
        json rec = base_record("sigma", common, {{"fn", newsum_fn_name(fn.get())},
                                                 {"x", x},
                                                 {"p", p},
                                                 {"tol", tol},
                                                 {"max_n", max_n},
                                                 {"extrapolate", extrapolate}});
        rec["status"] = status;
        json result_json = {{"value", value},
                            {"p_used", p_used},
                            {"n_final", n_final},
                            {"successive_delta", delta}};
        if (!richardson.empty())
            result_json["richardson"] = richardson;
        if (!norm.empty())
            result_json["normalization_residual"] = norm;
        if (!residual.empty())
            result_json["diffeq_residual"] = residual;
        if (!std::isnan(rate))
            result_json["empirical_rate"] = rate;
        rec["result"] = result_json;
        emit(rec);
    } else {
        std::cout << "value  = " << value << "\n";
        std::cout << "status = " << status << " (p = " << p_used << ", n = " << n_final
                  << ", last delta = " << delta << ")\n";
        if (!std::isnan(rate))
            std::cout << "measured rate ~ n^-" << rate << "\n";
        if (!richardson.empty())
            std::cout << "richardson = " << richardson << " (reported only)\n";
        if (!norm.empty())
            std::cout << "normalization |f_n(1)| = " << norm << "\n";
        if (!residual.empty())
            std::cout << "difference-equation residual = " << residual << "\n";
    }
    return 0;
}

// -------------------------------------------------------------- classify --

int run_classify(const CommonOptions& common, const FnSpec& spec, long orders,
                 const std::string& grid, const std::string& tol) {
    FnPtr fn(nullptr, &newsum_fn_free);
    if (int rc = open_function(spec, fn))
        return rc;

    auto c1 = grid.find(':');
    auto c2 = grid.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
        std::cerr << "error: --grid wants START:END:COUNT\n";
        return 2;
    }
    std::string lo = grid.substr(0, c1);
    std::string hi = grid.substr(c1 + 1, c2 - c1 - 1);
    long samples = 0;
    try {
        samples = std::stol(grid.substr(c2 + 1));
    } catch (...) {
        std::cerr << "error: --grid COUNT must be an integer\n";
        return 2;
    }

    char* raw = nullptr;
    newsum_status st = newsum_classify(fn.get(), orders, lo.c_str(), hi.c_str(),
                                       samples, tol.empty() ? nullptr : tol.c_str(),
                                       common.precision, common.seed, &raw);
    if (st != NEWSUM_OK)
        return fail_with(st);
    json sig = json::parse(take_string(raw));

    if (common.format == "csv") {
        std::cout << "p,sign,dp_verdict\n";
        for (const auto& row : sig["per_order"]) {
            long p = row["p"].get<long>();
            std::string dp;
            for (const auto& d : sig["dp_evidence"])
                if (d["p"].get<long>() == p)
                    dp = d["verdict"].get<std::string>();
            std::cout << p << "," << row["sign"].get<std::string>() << "," << dp << "\n";
        }
    } else if (common.format == "json") {
        json rec = base_record("classify", common, {{"fn", newsum_fn_name(fn.get())},
                                                    {"orders", orders},
                                                    {"grid", grid},
                                                    {"tol", tol}});
        rec["status"] = "ok";
        rec["result"] = sig;
        emit(rec);
    } else {
        std::cout << "signature of " << sig["function"].get<std::string>() << " on ["
                  << lo << ", " << hi << "], " << samples << " samples per order"
                  << (sig["eventual_evidence"].get<bool>()
                          ? " (evidence for the eventual classes)"
                          : "")
                  << ":\n";
        for (const auto& row : sig["per_order"])
            std::cout << "  p=" << row["p"].get<long>() << "  "
                      << row["sign"].get<std::string>() << "\n";
        const json& labels = sig["labels"];
        auto show = [&](const char* key, const std::string& text) {
            if (!labels[key].is_null())
                std::cout << "  " << text << " from derivative order "
                          << labels[key].get<long>() << "\n";
        };
        show("cm_plus_p", "completely monotone (+)");
        show("cm_minus_p", "completely monotone (-)");
        show("am_plus_p", "absolutely monotone (+)");
        show("am_minus_p", "absolutely monotone (-)");
        show("rm_p", "regularly monotone");
        bool any = false;
        for (const char* key : {"cm_plus_p", "cm_minus_p", "am_plus_p", "am_minus_p",
                                "rm_p"})
            if (!labels[key].is_null())
                any = true;
        if (!any)
            std::cout << "  no monotonicity label on this window\n";
    }
    return 0;
}

// ---------------------------------------------------------------- ratio --

int run_ratio(const CommonOptions& common, const std::string& x, const std::string& a,
              const std::string& b, long n_max, long points) {
    std::vector<long> ns;
    for (long i = 0; i < points; ++i) {
        double t = points == 1 ? 1.0 : static_cast<double>(i) / (points - 1);
        long n = static_cast<long>(std::llround(std::pow(static_cast<double>(n_max), t)));
        if (n >= 1 && (ns.empty() || n != ns.back()))
            ns.push_back(n);
    }

    std::vector<double> logs(ns.size());
    std::vector<int> signs(ns.size());
    newsum_status st = newsum_ratio_table(x.c_str(), a.c_str(), b.c_str(), ns.data(),
                                          ns.size(), common.precision, logs.data(),
                                          signs.data());
    if (st != NEWSUM_OK)
        return fail_with(st);

    std::optional<double> slope;
    long fit_lo = std::max<long>(10, n_max / 100);
    if (n_max > fit_lo) {
        double s = 0;
        st = newsum_ratio_slope(x.c_str(), a.c_str(), b.c_str(), fit_lo, n_max,
                                common.precision, &s);
        if (st == NEWSUM_OK)
            slope = s;
    }

    if (common.format == "csv") {
        std::cout << "n,log_ratio,sign\n";
        for (std::size_t i = 0; i < ns.size(); ++i)
            std::cout << ns[i] << "," << logs[i] << "," << signs[i] << "\n";
    } else if (common.format == "json") {
        json rows = json::array();
        for (std::size_t i = 0; i < ns.size(); ++i)
            rows.push_back({{"n", ns[i]}, {"log_ratio", logs[i]}, {"sign", signs[i]}});
        json rec = base_record("ratio", common,
                               {{"x", x}, {"a", a}, {"b", b}, {"n_max", n_max}});
        rec["status"] = "ok";
        rec["result"] = {{"rows", rows}};
        if (slope) {
            rec["result"]["fitted_slope"] = *slope;
            rec["result"]["fit_range"] = {{"lo", fit_lo}, {"hi", n_max}};
        }
        emit(rec);
    } else {
        std::cout << "log |(x-a)^(n) / (b-a)^(n)| for x=" << x << " a=" << a
                  << " b=" << b << " (falling powers; sign 0 marks integer hits):\n";
        for (std::size_t i = 0; i < ns.size(); ++i)
            std::printf("  n=%-8ld log=%-14.6g sign=%+d\n", ns[i], logs[i], signs[i]);
        if (slope)
            std::cout << "fitted slope over n in [" << fit_lo << ", " << n_max
                      << "]: " << *slope << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- verify --

int run_verify(const CommonOptions& common, const std::string& suite) {
    int failures = 0;
    newsum_status st;
    if (common.format == "text") {
        st = newsum_verify(
            suite.c_str(),
            [](const char* line, void*) { std::cout << line << "\n"; }, nullptr,
            &failures);
    } else {
        // buffered formats: capture lines, then emit one document
        std::vector<std::string> lines;
        st = newsum_verify(
            suite.c_str(),
            [](const char* line, void* user) {
                static_cast<std::vector<std::string>*>(user)->push_back(line);
            },
            &lines, &failures);
        if (st == NEWSUM_OK) {
            if (common.format == "csv") {
                std::cout << "line\n";
                for (const auto& l : lines)
                    std::cout << "\"" << l << "\"\n";
            } else {
                json rec = base_record("verify", common, {{"suite", suite}});
                rec["status"] = failures == 0 ? "pass" : "fail";
                rec["result"] = {{"failures", failures}, {"lines", lines}};
                emit(rec);
            }
        }
    }
    if (st != NEWSUM_OK)
        return fail_with(st);
    if (common.format == "text")
        std::cout << (failures == 0 ? "all criteria passed\n"
                                    : std::to_string(failures) +
                                          " criterion(s) failed\n");
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Newton series expansions, monotonicity classification, and "
                 "principal indefinite sums at configurable precision"};
    app.require_subcommand(1);

    CommonOptions common;
    app.add_option("--prec", common.precision, "working precision in bits (>= 53)")
        ->capture_default_str();
    app.add_option("--format", common.format, "output format: text | json | csv")
        ->check(CLI::IsMember({"text", "json", "csv"}))
        ->capture_default_str();
    app.add_option("--seed", common.seed, "seed for randomized sampling")
        ->capture_default_str();

    auto add_fn_flags = [](CLI::App* cmd, FnSpec& spec) {
        auto* fn = cmd->add_option("--fn", spec.fn,
                                   "registry function, e.g. recip or power_base[c=0.5]");
        auto* expr = cmd->add_option("--expr", spec.expr,
                                     "expression in x, e.g. \"-ln(x)/x\"");
        fn->excludes(expr);
        cmd->final_callback([fn, expr, cmd]() {
            if (fn->count() == 0 && expr->count() == 0)
                throw CLI::RequiredError(cmd->get_name() + " needs --fn or --expr");
        });
    };

    // expand
    FnSpec expand_fn;
    std::string expand_anchor;
    long expand_terms = 16;
    auto* cmd_expand = app.add_subcommand("expand", "tabulate Newton coefficients");
    add_fn_flags(cmd_expand, expand_fn);
    cmd_expand->add_option("--anchor", expand_anchor, "expansion anchor a")->required();
    cmd_expand->add_option("--terms", expand_terms, "highest difference order")
        ->capture_default_str();

    // eval
    FnSpec eval_fn;
    std::string eval_anchor, eval_x, eval_tol = "1e-10", eval_b;
    long eval_terms = 64, eval_max_terms = 100000, eval_q = -1;
    auto* cmd_eval = app.add_subcommand("eval", "evaluate the Newton series at x");
    add_fn_flags(cmd_eval, eval_fn);
    cmd_eval->add_option("--anchor", eval_anchor, "expansion anchor a")->required();
    cmd_eval->add_option("--x", eval_x, "evaluation point")->required();
    cmd_eval->add_option("--tol", eval_tol, "stopping tolerance")->capture_default_str();
    cmd_eval->add_option("--max-terms", eval_max_terms, "term budget")
        ->capture_default_str();
    cmd_eval->add_option("--terms", eval_terms,
                         "difference-table order (coefficients stream past it when a "
                         "closed form exists)")
        ->capture_default_str();
    auto* opt_b = cmd_eval->add_option(
        "--b", eval_b, "certificate point b < min{a,x} for the remainder bound");
    auto* opt_q = cmd_eval->add_option(
        "--q", eval_q, "certificate order (0 = completely monotone f)");
    opt_b->needs(opt_q);
    opt_q->needs(opt_b);

    // sigma
    FnSpec sigma_fn;
    std::string sigma_x, sigma_tol = "1e-8";
    long sigma_p = -1, sigma_max_n = 1L << 20;
    bool sigma_extrapolate = false, sigma_diffeq = false;
    auto* cmd_sigma =
        app.add_subcommand("sigma", "principal indefinite sum via its defining limit");
    add_fn_flags(cmd_sigma, sigma_fn);
    cmd_sigma->add_option("--x", sigma_x, "evaluation point (x > 0)")->required();
    cmd_sigma->add_option("--p", sigma_p, "convexity order (default: auto-select)");
    cmd_sigma->add_option("--tol", sigma_tol, "stopping tolerance")
        ->capture_default_str();
    cmd_sigma->add_option("--max-n", sigma_max_n, "limit-schedule budget")
        ->capture_default_str();
    cmd_sigma->add_flag("--extrapolate", sigma_extrapolate,
                        "also report the 2-point Richardson value");
    cmd_sigma->add_flag("--diffeq", sigma_diffeq,
                        "also report the difference-equation residual");

    // classify
    FnSpec classify_fn;
    std::string classify_grid = "1:50:200", classify_tol;
    long classify_orders = 8;
    auto* cmd_classify =
        app.add_subcommand("classify", "per-order convexity signs and labels");
    add_fn_flags(cmd_classify, classify_fn);
    cmd_classify->add_option("--orders", classify_orders, "highest order tested")
        ->capture_default_str();
    cmd_classify->add_option("--grid", classify_grid, "window START:END:COUNT")
        ->capture_default_str();
    cmd_classify->add_option("--tol", classify_tol,
                             "sign tolerance (default scales with precision)");

    // ratio
    std::string ratio_x, ratio_a, ratio_b;
    long ratio_n_max = 10000, ratio_points = 33;
    auto* cmd_ratio =
        app.add_subcommand("ratio", "falling-factorial remainder ratio table");
    cmd_ratio->add_option("--x", ratio_x, "evaluation point")->required();
    cmd_ratio->add_option("--a", ratio_a, "anchor (a > b)")->required();
    cmd_ratio->add_option("--b", ratio_b, "reference point")->required();
    cmd_ratio->add_option("--n-max", ratio_n_max, "largest n")->capture_default_str();
    cmd_ratio->add_option("--points", ratio_points, "rows in the table")
        ->capture_default_str();

    // verify
    std::string verify_suite = "all";
    auto* cmd_verify =
        app.add_subcommand("verify", "run the self-verification criteria");
    cmd_verify
        ->add_option("--suite", verify_suite, "all | newton | sigma | classify | oracle")
        ->check(CLI::IsMember({"all", "newton", "sigma", "classify", "oracle"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (common.precision < 53) {
        std::cerr << "error: --prec must be at least 53\n";
        return 2;
    }

    if (cmd_expand->parsed())
        return run_expand(common, expand_fn, expand_anchor, expand_terms);
    if (cmd_eval->parsed())
        return run_eval(common, eval_fn, eval_anchor, eval_terms, eval_x, eval_tol,
                        eval_max_terms, eval_b, eval_q);
    if (cmd_sigma->parsed())
        return run_sigma(common, sigma_fn, sigma_x, sigma_p, sigma_tol, sigma_max_n,
                         sigma_extrapolate, sigma_diffeq || !sigma_fn.expr.empty());
    if (cmd_classify->parsed())
        return run_classify(common, classify_fn, classify_orders, classify_grid,
                            classify_tol);
    if (cmd_ratio->parsed())
        return run_ratio(common, ratio_x, ratio_a, ratio_b, ratio_n_max, ratio_points);
    if (cmd_verify->parsed())
        return run_verify(common, verify_suite);

    std::cerr << "error: no subcommand\n";
    return 2;
}
