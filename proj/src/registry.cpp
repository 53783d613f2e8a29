#include "newsum/registry.hpp"

#include <mutex>

namespace newsum {

struct FuncHandle::Impl {
    std::string name;
    Interval domain = Interval::positive_reals();
    EvalFn eval;
    DerivFn derivative;
    DiffFn closed_form_diff;
    std::set<Tag> tags;

    // integer-sample cache: key (precision, k)
    mutable std::mutex cache_mutex;
    mutable std::map<std::pair<long, long>, Real> integer_cache;
    static constexpr std::size_t kCacheCap = 1u << 18;
};

FuncHandle FuncHandle::make(std::string name, Interval domain, EvalFn eval,
                            DerivFn derivative, DiffFn closed_form_diff,
                            std::set<Tag> tags) {
    auto impl = std::make_shared<Impl>();
    impl->name = std::move(name);
    impl->domain = std::move(domain);
    impl->eval = std::move(eval);
    impl->derivative = std::move(derivative);
    impl->closed_form_diff = std::move(closed_form_diff);
    impl->tags = std::move(tags);
    FuncHandle h;
    h.impl_ = std::move(impl);
    return h;
}

const std::string& FuncHandle::name() const { return impl_->name; }
const Interval& FuncHandle::domain() const { return impl_->domain; }

Real FuncHandle::eval(const Real& x, long precision) const {
    if (!impl_)
        throw InvalidArgument("empty function handle");
    if (!impl_->domain.contains(x))
        throw DomainError(impl_->name + " is not defined at x = " + x.to_string(20) +
                          " (domain " + impl_->domain.describe() + ")");
    Real r = impl_->eval(x, precision);
    if (r.is_nan())
        throw DomainError(impl_->name + " evaluated to NaN at x = " + x.to_string(20));
    return r;
}

Real FuncHandle::eval_integer(long k, long precision) const {
    const auto key = std::make_pair(precision, k);
    {
        std::lock_guard<std::mutex> lock(impl_->cache_mutex);
        auto it = impl_->integer_cache.find(key);
        if (it != impl_->integer_cache.end())
            return it->second;
    }
    Real v = eval(Real::of(k, precision), precision);
    std::lock_guard<std::mutex> lock(impl_->cache_mutex);
    if (impl_->integer_cache.size() < Impl::kCacheCap)
        impl_->integer_cache.emplace(key, v);
    return v;
}

bool FuncHandle::has_derivative() const { return static_cast<bool>(impl_->derivative); }

Real FuncHandle::derivative(long order, const Real& x, long precision) const {
    if (!has_derivative())
        throw InvalidArgument(impl_->name + " has no derivative evaluator");
    if (order < 0)
        throw InvalidArgument("derivative order must be >= 0");
    if (!impl_->domain.contains(x))
        throw DomainError(impl_->name + " derivative requested outside the domain at x = " +
                          x.to_string(20));
    return impl_->derivative(order, x, precision);
}

bool FuncHandle::has_closed_form_diff() const {
    return static_cast<bool>(impl_->closed_form_diff);
}

Real FuncHandle::closed_form_diff(long k, const Real& a, long precision) const {
    if (!has_closed_form_diff())
        throw InvalidArgument(impl_->name + " has no closed-form forward difference");
    if (k < 0)
        throw InvalidArgument("difference order must be >= 0");
    return impl_->closed_form_diff(k, a, precision);
}

bool FuncHandle::has_tag(Tag tag) const { return impl_->tags.count(tag) > 0; }

FuncHandle FuncHandle::forward_difference() const {
    FuncHandle base = *this;
    return FuncHandle::make(
        "delta(" + name() + ")", domain(),
        [base](const Real& x, long precision) {
            long w = precision + 32;
            Real xw = x.with_precision(w);
            return (base.eval(xw + 1, w) - base.eval(xw, w)).with_precision(precision);
        });
}

namespace {

Real factorial(long n, long precision) {
    Real acc = Real::of(1L, precision);
    for (long i = 2; i <= n; ++i)
        acc *= i;
    return acc;
}

Real harmonic_prefix(long m, long precision) {
    Real acc = Real::of(0L, precision);
    for (long j = 1; j <= m; ++j)
        acc += Real::of(1L, precision) / j;
    return acc;
}

FuncHandle make_recip() {
    return FuncHandle::make(
        "recip", Interval::positive_reals(),
        [](const Real& x, long precision) { return Real::of(1L, precision) / x; },
        [](long m, const Real& x, long precision) {
            // (1/x)^(m) = (-1)^m m! / x^(m+1)
            Real r = factorial(m, precision) / pow(x.with_precision(precision), m + 1);
            return m % 2 ? -r : r;
        },
        [](long k, const Real& a, long precision) {
            // (-1)^k k! / (a (a+1) ... (a+k))
            Real aw = a.with_precision(precision + 16);
            Real den = Real::of(1L, precision + 16);
            for (long j = 0; j <= k; ++j)
                den *= (aw + j);
            Real r = factorial(k, precision + 16) / den;
            return (k % 2 ? -r : r).with_precision(precision);
        },
        {FuncHandle::Tag::known_cm});
}

FuncHandle make_log() {
    return FuncHandle::make(
        "log", Interval::positive_reals(),
        [](const Real& x, long precision) { return log(x.with_precision(precision)); },
        [](long m, const Real& x, long precision) {
            Real xw = x.with_precision(precision);
            if (m == 0)
                return log(xw);
            // (ln x)^(m) = (-1)^(m-1) (m-1)! / x^m
            Real r = factorial(m - 1, precision) / pow(xw, m);
            return (m - 1) % 2 ? -r : r;
        });
}

FuncHandle make_neg_exp() {
    return FuncHandle::make(
        "neg_exp", Interval::reals(),
        [](const Real& x, long precision) { return exp(-x.with_precision(precision)); },
        [](long m, const Real& x, long precision) {
            Real r = exp(-x.with_precision(precision));
            return m % 2 ? -r : r;
        },
        [](long k, const Real& a, long precision) {
            // Delta^k e^(-x) at a = e^(-a) (e^(-1) - 1)^k
            long w = precision + 16;
            Real base = exp(Real::of(-1L, w)) - 1;
            return (exp(-a.with_precision(w)) * pow(base, k)).with_precision(precision);
        },
        {FuncHandle::Tag::known_cm});
}

FuncHandle make_power_base(const std::string& c_text) {
    Real c_probe = Real::parse(c_text, 64);
    if (!(c_probe > Real::of(-1L, 64)))
        throw InvalidArgument("power_base needs parameter c > -1, got c = " + c_text);
    std::set<FuncHandle::Tag> tags;
    if (c_probe.sign() <= 0)
        tags.insert(FuncHandle::Tag::known_cm);
    if (c_probe.sign() >= 0)
        tags.insert(FuncHandle::Tag::known_am);
    return FuncHandle::make(
        "power_base[c=" + c_text + "]", Interval::reals(),
        [c_text](const Real& x, long precision) {
            Real c = Real::parse(c_text, precision);
            return pow(c + 1, x.with_precision(precision));
        },
        [c_text](long m, const Real& x, long precision) {
            // ((c+1)^x)^(m) = (ln(c+1))^m (c+1)^x
            Real c = Real::parse(c_text, precision);
            Real xw = x.with_precision(precision);
            return pow(log(c + 1), m) * pow(c + 1, xw);
        },
        [c_text](long k, const Real& a, long precision) {
            // Delta^k (c+1)^x at a = (c+1)^a c^k
            Real c = Real::parse(c_text, precision);
            return pow(c + 1, a.with_precision(precision)) * pow(c, k);
        },
        std::move(tags));
}

FuncHandle make_sin_pi() {
    return FuncHandle::make(
        "sin_pi", Interval::positive_reals(),
        [](const Real& x, long precision) {
            long w = precision + 16;
            return sin(Real::pi(w) * x.with_precision(w)).with_precision(precision);
        },
        [](long m, const Real& x, long precision) {
            long w = precision + 16;
            Real pi = Real::pi(w);
            Real arg = pi * x.with_precision(w) + pi * m / 2;
            return (pow(pi, m) * sin(arg)).with_precision(precision);
        },
        [](long k, const Real& a, long precision) {
            // Delta sin(pi x) = -2 sin(pi x), so Delta^k = (-2)^k sin(pi a)
            long w = precision + 16;
            Real s = sin(Real::pi(w) * a.with_precision(w));
            return (pow(Real::of(-2L, w), k) * s).with_precision(precision);
        },
        {FuncHandle::Tag::known_counterexample});
}

FuncHandle make_log_over_x_neg() {
    return FuncHandle::make(
        "log_over_x_neg", Interval::positive_reals(),
        [](const Real& x, long precision) {
            Real xw = x.with_precision(precision);
            return -(log(xw) / xw);
        },
        [](long m, const Real& x, long precision) {
            // (-ln(x)/x)^(m) = (-1)^(m+1) m! (ln x - H_m) / x^(m+1)
            Real xw = x.with_precision(precision);
            Real r = factorial(m, precision) * (log(xw) - harmonic_prefix(m, precision)) /
                     pow(xw, m + 1);
            return (m + 1) % 2 ? -r : r;
        });
}

} // namespace

FuncHandle registry_lookup(const std::string& spec) {
    std::string name = spec;
    std::map<std::string, std::string> params;
    auto bracket = spec.find('[');
    if (bracket != std::string::npos) {
        if (spec.back() != ']')
            throw InvalidArgument("malformed parameter list in \"" + spec + "\"");
        name = spec.substr(0, bracket);
        std::string body = spec.substr(bracket + 1, spec.size() - bracket - 2);
        std::size_t pos = 0;
        while (pos < body.size()) {
            auto comma = body.find(',', pos);
            std::string item = body.substr(pos, comma == std::string::npos
                                                    ? std::string::npos
                                                    : comma - pos);
            auto eq = item.find('=');
            if (eq == std::string::npos || eq == 0)
                throw InvalidArgument("expected key=value in \"" + spec + "\"");
            params[item.substr(0, eq)] = item.substr(eq + 1);
            pos = comma == std::string::npos ? body.size() : comma + 1;
        }
    }

    auto take = [&](const char* key) {
        auto it = params.find(key);
        if (it == params.end())
            throw InvalidArgument(name + " requires parameter " + key);
        std::string v = it->second;
        params.erase(it);
        return v;
    };
    auto reject_leftovers = [&]() {
        if (!params.empty())
            throw InvalidArgument("unknown parameter \"" + params.begin()->first +
                                  "\" for " + name);
    };

    FuncHandle h;
    if (name == "recip")
        h = make_recip();
    else if (name == "log")
        h = make_log();
    else if (name == "neg_exp")
        h = make_neg_exp();
    else if (name == "power_base")
        h = make_power_base(take("c"));
    else if (name == "sin_pi")
        h = make_sin_pi();
    else if (name == "log_over_x_neg")
        h = make_log_over_x_neg();
    else {
        std::string names;
        for (const auto& n : registry_names())
            names += (names.empty() ? "" : ", ") + n;
        throw NotFoundError("unknown function \"" + name + "\" (registry: " + names + ")");
    }
    reject_leftovers();
    return h;
}

std::vector<std::string> registry_names() {
    return {"recip", "log", "neg_exp", "power_base", "sin_pi", "log_over_x_neg"};
}

FuncHandle handle_from_expr(const ExprAst::Ptr& ast, Interval domain,
                            const std::string& display_name) {
    if (!ast)
        throw InvalidArgument("null expression");
    std::string name = display_name.empty() ? "expr:" + print_expr(ast) : display_name;
    return FuncHandle::make(std::move(name), std::move(domain),
                            [ast](const Real& x, long precision) {
                                return evaluate_expr(ast, x, precision);
                            });
}

} // namespace newsum
