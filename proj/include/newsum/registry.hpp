#ifndef NEWSUM_REGISTRY_HPP
#define NEWSUM_REGISTRY_HPP

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "newsum/expr.hpp"
#include "newsum/interval.hpp"
#include "newsum/real.hpp"

namespace newsum {

// Evaluable function on an interval, with optional closed-form machinery.
// Handles are immutable values (cheap shared copies) and safe to use from
// several threads; the only mutable piece is an integer-sample cache guarded
// by a mutex (single writer, shared readers).
class FuncHandle {
public:
    enum class Tag { known_cm, known_am, known_counterexample };

    using EvalFn = std::function<Real(const Real& x, long precision)>;
    // derivative of the given order (order 0 = the function itself)
    using DerivFn = std::function<Real(long order, const Real& x, long precision)>;
    // forward difference of order k anchored at a
    using DiffFn = std::function<Real(long k, const Real& a, long precision)>;

    FuncHandle() = default;

    static FuncHandle make(std::string name, Interval domain, EvalFn eval,
                           DerivFn derivative = nullptr,
                           DiffFn closed_form_diff = nullptr,
                           std::set<Tag> tags = {});

    bool valid() const { return impl_ != nullptr; }
    const std::string& name() const;
    const Interval& domain() const;

    Real eval(const Real& x) const { return eval(x, x.precision()); }
    Real eval(const Real& x, long precision) const;
    // Cached path for integer arguments; used by the indefinite-sum engine.
    Real eval_integer(long k, long precision) const;

    bool has_derivative() const;
    Real derivative(long order, const Real& x, long precision) const;

    bool has_closed_form_diff() const;
    Real closed_form_diff(long k, const Real& a, long precision) const;

    bool has_tag(Tag tag) const;

    // Handle evaluating x -> f(x + 1) - f(x), used by the convexity
    // transfer check. Extra guard bits absorb the cancellation.
    FuncHandle forward_difference() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

// Looks up a built-in by CLI spelling, e.g. "recip" or "power_base[c=0.5]".
// Registered names: recip, log, neg_exp, power_base (parameter c > -1),
// sin_pi, log_over_x_neg.
FuncHandle registry_lookup(const std::string& spec);

std::vector<std::string> registry_names();

// Wraps a parsed expression; no derivative or closed-form difference.
FuncHandle handle_from_expr(const ExprAst::Ptr& ast, Interval domain,
                            const std::string& display_name = "");

} // namespace newsum

#endif
