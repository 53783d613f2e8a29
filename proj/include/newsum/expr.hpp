#ifndef NEWSUM_EXPR_HPP
#define NEWSUM_EXPR_HPP

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "newsum/real.hpp"

namespace newsum {

// Small arithmetic AST for user-supplied g(x). Immutable after parsing;
// constants keep their decimal spelling and are re-parsed at whatever
// precision an evaluation asks for.
class ExprAst {
public:
    enum class Kind {
        constant,   // decimal literal or named constant (pi, euler_gamma)
        variable_x,
        unary_neg,
        add,
        sub,
        mul,
        div,
        pow,
        call,       // ln | exp | sin | cos | sqrt
    };

    using Ptr = std::shared_ptr<const ExprAst>;

    Kind kind;
    std::string text;          // literal spelling, or call/constant name
    std::vector<Ptr> children;

    static Ptr make(Kind kind, std::string text, std::vector<Ptr> children);
};

// Parses the expression grammar (loosest to tightest): additive <
// multiplicative < unary minus < power (right-associative) < atoms.
// Throws ParseError with a byte offset and the acceptable token kinds.
ExprAst::Ptr parse_expr(std::string_view source);

// Bottom-up evaluation at the given precision. Domain violations throw
// DomainError naming the offending subexpression and the value of x.
Real evaluate_expr(const ExprAst::Ptr& ast, const Real& x, long precision);

// Fully parenthesized rendering; parse(print(ast)) evaluates identically.
std::string print_expr(const ExprAst::Ptr& ast);

} // namespace newsum

#endif
