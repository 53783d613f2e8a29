#include "newsum/expr.hpp"

#include <cctype>

#include "newsum/oracles.hpp"

namespace newsum {

ExprAst::Ptr ExprAst::make(Kind kind, std::string text, std::vector<Ptr> children) {
    auto node = std::make_shared<ExprAst>();
    node->kind = kind;
    node->text = std::move(text);
    node->children = std::move(children);
    return node;
}

namespace {

const char* const kFunctionNames[] = {"ln", "exp", "sin", "cos", "sqrt"};
const char* const kConstantNames[] = {"pi", "euler_gamma"};

bool is_function_name(const std::string& s) {
    for (const char* f : kFunctionNames)
        if (s == f)
            return true;
    return false;
}

bool is_constant_name(const std::string& s) {
    for (const char* c : kConstantNames)
        if (s == c)
            return true;
    return false;
}

struct Token {
    enum class Kind { number, identifier, op, end };
    Kind kind;
    std::string text;
    std::size_t offset;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        std::size_t start = pos_;
        if (pos_ >= src_.size()) {
            current_ = {Token::Kind::end, "", start};
            return;
        }
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            if (pos_ < src_.size() && src_[pos_] == '.') {
                ++pos_;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                std::size_t mark = pos_;
                ++pos_;
                if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
                    ++pos_;
                if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    while (pos_ < src_.size() &&
                           std::isdigit(static_cast<unsigned char>(src_[pos_])))
                        ++pos_;
                } else {
                    pos_ = mark; // bare 'e' belongs to the next token
                }
            }
            current_ = {Token::Kind::number,
                        std::string(src_.substr(start, pos_ - start)), start};
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            current_ = {Token::Kind::identifier,
                        std::string(src_.substr(start, pos_ - start)), start};
            return;
        }
        static const std::string ops = "+-*/^()";
        if (ops.find(c) != std::string::npos) {
            ++pos_;
            current_ = {Token::Kind::op, std::string(1, c), start};
            return;
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "' at offset " +
                             std::to_string(start),
                         start, {"number", "identifier", "operator"});
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Token current_{Token::Kind::end, "", 0};
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) {}

    ExprAst::Ptr parse() {
        ExprAst::Ptr root = additive();
        const Token& t = lex_.peek();
        if (t.kind != Token::Kind::end)
            fail(t, {"operator", "end of input"});
        return root;
    }

private:
    [[noreturn]] void fail(const Token& t, std::vector<std::string> expected) {
        std::string got = t.kind == Token::Kind::end ? "end of input"
                                                     : "'" + t.text + "'";
        std::string names;
        for (std::size_t i = 0; i < expected.size(); ++i)
            names += (i ? ", " : "") + expected[i];
        throw ParseError("syntax error at offset " + std::to_string(t.offset) +
                             ": unexpected " + got + " (expected " + names + ")",
                         t.offset, std::move(expected));
    }

    bool eat_op(const char* op) {
        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::op && t.text == op) {
            lex_.take();
            return true;
        }
        return false;
    }

    ExprAst::Ptr additive() {
        ExprAst::Ptr lhs = multiplicative();
        for (;;) {
            if (eat_op("+"))
                lhs = ExprAst::make(ExprAst::Kind::add, "+", {lhs, multiplicative()});
            else if (eat_op("-"))
                lhs = ExprAst::make(ExprAst::Kind::sub, "-", {lhs, multiplicative()});
            else
                return lhs;
        }
    }

    ExprAst::Ptr multiplicative() {
        ExprAst::Ptr lhs = unary();
        for (;;) {
            if (eat_op("*"))
                lhs = ExprAst::make(ExprAst::Kind::mul, "*", {lhs, unary()});
            else if (eat_op("/"))
                lhs = ExprAst::make(ExprAst::Kind::div, "/", {lhs, unary()});
            else
                return lhs;
        }
    }

    ExprAst::Ptr unary() {
        if (eat_op("-"))
            return ExprAst::make(ExprAst::Kind::unary_neg, "-", {unary()});
        return power();
    }

    // The exponent is parsed at power level, not unary level, so "2^-3"
    // is rejected and must be written "2^(-3)".
    ExprAst::Ptr power() {
        ExprAst::Ptr base = atom();
        if (eat_op("^"))
            return ExprAst::make(ExprAst::Kind::pow, "^", {base, power()});
        return base;
    }

    ExprAst::Ptr atom() {
        const Token t = lex_.peek();
        if (t.kind == Token::Kind::number) {
            lex_.take();
            return ExprAst::make(ExprAst::Kind::constant, t.text, {});
        }
        if (t.kind == Token::Kind::identifier) {
            lex_.take();
            if (t.text == "x")
                return ExprAst::make(ExprAst::Kind::variable_x, "x", {});
            if (is_constant_name(t.text))
                return ExprAst::make(ExprAst::Kind::constant, t.text, {});
            if (is_function_name(t.text)) {
                const Token& open = lex_.peek();
                if (!eat_op("("))
                    fail(open, {"'('"});
                ExprAst::Ptr arg = additive();
                const Token& close = lex_.peek();
                if (!eat_op(")"))
                    fail(close, {"')'"});
                return ExprAst::make(ExprAst::Kind::call, t.text, {arg});
            }
            throw ParseError(
                "unknown identifier '" + t.text + "' at offset " +
                    std::to_string(t.offset) +
                    " (valid names: x, pi, euler_gamma, ln, exp, sin, cos, sqrt)",
                t.offset, {"x", "pi", "euler_gamma", "ln", "exp", "sin", "cos", "sqrt"});
        }
        if (t.kind == Token::Kind::op && t.text == "(") {
            lex_.take();
            ExprAst::Ptr inner = additive();
            const Token& close = lex_.peek();
            if (!eat_op(")"))
                fail(close, {"')'"});
            return inner;
        }
        fail(t, {"number", "x", "constant", "function", "'('"});
    }

    Lexer lex_;
};

[[noreturn]] void domain_fail(const ExprAst::Ptr& node, const Real& x,
                              const std::string& reason) {
    throw DomainError("domain error in \"" + print_expr(node) + "\" at x = " +
                      x.to_string(20) + ": " + reason);
}

Real eval_node(const ExprAst::Ptr& node, const Real& x, long precision) {
    switch (node->kind) {
    case ExprAst::Kind::constant:
        if (node->text == "pi")
            return Real::pi(precision);
        if (node->text == "euler_gamma")
            return oracles::euler_gamma(precision);
        return Real::parse(node->text, precision);
    case ExprAst::Kind::variable_x:
        return x.with_precision(precision);
    case ExprAst::Kind::unary_neg:
        return -eval_node(node->children[0], x, precision);
    case ExprAst::Kind::add:
        return eval_node(node->children[0], x, precision) +
               eval_node(node->children[1], x, precision);
    case ExprAst::Kind::sub:
        return eval_node(node->children[0], x, precision) -
               eval_node(node->children[1], x, precision);
    case ExprAst::Kind::mul:
        return eval_node(node->children[0], x, precision) *
               eval_node(node->children[1], x, precision);
    case ExprAst::Kind::div: {
        Real num = eval_node(node->children[0], x, precision);
        Real den = eval_node(node->children[1], x, precision);
        if (den.is_zero())
            domain_fail(node, x, "division by zero");
        return num / den;
    }
    case ExprAst::Kind::pow: {
        Real base = eval_node(node->children[0], x, precision);
        Real expo = eval_node(node->children[1], x, precision);
        if (base.is_zero() && expo.sign() < 0)
            domain_fail(node, x, "zero base with negative exponent");
        if (base.sign() < 0 && !expo.is_integer())
            domain_fail(node, x, "negative base with non-integer exponent");
        Real r = pow(base, expo);
        if (r.is_nan())
            domain_fail(node, x, "power is undefined here");
        return r;
    }
    case ExprAst::Kind::call: {
        Real arg = eval_node(node->children[0], x, precision);
        if (node->text == "ln") {
            if (arg.sign() <= 0)
                domain_fail(node, x, "ln of a nonpositive argument");
            return log(arg);
        }
        if (node->text == "exp")
            return exp(arg);
        if (node->text == "sin")
            return sin(arg);
        if (node->text == "cos")
            return cos(arg);
        if (node->text == "sqrt") {
            if (arg.sign() < 0)
                domain_fail(node, x, "sqrt of a negative argument");
            return sqrt(arg);
        }
        throw InternalError("unhandled call node: " + node->text);
    }
    }
    throw InternalError("unhandled expression node kind");
}

} // namespace

ExprAst::Ptr parse_expr(std::string_view source) {
    // Skip leading whitespace to judge emptiness; the lexer handles the rest.
    bool blank = true;
    for (char c : source)
        if (!std::isspace(static_cast<unsigned char>(c)))
            blank = false;
    if (blank)
        throw ParseError("empty expression", 0, {"expression"});
    return Parser(source).parse();
}

Real evaluate_expr(const ExprAst::Ptr& ast, const Real& x, long precision) {
    if (!ast)
        throw InvalidArgument("null expression");
    Real r = eval_node(ast, x, precision);
    if (r.is_nan())
        throw DomainError("expression evaluated to NaN at x = " + x.to_string(20));
    return r;
}

std::string print_expr(const ExprAst::Ptr& ast) {
    switch (ast->kind) {
    case ExprAst::Kind::constant:
        return ast->text;
    case ExprAst::Kind::variable_x:
        return "x";
    case ExprAst::Kind::unary_neg:
        return "(-" + print_expr(ast->children[0]) + ")";
    case ExprAst::Kind::add:
    case ExprAst::Kind::sub:
    case ExprAst::Kind::mul:
    case ExprAst::Kind::div:
    case ExprAst::Kind::pow:
        return "(" + print_expr(ast->children[0]) + ast->text +
               print_expr(ast->children[1]) + ")";
    case ExprAst::Kind::call:
        return ast->text + "(" + print_expr(ast->children[0]) + ")";
    }
    return "?";
}

} // namespace newsum
