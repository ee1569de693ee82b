#pragma once

#include "core.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

// Parser and evaluator for transform expressions in the variable z.
//
//   expression := term { ("+" | "-") term }
//   term       := unary { ("*" | "/") unary }
//   unary      := ("-" | "+") unary | power
//   power      := primary [ "^" unary ]
//   primary    := Number | "z" | "pi" | "e"
//             | Name "(" expression ")" | "(" expression ")"
//
// "^" binds tighter than unary minus and associates to the right, so both
// z^-1 and z^(-1) parse, and -z^2 means -(z^2). There is no implicit
// multiplication: "2z" is a parse error. Functions: exp sin cos sqrt log abs.

namespace ztinv {

class LexError : public Error {
public:
    LexError(std::size_t position, const std::string& what)
        : Error("lex error at offset " + std::to_string(position) + ": " + what),
          position(position) {}
    std::size_t position;
};

class ParseError : public Error {
public:
    ParseError(std::size_t position, const std::string& expectation)
        : Error("parse error at offset " + std::to_string(position) + ": " + expectation),
          position(position), expectation(expectation) {}
    std::size_t position;
    std::string expectation;
};

// ---------------------------------------------------------------------------
// Tokens
// ---------------------------------------------------------------------------

enum class TokenKind { number, identifier, plus, minus, star, slash, caret, lparen, rparen };

struct Token {
    TokenKind kind;
    std::string lexeme;
    std::size_t position; // byte offset into the source
};

inline std::vector<Token> tokenize(std::string_view source) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    const auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
    const auto is_name = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    };
    while (i < source.size()) {
        const char c = source[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (is_digit(c) || (c == '.' && i + 1 < source.size() && is_digit(source[i + 1]))) {
            while (i < source.size() && is_digit(source[i])) ++i;
            if (i < source.size() && source[i] == '.') {
                ++i;
                while (i < source.size() && is_digit(source[i])) ++i;
            }
            // Exponent part only counts if at least one digit follows; "2e"
            // falls back to the number 2 and the identifier e.
            if (i < source.size() && (source[i] == 'e' || source[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < source.size() && (source[j] == '+' || source[j] == '-')) ++j;
                if (j < source.size() && is_digit(source[j])) {
                    ++j;
                    while (j < source.size() && is_digit(source[j])) ++j;
                    i = j;
                }
            }
            std::string lexeme(source.substr(start, i - start));
            double value = 0.0;
            const auto res = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), value);
            if (res.ec != std::errc{} || !std::isfinite(value))
                throw LexError(start, "numeric literal out of range: '" + lexeme + "'");
            tokens.push_back({TokenKind::number, std::move(lexeme), start});
            continue;
        }
        if (is_name(c)) {
            while (i < source.size() && (is_name(source[i]) || is_digit(source[i]))) ++i;
            tokens.push_back({TokenKind::identifier, std::string(source.substr(start, i - start)), start});
            continue;
        }
        TokenKind kind;
        switch (c) {
            case '+': kind = TokenKind::plus; break;
            case '-': kind = TokenKind::minus; break;
            case '*': kind = TokenKind::star; break;
            case '/': kind = TokenKind::slash; break;
            case '^': kind = TokenKind::caret; break;
            case '(': kind = TokenKind::lparen; break;
            case ')': kind = TokenKind::rparen; break;
            default: throw LexError(start, std::string("unrecognized character '") + c + "'");
        }
        tokens.push_back({kind, std::string(1, c), start});
        ++i;
    }
    return tokens;
}

// ---------------------------------------------------------------------------
// AST. Nodes are immutable and shared; copying an ExprAst is cheap.
// ---------------------------------------------------------------------------

enum class NodeKind { constant, variable_z, negate, add, subtract, multiply, divide, power, call };

enum class FuncId { exp, sin, cos, sqrt, log, abs };

inline const char* func_name(FuncId f) {
    switch (f) {
        case FuncId::exp: return "exp";
        case FuncId::sin: return "sin";
        case FuncId::cos: return "cos";
        case FuncId::sqrt: return "sqrt";
        case FuncId::log: return "log";
        case FuncId::abs: return "abs";
    }
    return "?";
}

struct ExprNode;
using ExprNodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    NodeKind kind;
    double value = 0.0;    // constant
    FuncId func = FuncId::exp; // call
    ExprNodePtr lhs;       // unary operand lives here
    ExprNodePtr rhs;
};

struct ExprAst {
    ExprNodePtr root;
};

namespace detail {

inline ExprNodePtr make_constant(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::constant;
    n->value = v;
    return n;
}

inline ExprNodePtr make_node(NodeKind kind, ExprNodePtr lhs, ExprNodePtr rhs = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

inline ExprNodePtr make_call(FuncId f, ExprNodePtr arg) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::call;
    n->func = f;
    n->lhs = std::move(arg);
    return n;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, std::size_t source_size)
        : tokens_(std::move(tokens)), end_(source_size) {}

    ExprNodePtr run() {
        ExprNodePtr root = expression();
        if (pos_ < tokens_.size())
            throw ParseError(tokens_[pos_].position,
                             "unexpected '" + tokens_[pos_].lexeme + "' after complete expression");
        return root;
    }

private:
    const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }

    bool accept(TokenKind k) {
        if (pos_ < tokens_.size() && tokens_[pos_].kind == k) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::size_t here() const { return pos_ < tokens_.size() ? tokens_[pos_].position : end_; }

    ExprNodePtr expression() {
        ExprNodePtr left = term();
        while (const Token* t = peek()) {
            if (t->kind == TokenKind::plus) {
                ++pos_;
                left = make_node(NodeKind::add, std::move(left), term());
            } else if (t->kind == TokenKind::minus) {
                ++pos_;
                left = make_node(NodeKind::subtract, std::move(left), term());
            } else {
                break;
            }
        }
        return left;
    }

    ExprNodePtr term() {
        ExprNodePtr left = unary();
        while (const Token* t = peek()) {
            if (t->kind == TokenKind::star) {
                ++pos_;
                left = make_node(NodeKind::multiply, std::move(left), unary());
            } else if (t->kind == TokenKind::slash) {
                ++pos_;
                left = make_node(NodeKind::divide, std::move(left), unary());
            } else {
                break;
            }
        }
        return left;
    }

    ExprNodePtr unary() {
        if (accept(TokenKind::minus)) return make_node(NodeKind::negate, unary());
        if (accept(TokenKind::plus)) return unary();
        return power();
    }

    ExprNodePtr power() {
        ExprNodePtr base = primary();
        if (accept(TokenKind::caret)) {
            // Right-associative, and the exponent may carry its own sign.
            return make_node(NodeKind::power, std::move(base), unary());
        }
        return base;
    }

    ExprNodePtr primary() {
        const Token* t = peek();
        if (!t) throw ParseError(here(), "expected a number, 'z', or '('");
        switch (t->kind) {
            case TokenKind::number: {
                ++pos_;
                double v = 0.0;
                std::from_chars(t->lexeme.data(), t->lexeme.data() + t->lexeme.size(), v);
                return make_constant(v);
            }
            case TokenKind::lparen: {
                ++pos_;
                ExprNodePtr inner = expression();
                if (!accept(TokenKind::rparen)) throw ParseError(here(), "expected ')'");
                return inner;
            }
            case TokenKind::identifier: {
                ++pos_;
                const std::string& name = t->lexeme;
                if (name == "z") {
                    auto n = std::make_shared<ExprNode>();
                    n->kind = NodeKind::variable_z;
                    return n;
                }
                if (name == "pi") return make_constant(3.14159265358979323846);
                if (name == "e") return make_constant(2.71828182845904523536);
                FuncId f;
                if (name == "exp") f = FuncId::exp;
                else if (name == "sin") f = FuncId::sin;
                else if (name == "cos") f = FuncId::cos;
                else if (name == "sqrt") f = FuncId::sqrt;
                else if (name == "log") f = FuncId::log;
                else if (name == "abs") f = FuncId::abs;
                else throw ParseError(t->position, "unknown identifier '" + name + "'");
                if (!accept(TokenKind::lparen))
                    throw ParseError(here(), "expected '(' after function name '" + name + "'");
                ExprNodePtr arg = expression();
                if (!accept(TokenKind::rparen)) throw ParseError(here(), "expected ')'");
                return make_call(f, std::move(arg));
            }
            default:
                throw ParseError(t->position, "unexpected '" + t->lexeme + "'");
        }
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::size_t end_;
};

} // namespace detail

inline ExprAst parse(std::string_view source) {
    detail::Parser parser(tokenize(source), source.size());
    return ExprAst{parser.run()};
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline Complex integer_power(Complex base, long long exponent) {
    if (exponent < 0) {
        if (base == Complex(0.0, 0.0)) throw EvalError("division by zero: 0 raised to a negative power");
        return Complex(1.0, 0.0) / integer_power(base, -exponent);
    }
    Complex result(1.0, 0.0);
    Complex acc = base;
    while (exponent > 0) {
        if (exponent & 1) result *= acc;
        acc *= acc;
        exponent >>= 1;
    }
    return result;
}

inline bool nearly_integer(double v, long long& out) {
    if (!(std::abs(v) <= 9.007199254740992e15)) return false;
    const double r = std::nearbyint(v);
    if (r != v) return false;
    out = static_cast<long long>(r);
    return true;
}

inline Complex eval_node(const ExprNode& node, Complex z) {
    Complex result;
    switch (node.kind) {
        case NodeKind::constant: return Complex(node.value, 0.0);
        case NodeKind::variable_z: return z;
        case NodeKind::negate: return -eval_node(*node.lhs, z);
        case NodeKind::add: result = eval_node(*node.lhs, z) + eval_node(*node.rhs, z); break;
        case NodeKind::subtract: result = eval_node(*node.lhs, z) - eval_node(*node.rhs, z); break;
        case NodeKind::multiply: result = eval_node(*node.lhs, z) * eval_node(*node.rhs, z); break;
        case NodeKind::divide: {
            const Complex num = eval_node(*node.lhs, z);
            const Complex den = eval_node(*node.rhs, z);
            if (den == Complex(0.0, 0.0)) throw EvalError("division by zero");
            result = num / den;
            break;
        }
        case NodeKind::power: {
            const Complex base = eval_node(*node.lhs, z);
            const Complex expo = eval_node(*node.rhs, z);
            long long k = 0;
            if (expo.imag() == 0.0 && nearly_integer(expo.real(), k)) {
                result = integer_power(base, k);
            } else {
                // Principal branch a^b = exp(b log a).
                if (base == Complex(0.0, 0.0)) throw EvalError("zero raised to a non-integer power");
                result = std::exp(expo * std::log(base));
            }
            break;
        }
        case NodeKind::call: {
            const Complex w = eval_node(*node.lhs, z);
            switch (node.func) {
                case FuncId::exp: result = std::exp(w); break;
                case FuncId::sin: result = std::sin(w); break;
                case FuncId::cos: result = std::cos(w); break;
                case FuncId::sqrt: result = std::sqrt(w); break;
                case FuncId::log:
                    if (w == Complex(0.0, 0.0)) throw EvalError("log of zero");
                    result = std::log(w);
                    break;
                case FuncId::abs: result = Complex(std::abs(w), 0.0); break;
            }
            break;
        }
    }
    if (!std::isfinite(result.real()) || !std::isfinite(result.imag()))
        throw EvalError("non-finite intermediate value");
    return result;
}

} // namespace detail

inline Complex eval(const ExprAst& ast, Complex z) {
    return detail::eval_node(*ast.root, z);
}

/// Adapter so an ExprAst satisfies TransformEvaluator.
class ExprTransform {
public:
    explicit ExprTransform(ExprAst ast) : ast_(std::move(ast)) {}
    Complex operator()(Complex z) const { return eval(ast_, z); }
    const ExprAst& ast() const { return ast_; }

private:
    ExprAst ast_;
};

// ---------------------------------------------------------------------------
// Structural queries
// ---------------------------------------------------------------------------

inline bool contains_z(const ExprNode& node) {
    switch (node.kind) {
        case NodeKind::constant: return false;
        case NodeKind::variable_z: return true;
        case NodeKind::negate:
        case NodeKind::call: return contains_z(*node.lhs);
        default: return contains_z(*node.lhs) || contains_z(*node.rhs);
    }
}

inline bool contains_z(const ExprAst& ast) { return contains_z(*ast.root); }

namespace detail {

/// True when the exponent subtree folds to a plain integer. Exponents that
/// depend on z or fail to evaluate do not count.
inline bool constant_integer_exponent(const ExprNode& expo, long long& out) {
    if (contains_z(expo)) return false;
    try {
        const Complex v = eval_node(expo, Complex(1.0, 0.0));
        return v.imag() == 0.0 && nearly_integer(v.real(), out);
    } catch (const EvalError&) {
        return false;
    }
}

inline bool fractional_power_walk(const ExprNode& node) {
    switch (node.kind) {
        case NodeKind::constant:
        case NodeKind::variable_z:
            return false;
        case NodeKind::negate:
            return fractional_power_walk(*node.lhs);
        case NodeKind::call:
            if (node.func == FuncId::sqrt && contains_z(*node.lhs)) return true;
            return fractional_power_walk(*node.lhs);
        case NodeKind::power: {
            if (contains_z(*node.lhs) && !contains_z(*node.rhs)) {
                long long k = 0;
                if (!constant_integer_exponent(*node.rhs, k)) return true;
            }
            return fractional_power_walk(*node.lhs) || fractional_power_walk(*node.rhs);
        }
        default:
            return fractional_power_walk(*node.lhs) || fractional_power_walk(*node.rhs);
    }
}

} // namespace detail

/// Detects z raised to a constant non-integer exponent (sqrt of z included).
/// A transform with such a branch point is not single-valued in z^-1, so no
/// discrete-time sequence has it as a Z-transform; callers refuse to invert.
inline bool has_fractional_power_of_z(const ExprAst& ast) {
    return detail::fractional_power_walk(*ast.root);
}

inline bool structurally_equal(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case NodeKind::constant: return a.value == b.value;
        case NodeKind::variable_z: return true;
        case NodeKind::negate: return structurally_equal(*a.lhs, *b.lhs);
        case NodeKind::call:
            return a.func == b.func && structurally_equal(*a.lhs, *b.lhs);
        default:
            return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
    }
}

inline bool structurally_equal(const ExprAst& a, const ExprAst& b) {
    return structurally_equal(*a.root, *b.root);
}

// ---------------------------------------------------------------------------
// Printing. format_expr(parse(s)) reparses to a structurally identical tree.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Precedence levels: additive 1, multiplicative 2, unary minus 3, power 4.
inline void print_node(const ExprNode& node, int min_prec, std::string& out) {
    switch (node.kind) {
        case NodeKind::constant: {
            const bool neg = std::signbit(node.value);
            if (neg && min_prec > 3) out += '(';
            out += format_double(node.value);
            if (neg && min_prec > 3) out += ')';
            return;
        }
        case NodeKind::variable_z:
            out += 'z';
            return;
        case NodeKind::negate: {
            const bool parens = min_prec > 3;
            if (parens) out += '(';
            out += '-';
            print_node(*node.lhs, 3, out);
            if (parens) out += ')';
            return;
        }
        case NodeKind::call:
            out += func_name(node.func);
            out += '(';
            print_node(*node.lhs, 0, out);
            out += ')';
            return;
        case NodeKind::power: {
            const bool parens = min_prec > 4;
            if (parens) out += '(';
            print_node(*node.lhs, 5, out); // left operand of ^ must be atomic
            out += '^';
            print_node(*node.rhs, 3, out); // allow a signed exponent without parens
            if (parens) out += ')';
            return;
        }
        default: {
            int prec;
            char op;
            switch (node.kind) {
                case NodeKind::add: prec = 1; op = '+'; break;
                case NodeKind::subtract: prec = 1; op = '-'; break;
                case NodeKind::multiply: prec = 2; op = '*'; break;
                default: prec = 2; op = '/'; break;
            }
            const bool parens = min_prec > prec;
            if (parens) out += '(';
            print_node(*node.lhs, prec, out);
            out += op;
            print_node(*node.rhs, prec + 1, out);
            if (parens) out += ')';
            return;
        }
    }
}

} // namespace detail

inline std::string format_expr(const ExprAst& ast) {
    std::string out;
    detail::print_node(*ast.root, 0, out);
    return out;
}

} // namespace ztinv
