#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "linefib/dual.hpp"
#include "linefib/errors.hpp"

namespace linefib {

enum class NodeKind { Number, Pi, E, Var, Neg, Call1, Call2, Add, Sub, Mul, Div, Pow };

enum class Func { Sin, Cos, Tan, Atan, Atan2, Exp, Log, Sqrt, Abs };

namespace detail {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    double number = 0.0;  // Number
    int var = 0;          // Var: 0 = x, 1 = y, 2 = z
    Func func = Func::Sin;
    NodePtr a, b;
};

inline NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

inline const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Tan: return "tan";
        case Func::Atan: return "atan";
        case Func::Atan2: return "atan2";
        case Func::Exp: return "exp";
        case Func::Log: return "log";
        case Func::Sqrt: return "sqrt";
        case Func::Abs: return "abs";
    }
    return "?";
}

template <typename S>
S eval_node(const Node& n, const std::array<S, 3>& at) {
    using std::abs;
    using std::atan;
    using std::atan2;
    using std::cos;
    using std::exp;
    using std::log;
    using std::pow;
    using std::sin;
    using std::sqrt;
    using std::tan;
    switch (n.kind) {
        case NodeKind::Number: return S(n.number);
        case NodeKind::Pi: return S(std::numbers::pi);
        case NodeKind::E: return S(std::numbers::e);
        case NodeKind::Var: return at[static_cast<std::size_t>(n.var)];
        case NodeKind::Neg: return -eval_node(*n.a, at);
        case NodeKind::Add: return eval_node(*n.a, at) + eval_node(*n.b, at);
        case NodeKind::Sub: return eval_node(*n.a, at) - eval_node(*n.b, at);
        case NodeKind::Mul: return eval_node(*n.a, at) * eval_node(*n.b, at);
        case NodeKind::Div: {
            S num = eval_node(*n.a, at);
            S den = eval_node(*n.b, at);
            if (scalar_value(den) == 0.0) throw DomainError("division by zero");
            return num / den;
        }
        case NodeKind::Pow: {
            S base = eval_node(*n.a, at);
            S expo = eval_node(*n.b, at);
            S r = pow(base, expo);
            if (!std::isfinite(scalar_value(r)))
                throw DomainError("pow: undefined or non-finite result");
            return r;
        }
        case NodeKind::Call1: {
            S arg = eval_node(*n.a, at);
            switch (n.func) {
                case Func::Sin: return sin(arg);
                case Func::Cos: return cos(arg);
                case Func::Tan: return tan(arg);
                case Func::Atan: return atan(arg);
                case Func::Exp: return exp(arg);
                case Func::Log:
                    if (scalar_value(arg) <= 0.0)
                        throw DomainError("log of non-positive argument");
                    return log(arg);
                case Func::Sqrt:
                    if (scalar_value(arg) < 0.0)
                        throw DomainError("sqrt of negative argument");
                    return sqrt(arg);
                case Func::Abs: return abs(arg);
                default: break;
            }
            throw DomainError("bad unary function node");
        }
        case NodeKind::Call2: {
            S ay = eval_node(*n.a, at);
            S ax = eval_node(*n.b, at);
            return atan2(ay, ax);
        }
    }
    throw DomainError("bad expression node");
}

inline std::string format_number(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Precedence levels for printing: + - (1), * / (2), unary - (3), ^ (4),
// atoms (5). A child is parenthesized when its level drops below the
// context minimum, which reproduces the grammar's associativity.
inline int node_prec(const Node& n) {
    switch (n.kind) {
        case NodeKind::Add:
        case NodeKind::Sub: return 1;
        case NodeKind::Mul:
        case NodeKind::Div: return 2;
        case NodeKind::Neg: return 3;
        case NodeKind::Pow: return 4;
        default: return 5;
    }
}

inline void print_node(const Node& n, int min_prec, std::string& out) {
    int prec = node_prec(n);
    bool paren = prec < min_prec;
    if (paren) out += '(';
    switch (n.kind) {
        case NodeKind::Number: out += format_number(n.number); break;
        case NodeKind::Pi: out += "pi"; break;
        case NodeKind::E: out += "e"; break;
        case NodeKind::Var: out += "xyz"[n.var]; break;
        case NodeKind::Neg:
            out += '-';
            print_node(*n.a, 4, out);
            break;
        case NodeKind::Add:
            print_node(*n.a, 1, out);
            out += '+';
            print_node(*n.b, 2, out);
            break;
        case NodeKind::Sub:
            print_node(*n.a, 1, out);
            out += '-';
            print_node(*n.b, 2, out);
            break;
        case NodeKind::Mul:
            print_node(*n.a, 2, out);
            out += '*';
            print_node(*n.b, 3, out);
            break;
        case NodeKind::Div:
            print_node(*n.a, 2, out);
            out += '/';
            print_node(*n.b, 3, out);
            break;
        case NodeKind::Pow:
            print_node(*n.a, 5, out);
            out += '^';
            print_node(*n.b, 3, out);
            break;
        case NodeKind::Call1:
            out += func_name(n.func);
            out += '(';
            print_node(*n.a, 0, out);
            out += ')';
            break;
        case NodeKind::Call2:
            out += func_name(n.func);
            out += '(';
            print_node(*n.a, 0, out);
            out += ", ";
            print_node(*n.b, 0, out);
            out += ')';
            break;
    }
    if (paren) out += ')';
}

inline bool nodes_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case NodeKind::Number: return a.number == b.number;
        case NodeKind::Pi:
        case NodeKind::E: return true;
        case NodeKind::Var: return a.var == b.var;
        case NodeKind::Neg: return nodes_equal(*a.a, *b.a);
        case NodeKind::Call1: return a.func == b.func && nodes_equal(*a.a, *b.a);
        case NodeKind::Call2:
            return a.func == b.func && nodes_equal(*a.a, *b.a) && nodes_equal(*a.b, *b.b);
        default: return nodes_equal(*a.a, *b.a) && nodes_equal(*a.b, *b.b);
    }
}

inline void collect_vars(const Node& n, std::array<bool, 3>& used) {
    switch (n.kind) {
        case NodeKind::Var: used[static_cast<std::size_t>(n.var)] = true; break;
        case NodeKind::Neg:
        case NodeKind::Call1: collect_vars(*n.a, used); break;
        case NodeKind::Number:
        case NodeKind::Pi:
        case NodeKind::E: break;
        default:
            collect_vars(*n.a, used);
            collect_vars(*n.b, used);
    }
}

inline NodePtr substitute_node(const NodePtr& n, const std::array<NodePtr, 3>& repl) {
    switch (n->kind) {
        case NodeKind::Var: return repl[static_cast<std::size_t>(n->var)];
        case NodeKind::Number:
        case NodeKind::Pi:
        case NodeKind::E: return n;
        case NodeKind::Neg:
        case NodeKind::Call1: {
            Node c = *n;
            c.a = substitute_node(n->a, repl);
            return make_node(std::move(c));
        }
        default: {
            Node c = *n;
            c.a = substitute_node(n->a, repl);
            c.b = substitute_node(n->b, repl);
            return make_node(std::move(c));
        }
    }
}

}  // namespace detail

/// Immutable closed-form scalar expression in the variables x, y, z.
///
/// Grammar (precedence ^ > unary - > * / > + -, with ^ right-associative):
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := ("-")? power
///   power  := atom ("^" factor)?
///   atom   := number | "pi" | "e" | "x" | "y" | "z"
///           | func "(" expr ("," expr)? ")" | "(" expr ")"
///   func   := sin|cos|tan|atan|atan2|exp|log|sqrt|abs
/// Angles are radians. There is no implicit multiplication.
class Expression {
public:
    Expression() = default;

    bool valid() const { return root_ != nullptr; }

    /// Evaluate over any scalar type supporting the arithmetic used by the
    /// tree: double, Dual<double, N>, or nested duals.
    template <typename S>
    S eval(const std::array<S, 3>& at) const {
        if (!root_) throw Error("empty expression");
        return detail::eval_node<S>(*root_, at);
    }

    double eval_at(double x, double y, double z) const {
        return eval<double>({x, y, z});
    }

    /// Canonical text form; parsing it back yields a structurally equal tree.
    std::string str() const {
        if (!root_) return "";
        std::string out;
        detail::print_node(*root_, 0, out);
        return out;
    }

    bool operator==(const Expression& o) const {
        if (!root_ || !o.root_) return root_ == o.root_;
        return detail::nodes_equal(*root_, *o.root_);
    }

    /// Which of x, y, z occur in the tree.
    std::array<bool, 3> variables_used() const {
        std::array<bool, 3> used{false, false, false};
        if (root_) detail::collect_vars(*root_, used);
        return used;
    }

    /// Replace every occurrence of x, y, z by the given expressions.
    Expression substituted(const Expression& sx, const Expression& sy,
                           const Expression& sz) const {
        if (!root_ || !sx.root_ || !sy.root_ || !sz.root_) throw Error("empty expression");
        return Expression(detail::substitute_node(root_, {sx.root_, sy.root_, sz.root_}));
    }

    // -- programmatic construction (used for derived fields) --
    static Expression number(double v) {
        if (v < 0.0) return neg(number(-v));
        detail::Node n;
        n.kind = NodeKind::Number;
        n.number = v;
        return Expression(detail::make_node(std::move(n)));
    }
    static Expression variable(int axis) {
        detail::Node n;
        n.kind = NodeKind::Var;
        n.var = axis;
        return Expression(detail::make_node(std::move(n)));
    }
    static Expression neg(const Expression& a) { return unary(NodeKind::Neg, a); }
    static Expression add(const Expression& a, const Expression& b) {
        return binary(NodeKind::Add, a, b);
    }
    static Expression sub(const Expression& a, const Expression& b) {
        return binary(NodeKind::Sub, a, b);
    }
    static Expression mul(const Expression& a, const Expression& b) {
        return binary(NodeKind::Mul, a, b);
    }
    static Expression call(Func f, const Expression& a) {
        detail::Node n;
        n.kind = NodeKind::Call1;
        n.func = f;
        n.a = a.root_;
        return Expression(detail::make_node(std::move(n)));
    }

private:
    explicit Expression(detail::NodePtr root) : root_(std::move(root)) {}

    static Expression unary(NodeKind k, const Expression& a) {
        detail::Node n;
        n.kind = k;
        n.a = a.root_;
        return Expression(detail::make_node(std::move(n)));
    }
    static Expression binary(NodeKind k, const Expression& a, const Expression& b) {
        detail::Node n;
        n.kind = k;
        n.a = a.root_;
        n.b = b.root_;
        return Expression(detail::make_node(std::move(n)));
    }

    friend Expression parse_expression(std::string_view);

    detail::NodePtr root_;
};

namespace detail {

enum class TokKind { End, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, Number, Ident };

struct Token {
    TokKind kind;
    std::size_t offset = 0;
    double number = 0.0;
    std::string ident;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        Token t;
        t.offset = pos_;
        if (pos_ >= text_.size()) {
            t.kind = TokKind::End;
            return t;
        }
        char c = text_[pos_];
        switch (c) {
            case '+': ++pos_; t.kind = TokKind::Plus; return t;
            case '-': ++pos_; t.kind = TokKind::Minus; return t;
            case '*': ++pos_; t.kind = TokKind::Star; return t;
            case '/': ++pos_; t.kind = TokKind::Slash; return t;
            case '^': ++pos_; t.kind = TokKind::Caret; return t;
            case '(': ++pos_; t.kind = TokKind::LParen; return t;
            case ')': ++pos_; t.kind = TokKind::RParen; return t;
            case ',': ++pos_; t.kind = TokKind::Comma; return t;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
            t.kind = TokKind::Number;
            t.number = lex_number(t.offset);
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            t.kind = TokKind::Ident;
            t.ident = std::string(text_.substr(start, pos_ - start));
            return t;
        }
        throw ParseError(pos_, std::string("unexpected character '") + c + "'");
    }

private:
    double lex_number(std::size_t start) {
        std::size_t end = start;
        auto is_digit = [&](std::size_t i) {
            return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
        };
        while (is_digit(end)) ++end;
        if (end < text_.size() && text_[end] == '.') {
            ++end;
            while (is_digit(end)) ++end;
        }
        if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
            std::size_t exp = end + 1;
            if (exp < text_.size() && (text_[exp] == '+' || text_[exp] == '-')) ++exp;
            if (is_digit(exp)) {
                end = exp;
                while (is_digit(end)) ++end;
            }
        }
        double v = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + end, v);
        if (res.ec != std::errc{})
            throw ParseError(start, "malformed numeric literal");
        pos_ = end;
        return v;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) { advance(); }

    NodePtr parse() {
        NodePtr e = expr();
        if (cur_.kind != TokKind::End)
            throw ParseError(cur_.offset, "syntax error: unexpected trailing input");
        return e;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    bool accept(TokKind k) {
        if (cur_.kind != k) return false;
        advance();
        return true;
    }

    void expect(TokKind k, const char* what) {
        if (cur_.kind != k) throw ParseError(cur_.offset, std::string("expected ") + what);
        advance();
    }

    NodePtr expr() {
        NodePtr left = term();
        for (;;) {
            if (accept(TokKind::Plus))
                left = bin(NodeKind::Add, left, term());
            else if (accept(TokKind::Minus))
                left = bin(NodeKind::Sub, left, term());
            else
                return left;
        }
    }

    NodePtr term() {
        NodePtr left = factor();
        for (;;) {
            if (accept(TokKind::Star))
                left = bin(NodeKind::Mul, left, factor());
            else if (accept(TokKind::Slash))
                left = bin(NodeKind::Div, left, factor());
            else
                return left;
        }
    }

    NodePtr factor() {
        if (accept(TokKind::Minus)) {
            Node n;
            n.kind = NodeKind::Neg;
            n.a = power();
            return make_node(std::move(n));
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (accept(TokKind::Caret)) return bin(NodeKind::Pow, base, factor());
        return base;
    }

    NodePtr atom() {
        Token t = cur_;
        switch (t.kind) {
            case TokKind::Number: {
                advance();
                Node n;
                n.kind = NodeKind::Number;
                n.number = t.number;
                return make_node(std::move(n));
            }
            case TokKind::LParen: {
                advance();
                NodePtr e = expr();
                expect(TokKind::RParen, "')'");
                return e;
            }
            case TokKind::Ident: {
                advance();
                return ident_atom(t);
            }
            default:
                throw ParseError(t.offset, "syntax error: expected expression");
        }
    }

    NodePtr ident_atom(const Token& t) {
        const std::string& id = t.ident;
        if (id == "pi") return leaf(NodeKind::Pi);
        if (id == "e") return leaf(NodeKind::E);
        if (id == "x") return var(0);
        if (id == "y") return var(1);
        if (id == "z") return var(2);

        static const std::pair<const char*, Func> table[] = {
            {"sin", Func::Sin},   {"cos", Func::Cos}, {"tan", Func::Tan},
            {"atan", Func::Atan}, {"atan2", Func::Atan2}, {"exp", Func::Exp},
            {"log", Func::Log},   {"sqrt", Func::Sqrt},   {"abs", Func::Abs}};
        for (const auto& [name, f] : table) {
            if (id == name) return call(t, f);
        }
        throw ParseError(t.offset, "unknown identifier '" + id + "'");
    }

    NodePtr call(const Token& t, Func f) {
        if (cur_.kind != TokKind::LParen)
            throw ParseError(cur_.offset, "expected '(' after function '" + t.ident + "'");
        advance();
        std::vector<NodePtr> args;
        args.push_back(expr());
        if (accept(TokKind::Comma)) args.push_back(expr());
        expect(TokKind::RParen, "')'");

        std::size_t arity = (f == Func::Atan2) ? 2 : 1;
        if (args.size() != arity)
            throw ParseError(t.offset, "arity mismatch: '" + t.ident + "' expects " +
                                           std::to_string(arity) + " argument" +
                                           (arity == 1 ? "" : "s") + ", got " +
                                           std::to_string(args.size()));
        Node n;
        n.kind = arity == 1 ? NodeKind::Call1 : NodeKind::Call2;
        n.func = f;
        n.a = args[0];
        if (arity == 2) n.b = args[1];
        return make_node(std::move(n));
    }

    static NodePtr leaf(NodeKind k) {
        Node n;
        n.kind = k;
        return make_node(std::move(n));
    }
    static NodePtr var(int axis) {
        Node n;
        n.kind = NodeKind::Var;
        n.var = axis;
        return make_node(std::move(n));
    }
    static NodePtr bin(NodeKind k, NodePtr a, NodePtr b) {
        Node n;
        n.kind = k;
        n.a = std::move(a);
        n.b = std::move(b);
        return make_node(std::move(n));
    }

    Lexer lexer_;
    Token cur_;
};

}  // namespace detail

/// Parse expression text; throws ParseError (with byte offset) on failure.
inline Expression parse_expression(std::string_view text) {
    detail::Parser p(text);
    return Expression(p.parse());
}

}  // namespace linefib
