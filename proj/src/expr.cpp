#include "ikam/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>

namespace ikam {

namespace {

enum Op {
    op_const,
    op_var,
    op_add,
    op_sub,
    op_mul,
    op_div,
    op_pow,
    op_neg,
    op_sin,
    op_cos,
    op_exp,
    op_sqrt,
    op_abs,
};

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

} // namespace

struct Expr::Node {
    int op;
    double value = 0.0;      // op_const
    int slot = -1;           // op_var
    std::string name;        // op_var (for printing)
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct Parser {
    std::string_view src;
    std::size_t pos = 0;
    std::span<const std::string> vars;

    [[noreturn]] void fail(const std::string& msg, std::size_t at) { throw ParseError(msg, at); }

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }

    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    bool consume(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }

    NodePtr make_const(double v) {
        auto n = std::make_shared<Expr::Node>();
        n->op = op_const;
        n->value = v;
        return n;
    }

    NodePtr make_unary(int op, NodePtr a) {
        auto n = std::make_shared<Expr::Node>();
        n->op = op;
        n->lhs = std::move(a);
        return n;
    }

    NodePtr make_binary(int op, NodePtr a, NodePtr b) {
        auto n = std::make_shared<Expr::Node>();
        n->op = op;
        n->lhs = std::move(a);
        n->rhs = std::move(b);
        return n;
    }

    NodePtr parse_number() {
        skip_ws();
        const char* begin = src.data() + pos;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("expected number", pos);
        pos += static_cast<std::size_t>(end - begin);
        return make_const(v);
    }

    std::string parse_ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
            ++pos;
        return std::string(src.substr(start, pos - start));
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos >= src.size()) fail("unexpected end of expression", pos);
        char c = src[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++pos;
            NodePtr e = parse_sum();
            if (!consume(')')) fail("expected ')'", pos);
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t at = pos;
            std::string name = parse_ident();
            if (peek() == '(') {
                ++pos;
                static const std::map<std::string, int> funcs = {
                    {"sin", op_sin}, {"cos", op_cos}, {"exp", op_exp},
                    {"sqrt", op_sqrt}, {"abs", op_abs}, {"pow", op_pow}};
                auto it = funcs.find(name);
                if (it == funcs.end()) fail("unknown function '" + name + "'", at);
                NodePtr a = parse_sum();
                if (it->second == op_pow) {
                    if (!consume(',')) fail("pow expects two arguments", pos);
                    NodePtr b = parse_sum();
                    if (!consume(')')) fail("expected ')'", pos);
                    return make_binary(op_pow, std::move(a), std::move(b));
                }
                if (!consume(')')) fail("expected ')'", pos);
                return make_unary(it->second, std::move(a));
            }
            if (name == "pi") return make_const(M_PI);
            for (std::size_t i = 0; i < vars.size(); ++i) {
                if (vars[i] == name) {
                    auto n = std::make_shared<Expr::Node>();
                    n->op = op_var;
                    n->slot = static_cast<int>(i);
                    n->name = name;
                    return n;
                }
            }
            fail("unknown identifier '" + name + "'", at);
        }
        fail(std::string("unexpected character '") + c + "'", pos);
    }

    // power := primary ['^' unary], right-associative; the exponent may carry
    // its own unary minus so that 2^-3 parses while -x^2 stays -(x^2).
    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (peek() == '^') {
            ++pos;
            NodePtr exp = parse_unary();
            return make_binary(op_pow, std::move(base), std::move(exp));
        }
        return base;
    }

    NodePtr parse_unary() {
        if (peek() == '-') {
            ++pos;
            return make_unary(op_neg, parse_unary());
        }
        if (peek() == '+') {
            ++pos;
            return parse_unary();
        }
        return parse_power();
    }

    NodePtr parse_product() {
        NodePtr a = parse_unary();
        for (;;) {
            char c = peek();
            if (c == '*' || c == '/') {
                ++pos;
                NodePtr b = parse_unary();
                a = make_binary(c == '*' ? op_mul : op_div, std::move(a), std::move(b));
            } else {
                return a;
            }
        }
    }

    NodePtr parse_sum() {
        NodePtr a = parse_product();
        for (;;) {
            char c = peek();
            if (c == '+' || c == '-') {
                ++pos;
                NodePtr b = parse_product();
                a = make_binary(c == '+' ? op_add : op_sub, std::move(a), std::move(b));
            } else {
                return a;
            }
        }
    }
};

int precedence(int op) {
    switch (op) {
        case op_add:
        case op_sub: return 1;
        case op_mul:
        case op_div: return 2;
        case op_neg: return 3;
        case op_pow: return 4;
        default: return 5;
    }
}

void print_node(const Expr::Node& n, std::string& out, int parent_prec, bool rhs_of_parent) {
    const int prec = precedence(n.op);
    const bool parens = prec < parent_prec || (prec == parent_prec && rhs_of_parent);
    switch (n.op) {
        case op_const: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out += buf;
            return;
        }
        case op_var: out += n.name; return;
        case op_neg:
            if (parens) out += '(';
            out += '-';
            print_node(*n.lhs, out, prec, true);
            if (parens) out += ')';
            return;
        case op_sin:
        case op_cos:
        case op_exp:
        case op_sqrt:
        case op_abs: {
            const char* name = n.op == op_sin    ? "sin"
                               : n.op == op_cos  ? "cos"
                               : n.op == op_exp  ? "exp"
                               : n.op == op_sqrt ? "sqrt"
                                                 : "abs";
            out += name;
            out += '(';
            print_node(*n.lhs, out, 0, false);
            out += ')';
            return;
        }
        default: {
            const char sym = n.op == op_add   ? '+'
                             : n.op == op_sub ? '-'
                             : n.op == op_mul ? '*'
                             : n.op == op_div ? '/'
                                              : '^';
            if (parens) out += '(';
            // '^' is right-associative: parenthesize a left child of equal precedence.
            print_node(*n.lhs, out, prec, n.op == op_pow);
            out += sym;
            print_node(*n.rhs, out, prec, n.op != op_pow);
            if (parens) out += ')';
            return;
        }
    }
}

} // namespace

Expr Expr::parse(std::string_view src, std::span<const std::string> allowed_vars) {
    Parser p{src, 0, allowed_vars};
    Expr e;
    e.root_ = p.parse_sum();
    p.skip_ws();
    if (p.pos != src.size()) p.fail("trailing input", p.pos);
    e.vars_.assign(allowed_vars.begin(), allowed_vars.end());
    e.compile();
    if (e.stack_need_ > 64) throw ParseError("expression too deeply nested", 0);
    return e;
}

void Expr::compile() {
    program_.clear();
    std::size_t depth = 0;
    stack_need_ = 0;
    // Post-order walk without recursion depth concerns for config-sized input.
    struct Frame {
        const Node* node;
        int stage;
    };
    std::vector<Frame> stack{{root_.get(), 0}};
    while (!stack.empty()) {
        auto [node, stage] = stack.back();
        stack.pop_back();
        if (stage == 0) {
            stack.push_back({node, 1});
            if (node->rhs) stack.push_back({node->rhs.get(), 0});
            if (node->lhs) stack.push_back({node->lhs.get(), 0});
            continue;
        }
        Instr in{};
        in.op = node->op;
        if (node->op == op_const) {
            in.value = node->value;
            ++depth;
        } else if (node->op == op_var) {
            in.arg = node->slot;
            ++depth;
        } else if (node->rhs) {
            --depth; // binary: two operands collapse to one
        }
        stack_need_ = std::max(stack_need_, depth);
        program_.push_back(in);
    }
}

double Expr::eval(std::span<const double> values) const {
    double stack[64];
    std::size_t top = 0;
    for (const Instr& in : program_) {
        switch (in.op) {
            case op_const: stack[top++] = in.value; break;
            case op_var: stack[top++] = values[static_cast<std::size_t>(in.arg)]; break;
            case op_add: --top; stack[top - 1] += stack[top]; break;
            case op_sub: --top; stack[top - 1] -= stack[top]; break;
            case op_mul: --top; stack[top - 1] *= stack[top]; break;
            case op_div: {
                --top;
                if (stack[top] == 0.0) throw EvalError("division by zero");
                stack[top - 1] /= stack[top];
                break;
            }
            case op_pow: {
                --top;
                const double b = stack[top - 1], e = stack[top];
                if (b < 0.0 && !is_integer(e))
                    throw EvalError("non-integer power of negative base");
                if (b == 0.0 && e < 0.0) throw EvalError("zero raised to negative power");
                stack[top - 1] = std::pow(b, e);
                break;
            }
            case op_neg: stack[top - 1] = -stack[top - 1]; break;
            case op_sin: stack[top - 1] = std::sin(stack[top - 1]); break;
            case op_cos: stack[top - 1] = std::cos(stack[top - 1]); break;
            case op_exp: stack[top - 1] = std::exp(stack[top - 1]); break;
            case op_sqrt: {
                if (stack[top - 1] < 0.0) throw EvalError("sqrt of negative value");
                stack[top - 1] = std::sqrt(stack[top - 1]);
                break;
            }
            case op_abs: stack[top - 1] = std::abs(stack[top - 1]); break;
        }
    }
    const double r = stack[0];
    if (!std::isfinite(r)) throw EvalError("expression evaluated to a non-finite value");
    return r;
}

std::string Expr::to_string() const {
    std::string out;
    print_node(*root_, out, 0, false);
    return out;
}

bool Expr::is_literal_zero() const { return root_->op == op_const && root_->value == 0.0; }

double Expr::numeric_partial(std::size_t slot, std::span<const double> at, double step) const {
    std::vector<double> point(at.begin(), at.end());
    auto f = [&](double v) {
        point[slot] = v;
        return eval(point);
    };
    const double v0 = at[slot];
    const double h = step > 0.0 ? step : 1e-5 * std::max(1.0, std::abs(v0));
    const double d1 = (f(v0 + h) - f(v0 - h)) / (2.0 * h);
    const double d2 = (f(v0 + h / 2.0) - f(v0 - h / 2.0)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

} // namespace ikam
