#ifndef IKAM_EXPR_HPP
#define IKAM_EXPR_HPP

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ikam/errors.hpp"

namespace ikam {

// Arithmetic expressions used for periodic coefficients and jump-map
// prescriptions. Supported: numeric literals, the constant pi, a declared
// variable set, + - * / ^ with the usual precedence (^ right-associative,
// binding tighter than unary minus), and sin, cos, exp, sqrt, abs, pow.
//
// Parsing resolves each variable to a slot index in the declared order, so
// evaluation takes a plain value span and needs no name lookup. Expressions
// are immutable after parse; evaluation is pure and thread-safe.
class Expr {
public:
    Expr() = default;

    // Throws ParseError (syntax, unknown identifier) with a byte offset.
    static Expr parse(std::string_view src, std::span<const std::string> allowed_vars);

    // `values[i]` binds the i-th declared variable. Throws EvalError on
    // domain problems; never returns NaN/Inf silently.
    double eval(std::span<const double> values) const;

    // Round-trippable text form (minimal parentheses).
    std::string to_string() const;

    const std::vector<std::string>& variables() const { return vars_; }

    bool is_literal_zero() const;

    // dE/d(var slot) at `at`, central differences with one Richardson level.
    // step == 0 selects the default 1e-5 * max(1, |at[slot]|).
    double numeric_partial(std::size_t slot, std::span<const double> at, double step = 0.0) const;

private:
    struct Node;
    std::shared_ptr<const Node> root_;
    std::vector<std::string> vars_;

    // Flattened postfix program for allocation-free evaluation.
    struct Instr {
        int op;
        int arg;
        double value;
    };
    std::vector<Instr> program_;
    std::size_t stack_need_ = 0;

    void compile();
};

} // namespace ikam

#endif
