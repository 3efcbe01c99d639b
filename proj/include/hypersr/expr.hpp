#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hypersr/rng.hpp"

namespace hypersr {

enum class OpKind : std::uint8_t { Add, Sub, Mul, Div, Sqrt, Exp, Log, Pow };

int arity(OpKind op);
std::string_view op_name(OpKind op);
OpKind op_from_name(std::string_view name);  // throws std::invalid_argument

enum class NodeKind : std::uint8_t { Operator, Variable, Constant };

struct Node {
    NodeKind kind;
    OpKind op = OpKind::Add;   // valid when kind == Operator
    std::int32_t var = 0;      // valid when kind == Variable
    double value = 0.0;        // valid when kind == Constant

    static Node make_op(OpKind op);
    static Node make_var(std::int32_t index);
    static Node make_const(double value);

    // Constants compare bitwise so that -0.0 and 0.0 stay distinct and
    // round trips through text can be checked exactly.
    bool operator==(const Node& other) const;
};

// Expression stored as a flat array of nodes in pre-order. Every subtree is a
// contiguous span, which makes subtree surgery a splice and keeps evaluation
// allocation-free. The constructor rejects arrays that are not exactly one
// well-formed expression (operator arities consumed, no trailing nodes) or
// that contain non-finite constants.
class ExpressionTree {
public:
    ExpressionTree() = default;
    explicit ExpressionTree(std::vector<Node> nodes);

    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }

    // New tree with nodes [start, start + len) replaced by the given span.
    ExpressionTree replaced(std::size_t start, std::size_t len,
                            std::span<const Node> replacement) const;

    bool operator==(const ExpressionTree& other) const;

private:
    std::vector<Node> nodes_;
};

// Length of the subtree rooted at index root.
std::size_t subtree_length(std::span<const Node> nodes, std::size_t root);

std::size_t tree_size(const ExpressionTree& tree);
std::size_t tree_depth(const ExpressionTree& tree);  // single node has depth 0

// Throws std::invalid_argument when the tree is malformed or references a
// variable index >= n_variables. Used by tests after every tree operation.
void validate_tree(const ExpressionTree& tree, std::size_t n_variables);

// Evaluates the tree at one binding vector (one value per declared variable,
// in declaration order). Arithmetic is protected so the result is always
// finite for finite bindings:
//   div(a, b)  -> 1 when |b| < 1e-9, else a / b
//   sqrt(x)    -> sqrt(|x|)
//   log(x)     -> 0 when |x| < 1e-9, else log(|x|)
//   exp(x)     -> argument clamped to [-50, 50]
//   pow(a, b)  -> |a|^b, magnitude clamped to 1e30
// Every node result is additionally clamped to [-1e30, 1e30] so that long
// add/mul chains cannot overflow to infinity.
// Out-of-range variable indices throw std::out_of_range.
double evaluate(const ExpressionTree& tree, std::span<const double> bindings);

struct ParseError : std::runtime_error {
    ParseError(const std::string& message, std::size_t offset);
    std::size_t offset;  // byte position in the input text
};

// Infix parser over +, -, *, /, the calls sqrt(), exp(), log(), pow(,) and
// the declared variable names. Unary minus is accepted; applied to a numeric
// literal it folds into the constant. Throws ParseError with a byte offset.
ExpressionTree parse(std::string_view text,
                     std::span<const std::string> variables);

// Infix rendering with minimal parentheses. Constants are printed in the
// shortest form that round trips exactly, so parse(to_string(t)) == t.
std::string to_string(const ExpressionTree& tree,
                      std::span<const std::string> variables);

// Operator pool, named inputs and the constant range used to draw leaves.
struct FunctionSet {
    std::vector<OpKind> operators;
    std::vector<std::string> variables;
    double constant_lo = -1.0;
    double constant_hi = 1.0;

    void validate() const;  // throws std::invalid_argument

    // add, sub, mul, div, sqrt, exp, log. pow must be opted into explicitly.
    static std::vector<OpKind> default_operators();

    // I1bar, I2bar, J plus eta1..etaN for N extra inputs.
    static std::vector<std::string> invariant_variables(std::size_t n_extras);
};

enum class InitMethod { Full, Grow };

// Random tree with the given depth limit (>= 1). The root is always an
// operator. "Full" places operators everywhere above the depth limit;
// "Grow" chooses operator or leaf with equal probability below the root, so
// it may undershoot the limit. Leaves are variables with probability 0.9,
// otherwise constants drawn uniformly from the set's range.
ExpressionTree random_tree(const FunctionSet& set, InitMethod method,
                           int max_depth, Rng& rng);

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

}  // namespace hypersr
