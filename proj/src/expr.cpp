#include "hypersr/expr.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace hypersr {

namespace {

constexpr double kValueCap = 1e30;
constexpr double kDivEps = 1e-9;
constexpr double kLogEps = 1e-9;
constexpr double kExpArgMax = 50.0;
constexpr double kVariableLeafProb = 0.9;

double clamp_value(double v) {
    return std::clamp(v, -kValueCap, kValueCap);
}

double apply_unary(OpKind op, double a) {
    switch (op) {
        case OpKind::Sqrt: return std::sqrt(std::abs(a));
        case OpKind::Exp: return std::exp(std::clamp(a, -kExpArgMax, kExpArgMax));
        case OpKind::Log: return std::abs(a) < kLogEps ? 0.0 : std::log(std::abs(a));
        default: throw std::logic_error("apply_unary: not a unary operator");
    }
}

double apply_binary(OpKind op, double a, double b) {
    switch (op) {
        case OpKind::Add: return a + b;
        case OpKind::Sub: return a - b;
        case OpKind::Mul: return a * b;
        case OpKind::Div: return std::abs(b) < kDivEps ? 1.0 : a / b;
        case OpKind::Pow: return std::pow(std::abs(a), b);
        default: throw std::logic_error("apply_binary: not a binary operator");
    }
}

}  // namespace

int arity(OpKind op) {
    switch (op) {
        case OpKind::Add:
        case OpKind::Sub:
        case OpKind::Mul:
        case OpKind::Div:
        case OpKind::Pow:
            return 2;
        case OpKind::Sqrt:
        case OpKind::Exp:
        case OpKind::Log:
            return 1;
    }
    throw std::invalid_argument("arity: unknown operator");
}

std::string_view op_name(OpKind op) {
    switch (op) {
        case OpKind::Add: return "add";
        case OpKind::Sub: return "sub";
        case OpKind::Mul: return "mul";
        case OpKind::Div: return "div";
        case OpKind::Sqrt: return "sqrt";
        case OpKind::Exp: return "exp";
        case OpKind::Log: return "log";
        case OpKind::Pow: return "pow";
    }
    throw std::invalid_argument("op_name: unknown operator");
}

OpKind op_from_name(std::string_view name) {
    if (name == "add") return OpKind::Add;
    if (name == "sub") return OpKind::Sub;
    if (name == "mul") return OpKind::Mul;
    if (name == "div") return OpKind::Div;
    if (name == "sqrt") return OpKind::Sqrt;
    if (name == "exp") return OpKind::Exp;
    if (name == "log") return OpKind::Log;
    if (name == "pow") return OpKind::Pow;
    throw std::invalid_argument("unknown operator name: " + std::string(name));
}

Node Node::make_op(OpKind op) {
    Node n;
    n.kind = NodeKind::Operator;
    n.op = op;
    return n;
}

Node Node::make_var(std::int32_t index) {
    Node n;
    n.kind = NodeKind::Variable;
    n.var = index;
    return n;
}

Node Node::make_const(double value) {
    Node n;
    n.kind = NodeKind::Constant;
    n.value = value;
    return n;
}

bool Node::operator==(const Node& other) const {
    if (kind != other.kind) return false;
    switch (kind) {
        case NodeKind::Operator: return op == other.op;
        case NodeKind::Variable: return var == other.var;
        case NodeKind::Constant:
            return std::bit_cast<std::uint64_t>(value) ==
                   std::bit_cast<std::uint64_t>(other.value);
    }
    return false;
}

namespace {

// Checks that nodes form exactly one pre-order expression. Returns false on
// shape errors; non-finite constants are reported through the out flag.
bool well_formed(std::span<const Node> nodes, bool& finite_constants) {
    finite_constants = true;
    if (nodes.empty()) return false;
    std::size_t need = 1;
    for (const Node& n : nodes) {
        if (need == 0) return false;  // trailing nodes after a complete tree
        --need;
        if (n.kind == NodeKind::Operator) {
            need += static_cast<std::size_t>(arity(n.op));
        } else if (n.kind == NodeKind::Constant && !std::isfinite(n.value)) {
            finite_constants = false;
        }
    }
    return need == 0;
}

}  // namespace

ExpressionTree::ExpressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
    bool finite = true;
    if (!well_formed(nodes_, finite)) {
        throw std::invalid_argument("malformed expression node array");
    }
    if (!finite) {
        throw std::invalid_argument("expression constant is not finite");
    }
}

ExpressionTree ExpressionTree::replaced(std::size_t start, std::size_t len,
                                        std::span<const Node> replacement) const {
    if (start > nodes_.size() || start + len > nodes_.size()) {
        throw std::out_of_range("replaced: span outside tree");
    }
    std::vector<Node> out;
    out.reserve(nodes_.size() - len + replacement.size());
    out.insert(out.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(start));
    out.insert(out.end(), replacement.begin(), replacement.end());
    out.insert(out.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(start + len), nodes_.end());
    return ExpressionTree(std::move(out));
}

bool ExpressionTree::operator==(const ExpressionTree& other) const {
    return nodes_ == other.nodes_;
}

std::size_t subtree_length(std::span<const Node> nodes, std::size_t root) {
    if (root >= nodes.size()) {
        throw std::out_of_range("subtree_length: root outside tree");
    }
    std::size_t need = 1;
    std::size_t i = root;
    while (need > 0) {
        if (i >= nodes.size()) {
            throw std::invalid_argument("subtree_length: truncated tree");
        }
        --need;
        if (nodes[i].kind == NodeKind::Operator) {
            need += static_cast<std::size_t>(arity(nodes[i].op));
        }
        ++i;
    }
    return i - root;
}

std::size_t tree_size(const ExpressionTree& tree) { return tree.size(); }

std::size_t tree_depth(const ExpressionTree& tree) {
    if (tree.empty()) throw std::logic_error("tree_depth: empty tree");
    // Pre-order walk with a stack of remaining child counts; the stack height
    // when a node is visited is its depth.
    std::vector<int> pending;
    std::size_t max_depth = 0;
    for (const Node& n : tree.nodes()) {
        max_depth = std::max(max_depth, pending.size());
        if (n.kind == NodeKind::Operator) {
            pending.push_back(arity(n.op));
        } else {
            while (!pending.empty() && --pending.back() == 0) pending.pop_back();
        }
    }
    return max_depth;
}

void validate_tree(const ExpressionTree& tree, std::size_t n_variables) {
    bool finite = true;
    if (!well_formed(tree.nodes(), finite)) {
        throw std::invalid_argument("malformed expression tree");
    }
    if (!finite) {
        throw std::invalid_argument("expression constant is not finite");
    }
    for (const Node& n : tree.nodes()) {
        if (n.kind == NodeKind::Variable &&
            (n.var < 0 || static_cast<std::size_t>(n.var) >= n_variables)) {
            throw std::invalid_argument("variable index out of range");
        }
    }
}

double evaluate(const ExpressionTree& tree, std::span<const double> bindings) {
    if (tree.empty()) throw std::logic_error("evaluate: empty tree");
    const auto& nodes = tree.nodes();
    // Walking the pre-order array backwards turns it into postfix: leaves
    // push, operators pop their children with the left child on top.
    std::vector<double> stack;
    stack.reserve(16);
    for (std::size_t k = nodes.size(); k-- > 0;) {
        const Node& n = nodes[k];
        double v = 0.0;
        switch (n.kind) {
            case NodeKind::Constant:
                v = n.value;
                break;
            case NodeKind::Variable:
                if (n.var < 0 || static_cast<std::size_t>(n.var) >= bindings.size()) {
                    throw std::out_of_range("evaluate: variable index has no binding");
                }
                v = bindings[static_cast<std::size_t>(n.var)];
                break;
            case NodeKind::Operator:
                if (arity(n.op) == 1) {
                    v = apply_unary(n.op, stack.back());
                    stack.pop_back();
                } else {
                    const double a = stack[stack.size() - 1];
                    const double b = stack[stack.size() - 2];
                    stack.resize(stack.size() - 2);
                    v = apply_binary(n.op, a, b);
                }
                break;
        }
        stack.push_back(clamp_value(v));
    }
    return stack.back();
}

ParseError::ParseError(const std::string& message, std::size_t offset)
    : std::runtime_error("parse error at byte " + std::to_string(offset) + ": " + message),
      offset(offset) {}

namespace {

class Parser {
public:
    Parser(std::string_view text, std::span<const std::string> variables)
        : text_(text), vars_(variables) {}

    std::vector<Node> run() {
        auto nodes = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) {
            throw ParseError("unexpected trailing input", pos_);
        }
        return nodes;
    }

private:
    std::string_view text_;
    std::span<const std::string> vars_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() &&
               (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                text_[pos_] == '\n' || text_[pos_] == '\r')) {
            ++pos_;
        }
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    static std::vector<Node> join(OpKind op, std::vector<Node> lhs, std::vector<Node> rhs) {
        std::vector<Node> out;
        out.reserve(1 + lhs.size() + rhs.size());
        out.push_back(Node::make_op(op));
        out.insert(out.end(), lhs.begin(), lhs.end());
        out.insert(out.end(), rhs.begin(), rhs.end());
        return out;
    }

    std::vector<Node> parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            if (eat('+')) {
                lhs = join(OpKind::Add, std::move(lhs), parse_term());
            } else if (eat('-')) {
                lhs = join(OpKind::Sub, std::move(lhs), parse_term());
            } else {
                return lhs;
            }
        }
    }

    std::vector<Node> parse_term() {
        auto lhs = parse_factor();
        for (;;) {
            if (eat('*')) {
                lhs = join(OpKind::Mul, std::move(lhs), parse_factor());
            } else if (eat('/')) {
                lhs = join(OpKind::Div, std::move(lhs), parse_factor());
            } else {
                return lhs;
            }
        }
    }

    std::vector<Node> parse_factor() {
        skip_ws();
        if (eat('+')) return parse_factor();
        if (eat('-')) {
            auto operand = parse_factor();
            if (operand.size() == 1 && operand[0].kind == NodeKind::Constant) {
                operand[0].value = -operand[0].value;
                return operand;
            }
            std::vector<Node> zero{Node::make_const(0.0)};
            return join(OpKind::Sub, std::move(zero), std::move(operand));
        }
        return parse_primary();
    }

    std::vector<Node> parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) {
            throw ParseError("unexpected end of input", pos_);
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = parse_expr();
            if (!eat(')')) {
                throw ParseError("expected ')'", pos_);
            }
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.') {
            return {parse_number()};
        }
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
            return parse_identifier();
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    Node parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               ((text_[pos_] >= '0' && text_[pos_] <= '9') || text_[pos_] == '.')) {
            ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t exp_pos = pos_ + 1;
            if (exp_pos < text_.size() && (text_[exp_pos] == '+' || text_[exp_pos] == '-')) {
                ++exp_pos;
            }
            if (exp_pos < text_.size() && text_[exp_pos] >= '0' && text_[exp_pos] <= '9') {
                pos_ = exp_pos;
                while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
                    ++pos_;
                }
            }
        }
        double value = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        auto [end, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || end != last) {
            throw ParseError("invalid numeric literal", start);
        }
        return Node::make_const(value);
    }

    std::vector<Node> parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               ((text_[pos_] >= 'a' && text_[pos_] <= 'z') ||
                (text_[pos_] >= 'A' && text_[pos_] <= 'Z') ||
                (text_[pos_] >= '0' && text_[pos_] <= '9') || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "sqrt" || name == "exp" || name == "log" || name == "pow") {
            return parse_call(name, start);
        }
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (vars_[i] == name) {
                return {Node::make_var(static_cast<std::int32_t>(i))};
            }
        }
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    std::vector<Node> parse_call(std::string_view name, std::size_t name_pos) {
        if (!eat('(')) {
            throw ParseError("expected '(' after function name", pos_);
        }
        auto first = parse_expr();
        if (name == "pow") {
            if (!eat(',')) {
                throw ParseError("pow expects two arguments", pos_);
            }
            auto second = parse_expr();
            if (!eat(')')) {
                throw ParseError("expected ')'", pos_);
            }
            return join(OpKind::Pow, std::move(first), std::move(second));
        }
        if (!eat(')')) {
            throw ParseError("expected ')'", pos_);
        }
        OpKind op = OpKind::Sqrt;
        if (name == "exp") op = OpKind::Exp;
        if (name == "log") op = OpKind::Log;
        std::vector<Node> out;
        out.reserve(1 + first.size());
        out.push_back(Node::make_op(op));
        out.insert(out.end(), first.begin(), first.end());
        (void)name_pos;
        return out;
    }
};

}  // namespace

ExpressionTree parse(std::string_view text, std::span<const std::string> variables) {
    Parser p(text, variables);
    return ExpressionTree(p.run());
}

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buf, end);
}

namespace {

// Precedence levels used by the renderer: additive 1, multiplicative 2,
// atoms and calls 3.
int precedence(const Node& n) {
    if (n.kind != NodeKind::Operator) return 3;
    switch (n.op) {
        case OpKind::Add:
        case OpKind::Sub:
            return 1;
        case OpKind::Mul:
        case OpKind::Div:
            return 2;
        default:
            return 3;
    }
}

struct Renderer {
    std::span<const Node> nodes;
    std::span<const std::string> vars;
    std::size_t pos = 0;

    std::string render() {
        const Node& n = nodes[pos++];
        switch (n.kind) {
            case NodeKind::Constant:
                return format_double(n.value);
            case NodeKind::Variable:
                if (n.var < 0 || static_cast<std::size_t>(n.var) >= vars.size()) {
                    throw std::out_of_range("to_string: variable index unnamed");
                }
                return vars[static_cast<std::size_t>(n.var)];
            case NodeKind::Operator:
                break;
        }
        if (arity(n.op) == 1) {
            std::string inner = render();
            return std::string(op_name(n.op)) + "(" + inner + ")";
        }
        if (n.op == OpKind::Pow) {
            std::string a = render();
            std::string b = render();
            return "pow(" + a + ", " + b + ")";
        }
        const int prec = precedence(n);
        const Node& left_node = nodes[pos];
        const int left_prec = precedence(left_node);
        std::string left = render();
        const Node& right_node = nodes[pos];
        const int right_prec = precedence(right_node);
        std::string right = render();
        // Left operand keeps left-associative grouping without parentheses;
        // the right operand needs them on equal precedence to preserve shape.
        if (left_prec < prec) left = "(" + left + ")";
        if (right_prec <= prec) right = "(" + right + ")";
        switch (n.op) {
            case OpKind::Add: return left + " + " + right;
            case OpKind::Sub: return left + " - " + right;
            case OpKind::Mul: return left + "*" + right;
            default: return left + "/" + right;
        }
    }
};

}  // namespace

std::string to_string(const ExpressionTree& tree, std::span<const std::string> variables) {
    if (tree.empty()) throw std::logic_error("to_string: empty tree");
    Renderer r{tree.nodes(), variables};
    return r.render();
}

void FunctionSet::validate() const {
    if (operators.empty()) {
        throw std::invalid_argument("function set has no operators");
    }
    bool has_binary = false;
    for (OpKind op : operators) {
        if (arity(op) == 2) has_binary = true;
    }
    if (!has_binary) {
        throw std::invalid_argument("function set needs at least one binary operator");
    }
    if (variables.empty()) {
        throw std::invalid_argument("function set declares no variables");
    }
    if (!(constant_lo < constant_hi)) {
        throw std::invalid_argument("constant range is empty");
    }
}

std::vector<OpKind> FunctionSet::default_operators() {
    return {OpKind::Add, OpKind::Sub, OpKind::Mul, OpKind::Div,
            OpKind::Sqrt, OpKind::Exp, OpKind::Log};
}

std::vector<std::string> FunctionSet::invariant_variables(std::size_t n_extras) {
    std::vector<std::string> names{"I1bar", "I2bar", "J"};
    for (std::size_t i = 1; i <= n_extras; ++i) {
        names.push_back("eta" + std::to_string(i));
    }
    return names;
}

namespace {

Node random_leaf(const FunctionSet& set, Rng& rng) {
    if (rng.bernoulli(kVariableLeafProb)) {
        return Node::make_var(static_cast<std::int32_t>(rng.index(set.variables.size())));
    }
    return Node::make_const(rng.uniform(set.constant_lo, set.constant_hi));
}

void grow_nodes(std::vector<Node>& out, const FunctionSet& set, InitMethod method,
                int level, int max_depth, Rng& rng) {
    const bool place_operator =
        level < max_depth &&
        (method == InitMethod::Full || level == 0 || rng.bernoulli(0.5));
    if (!place_operator) {
        out.push_back(random_leaf(set, rng));
        return;
    }
    const OpKind op = set.operators[rng.index(set.operators.size())];
    out.push_back(Node::make_op(op));
    for (int child = 0; child < arity(op); ++child) {
        grow_nodes(out, set, method, level + 1, max_depth, rng);
    }
}

}  // namespace

ExpressionTree random_tree(const FunctionSet& set, InitMethod method,
                           int max_depth, Rng& rng) {
    set.validate();
    if (max_depth < 1) {
        throw std::invalid_argument("random_tree: depth must be at least 1");
    }
    std::vector<Node> nodes;
    nodes.reserve(1u << std::min(max_depth + 1, 12));
    grow_nodes(nodes, set, method, 0, max_depth, rng);
    return ExpressionTree(std::move(nodes));
}

}  // namespace hypersr
