#include "hypersr/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hypersr {

std::size_t Dataset::n_extras() const {
    if (variable_names.size() < 3) return 0;
    return variable_names.size() - 3;
}

void Dataset::validate() const {
    if (points.empty()) {
        throw std::invalid_argument("dataset has no points");
    }
    if (variable_names.size() < 3 || variable_names[0] != "I1bar" ||
        variable_names[1] != "I2bar" || variable_names[2] != "J") {
        throw std::invalid_argument("dataset variables must start with I1bar, I2bar, J");
    }
    const std::size_t extras = n_extras();
    if (extra_labels.size() != extras) {
        throw std::invalid_argument("dataset extra labels do not match variable count");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        const DataPoint& p = points[i];
        if (!(p.stretch > 0.0) || !std::isfinite(p.stretch)) {
            throw std::invalid_argument("dataset point " + std::to_string(i) +
                                        ": stretch must be positive");
        }
        if (!std::isfinite(p.stress)) {
            throw std::invalid_argument("dataset point " + std::to_string(i) +
                                        ": stress is not finite");
        }
        if (p.extras.size() != extras) {
            throw std::invalid_argument("dataset point " + std::to_string(i) +
                                        ": wrong number of extra values");
        }
        for (double e : p.extras) {
            if (!std::isfinite(e)) {
                throw std::invalid_argument("dataset point " + std::to_string(i) +
                                            ": extra value is not finite");
            }
        }
    }
}

double predict(const ExpressionTree& tree, const DataPoint& point, double fd_step) {
    const InvariantPoint ip = invariants(deformation(point.mode, point.stretch));
    std::vector<double> bindings(3 + point.extras.size());
    std::copy(point.extras.begin(), point.extras.end(), bindings.begin() + 3);
    auto psi = [&](const InvariantPoint& q, std::span<const double>) {
        bindings[0] = q.I1bar;
        bindings[1] = q.I2bar;
        bindings[2] = q.J;
        return evaluate(tree, bindings);
    };
    const EnergyDerivatives ed = energy_derivatives(psi, ip, point.extras, fd_step);
    return nominal_stress(ed, point.mode, point.stretch);
}

double mae(std::span<const double> predicted, std::span<const double> observed) {
    if (predicted.size() != observed.size()) {
        throw std::invalid_argument("mae: sequence lengths differ");
    }
    if (predicted.empty()) {
        throw std::invalid_argument("mae: empty sequences");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        acc += std::abs(predicted[i] - observed[i]);
    }
    return acc / static_cast<double>(predicted.size());
}

Score score(const StressPredictor& predictor, const ExpressionTree& tree,
            std::span<const std::size_t> point_indices, double parsimony_coefficient) {
    Score s;
    s.raw = predictor.raw_mae(tree, point_indices);
    s.penalized = s.raw + parsimony_coefficient * static_cast<double>(tree.size());
    return s;
}

StressPredictor::StressPredictor(const Dataset& dataset, double fd_step) {
    dataset.validate();
    if (!(fd_step > 0.0)) {
        throw std::invalid_argument("StressPredictor: step must be positive");
    }
    const std::size_t n = dataset.points.size();
    n_vars_ = dataset.variable_names.size();
    const std::size_t n_rows = kRowsPerPoint * n;
    columns_.assign(n_vars_ * n_rows, 0.0);
    points_.reserve(n);

    for (std::size_t i = 0; i < n; ++i) {
        const DataPoint& p = dataset.points[i];
        const InvariantPoint ip = invariants(deformation(p.mode, p.stretch));
        const double coords[3] = {ip.I1bar, ip.I2bar, ip.J};
        double plus[3];
        double minus[3];
        double denom[3];
        for (int c = 0; c < 3; ++c) {
            const double h = fd_step * std::max(1.0, std::abs(coords[c]));
            plus[c] = coords[c] + h;
            minus[c] = coords[c] - h;
            denom[c] = plus[c] - minus[c];
        }
        const std::size_t base = kRowsPerPoint * i;
        for (std::size_t r = 0; r < kRowsPerPoint; ++r) {
            for (int c = 0; c < 3; ++c) {
                columns_[static_cast<std::size_t>(c) * n_rows + base + r] = coords[c];
            }
            for (std::size_t e = 0; e < p.extras.size(); ++e) {
                columns_[(3 + e) * n_rows + base + r] = p.extras[e];
            }
        }
        // Rows 1..6 perturb one coordinate each: +I1, -I1, +I2, -I2, +J, -J.
        for (int c = 0; c < 3; ++c) {
            const std::size_t col = static_cast<std::size_t>(c) * n_rows + base;
            columns_[col + 1 + 2 * static_cast<std::size_t>(c)] = plus[c];
            columns_[col + 2 + 2 * static_cast<std::size_t>(c)] = minus[c];
        }
        points_.push_back(PointInfo{p.mode, p.stretch, p.stress,
                                    denom[0], denom[1], denom[2]});
    }
}

void StressPredictor::eval_rows(const ExpressionTree& tree,
                                std::span<const std::size_t> point_indices,
                                std::vector<double>& values) const {
    const auto& nodes = tree.nodes();
    if (nodes.empty()) throw std::logic_error("StressPredictor: empty tree");
    const std::size_t n_rows = kRowsPerPoint * points_.size();
    const std::size_t k = kRowsPerPoint * point_indices.size();

    // Same reverse pre-order stack machine as evaluate(), applied to a block
    // of rows per node. Protected semantics must match exactly.
    std::vector<double> stack;
    std::size_t sp = 0;  // stack height in blocks of k values
    auto block = [&](std::size_t idx) { return stack.data() + idx * k; };
    auto ensure = [&](std::size_t blocks) {
        if (stack.size() < blocks * k) stack.resize(blocks * k);
    };

    for (std::size_t pos = nodes.size(); pos-- > 0;) {
        const Node& n = nodes[pos];
        switch (n.kind) {
            case NodeKind::Constant: {
                ensure(sp + 1);
                double* out = block(sp);
                const double v = std::clamp(n.value, -1e30, 1e30);
                std::fill(out, out + k, v);
                ++sp;
                break;
            }
            case NodeKind::Variable: {
                if (n.var < 0 || static_cast<std::size_t>(n.var) >= n_vars_) {
                    throw std::out_of_range("StressPredictor: variable index has no binding");
                }
                ensure(sp + 1);
                double* out = block(sp);
                const double* col =
                    columns_.data() + static_cast<std::size_t>(n.var) * n_rows;
                std::size_t w = 0;
                for (std::size_t pi : point_indices) {
                    const double* src = col + kRowsPerPoint * pi;
                    for (std::size_t r = 0; r < kRowsPerPoint; ++r) out[w++] = src[r];
                }
                ++sp;
                break;
            }
            case NodeKind::Operator: {
                if (arity(n.op) == 1) {
                    double* a = block(sp - 1);
                    switch (n.op) {
                        case OpKind::Sqrt:
                            for (std::size_t r = 0; r < k; ++r)
                                a[r] = std::sqrt(std::abs(a[r]));
                            break;
                        case OpKind::Exp:
                            for (std::size_t r = 0; r < k; ++r)
                                a[r] = std::exp(std::clamp(a[r], -50.0, 50.0));
                            break;
                        default:  // Log
                            for (std::size_t r = 0; r < k; ++r)
                                a[r] = std::abs(a[r]) < 1e-9 ? 0.0 : std::log(std::abs(a[r]));
                            break;
                    }
                    for (std::size_t r = 0; r < k; ++r)
                        a[r] = std::clamp(a[r], -1e30, 1e30);
                } else {
                    // Top block is the left operand, the one below the right.
                    double* a = block(sp - 1);
                    double* dst = block(sp - 2);
                    switch (n.op) {
                        case OpKind::Add:
                            for (std::size_t r = 0; r < k; ++r) dst[r] = a[r] + dst[r];
                            break;
                        case OpKind::Sub:
                            for (std::size_t r = 0; r < k; ++r) dst[r] = a[r] - dst[r];
                            break;
                        case OpKind::Mul:
                            for (std::size_t r = 0; r < k; ++r) dst[r] = a[r] * dst[r];
                            break;
                        case OpKind::Div:
                            for (std::size_t r = 0; r < k; ++r)
                                dst[r] = std::abs(dst[r]) < 1e-9 ? 1.0 : a[r] / dst[r];
                            break;
                        default:  // Pow
                            for (std::size_t r = 0; r < k; ++r)
                                dst[r] = std::pow(std::abs(a[r]), dst[r]);
                            break;
                    }
                    for (std::size_t r = 0; r < k; ++r)
                        dst[r] = std::clamp(dst[r], -1e30, 1e30);
                    --sp;
                }
                break;
            }
        }
    }
    values.assign(block(0), block(0) + k);
}

void StressPredictor::predict_points(const ExpressionTree& tree,
                                     std::span<const std::size_t> point_indices,
                                     std::span<double> out) const {
    if (out.size() != point_indices.size()) {
        throw std::invalid_argument("predict_points: output size mismatch");
    }
    std::vector<double> psi;
    eval_rows(tree, point_indices, psi);
    for (std::size_t i = 0; i < point_indices.size(); ++i) {
        const std::size_t pi = point_indices[i];
        if (pi >= points_.size()) {
            throw std::out_of_range("predict_points: point index outside dataset");
        }
        const PointInfo& info = points_[pi];
        const double* v = psi.data() + kRowsPerPoint * i;
        EnergyDerivatives ed;
        ed.psi = v[0];
        ed.dI1 = (v[1] - v[2]) / info.denom_i1;
        ed.dI2 = (v[3] - v[4]) / info.denom_i2;
        ed.dJ = (v[5] - v[6]) / info.denom_j;
        out[i] = nominal_stress(ed, info.mode, info.stretch);
    }
}

double StressPredictor::raw_mae(const ExpressionTree& tree,
                                std::span<const std::size_t> point_indices) const {
    if (point_indices.empty()) {
        throw std::invalid_argument("raw_mae: no points selected");
    }
    std::vector<double> predicted(point_indices.size());
    predict_points(tree, point_indices, predicted);
    double acc = 0.0;
    for (std::size_t i = 0; i < point_indices.size(); ++i) {
        acc += std::abs(predicted[i] - points_[point_indices[i]].observed);
    }
    return acc / static_cast<double>(point_indices.size());
}

}  // namespace hypersr
