#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hypersr/expr.hpp"
#include "hypersr/mechanics.hpp"

namespace hypersr {

// One experimental observation: nominal stress at a stretch under a loading
// mode, plus any extra inputs (already scaled) such as a reduced temperature.
struct DataPoint {
    LoadingMode mode;
    double stretch;
    double stress;                // MPa
    std::vector<double> extras;
};

struct Dataset {
    std::vector<DataPoint> points;
    // Ordered names bound in expressions: I1bar, I2bar, J, eta1..etaN.
    std::vector<std::string> variable_names;
    // Human-readable labels for the extra columns, kept for CSV round trips.
    std::vector<std::string> extra_labels;

    std::size_t n_extras() const;
    void validate() const;  // throws std::invalid_argument
};

// Predicted nominal stress of a candidate energy at one data point. The
// energy is the expression evaluated at (I1bar, I2bar, J, extras...) and its
// derivatives come from central differences with relative step fd_step.
double predict(const ExpressionTree& tree, const DataPoint& point, double fd_step);

// Mean absolute error between two equally long sequences.
double mae(std::span<const double> predicted, std::span<const double> observed);

struct Score {
    double raw;        // MAE in MPa
    double penalized;  // raw + parsimony_coefficient * tree size
};

// Scores a candidate on the selected points of a prepared dataset.
class StressPredictor;
Score score(const StressPredictor& predictor, const ExpressionTree& tree,
            std::span<const std::size_t> point_indices, double parsimony_coefficient);

// Precomputes, per data point, the invariant bindings and the six perturbed
// binding rows used by the central differences, so scoring a candidate is a
// single batched tree evaluation over all selected rows. The tables are
// immutable after construction and safe to share across worker threads.
// Results are bit-identical to the scalar predict() path.
class StressPredictor {
public:
    StressPredictor(const Dataset& dataset, double fd_step);

    std::size_t n_points() const { return points_.size(); }

    // MAE of the candidate over the given dataset point indices.
    double raw_mae(const ExpressionTree& tree,
                   std::span<const std::size_t> point_indices) const;

    // Predicted stresses for the given points, in order.
    void predict_points(const ExpressionTree& tree,
                        std::span<const std::size_t> point_indices,
                        std::span<double> out) const;

private:
    struct PointInfo {
        LoadingMode mode;
        double stretch;
        double observed;
        double denom_i1;  // (x+h) - (x-h) per perturbed coordinate
        double denom_i2;
        double denom_j;
    };

    static constexpr std::size_t kRowsPerPoint = 7;

    void eval_rows(const ExpressionTree& tree,
                   std::span<const std::size_t> point_indices,
                   std::vector<double>& values) const;

    std::vector<PointInfo> points_;
    std::size_t n_vars_;
    // Binding rows stored column-major: columns_[v * n_rows + r] is the value
    // of variable v in row r. Rows 7i..7i+6 belong to point i in the order
    // center, I1bar+/-h, I2bar+/-h, J+/-h.
    std::vector<double> columns_;
};

}  // namespace hypersr
