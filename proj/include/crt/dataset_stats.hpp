#pragma once

#include <Eigen/Core>

#include "crt/variance.hpp"

namespace crt {

// O(Ld)-computable averages over sets {x^(i)}, {y^(j)} substituting for the
// per-pair quantities when optimizing mechanism parameters.
struct DatasetStats {
    double mean_sq_norm_x = 0.0;
    double mean_sq_norm_y = 0.0;
    double mean_sq_norm_sum_plus = 0.0;   // avg |x + y|^2
    double mean_sq_norm_sum_minus = 0.0;  // avg |x - y|^2
    double mean_dot_xy = 0.0;             // (mean x).(mean y)
    double mean_sum_sq_prod = 0.0;        // avg sum_l x_l^2 y_l^2
    Eigen::VectorXd mean_abs_prod;        // avg |x_l y_l| per coordinate
    Eigen::Index count_x = 0;
    Eigen::Index count_y = 0;
    Eigen::Index d = 0;
};

// Single-pass factorized sums; never the L^2 double loop.
DatasetStats compute_stats(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);

// A PairStats whose fields are the dataset averages, usable by every
// variance operation.
PairStats pair_stats_from_dataset(const DatasetStats& stats);

}  // namespace crt
