#include "crt/dataset_stats.hpp"

#include <stdexcept>

namespace crt {

DatasetStats compute_stats(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
    if (X.rows() == 0 || Y.rows() == 0)
        throw std::invalid_argument("compute_stats: empty set");
    if (X.cols() != Y.cols())
        throw std::invalid_argument("compute_stats: dimension mismatch");

    DatasetStats s;
    s.count_x = X.rows();
    s.count_y = Y.rows();
    s.d = X.cols();

    s.mean_sq_norm_x = X.rowwise().squaredNorm().mean();
    s.mean_sq_norm_y = Y.rowwise().squaredNorm().mean();

    const Eigen::VectorXd mean_x = X.colwise().mean();
    const Eigen::VectorXd mean_y = Y.colwise().mean();
    s.mean_dot_xy = mean_x.dot(mean_y);

    // avg |x + s y|^2 = avg |x|^2 + 2s (mean x).(mean y) + avg |y|^2.
    s.mean_sq_norm_sum_plus =
        s.mean_sq_norm_x + 2.0 * s.mean_dot_xy + s.mean_sq_norm_y;
    s.mean_sq_norm_sum_minus =
        s.mean_sq_norm_x - 2.0 * s.mean_dot_xy + s.mean_sq_norm_y;

    // avg sum_l x_l^2 y_l^2 = sum_l (avg x_l^2)(avg y_l^2).
    const Eigen::VectorXd mean_x_sq = X.array().square().colwise().mean();
    const Eigen::VectorXd mean_y_sq = Y.array().square().colwise().mean();
    s.mean_sum_sq_prod = mean_x_sq.dot(mean_y_sq);

    // avg |x_l y_l| = (avg |x_l|)(avg |y_l|) per coordinate.
    const Eigen::ArrayXd mean_abs_x = X.array().abs().colwise().mean();
    const Eigen::ArrayXd mean_abs_y = Y.array().abs().colwise().mean();
    s.mean_abs_prod = (mean_abs_x * mean_abs_y).matrix();

    return s;
}

PairStats pair_stats_from_dataset(const DatasetStats& stats) {
    PairStats p;
    p.sq_norm_x = stats.mean_sq_norm_x;
    p.sq_norm_y = stats.mean_sq_norm_y;
    p.sq_norm_sum_plus = stats.mean_sq_norm_sum_plus;
    p.sq_norm_sum_minus = stats.mean_sq_norm_sum_minus;
    p.dot_xy = stats.mean_dot_xy;
    p.sum_sq_prod = stats.mean_sum_sq_prod;
    p.abs_prod = stats.mean_abs_prod;
    p.d = stats.d;
    return p;
}

}  // namespace crt
