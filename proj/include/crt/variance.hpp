#pragma once

#include <complex>
#include <utility>

#include <Eigen/Core>

namespace crt {

// The pairwise quantities every analytic variance formula consumes. Can hold
// either a single pair (x, y) or dataset averages substituted for it.
struct PairStats {
    double sq_norm_x = 0.0;          // |x|^2
    double sq_norm_y = 0.0;          // |y|^2
    double sq_norm_sum_plus = 0.0;   // |x + y|^2
    double sq_norm_sum_minus = 0.0;  // |x - y|^2
    double dot_xy = 0.0;             // x.y
    double sum_sq_prod = 0.0;        // sum_l x_l^2 y_l^2
    Eigen::VectorXd abs_prod;        // |x_l y_l| per coordinate
    Eigen::Index d = 0;

    static PairStats from_pair(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y);

    double sq_norm_sum(int s) const {
        return s > 0 ? sq_norm_sum_plus : sq_norm_sum_minus;
    }
};

// A variance carried as log(leading term) and log(K^2); differencing them
// directly would overflow in the e^100 regime.
struct VarianceValue {
    double log_leading = 0.0;
    double log_k_sq = 0.0;

    double variance() const;
    double log_variance() const;
};

double var_trig(const PairStats& stats);
double var_pos(const PairStats& stats);

VarianceValue var_trig_value(const PairStats& stats);
VarianceValue var_pos_value(const PairStats& stats);
VarianceValue var_gerf(std::complex<double> A, int s, const PairStats& stats);
VarianceValue var_pois(double lambda, const PairStats& stats);
VarianceValue var_geom(double p, const PairStats& stats);

// Closed-form variance minimizer over real A with s = +1; z = |x + y|^2.
double optimal_A_oprf(double sq_norm_sum_plus, Eigen::Index d);

// Local Nelder-Mead search over complex A, run once per sign, 50 iterations
// each, initialized at A = 0. Returns whichever sign gives lower variance.
std::pair<std::complex<double>, int> optimize_A_complex(const PairStats& stats);

double optimal_lambda(const PairStats& stats);

// Brent minimization of var_geom over p in (1e-6, 1 - 1e-6), 100 iterations.
double optimize_p(const PairStats& stats);

// log I_0(t): Taylor series for moderate t, asymptotic expansion beyond the
// overflow threshold of I_0 itself.
double log_bessel_i0(double t);

}  // namespace crt
