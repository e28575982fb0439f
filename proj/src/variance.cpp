#include "crt/variance.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "crt/optimize.hpp"

namespace crt {

PairStats PairStats::from_pair(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("PairStats: dimension mismatch");
    PairStats s;
    s.d = x.size();
    s.sq_norm_x = x.squaredNorm();
    s.sq_norm_y = y.squaredNorm();
    s.sq_norm_sum_plus = (x + y).squaredNorm();
    s.sq_norm_sum_minus = (x - y).squaredNorm();
    s.dot_xy = x.dot(y);
    s.sum_sq_prod = x.array().square().matrix().dot(y.array().square().matrix());
    s.abs_prod = (x.array() * y.array()).abs();
    return s;
}

double VarianceValue::variance() const {
    if (log_leading >= log_k_sq)
        return -std::exp(log_leading) * std::expm1(log_k_sq - log_leading);
    // Roundoff below K^2: report the (tiny) negative difference honestly.
    return std::exp(log_k_sq) * std::expm1(log_leading - log_k_sq);
}

double VarianceValue::log_variance() const {
    if (log_leading <= log_k_sq)
        return -std::numeric_limits<double>::infinity();
    return log_leading + std::log1p(-std::exp(log_k_sq - log_leading));
}

namespace {

double log_k_sq_of(const PairStats& stats) {
    // K = exp(-|x - y|^2 / 2), so log K^2 = -|x - y|^2.
    return -stats.sq_norm_sum_minus;
}

}  // namespace

VarianceValue var_trig_value(const PairStats& stats) {
    const double lk2 = log_k_sq_of(stats);
    // Leading term (1 + K^4) / 2.
    VarianceValue v;
    v.log_k_sq = lk2;
    v.log_leading = std::log(0.5) + std::log1p(std::exp(2.0 * lk2));
    return v;
}

VarianceValue var_pos_value(const PairStats& stats) {
    VarianceValue v;
    v.log_k_sq = log_k_sq_of(stats);
    v.log_leading = 4.0 * stats.dot_xy;
    return v;
}

double var_trig(const PairStats& stats) {
    return var_trig_value(stats).variance();
}

double var_pos(const PairStats& stats) {
    return var_pos_value(stats).variance();
}

VarianceValue var_gerf(std::complex<double> A, int s, const PairStats& stats) {
    if (s != 1 && s != -1)
        throw std::invalid_argument("var_gerf: s must be +1 or -1");
    const std::complex<double> one_minus_8a = 1.0 - 8.0 * A;
    if (one_minus_8a.real() <= 0.0)
        throw std::invalid_argument("var_gerf: Re(1 - 8A) must be > 0");

    const double d = static_cast<double>(stats.d);
    const double z = stats.sq_norm_sum(s);
    const double abs_a_sq = std::norm(A);
    const double re_denom = 1.0 - 8.0 * A.real();

    // log alpha_1 and alpha_2 are complex; alpha_3, alpha_4 are real.
    const std::complex<double> log_alpha1 =
        0.5 * d * std::log(1.0 + 16.0 * A * A / one_minus_8a);
    const std::complex<double> alpha2 =
        static_cast<double>(s) * (1.0 + 1.0 / one_minus_8a);
    const double log_alpha3 =
        0.5 * d * std::log1p(16.0 * abs_a_sq / re_denom);
    const double alpha4 =
        0.5 * s + (s + 2.0 * std::abs(1.0 - 4.0 * A)) / (2.0 * re_denom);

    // Re(alpha1 exp(alpha2 z)) = cos(Im w) exp(Re w) with w below.
    const std::complex<double> w = log_alpha1 + alpha2 * z;
    const double r1 = w.real();
    const double c1 = std::cos(w.imag());
    const double t2 = log_alpha3 + alpha4 * z;

    const double hi = std::max(r1, t2);
    double inner = c1 * std::exp(r1 - hi) + std::exp(t2 - hi);
    if (inner <= 0.0) inner = std::numeric_limits<double>::min();

    VarianceValue v;
    v.log_k_sq = log_k_sq_of(stats);
    v.log_leading = std::log(0.5) -
                    (s + 1.0) * (stats.sq_norm_x + stats.sq_norm_y) + hi +
                    std::log(inner);
    return v;
}

VarianceValue var_pois(double lambda, const PairStats& stats) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("var_pois: lambda must be > 0");
    VarianceValue v;
    v.log_k_sq = log_k_sq_of(stats);
    v.log_leading = lambda * static_cast<double>(stats.d) +
                    stats.sum_sq_prod / lambda - stats.sq_norm_x -
                    stats.sq_norm_y;
    return v;
}

VarianceValue var_geom(double p, const PairStats& stats) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("var_geom: p must be in (0, 1)");
    const double scale = 2.0 / std::sqrt(1.0 - p);
    double log_prod = 0.0;
    for (Eigen::Index l = 0; l < stats.abs_prod.size(); ++l)
        log_prod += log_bessel_i0(scale * stats.abs_prod[l]);
    VarianceValue v;
    v.log_k_sq = log_k_sq_of(stats);
    v.log_leading = -static_cast<double>(stats.d) * std::log(p) -
                    stats.sq_norm_x - stats.sq_norm_y + log_prod;
    return v;
}

double optimal_A_oprf(double sq_norm_sum_plus, Eigen::Index d) {
    if (sq_norm_sum_plus < 0.0)
        throw std::invalid_argument("optimal_A_oprf: |x + y|^2 must be >= 0");
    if (sq_norm_sum_plus == 0.0) return 0.0;
    const double z = sq_norm_sum_plus;
    const double dd = static_cast<double>(d);
    // rho = (sqrt((2z+d)^2 + 8dz) - 2z - d) / (4z), rationalized so small z
    // does not cancel catastrophically; guarantees rho < 1 and A < 0 for z > 0.
    const double s = 2.0 * z + dd;
    const double rho = 2.0 * dd / (std::sqrt(s * s + 8.0 * dd * z) + s);
    return (1.0 - 1.0 / rho) / 8.0;
}

std::pair<std::complex<double>, int> optimize_A_complex(
    const PairStats& stats) {
    const double inf = std::numeric_limits<double>::infinity();
    std::complex<double> best_a = 0.0;
    int best_s = 1;
    double best_val = inf;

    for (const int s : {1, -1}) {
        auto objective = [&](Point2 pt) {
            const std::complex<double> a(pt.x, pt.y);
            if (1.0 - 8.0 * a.real() <= 0.0) return inf;
            return var_gerf(a, s, stats).log_variance();
        };
        const auto [pt, val] = nelder_mead_2d(objective, Point2{0.0, 0.0},
                                              0.02, 50);
        // A = 0 is always a feasible fallback for this sign.
        const double at_zero = objective(Point2{0.0, 0.0});
        const bool improved = val < at_zero;
        const double cand_val = improved ? val : at_zero;
        const std::complex<double> cand_a =
            improved ? std::complex<double>(pt.x, pt.y) : 0.0;
        if (cand_val < best_val) {
            best_val = cand_val;
            best_a = cand_a;
            best_s = s;
        }
    }
    return {best_a, best_s};
}

double optimal_lambda(const PairStats& stats) {
    if (!(stats.sum_sq_prod > 0.0))
        throw std::invalid_argument(
            "optimal_lambda: sum of x_l^2 y_l^2 must be > 0");
    return std::sqrt(stats.sum_sq_prod / static_cast<double>(stats.d));
}

double optimize_p(const PairStats& stats) {
    constexpr double kDelta = 1e-6;
    auto objective = [&](double p) {
        return var_geom(p, stats).log_variance();
    };
    return brent_minimize(objective, kDelta, 1.0 - kDelta, 100).x;
}

double log_bessel_i0(double t) {
    if (t < 0.0)
        throw std::invalid_argument("log_bessel_i0: t must be >= 0");
    if (t == 0.0) return 0.0;

    if (t <= 600.0) {
        // Taylor series: all terms positive, no cancellation.
        const double q = 0.25 * t * t;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 2000; ++k) {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (term < sum * 1e-18) break;
        }
        return std::log(sum);
    }

    // Asymptotic expansion I_0(t) ~ e^t / sqrt(2 pi t) * sum_k a_k / t^k,
    // truncated at the smallest term.
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 40; ++k) {
        const double next =
            term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * t);
        if (next >= term) break;
        term = next;
        sum += term;
        if (term < sum * 1e-18) break;
    }
    return t - 0.5 * std::log(2.0 * M_PI * t) + std::log(sum);
}

}  // namespace crt
