#include "crt/kernel_ops.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "crt/dataset_stats.hpp"
#include "crt/errors.hpp"
#include "crt/variance.hpp"

namespace crt {

std::string to_string(AttentionMode mode) {
    switch (mode) {
        case AttentionMode::kOprfOrtho: return "oprf_ortho";
        case AttentionMode::kOprfIid: return "oprf_iid";
        case AttentionMode::kPosrfOrtho: return "posrf_ortho";
    }
    throw std::logic_error("unknown AttentionMode");
}

AttentionMode attention_mode_from_string(const std::string& name) {
    if (name == "oprf_ortho") return AttentionMode::kOprfOrtho;
    if (name == "oprf_iid") return AttentionMode::kOprfIid;
    if (name == "posrf_ortho") return AttentionMode::kPosrfOrtho;
    throw std::invalid_argument("unknown attention mode: " + name);
}

Eigen::MatrixXd exact_kernel_matrix(const Eigen::MatrixXd& X,
                                    const Eigen::MatrixXd& Y, KernelMode kind) {
    if (X.cols() != Y.cols())
        throw std::invalid_argument("exact_kernel_matrix: dimension mismatch");
    Eigen::MatrixXd dots = X * Y.transpose();
    if (kind == KernelMode::kSoftmax) return dots.array().exp();
    const Eigen::VectorXd x_sq = X.rowwise().squaredNorm();
    const Eigen::VectorXd y_sq = Y.rowwise().squaredNorm();
    dots = ((2.0 * dots).colwise() - x_sq).rowwise() - y_sq.transpose();
    return (0.5 * dots).array().exp();
}

FeatureMatrix make_features(const Eigen::MatrixXd& X, const MechanismSpec& spec,
                            const ProjectionEnsemble& ens, Side side) {
    const Eigen::Index d = X.cols();
    switch (spec.kind) {
        case MechanismKind::kTrig:
            return featurize_gerf(X, trig_params(d), ens, side,
                                  spec.kernel_mode);
        case MechanismKind::kPos:
            return featurize_gerf(X, pos_params(d), ens, side,
                                  spec.kernel_mode);
        case MechanismKind::kGerf:
        case MechanismKind::kOprf: {
            if (!spec.gerf)
                throw std::invalid_argument(
                    "make_features: gerf parameters missing");
            const GerfParams params =
                make_gerf_params(spec.gerf->A, spec.gerf->s, d);
            return featurize_gerf(X, params, ens, side, spec.kernel_mode);
        }
        default:
            throw std::invalid_argument(
                "make_features: discrete mechanism needs a DiscreteSample");
    }
}

FeatureMatrix make_features(const Eigen::MatrixXd& X, const MechanismSpec& spec,
                            const DiscreteSample& sample, Side side) {
    if (!spec.is_discrete())
        throw std::invalid_argument(
            "make_features: projection mechanism needs a ProjectionEnsemble");
    if (!spec.discrete)
        throw std::invalid_argument(
            "make_features: discrete parameters missing");
    const Eigen::MatrixXd* input = &X;
    Eigen::MatrixXd shifted;
    if (spec.is_plus()) {
        if (!spec.shift)
            throw std::invalid_argument("make_features: shift not fitted");
        shifted = apply_shift(X, *spec.shift);
        input = &shifted;
    }
    FeatureMatrix out =
        featurize_discrete(*input, *spec.discrete, sample, spec.kernel_mode);
    out.side = side;
    return out;
}

namespace {

template <class Source>
Eigen::VectorXd rf_apply_impl(const Eigen::MatrixXd& X,
                              const Eigen::MatrixXd& Y,
                              const Eigen::VectorXd& c,
                              const MechanismSpec& spec, const Source& source) {
    if (Y.rows() != c.size())
        throw std::invalid_argument("rf_apply: c length mismatch");
    const FeatureMatrix phi_x = make_features(X, spec, source, Side::kFirst);
    const FeatureMatrix phi_y = make_features(Y, spec, source, Side::kSecond);
    const Eigen::Index M = phi_x.values.cols();
    const Eigen::VectorXcd pooled =
        phi_y.values.transpose() * c.cast<std::complex<double>>();
    return (phi_x.values * pooled).real() / static_cast<double>(M);
}

}  // namespace

Eigen::VectorXd rf_apply(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                         const Eigen::VectorXd& c, const MechanismSpec& spec,
                         const ProjectionEnsemble& ens) {
    return rf_apply_impl(X, Y, c, spec, ens);
}

Eigen::VectorXd rf_apply(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                         const Eigen::VectorXd& c, const MechanismSpec& spec,
                         const DiscreteSample& sample) {
    return rf_apply_impl(X, Y, c, spec, sample);
}

Eigen::MatrixXd exact_attention(const AttentionInputs& inp) {
    const double scale = std::pow(static_cast<double>(inp.Q.cols()), -0.25);
    const Eigen::MatrixXd kernel = exact_kernel_matrix(
        scale * inp.Q, scale * inp.K, KernelMode::kSoftmax);
    const Eigen::VectorXd denom = kernel.rowwise().sum();
    return denom.cwiseInverse().asDiagonal() * (kernel * inp.V);
}

Eigen::MatrixXd favorpp_attention(const AttentionInputs& inp, Eigen::Index M,
                                  RngState& rng, AttentionMode mode) {
    const Eigen::Index L = inp.Q.rows();
    const Eigen::Index d = inp.Q.cols();
    if (L < 1 || d < 1 || M < 1)
        throw std::invalid_argument("favorpp_attention: L, d, M must be >= 1");
    if (inp.K.rows() != L || inp.K.cols() != d || inp.V.rows() != L ||
        inp.V.cols() != d)
        throw std::invalid_argument("favorpp_attention: shape mismatch");

    const double scale = std::pow(static_cast<double>(d), -0.25);
    const Eigen::MatrixXd x = scale * inp.Q;
    const Eigen::MatrixXd y = scale * inp.K;

    double A = 0.0;
    if (mode != AttentionMode::kPosrfOrtho) {
        const DatasetStats stats = compute_stats(x, y);
        A = optimal_A_oprf(stats.mean_sq_norm_sum_plus, d);
    }
    const GerfParams params = make_gerf_params(A, 1, d);

    ProjectionEnsemble ens = (mode == AttentionMode::kOprfIid)
                                 ? sample_iid(rng, M, d)
                                 : sample_orthogonal(rng, M, d);

    // Softmax-mode log-features; one shared max-log constant per matrix is
    // subtracted before exponentiation and cancels in the ratio.
    const Eigen::VectorXd omega_sq = ens.rows.rowwise().squaredNorm();
    const double a = params.A.real();
    const double b = params.B.real();
    const double c = params.C.real() + 0.5;
    const double log_d = std::log(params.D.real());

    auto log_features = [&](const Eigen::MatrixXd& Z) -> Eigen::MatrixXd {
        Eigen::MatrixXd lf = b * (Z * ens.rows.transpose());
        lf.rowwise() += (a * omega_sq.transpose()).eval();
        lf.colwise() += (c * Z.rowwise().squaredNorm()).eval();
        lf.array() += log_d;
        return lf;
    };

    Eigen::MatrixXd log_q = log_features(x);
    Eigen::MatrixXd log_k = log_features(y);
    log_q.array() -= log_q.maxCoeff();
    log_k.array() -= log_k.maxCoeff();
    const Eigen::MatrixXd phi_q = log_q.array().exp();
    const Eigen::MatrixXd phi_k = log_k.array().exp();

    const Eigen::VectorXd denom = phi_q * phi_k.colwise().sum().transpose();
    for (Eigen::Index i = 0; i < L; ++i)
        if (!(denom[i] > 0.0) || !std::isfinite(denom[i]))
            throw DegenerateDenominatorError("favorpp_attention denominator",
                                             i);
    return denom.cwiseInverse().asDiagonal() *
           (phi_q * (phi_k.transpose() * inp.V));
}

double median(std::vector<double> values) {
    if (values.empty())
        throw std::invalid_argument("median: empty input");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return (n % 2 == 1) ? values[n / 2]
                        : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

double quartile_range(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const auto at = [&](double q) {
        const double pos = q * (values.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] * (1.0 - frac) + values[hi] * frac;
    };
    return at(0.75) - at(0.25);
}

}  // namespace

std::vector<AttentionErrorRow> attention_error_report(
    const AttentionInputs& inp, const std::vector<AttentionMode>& modes,
    const std::vector<Eigen::Index>& Ms,
    const std::vector<std::uint64_t>& seeds) {
    if (modes.empty() || Ms.empty() || seeds.empty())
        throw std::invalid_argument("attention_error_report: empty grid");

    const Eigen::MatrixXd exact = exact_attention(inp);
    const double exact_norm = exact.norm();

    std::vector<AttentionErrorRow> rows;
    for (const AttentionMode mode : modes) {
        for (const Eigen::Index M : Ms) {
            AttentionErrorRow row;
            row.mode = mode;
            row.M = M;
            const auto start = std::chrono::steady_clock::now();
            for (const std::uint64_t seed : seeds) {
                RngState rng(seed);
                const Eigen::MatrixXd approx =
                    favorpp_attention(inp, M, rng, mode);
                row.errors.push_back((approx - exact).norm() / exact_norm);
            }
            const auto stop = std::chrono::steady_clock::now();
            row.wall_time_sec =
                std::chrono::duration<double>(stop - start).count();
            row.median_error = median(row.errors);
            row.iqr = quartile_range(row.errors);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace crt
