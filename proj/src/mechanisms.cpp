#include "crt/mechanisms.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

#include "crt/errors.hpp"

namespace crt {

std::string to_string(MechanismKind kind) {
    switch (kind) {
        case MechanismKind::kTrig: return "trig";
        case MechanismKind::kPos: return "pos";
        case MechanismKind::kGerf: return "gerf";
        case MechanismKind::kOprf: return "oprf";
        case MechanismKind::kPois: return "pois";
        case MechanismKind::kGeom: return "geom";
        case MechanismKind::kPoisPlus: return "pois_plus";
        case MechanismKind::kGeomPlus: return "geom_plus";
    }
    throw std::logic_error("unknown MechanismKind");
}

MechanismKind mechanism_kind_from_string(const std::string& name) {
    if (name == "trig") return MechanismKind::kTrig;
    if (name == "pos") return MechanismKind::kPos;
    if (name == "gerf") return MechanismKind::kGerf;
    if (name == "oprf") return MechanismKind::kOprf;
    if (name == "pois") return MechanismKind::kPois;
    if (name == "geom") return MechanismKind::kGeom;
    if (name == "pois_plus") return MechanismKind::kPoisPlus;
    if (name == "geom_plus") return MechanismKind::kGeomPlus;
    throw std::invalid_argument("unknown mechanism kind: " + name);
}

GerfParams make_gerf_params(std::complex<double> A, int s, Eigen::Index d) {
    if (s != 1 && s != -1)
        throw std::invalid_argument("make_gerf_params: s must be +1 or -1");
    const std::complex<double> one_minus_4a = 1.0 - 4.0 * A;
    if (one_minus_4a.real() <= 0.0)
        throw std::invalid_argument("make_gerf_params: Re(1 - 4A) must be > 0");

    GerfParams params;
    params.A = A;
    params.s = s;
    params.d = d;
    params.C = -0.5 * (s + 1);
    if (A.imag() == 0.0 && s == 1) {
        // Real branch: keeps B, D exactly real.
        params.B = std::sqrt(one_minus_4a.real());
        params.D = std::exp(0.25 * d * std::log(one_minus_4a.real()));
    } else {
        params.B = std::sqrt(static_cast<double>(s) * one_minus_4a);
        params.D = std::exp(0.25 * static_cast<double>(d) *
                            std::log(one_minus_4a));
    }
    return params;
}

GerfParams trig_params(Eigen::Index d) {
    return make_gerf_params({0.0, 0.0}, -1, d);
}

GerfParams pos_params(Eigen::Index d) {
    return make_gerf_params({0.0, 0.0}, 1, d);
}

FeatureMatrix featurize_gerf(const Eigen::MatrixXd& X, const GerfParams& params,
                             const ProjectionEnsemble& ens, Side side,
                             KernelMode kernel_mode) {
    if (X.cols() != ens.dim())
        throw std::invalid_argument("featurize_gerf: dimension mismatch");

    const Eigen::Index L = X.rows();
    const Eigen::Index M = ens.count();
    const double sigma = (side == Side::kFirst) ? 1.0 : params.s;

    const Eigen::VectorXd omega_sq = ens.rows.rowwise().squaredNorm();
    Eigen::VectorXd x_sq = X.rowwise().squaredNorm();
    const Eigen::MatrixXd dots = X * ens.rows.transpose();  // L x M

    // Softmax kernel features are Gaussian-kernel features times
    // exp(|x|^2 / 2), folded into the |x|^2 coefficient.
    const double softmax_boost =
        (kernel_mode == KernelMode::kSoftmax) ? 0.5 : 0.0;

    FeatureMatrix out;
    out.side = side;
    out.kernel_mode = kernel_mode;
    out.values.resize(L, M);

    if (params.is_real()) {
        const double a = params.A.real();
        const double b = params.B.real() * sigma;
        const double c = params.C.real() + softmax_boost;
        const double log_d = std::log(params.D.real());
        for (Eigen::Index i = 0; i < L; ++i) {
            const double cx = c * x_sq[i] + log_d;
            for (Eigen::Index m = 0; m < M; ++m) {
                const double v = std::exp(a * omega_sq[m] + b * dots(i, m) + cx);
                if (!std::isfinite(v))
                    throw NumericOverflowError("featurize_gerf overflow", i);
                out.values(i, m) = v;
            }
        }
    } else {
        const std::complex<double> b = params.B * sigma;
        const std::complex<double> c = params.C + softmax_boost;
        const std::complex<double> log_d = std::log(params.D);
        for (Eigen::Index i = 0; i < L; ++i) {
            const std::complex<double> cx = c * x_sq[i] + log_d;
            for (Eigen::Index m = 0; m < M; ++m) {
                const std::complex<double> v =
                    std::exp(params.A * omega_sq[m] + b * dots(i, m) + cx);
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                    throw NumericOverflowError("featurize_gerf overflow", i);
                out.values(i, m) = v;
            }
        }
    }
    return out;
}

double DiscreteParams::log_pk(long long k) const {
    if (family == DiscreteFamily::kPoisson)
        return -lambda + k * std::log(lambda) - std::lgamma(k + 1.0);
    return std::log(p) + k * std::log1p(-p);
}

namespace {

long long sample_poisson(RngState& rng, double lambda) {
    // Knuth's product-of-uniforms method, chunked so the exponential never
    // underflows for large rates.
    long long total = 0;
    while (lambda > 0.0) {
        const double chunk = std::min(lambda, 30.0);
        const double limit = std::exp(-chunk);
        long long k = -1;
        double prod = 1.0;
        do {
            ++k;
            prod *= rng.uniform();
        } while (prod > limit);
        total += k;
        lambda -= chunk;
    }
    return total;
}

long long sample_geometric(RngState& rng, double p) {
    // Inversion: support {0, 1, 2, ...} with P(k) = p (1-p)^k.
    const double denom = std::log1p(-p);
    return static_cast<long long>(std::floor(std::log(rng.uniform()) / denom));
}

}  // namespace

DiscreteSample sample_discrete(RngState& rng, const DiscreteParams& params,
                               Eigen::Index M, Eigen::Index d) {
    if (M < 1 || d < 1)
        throw std::invalid_argument("sample_discrete: M and d must be >= 1");
    if (params.family == DiscreteFamily::kPoisson && !(params.lambda > 0.0))
        throw std::invalid_argument("sample_discrete: lambda must be > 0");
    if (params.family == DiscreteFamily::kGeometric &&
        !(params.p > 0.0 && params.p < 1.0))
        throw std::invalid_argument("sample_discrete: p must be in (0, 1)");

    DiscreteSample out;
    out.counts.resize(M, d);
    for (Eigen::Index m = 0; m < M; ++m)
        for (Eigen::Index l = 0; l < d; ++l)
            out.counts(m, l) = (params.family == DiscreteFamily::kPoisson)
                                   ? sample_poisson(rng, params.lambda)
                                   : sample_geometric(rng, params.p);
    return out;
}

FeatureMatrix featurize_discrete(const Eigen::MatrixXd& X,
                                 const DiscreteParams& params,
                                 const DiscreteSample& sample,
                                 KernelMode kernel_mode) {
    if (X.cols() != sample.dim())
        throw std::invalid_argument("featurize_discrete: dimension mismatch");

    const Eigen::Index L = X.rows();
    const Eigen::Index M = sample.count();
    const Eigen::Index d = sample.dim();

    // Per-feature x-independent log weight: sum_l (-1/2 log omega_l! -
    // 1/2 log p_{omega_l}); the x-dependent factors only involve coordinates
    // with omega_l > 0 (0^0 := 1).
    std::vector<double> base(M);
    std::vector<std::vector<std::pair<Eigen::Index, long long>>> nonzeros(M);
    for (Eigen::Index m = 0; m < M; ++m) {
        double acc = 0.0;
        for (Eigen::Index l = 0; l < d; ++l) {
            const long long k = sample.counts(m, l);
            acc -= 0.5 * (std::lgamma(k + 1.0) + params.log_pk(k));
            if (k > 0) nonzeros[m].emplace_back(l, k);
        }
        base[m] = acc;
    }

    const Eigen::VectorXd x_sq = X.rowwise().squaredNorm();
    const double prefactor = (kernel_mode == KernelMode::kSoftmax) ? 0.0 : -0.5;

    FeatureMatrix out;
    out.side = Side::kFirst;
    out.kernel_mode = kernel_mode;
    out.values.resize(L, M);
    for (Eigen::Index i = 0; i < L; ++i) {
        const double row_base = prefactor * x_sq[i];
        for (Eigen::Index m = 0; m < M; ++m) {
            double log_mag = row_base + base[m];
            double sign = 1.0;
            bool zero = false;
            for (const auto& [l, k] : nonzeros[m]) {
                const double x = X(i, l);
                if (x == 0.0) {
                    zero = true;
                    break;
                }
                log_mag += k * std::log(std::abs(x));
                if (x < 0.0 && (k & 1)) sign = -sign;
            }
            const double v = zero ? 0.0 : sign * std::exp(log_mag);
            if (!std::isfinite(v))
                throw NumericOverflowError("featurize_discrete overflow", i);
            out.values(i, m) = v;
        }
    }
    return out;
}

ShiftSpec fit_shift(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                    double eps) {
    if (X.rows() + Y.rows() == 0)
        throw std::invalid_argument("fit_shift: empty input");
    if (X.rows() > 0 && Y.rows() > 0 && X.cols() != Y.cols())
        throw std::invalid_argument("fit_shift: dimension mismatch");

    const Eigen::Index d = X.rows() > 0 ? X.cols() : Y.cols();
    Eigen::VectorXd c(d);
    for (Eigen::Index l = 0; l < d; ++l) {
        double lo = std::numeric_limits<double>::infinity();
        if (X.rows() > 0) lo = std::min(lo, X.col(l).minCoeff());
        if (Y.rows() > 0) lo = std::min(lo, Y.col(l).minCoeff());
        c[l] = lo - eps;
    }
    return ShiftSpec{std::move(c), eps};
}

Eigen::MatrixXd apply_shift(const Eigen::MatrixXd& Z, const ShiftSpec& shift) {
    if (Z.cols() != shift.c.size())
        throw std::invalid_argument("apply_shift: dimension mismatch");
    return (Z.rowwise() - shift.c.transpose()).cwiseMax(shift.eps);
}

std::string MechanismSpec::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = crt::to_string(kind);
    j["A_re"] = gerf ? gerf->A.real() : 0.0;
    j["A_im"] = gerf ? gerf->A.imag() : 0.0;
    j["s"] = gerf ? gerf->s : 1;
    j["lambda"] = discrete ? discrete->lambda : 0.0;
    j["p"] = discrete ? discrete->p : 0.0;
    j["epsilon"] = shift ? shift->eps : 0.0;
    j["kernel_mode"] =
        kernel_mode == KernelMode::kGaussian ? "gaussian" : "softmax";
    return j.dump();
}

MechanismSpec MechanismSpec::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    MechanismSpec spec;
    spec.kind = mechanism_kind_from_string(j.at("kind").get<std::string>());
    spec.kernel_mode = j.at("kernel_mode").get<std::string>() == "softmax"
                           ? KernelMode::kSoftmax
                           : KernelMode::kGaussian;
    if (spec.kind == MechanismKind::kGerf || spec.kind == MechanismKind::kOprf) {
        const std::complex<double> A(j.at("A_re").get<double>(),
                                     j.at("A_im").get<double>());
        spec.gerf = make_gerf_params(A, j.at("s").get<int>(), 0);
    }
    if (spec.is_discrete()) {
        DiscreteParams dp;
        if (spec.kind == MechanismKind::kPois ||
            spec.kind == MechanismKind::kPoisPlus) {
            dp.family = DiscreteFamily::kPoisson;
            dp.lambda = j.at("lambda").get<double>();
        } else {
            dp.family = DiscreteFamily::kGeometric;
            dp.p = j.at("p").get<double>();
        }
        spec.discrete = dp;
    }
    if (spec.is_plus()) {
        ShiftSpec shift;
        shift.eps = j.at("epsilon").get<double>();
        spec.shift = shift;
    }
    return spec;
}

}  // namespace crt
