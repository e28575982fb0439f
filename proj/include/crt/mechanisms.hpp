#pragma once

#include <complex>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "crt/projections.hpp"
#include "crt/rng.hpp"

namespace crt {

enum class KernelMode { kGaussian, kSoftmax };
enum class Side { kFirst, kSecond };

enum class MechanismKind {
    kTrig,
    kPos,
    kGerf,
    kOprf,
    kPois,
    kGeom,
    kPoisPlus,
    kGeomPlus,
};

std::string to_string(MechanismKind kind);
MechanismKind mechanism_kind_from_string(const std::string& name);

// Parameters of the generalized exponential feature map
//   f(omega, x) = D exp(A |omega|^2 + B omega.x + C |x|^2).
// A and the sign s are free; B, C, D are dependent (principal roots).
struct GerfParams {
    std::complex<double> A;
    int s = 1;  // +1 or -1
    std::complex<double> B;
    std::complex<double> C;
    std::complex<double> D;
    Eigen::Index d = 0;

    bool is_real() const { return A.imag() == 0.0 && s == 1; }
};

GerfParams make_gerf_params(std::complex<double> A, int s, Eigen::Index d);

enum class DiscreteFamily { kPoisson, kGeometric };

struct DiscreteParams {
    DiscreteFamily family = DiscreteFamily::kPoisson;
    double lambda = 1.0;  // Poisson rate, > 0
    double p = 0.5;       // geometric success probability, in (0, 1)

    // log P(omega_l = k) for the configured law.
    double log_pk(long long k) const;
};

// Coordinatewise shift making inputs positive: x -> x - c, entries of the
// fitting sets end up >= eps by construction.
struct ShiftSpec {
    Eigen::VectorXd c;
    double eps = 1e-8;
};

struct MechanismSpec {
    MechanismKind kind = MechanismKind::kPos;
    std::optional<GerfParams> gerf;        // iff kind in {gerf, oprf}
    std::optional<DiscreteParams> discrete;  // iff kind in {pois, geom, *_plus}
    std::optional<ShiftSpec> shift;        // iff kind in {pois_plus, geom_plus}
    KernelMode kernel_mode = KernelMode::kGaussian;

    bool is_discrete() const {
        return kind == MechanismKind::kPois || kind == MechanismKind::kGeom ||
               kind == MechanismKind::kPoisPlus ||
               kind == MechanismKind::kGeomPlus;
    }
    bool is_plus() const {
        return kind == MechanismKind::kPoisPlus ||
               kind == MechanismKind::kGeomPlus;
    }
    // Complex-valued feature maps (two real numbers per feature).
    bool is_complex() const {
        return kind == MechanismKind::kTrig ||
               (kind == MechanismKind::kGerf && gerf &&
                (gerf->A.imag() != 0.0 || gerf->s == -1));
    }

    std::string to_json() const;
    static MechanismSpec from_json(const std::string& text);
};

// L x M matrix of evaluated feature values. Imaginary parts are identically
// zero for real mechanisms.
struct FeatureMatrix {
    Eigen::MatrixXcd values;
    Side side = Side::kFirst;
    KernelMode kernel_mode = KernelMode::kGaussian;
};

struct DiscreteSample {
    Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> counts;  // M x d

    Eigen::Index count() const { return counts.rows(); }
    Eigen::Index dim() const { return counts.cols(); }
};

FeatureMatrix featurize_gerf(const Eigen::MatrixXd& X, const GerfParams& params,
                             const ProjectionEnsemble& ens, Side side,
                             KernelMode kernel_mode);

DiscreteSample sample_discrete(RngState& rng, const DiscreteParams& params,
                               Eigen::Index M, Eigen::Index d);

FeatureMatrix featurize_discrete(const Eigen::MatrixXd& X,
                                 const DiscreteParams& params,
                                 const DiscreteSample& sample,
                                 KernelMode kernel_mode);

ShiftSpec fit_shift(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                    double eps);

// z -> z - c, clamped below at eps (clamping only matters for held-out rows).
Eigen::MatrixXd apply_shift(const Eigen::MatrixXd& Z, const ShiftSpec& shift);

// Canonical GERF parameters for the named special cases.
GerfParams trig_params(Eigen::Index d);  // A=0, s=-1: exp(+-i omega.x)
GerfParams pos_params(Eigen::Index d);   // A=0, s=+1: exp(omega.x - |x|^2)

}  // namespace crt
