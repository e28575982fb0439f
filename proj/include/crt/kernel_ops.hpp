#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "crt/mechanisms.hpp"
#include "crt/projections.hpp"
#include "crt/rng.hpp"

namespace crt {

struct AttentionInputs {
    Eigen::MatrixXd Q, K, V;  // all L x d
};

enum class AttentionMode { kOprfOrtho, kOprfIid, kPosrfOrtho };

std::string to_string(AttentionMode mode);
AttentionMode attention_mode_from_string(const std::string& name);

// Dense exact kernel Gram matrix; O(d L L') test oracle.
Eigen::MatrixXd exact_kernel_matrix(const Eigen::MatrixXd& X,
                                    const Eigen::MatrixXd& Y, KernelMode kind);

// Feature matrix for any mechanism, dispatching on spec.kind. For gerf/oprf
// the dependent parameters are rebuilt for the data dimension.
FeatureMatrix make_features(const Eigen::MatrixXd& X, const MechanismSpec& spec,
                            const ProjectionEnsemble& ens, Side side);
FeatureMatrix make_features(const Eigen::MatrixXd& X, const MechanismSpec& spec,
                            const DiscreteSample& sample, Side side);

// Low-rank application (1/M) Re(Phi_X (Phi_Y^T c)); never materializes the
// L x L kernel matrix.
Eigen::VectorXd rf_apply(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                         const Eigen::VectorXd& c, const MechanismSpec& spec,
                         const ProjectionEnsemble& ens);
Eigen::VectorXd rf_apply(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                         const Eigen::VectorXd& c, const MechanismSpec& spec,
                         const DiscreteSample& sample);

// Exact bidirectional softmax attention; O(d L^2) oracle.
Eigen::MatrixXd exact_attention(const AttentionInputs& inp);

// Linear-attention operator: scaled queries/keys, dataset statistics, the
// closed-form A (0 in posrf mode), block-orthogonal or i.i.d. projections,
// softmax-mode positive features, then row-normalized Phi_Q (Phi_K^T V).
Eigen::MatrixXd favorpp_attention(const AttentionInputs& inp, Eigen::Index M,
                                  RngState& rng, AttentionMode mode);

struct AttentionErrorRow {
    AttentionMode mode;
    Eigen::Index M = 0;
    double median_error = 0.0;
    double iqr = 0.0;
    double wall_time_sec = 0.0;
    std::vector<double> errors;  // one per seed
};

std::vector<AttentionErrorRow> attention_error_report(
    const AttentionInputs& inp, const std::vector<AttentionMode>& modes,
    const std::vector<Eigen::Index>& Ms,
    const std::vector<std::uint64_t>& seeds);

double median(std::vector<double> values);

}  // namespace crt
