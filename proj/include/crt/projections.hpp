#pragma once

#include <Eigen/Core>

#include "crt/rng.hpp"

namespace crt {

enum class ProjectionMode { kIid, kOrthogonal };

// M x d matrix of projection vectors; each row is one omega with a standard
// Gaussian marginal. Immutable after creation.
struct ProjectionEnsemble {
    Eigen::MatrixXd rows;  // M x d
    ProjectionMode mode = ProjectionMode::kIid;

    Eigen::Index count() const { return rows.rows(); }
    Eigen::Index dim() const { return rows.cols(); }
};

// M i.i.d. standard Gaussian rows.
ProjectionEnsemble sample_iid(RngState& rng, Eigen::Index M, Eigen::Index d);

// Rows grouped into ceil(M/d) independent blocks. Within a block, directions
// come from Gram-Schmidt orthogonalization of i.i.d. Gaussians and each
// row's length is redrawn as the norm of a fresh d-dimensional Gaussian, so
// the N(0, I_d) marginal is preserved.
ProjectionEnsemble sample_orthogonal(RngState& rng, Eigen::Index M,
                                     Eigen::Index d);

}  // namespace crt
