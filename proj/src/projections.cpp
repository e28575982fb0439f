#include "crt/projections.hpp"

#include <algorithm>
#include <stdexcept>

namespace crt {

ProjectionEnsemble sample_iid(RngState& rng, Eigen::Index M, Eigen::Index d) {
    if (M < 1 || d < 1)
        throw std::invalid_argument("sample_iid: M and d must be >= 1");
    return ProjectionEnsemble{rng.normal_matrix(M, d), ProjectionMode::kIid};
}

namespace {

// Modified Gram-Schmidt on the rows of `block` (k x d, k <= d), in place.
// Returns false if a pivot collapses numerically.
bool orthonormalize_rows(Eigen::MatrixXd& block) {
    const Eigen::Index k = block.rows();
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < i; ++j)
            block.row(i) -= block.row(i).dot(block.row(j)) * block.row(j);
        const double norm = block.row(i).norm();
        if (norm < 1e-12) return false;
        block.row(i) /= norm;
        // Second pass against accumulated roundoff.
        for (Eigen::Index j = 0; j < i; ++j)
            block.row(i) -= block.row(i).dot(block.row(j)) * block.row(j);
        block.row(i) /= block.row(i).norm();
    }
    return true;
}

}  // namespace

ProjectionEnsemble sample_orthogonal(RngState& rng, Eigen::Index M,
                                     Eigen::Index d) {
    if (M < 1 || d < 1)
        throw std::invalid_argument("sample_orthogonal: M and d must be >= 1");

    Eigen::MatrixXd rows(M, d);
    Eigen::Index done = 0;
    while (done < M) {
        const Eigen::Index k = std::min(d, M - done);
        Eigen::MatrixXd block = rng.normal_matrix(k, d);
        while (!orthonormalize_rows(block)) block = rng.normal_matrix(k, d);
        // Lengths are decoupled from directions: each row gets the norm of a
        // fresh d-dimensional Gaussian draw.
        for (Eigen::Index i = 0; i < k; ++i)
            rows.row(done + i) = block.row(i) * rng.normal_vector(d).norm();
        done += k;
    }
    return ProjectionEnsemble{std::move(rows), ProjectionMode::kOrthogonal};
}

}  // namespace crt
