#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Core>

namespace crt {

// Counter-based pseudorandom stream (splitmix64). The entire state is a
// 64-bit seed plus a draw counter, so streams are bit-reproducible across
// platforms and two generators with the same seed always agree.
struct RngState {
    std::uint64_t seed = 0;
    std::uint64_t counter = 0;

    explicit RngState(std::uint64_t s = 0) : seed(s) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed + (++counter) * 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the second value of each pair is
    // cached so consecutive draws consume uniforms in a fixed pattern.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(t);
        has_cached_ = true;
        return r * std::cos(t);
    }

    Eigen::VectorXd normal_vector(Eigen::Index n) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
        return m;
    }

    // Fork a statistically independent stream (e.g. one per repeat).
    RngState split(std::uint64_t stream) {
        RngState child(next_u64() ^ (stream * 0xd1342543de82ef95ULL + 1));
        return child;
    }

private:
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace crt
