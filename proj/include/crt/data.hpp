#pragma once

#include <string>
#include <utility>

#include <Eigen/Core>

#include "crt/rng.hpp"

namespace crt {

enum class RegimeKind { kNormal, kSphere, kHeterogen, kCsv };

std::string to_string(RegimeKind kind);
RegimeKind regime_kind_from_string(const std::string& name);

// Synthetic (or file-backed) input distribution for benchmark pairs.
//   normal:    x, y ~ N(0, sigma^2 I)
//   sphere:    x, y uniform on the radius-sigma sphere
//   heterogen: x ~ N(0, sigma^2 I), y ~ N(sigma 1_d, sigma^2 I)
//   csv:       rows resampled from a numeric CSV file, scaled by sigma
struct Regime {
    RegimeKind kind = RegimeKind::kNormal;
    double sigma = 1.0;
    Eigen::Index d = 64;
    Eigen::Index L = 1024;
    std::string path;
};

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> generate_regime(
    RngState& rng, const Regime& regime);

struct LabeledDataset {
    Eigen::MatrixXd objects;  // L x d
    Eigen::VectorXi labels;   // class indices in [0, n)
    int n_classes = 0;
};

// Plain numeric CSV, last column = integer label; a non-numeric first row is
// treated as a header and skipped.
LabeledDataset load_labeled_csv(const std::string& path);

Eigen::MatrixXd load_matrix_csv(const std::string& path);

void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);

}  // namespace crt
