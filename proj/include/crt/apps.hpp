#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "crt/data.hpp"
#include "crt/kernel_ops.hpp"
#include "crt/mechanisms.hpp"
#include "crt/rng.hpp"

namespace crt {

// Fits the free parameter of a mechanism (A, lambda or p) on the averaged
// statistics of (X, Y). For plus-variants the shift is fitted first and the
// statistics are taken on the shifted sets.
MechanismSpec fit_mechanism(MechanismKind kind, const Eigen::MatrixXd& X,
                            const Eigen::MatrixXd& Y, KernelMode kernel_mode,
                            double shift_eps = 1e-8);

struct MechanismBenchRow {
    std::string mechanism;
    double mean_log_variance = 0.0;
    double std_log_variance = 0.0;
    std::string params;  // parameters chosen on the final repeat
};

struct BenchResult {
    std::string regime;
    double sigma = 1.0;
    Eigen::Index d = 0;
    Eigen::Index L = 0;
    int repeats = 0;
    std::uint64_t seed = 0;
    std::vector<MechanismBenchRow> rows;
    double wall_time_sec = 0.0;  // reported to the console, not serialized
};

// For each repeat: draw sets, compute averaged statistics, optimize each
// mechanism's parameters on them, then evaluate the analytic log-variance
// over all L^2 pairs. Real-valued mechanisms report variance / 2 (the M = 2
// fairness convention versus complex-valued features).
BenchResult variance_benchmark(const Regime& regime,
                               const std::vector<MechanismKind>& mechanisms,
                               int repeats, RngState& rng);

struct ClassifyOptions {
    MechanismKind kind = MechanismKind::kOprf;
    Eigen::Index M = 128;
    int rf_seeds = 50;
    double shift_eps = 1e-8;
    bool exact = false;  // brute-force kernel regression instead of RFs
    double validation_fraction = 0.05;
    std::vector<double> sigma_grid;  // default: 10 log-uniform in [1e-2, 1e2]
};

std::vector<double> default_sigma_grid();

struct ClassifyResult {
    std::string mechanism;
    Eigen::Index M = 0;
    double best_sigma = 0.0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    int rf_seeds = 0;
    Eigen::Index n_test = 0;
};

// Kernel-regression classifier: tunes sigma on a validation fold, predicts
// the argmax of the RF-approximated numerator, reports accuracy over RF
// seeds. Complex-valued mechanisms use M/2 features.
ClassifyResult classify(const LabeledDataset& train, const LabeledDataset& test,
                        const ClassifyOptions& options, RngState& rng);

std::string bench_to_json(const BenchResult& result);
std::string bench_to_csv(const BenchResult& result);
std::string classify_to_json(const ClassifyResult& result);
std::string classify_to_csv(const ClassifyResult& result);
std::string attention_report_to_json(
    const std::vector<AttentionErrorRow>& rows);
std::string attention_report_to_csv(const std::vector<AttentionErrorRow>& rows);

void write_text_file(const std::string& text, const std::string& path);

}  // namespace crt
