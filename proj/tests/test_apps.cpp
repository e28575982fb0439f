#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "crt/apps.hpp"
#include "crt/data.hpp"
#include "crt/rng.hpp"

using crt::LabeledDataset;
using crt::Regime;
using crt::RegimeKind;
using crt::RngState;

namespace {

std::string temp_path(const std::string& name) {
    return "/tmp/crt_test_" + name;
}

}  // namespace

TEST_CASE("sphere regime puts every row on the radius-sigma sphere") {
    RngState rng(1);
    Regime regime;
    regime.kind = RegimeKind::kSphere;
    regime.sigma = 2.0;
    regime.d = 8;
    regime.L = 100;
    const auto [X, Y] = crt::generate_regime(rng, regime);
    CHECK((X.rowwise().norm().array() - 2.0).abs().maxCoeff() < 1e-10);
    CHECK((Y.rowwise().norm().array() - 2.0).abs().maxCoeff() < 1e-10);
}

TEST_CASE("normal regime has chi-square norm moments") {
    RngState rng(2);
    Regime regime;
    regime.d = 64;
    regime.L = 10000;
    const auto [X, Y] = crt::generate_regime(rng, regime);
    const double mean_sq = X.rowwise().squaredNorm().mean();
    // Var(|x|^2) = 2d, so 4 std errors of the mean over L rows.
    CHECK(std::abs(mean_sq - 64.0) < 4.0 * std::sqrt(128.0 / 10000.0));
}

TEST_CASE("heterogen regime shifts the second set by sigma") {
    RngState rng(3);
    Regime regime;
    regime.kind = RegimeKind::kHeterogen;
    regime.d = 8;
    regime.L = 10000;
    const auto [X, Y] = crt::generate_regime(rng, regime);
    CHECK(std::abs(X.mean()) < 4.0 / std::sqrt(80000.0));
    CHECK(std::abs(Y.mean() - 1.0) < 4.0 / std::sqrt(80000.0));
}

TEST_CASE("matrix CSV round trip") {
    RngState rng(4);
    const Eigen::MatrixXd m = rng.normal_matrix(7, 3);
    const std::string path = temp_path("roundtrip.csv");
    crt::write_matrix_csv(m, path);
    const Eigen::MatrixXd back = crt::load_matrix_csv(path);
    CHECK((m - back).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("labeled CSV parses headers and remaps labels") {
    const std::string path = temp_path("labeled.csv");
    {
        std::ofstream out(path);
        out << "f0,f1,label\n";
        out << "0.5,1.5,7\n";
        out << "2.5,3.5,2\n";
        out << "4.5,5.5,7\n";
    }
    const LabeledDataset ds = crt::load_labeled_csv(path);
    CHECK(ds.objects.rows() == 3);
    CHECK(ds.objects.cols() == 2);
    CHECK(ds.n_classes == 2);
    CHECK(ds.labels[0] == 1);  // label 7 sorts after label 2
    CHECK(ds.labels[1] == 0);
    CHECK(ds.labels[2] == 1);
    std::remove(path.c_str());
}

TEST_CASE("fit_mechanism picks sensible parameters per kind") {
    RngState rng(5);
    const Eigen::MatrixXd X = rng.normal_matrix(64, 8);
    const Eigen::MatrixXd Y = rng.normal_matrix(64, 8);

    const crt::MechanismSpec oprf = crt::fit_mechanism(
        crt::MechanismKind::kOprf, X, Y, crt::KernelMode::kGaussian);
    REQUIRE(oprf.gerf.has_value());
    CHECK(oprf.gerf->A.real() < 0.0);
    CHECK(oprf.gerf->A.imag() == 0.0);

    const crt::MechanismSpec pois = crt::fit_mechanism(
        crt::MechanismKind::kPois, X, Y, crt::KernelMode::kGaussian);
    REQUIRE(pois.discrete.has_value());
    CHECK(pois.discrete->lambda > 0.0);

    const crt::MechanismSpec plus = crt::fit_mechanism(
        crt::MechanismKind::kGeomPlus, X, Y, crt::KernelMode::kGaussian);
    REQUIRE(plus.shift.has_value());
    const Eigen::MatrixXd Xs = crt::apply_shift(X, *plus.shift);
    CHECK(Xs.minCoeff() >= 1e-8);
}

TEST_CASE("variance benchmark is deterministic and oprf beats posrf") {
    Regime regime;
    regime.d = 64;
    regime.L = 256;
    const std::vector<crt::MechanismKind> mechanisms = {
        crt::MechanismKind::kPos, crt::MechanismKind::kOprf};

    RngState a(17), b(17);
    const crt::BenchResult r1 = crt::variance_benchmark(regime, mechanisms, 2, a);
    const crt::BenchResult r2 = crt::variance_benchmark(regime, mechanisms, 2, b);
    CHECK(crt::bench_to_json(r1) == crt::bench_to_json(r2));
    CHECK(crt::bench_to_csv(r1) == crt::bench_to_csv(r2));

    REQUIRE(r1.rows.size() == 2);
    const double gap =
        r1.rows[1].mean_log_variance - r1.rows[0].mean_log_variance;
    CHECK(gap <= -60.0);
}

TEST_CASE("benchmark JSON is parseable with one row per mechanism") {
    Regime regime;
    regime.d = 8;
    regime.L = 32;
    RngState rng(19);
    const crt::BenchResult result = crt::variance_benchmark(
        regime, {crt::MechanismKind::kTrig, crt::MechanismKind::kGeom}, 2, rng);
    const auto j = nlohmann::json::parse(crt::bench_to_json(result));
    CHECK(j.at("mechanisms").size() == 2);
    CHECK(j.at("mechanisms")[0].at("mechanism") == "trig");
    // CSV: header plus one line per mechanism.
    const std::string csv = crt::bench_to_csv(result);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("default sigma grid spans four decades with ten values") {
    const std::vector<double> grid = crt::default_sigma_grid();
    REQUIRE(grid.size() == 10);
    CHECK(grid.front() == doctest::Approx(1e-2));
    CHECK(grid.back() == doctest::Approx(1e2));
    for (std::size_t i = 1; i < grid.size(); ++i)
        CHECK(grid[i] / grid[i - 1] ==
              doctest::Approx(grid[1] / grid[0]).epsilon(1e-9));
}

TEST_CASE("classifier is exact on a memorized single point") {
    LabeledDataset train;
    train.objects = Eigen::MatrixXd::Constant(1, 3, 2.0);
    train.labels.resize(1);
    train.labels << 1;
    train.n_classes = 2;

    LabeledDataset test = train;
    crt::ClassifyOptions options;
    options.kind = crt::MechanismKind::kOprf;
    options.M = 64;
    options.rf_seeds = 5;
    RngState rng(23);
    const crt::ClassifyResult result =
        crt::classify(train, test, options, rng);
    CHECK(result.mean_accuracy == doctest::Approx(1.0));
    CHECK(result.n_test == 1);
}

TEST_CASE("classify is deterministic for a fixed seed") {
    RngState data_rng(29);
    LabeledDataset train, test;
    train.objects = data_rng.normal_matrix(60, 3);
    train.labels.resize(60);
    for (int i = 0; i < 60; ++i) {
        train.labels[i] = i % 2;
        if (train.labels[i] == 1) train.objects.row(i).array() += 3.0;
    }
    train.n_classes = 2;
    test = train;

    crt::ClassifyOptions options;
    options.M = 32;
    options.rf_seeds = 3;
    RngState a(31), b(31);
    const crt::ClassifyResult r1 = crt::classify(train, test, options, a);
    const crt::ClassifyResult r2 = crt::classify(train, test, options, b);
    CHECK(crt::classify_to_json(r1) == crt::classify_to_json(r2));

    options.exact = true;
    RngState c(31);
    const crt::ClassifyResult ex = crt::classify(train, test, options, c);
    CHECK(ex.std_accuracy == 0.0);
    CHECK(ex.mean_accuracy > 0.9);
}
