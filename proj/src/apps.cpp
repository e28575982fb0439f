#include "crt/apps.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "crt/dataset_stats.hpp"
#include "crt/errors.hpp"
#include "crt/variance.hpp"

namespace crt {

MechanismSpec fit_mechanism(MechanismKind kind, const Eigen::MatrixXd& X,
                            const Eigen::MatrixXd& Y, KernelMode kernel_mode,
                            double shift_eps) {
    MechanismSpec spec;
    spec.kind = kind;
    spec.kernel_mode = kernel_mode;

    const Eigen::MatrixXd* sx = &X;
    const Eigen::MatrixXd* sy = &Y;
    Eigen::MatrixXd shifted_x, shifted_y;
    if (spec.is_plus()) {
        spec.shift = fit_shift(X, Y, shift_eps);
        shifted_x = apply_shift(X, *spec.shift);
        shifted_y = apply_shift(Y, *spec.shift);
        sx = &shifted_x;
        sy = &shifted_y;
    }

    switch (kind) {
        case MechanismKind::kTrig:
        case MechanismKind::kPos:
            break;
        case MechanismKind::kGerf: {
            const PairStats stats =
                pair_stats_from_dataset(compute_stats(*sx, *sy));
            const auto [a, s] = optimize_A_complex(stats);
            spec.gerf = make_gerf_params(a, s, 0);
            break;
        }
        case MechanismKind::kOprf: {
            const DatasetStats stats = compute_stats(*sx, *sy);
            const double a =
                optimal_A_oprf(stats.mean_sq_norm_sum_plus, stats.d);
            spec.gerf = make_gerf_params(a, 1, 0);
            break;
        }
        case MechanismKind::kPois:
        case MechanismKind::kPoisPlus: {
            const PairStats stats =
                pair_stats_from_dataset(compute_stats(*sx, *sy));
            DiscreteParams dp;
            dp.family = DiscreteFamily::kPoisson;
            // Degenerate statistic: the variance is monotone, pick a floor.
            dp.lambda = stats.sum_sq_prod > 0.0 ? optimal_lambda(stats) : 1.0;
            spec.discrete = dp;
            break;
        }
        case MechanismKind::kGeom:
        case MechanismKind::kGeomPlus: {
            const PairStats stats =
                pair_stats_from_dataset(compute_stats(*sx, *sy));
            DiscreteParams dp;
            dp.family = DiscreteFamily::kGeometric;
            dp.p = optimize_p(stats);
            spec.discrete = dp;
            break;
        }
    }
    return spec;
}

namespace {

struct Welford {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }
    double std_dev() const {
        return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
    }
};

constexpr double kLogFloor = -745.0;  // log of the smallest positive double

// Analytic log-variance for one mechanism over all pairs of (X, Y), fed into
// the accumulator. Plus-variants receive already-shifted matrices.
void accumulate_log_variance(const MechanismSpec& spec,
                             const Eigen::MatrixXd& X,
                             const Eigen::MatrixXd& Y, Welford& acc) {
    const Eigen::Index lx = X.rows();
    const Eigen::Index ly = Y.rows();
    const Eigen::Index d = X.cols();

    const Eigen::VectorXd x_sq = X.rowwise().squaredNorm();
    const Eigen::VectorXd y_sq = Y.rowwise().squaredNorm();
    const Eigen::MatrixXd dots = X * Y.transpose();

    const bool need_sq_prod = spec.kind == MechanismKind::kPois ||
                              spec.kind == MechanismKind::kPoisPlus;
    Eigen::MatrixXd sq_prod;
    if (need_sq_prod)
        sq_prod = X.array().square().matrix() *
                  Y.array().square().matrix().transpose();

    const bool need_abs_prod = spec.kind == MechanismKind::kGeom ||
                               spec.kind == MechanismKind::kGeomPlus;
    // Fairness convention: real-valued features cost half a complex feature,
    // so their variance is reported at M = 2.
    const double fairness = spec.is_complex() ? 0.0 : std::log(2.0);

    PairStats ps;
    ps.d = d;
    if (need_abs_prod) ps.abs_prod.resize(d);

    for (Eigen::Index i = 0; i < lx; ++i) {
        for (Eigen::Index j = 0; j < ly; ++j) {
            ps.sq_norm_x = x_sq[i];
            ps.sq_norm_y = y_sq[j];
            ps.dot_xy = dots(i, j);
            ps.sq_norm_sum_plus = x_sq[i] + y_sq[j] + 2.0 * dots(i, j);
            ps.sq_norm_sum_minus =
                std::max(0.0, x_sq[i] + y_sq[j] - 2.0 * dots(i, j));
            if (need_sq_prod) ps.sum_sq_prod = sq_prod(i, j);
            if (need_abs_prod)
                ps.abs_prod =
                    (X.row(i).array() * Y.row(j).array()).abs().transpose();

            VarianceValue v;
            switch (spec.kind) {
                case MechanismKind::kTrig: v = var_trig_value(ps); break;
                case MechanismKind::kPos: v = var_pos_value(ps); break;
                case MechanismKind::kGerf:
                case MechanismKind::kOprf:
                    v = var_gerf(spec.gerf->A, spec.gerf->s, ps);
                    break;
                case MechanismKind::kPois:
                case MechanismKind::kPoisPlus:
                    v = var_pois(spec.discrete->lambda, ps);
                    break;
                case MechanismKind::kGeom:
                case MechanismKind::kGeomPlus:
                    v = var_geom(spec.discrete->p, ps);
                    break;
            }
            acc.add(std::max(v.log_variance() - fairness, kLogFloor));
        }
    }
}

}  // namespace

BenchResult variance_benchmark(const Regime& regime,
                               const std::vector<MechanismKind>& mechanisms,
                               int repeats, RngState& rng) {
    if (mechanisms.empty() || repeats < 1)
        throw std::invalid_argument("variance_benchmark: empty grid");

    const auto start = std::chrono::steady_clock::now();
    BenchResult result;
    result.regime = to_string(regime.kind);
    result.sigma = regime.sigma;
    result.d = regime.d;
    result.L = regime.L;
    result.repeats = repeats;
    result.seed = rng.seed;

    std::vector<Welford> accs(mechanisms.size());
    std::vector<std::string> params(mechanisms.size());

    for (int r = 0; r < repeats; ++r) {
        RngState repeat_rng = rng.split(static_cast<std::uint64_t>(r));
        const auto [X, Y] = generate_regime(repeat_rng, regime);
        for (std::size_t k = 0; k < mechanisms.size(); ++k) {
            const MechanismSpec spec = fit_mechanism(
                mechanisms[k], X, Y, KernelMode::kGaussian);
            if (spec.is_plus()) {
                accumulate_log_variance(spec, apply_shift(X, *spec.shift),
                                        apply_shift(Y, *spec.shift), accs[k]);
            } else {
                accumulate_log_variance(spec, X, Y, accs[k]);
            }
            params[k] = spec.to_json();
        }
    }

    for (std::size_t k = 0; k < mechanisms.size(); ++k) {
        MechanismBenchRow row;
        row.mechanism = to_string(mechanisms[k]);
        row.mean_log_variance = accs[k].mean;
        row.std_log_variance = accs[k].std_dev();
        row.params = params[k];
        result.rows.push_back(std::move(row));
    }
    const auto stop = std::chrono::steady_clock::now();
    result.wall_time_sec = std::chrono::duration<double>(stop - start).count();
    return result;
}

std::vector<double> default_sigma_grid() {
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i)
        grid.push_back(std::pow(10.0, -2.0 + 4.0 * i / 9.0));
    return grid;
}

namespace {

Eigen::MatrixXd one_hot(const Eigen::VectorXi& labels, int n_classes) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(labels.size(), n_classes);
    for (Eigen::Index i = 0; i < labels.size(); ++i) r(i, labels[i]) = 1.0;
    return r;
}

double accuracy_from_numerator(const Eigen::MatrixXd& numerator,
                               const Eigen::VectorXi& labels) {
    Eigen::Index correct = 0;
    for (Eigen::Index i = 0; i < numerator.rows(); ++i) {
        Eigen::Index argmax = 0;
        numerator.row(i).maxCoeff(&argmax);
        if (static_cast<int>(argmax) == labels[i]) ++correct;
    }
    return static_cast<double>(correct) /
           static_cast<double>(numerator.rows());
}

// One RF evaluation of the regression numerator for the query set.
double rf_accuracy(const MechanismSpec& spec, const Eigen::MatrixXd& train_x,
                   const Eigen::MatrixXd& query_x, const Eigen::MatrixXd& R,
                   const Eigen::VectorXi& query_labels, Eigen::Index M,
                   std::uint64_t seed) {
    RngState rng(seed);
    Eigen::MatrixXcd pooled;
    Eigen::MatrixXcd phi_q;
    if (spec.is_discrete()) {
        const DiscreteSample sample =
            sample_discrete(rng, *spec.discrete, M, train_x.cols());
        pooled = make_features(train_x, spec, sample, Side::kSecond)
                     .values.transpose() *
                 R.cast<std::complex<double>>();
        phi_q = make_features(query_x, spec, sample, Side::kFirst).values;
    } else {
        const ProjectionEnsemble ens =
            spec.kind == MechanismKind::kTrig
                ? sample_iid(rng, M, train_x.cols())
                : sample_orthogonal(rng, M, train_x.cols());
        pooled = make_features(train_x, spec, ens, Side::kSecond)
                     .values.transpose() *
                 R.cast<std::complex<double>>();
        phi_q = make_features(query_x, spec, ens, Side::kFirst).values;
    }
    return accuracy_from_numerator((phi_q * pooled).real(), query_labels);
}

}  // namespace

ClassifyResult classify(const LabeledDataset& train, const LabeledDataset& test,
                        const ClassifyOptions& options, RngState& rng) {
    if (train.objects.rows() == 0)
        throw std::invalid_argument("classify: empty training set");
    if (test.objects.cols() != train.objects.cols())
        throw std::invalid_argument("classify: feature dimension mismatch");
    if (test.n_classes > train.n_classes)
        throw std::invalid_argument("classify: class count mismatch");

    const Eigen::Index n_train = train.objects.rows();
    std::vector<Eigen::Index> order(n_train);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    for (Eigen::Index i = n_train - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(
            rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(order[i], order[j]);
    }
    Eigen::Index n_val = static_cast<Eigen::Index>(
        std::floor(options.validation_fraction * n_train));
    if (n_train > 1 && n_val == 0) n_val = 1;

    Eigen::MatrixXd fit_x(n_train - n_val, train.objects.cols());
    Eigen::VectorXi fit_labels(n_train - n_val);
    Eigen::MatrixXd val_x(n_val, train.objects.cols());
    Eigen::VectorXi val_labels(n_val);
    for (Eigen::Index i = 0; i < n_val; ++i) {
        val_x.row(i) = train.objects.row(order[i]);
        val_labels[i] = train.labels[order[i]];
    }
    for (Eigen::Index i = n_val; i < n_train; ++i) {
        fit_x.row(i - n_val) = train.objects.row(order[i]);
        fit_labels[i - n_val] = train.labels[order[i]];
    }

    const Eigen::MatrixXd R = one_hot(fit_labels, train.n_classes);
    const std::vector<double> grid =
        options.sigma_grid.empty() ? default_sigma_grid() : options.sigma_grid;

    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < options.rf_seeds; ++i) seeds.push_back(rng.next_u64());

    auto evaluate = [&](double sigma, const Eigen::MatrixXd& query_x,
                        const Eigen::VectorXi& query_labels,
                        std::vector<double>* per_seed) {
        const Eigen::MatrixXd train_scaled = sigma * fit_x;
        const Eigen::MatrixXd query_scaled = sigma * query_x;
        if (options.exact) {
            const Eigen::MatrixXd numerator =
                exact_kernel_matrix(query_scaled, train_scaled,
                                    KernelMode::kGaussian) *
                R;
            const double acc = accuracy_from_numerator(numerator, query_labels);
            if (per_seed) per_seed->push_back(acc);
            return acc;
        }
        const MechanismSpec spec =
            fit_mechanism(options.kind, train_scaled, train_scaled,
                          KernelMode::kGaussian, options.shift_eps);
        const Eigen::Index m_eff =
            spec.is_complex() ? std::max<Eigen::Index>(1, options.M / 2)
                              : options.M;
        double total = 0.0;
        for (const std::uint64_t seed : seeds) {
            const double acc = rf_accuracy(spec, train_scaled, query_scaled, R,
                                           query_labels, m_eff, seed);
            if (per_seed) per_seed->push_back(acc);
            total += acc;
        }
        return total / static_cast<double>(seeds.size());
    };

    double best_sigma = grid.front();
    if (n_val > 0 && grid.size() > 1) {
        double best_acc = -1.0;
        for (const double sigma : grid) {
            double acc;
            try {
                acc = evaluate(sigma, val_x, val_labels, nullptr);
            } catch (const NumericOverflowError&) {
                continue;  // this sigma blows up the features, skip it
            }
            if (acc > best_acc) {  // ties break toward smaller sigma
                best_acc = acc;
                best_sigma = sigma;
            }
        }
    }

    std::vector<double> per_seed;
    evaluate(best_sigma, test.objects, test.labels, &per_seed);

    ClassifyResult result;
    result.mechanism =
        options.exact ? "exact" : to_string(options.kind);
    result.M = options.M;
    result.best_sigma = best_sigma;
    result.rf_seeds = static_cast<int>(per_seed.size());
    result.n_test = test.objects.rows();
    Welford acc;
    for (const double a : per_seed) acc.add(a);
    result.mean_accuracy = acc.mean;
    result.std_accuracy = acc.std_dev();
    return result;
}

std::string bench_to_json(const BenchResult& result) {
    nlohmann::ordered_json j;
    j["type"] = "variance_benchmark";
    j["regime"] = result.regime;
    j["sigma"] = result.sigma;
    j["d"] = result.d;
    j["l"] = result.L;
    j["repeats"] = result.repeats;
    j["seed"] = result.seed;
    j["mechanisms"] = nlohmann::ordered_json::array();
    for (const auto& row : result.rows) {
        nlohmann::ordered_json r;
        r["mechanism"] = row.mechanism;
        r["mean_log_variance"] = row.mean_log_variance;
        r["std_log_variance"] = row.std_log_variance;
        r["params"] = nlohmann::ordered_json::parse(row.params);
        j["mechanisms"].push_back(std::move(r));
    }
    return j.dump(2) + "\n";
}

std::string bench_to_csv(const BenchResult& result) {
    std::ostringstream ss;
    ss.precision(17);
    ss << "mechanism,mean_log_variance,std_log_variance\n";
    for (const auto& row : result.rows)
        ss << row.mechanism << ',' << row.mean_log_variance << ','
           << row.std_log_variance << '\n';
    return ss.str();
}

std::string classify_to_json(const ClassifyResult& result) {
    nlohmann::ordered_json j;
    j["type"] = "classify";
    j["mechanism"] = result.mechanism;
    j["m"] = result.M;
    j["best_sigma"] = result.best_sigma;
    j["mean_accuracy"] = result.mean_accuracy;
    j["std_accuracy"] = result.std_accuracy;
    j["rf_seeds"] = result.rf_seeds;
    j["n_test"] = result.n_test;
    return j.dump(2) + "\n";
}

std::string classify_to_csv(const ClassifyResult& result) {
    std::ostringstream ss;
    ss.precision(17);
    ss << "mechanism,m,best_sigma,mean_accuracy,std_accuracy,rf_seeds,n_test\n"
       << result.mechanism << ',' << result.M << ',' << result.best_sigma
       << ',' << result.mean_accuracy << ',' << result.std_accuracy << ','
       << result.rf_seeds << ',' << result.n_test << '\n';
    return ss.str();
}

std::string attention_report_to_json(
    const std::vector<AttentionErrorRow>& rows) {
    nlohmann::ordered_json j;
    j["type"] = "attention_bench";
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        nlohmann::ordered_json r;
        r["mode"] = to_string(row.mode);
        r["m"] = row.M;
        r["median_error"] = row.median_error;
        r["iqr"] = row.iqr;
        j["rows"].push_back(std::move(r));
    }
    return j.dump(2) + "\n";
}

std::string attention_report_to_csv(
    const std::vector<AttentionErrorRow>& rows) {
    std::ostringstream ss;
    ss.precision(17);
    ss << "mode,m,median_error,iqr\n";
    for (const auto& row : rows)
        ss << to_string(row.mode) << ',' << row.M << ',' << row.median_error
           << ',' << row.iqr << '\n';
    return ss.str();
}

void write_text_file(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace crt
