#include "crt/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace crt {

std::string to_string(RegimeKind kind) {
    switch (kind) {
        case RegimeKind::kNormal: return "normal";
        case RegimeKind::kSphere: return "sphere";
        case RegimeKind::kHeterogen: return "heterogen";
        case RegimeKind::kCsv: return "csv";
    }
    throw std::logic_error("unknown RegimeKind");
}

RegimeKind regime_kind_from_string(const std::string& name) {
    if (name == "normal") return RegimeKind::kNormal;
    if (name == "sphere") return RegimeKind::kSphere;
    if (name == "heterogen") return RegimeKind::kHeterogen;
    if (name == "csv") return RegimeKind::kCsv;
    throw std::invalid_argument("unknown regime: " + name);
}

namespace {

Eigen::MatrixXd sphere_rows(RngState& rng, Eigen::Index L, Eigen::Index d,
                            double sigma) {
    Eigen::MatrixXd out(L, d);
    for (Eigen::Index i = 0; i < L; ++i) {
        Eigen::VectorXd v = rng.normal_vector(d);
        double norm = v.norm();
        while (norm < 1e-12) {
            v = rng.normal_vector(d);
            norm = v.norm();
        }
        out.row(i) = (sigma / norm) * v;
    }
    return out;
}

Eigen::MatrixXd resample_rows(RngState& rng, const Eigen::MatrixXd& pool,
                              Eigen::Index L, double sigma) {
    Eigen::MatrixXd out(L, pool.cols());
    for (Eigen::Index i = 0; i < L; ++i) {
        const auto idx = static_cast<Eigen::Index>(rng.next_u64() %
                                                   static_cast<std::uint64_t>(
                                                       pool.rows()));
        out.row(i) = sigma * pool.row(idx);
    }
    return out;
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> generate_regime(
    RngState& rng, const Regime& regime) {
    if (regime.L < 1 || regime.d < 1)
        throw std::invalid_argument("generate_regime: L and d must be >= 1");
    const double sigma = regime.sigma;
    switch (regime.kind) {
        case RegimeKind::kNormal:
            return {sigma * rng.normal_matrix(regime.L, regime.d),
                    sigma * rng.normal_matrix(regime.L, regime.d)};
        case RegimeKind::kSphere:
            return {sphere_rows(rng, regime.L, regime.d, sigma),
                    sphere_rows(rng, regime.L, regime.d, sigma)};
        case RegimeKind::kHeterogen: {
            Eigen::MatrixXd y = sigma * rng.normal_matrix(regime.L, regime.d);
            y.array() += sigma;
            return {sigma * rng.normal_matrix(regime.L, regime.d),
                    std::move(y)};
        }
        case RegimeKind::kCsv: {
            const Eigen::MatrixXd pool = load_matrix_csv(regime.path);
            return {resample_rows(rng, pool, regime.L, sigma),
                    resample_rows(rng, pool, regime.L, sigma)};
        }
    }
    throw std::logic_error("unknown RegimeKind");
}

namespace {

std::vector<std::vector<double>> parse_numeric_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(cell, &pos);
                while (pos < cell.size() && std::isspace(
                                                static_cast<unsigned char>(
                                                    cell[pos])))
                    ++pos;
                if (pos != cell.size()) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first) {  // header row
                first = false;
                continue;
            }
            throw std::runtime_error("non-numeric data row in " + path);
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("ragged CSV in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("empty CSV " + path);
    return rows;
}

}  // namespace

Eigen::MatrixXd load_matrix_csv(const std::string& path) {
    const auto rows = parse_numeric_csv(path);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)]
                          [static_cast<std::size_t>(j)];
    return m;
}

LabeledDataset load_labeled_csv(const std::string& path) {
    const Eigen::MatrixXd raw = load_matrix_csv(path);
    if (raw.cols() < 2)
        throw std::runtime_error("labeled CSV needs features plus a label");

    LabeledDataset ds;
    ds.objects = raw.leftCols(raw.cols() - 1);
    ds.labels.resize(raw.rows());

    // Labels are remapped to a dense [0, n) range in sorted order.
    std::map<long long, int> remap;
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
        const double v = raw(i, raw.cols() - 1);
        const auto k = static_cast<long long>(std::llround(v));
        if (std::abs(v - static_cast<double>(k)) > 1e-9)
            throw std::runtime_error("non-integer label in " + path);
        remap.emplace(k, 0);
    }
    int next = 0;
    for (auto& [key, idx] : remap) idx = next++;
    for (Eigen::Index i = 0; i < raw.rows(); ++i)
        ds.labels[i] = remap.at(
            static_cast<long long>(std::llround(raw(i, raw.cols() - 1))));
    ds.n_classes = next;
    return ds;
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace crt
