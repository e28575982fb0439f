#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crt/apps.hpp"
#include "crt/data.hpp"
#include "crt/errors.hpp"
#include "crt/kernel_ops.hpp"
#include "crt/mechanisms.hpp"
#include "crt/rng.hpp"

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct CommonOut {
    std::string out_path;
    std::string format = "json";
};

void emit(const std::string& json_text, const std::string& csv_text,
          const CommonOut& out) {
    const std::string& text = out.format == "csv" ? csv_text : json_text;
    if (out.out_path.empty()) {
        std::cout << text;
    } else {
        crt::write_text_file(text, out.out_path);
    }
}

int run_variance(const crt::Regime& regime, const std::string& mechanisms,
                 int repeats, std::uint64_t seed, const CommonOut& out) {
    std::vector<crt::MechanismKind> kinds;
    for (const auto& name : split_list(mechanisms))
        kinds.push_back(crt::mechanism_kind_from_string(name));
    crt::RngState rng(seed);
    const crt::BenchResult result =
        crt::variance_benchmark(regime, kinds, repeats, rng);
    emit(crt::bench_to_json(result), crt::bench_to_csv(result), out);
    std::cerr << "variance benchmark finished in " << result.wall_time_sec
              << " s\n";
    return 0;
}

int run_classify(const std::string& train_path, const std::string& test_path,
                 const crt::ClassifyOptions& options, std::uint64_t seed,
                 const CommonOut& out) {
    const crt::LabeledDataset train = crt::load_labeled_csv(train_path);
    const crt::LabeledDataset test = crt::load_labeled_csv(test_path);
    crt::RngState rng(seed);
    const crt::ClassifyResult result = crt::classify(train, test, options, rng);
    emit(crt::classify_to_json(result), crt::classify_to_csv(result), out);
    return 0;
}

int run_attention_bench(Eigen::Index L, Eigen::Index d,
                        const std::string& modes, const std::string& ms,
                        int n_seeds, std::uint64_t seed, const CommonOut& out) {
    std::vector<crt::AttentionMode> mode_list;
    for (const auto& name : split_list(modes))
        mode_list.push_back(crt::attention_mode_from_string(name));
    std::vector<Eigen::Index> m_list;
    for (const auto& m : split_list(ms))
        m_list.push_back(static_cast<Eigen::Index>(std::stoll(m)));

    crt::RngState rng(seed);
    crt::AttentionInputs inp;
    inp.Q = rng.normal_matrix(L, d);
    inp.K = rng.normal_matrix(L, d);
    inp.V = rng.normal_matrix(L, d);
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < n_seeds; ++i) seeds.push_back(rng.next_u64());

    const auto rows = crt::attention_error_report(inp, mode_list, m_list, seeds);
    emit(crt::attention_report_to_json(rows),
         crt::attention_report_to_csv(rows), out);
    for (const auto& row : rows)
        std::cerr << crt::to_string(row.mode) << " m=" << row.M << " took "
                  << row.wall_time_sec << " s\n";
    return 0;
}

int run_gen_data(const crt::Regime& regime, std::uint64_t seed,
                 const std::string& out_path) {
    crt::RngState rng(seed);
    const auto [X, Y] = crt::generate_regime(rng, regime);
    crt::write_matrix_csv(X, out_path);
    crt::write_matrix_csv(Y, out_path + ".y");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chefs' random tables: random-feature kernel estimators, "
                 "variance benchmarks, linear attention and kernel-regression "
                 "classification"};
    app.require_subcommand(1);

    crt::Regime regime;
    std::string regime_name = "normal";
    std::string mechanisms = "trig,pos,gerf,oprf,pois,geom,pois_plus,geom_plus";
    int repeats = 5;
    std::uint64_t seed = 0;
    CommonOut out;

    auto add_regime_options = [&](CLI::App* cmd) {
        cmd->add_option("--regime", regime_name,
                        "normal|sphere|heterogen|csv");
        cmd->add_option("--sigma", regime.sigma, "scale parameter");
        cmd->add_option("--d", regime.d, "input dimension");
        cmd->add_option("--l", regime.L, "set size");
        cmd->add_option("--path", regime.path, "CSV file for the csv regime");
    };

    CLI::App* variance = app.add_subcommand(
        "variance", "Analytic log-variance benchmark over synthetic regimes");
    add_regime_options(variance);
    variance->add_option("--mechanisms", mechanisms, "comma-separated list");
    variance->add_option("--repeats", repeats, "number of set redraws");
    variance->add_option("--seed", seed, "RNG seed");
    variance->add_option("--out", out.out_path, "output file");
    variance->add_option("--format", out.format, "json|csv");

    std::string train_path, test_path, mechanism_name = "oprf";
    crt::ClassifyOptions cls;
    CLI::App* classify = app.add_subcommand(
        "classify", "Kernel-regression classification with RF approximation");
    classify->add_option("--train", train_path, "training CSV")->required();
    classify->add_option("--test", test_path, "test CSV")->required();
    classify->add_option("--mechanism", mechanism_name, "mechanism name");
    classify->add_option("--m", cls.M, "number of random features");
    classify->add_option("--rf-seeds", cls.rf_seeds, "RF seeds to average");
    classify->add_flag("--exact", cls.exact, "brute-force kernel regression");
    classify->add_option("--seed", seed, "RNG seed");
    classify->add_option("--out", out.out_path, "output file");
    classify->add_option("--format", out.format, "json|csv");

    Eigen::Index att_l = 64, att_d = 8;
    std::string modes = "oprf_ortho,oprf_iid,posrf_ortho";
    std::string ms = "16,64,256,1024";
    int n_seeds = 20;
    CLI::App* attention = app.add_subcommand(
        "attention-bench", "Linear-attention error vs exact softmax attention");
    attention->add_option("--l", att_l, "sequence length");
    attention->add_option("--d", att_d, "head dimension");
    attention->add_option("--modes", modes, "comma-separated modes");
    attention->add_option("--ms", ms, "comma-separated feature counts");
    attention->add_option("--seeds", n_seeds, "number of RF seeds");
    attention->add_option("--seed", seed, "RNG seed");
    attention->add_option("--out", out.out_path, "output file");
    attention->add_option("--format", out.format, "json|csv");

    CLI::App* gen = app.add_subcommand(
        "gen-data", "Write a regime sample as CSV (X to --out, Y to --out.y)");
    add_regime_options(gen);
    gen->add_option("--seed", seed, "RNG seed");
    gen->add_option("--out", out.out_path, "output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        regime.kind = crt::regime_kind_from_string(regime_name);
        if (variance->parsed())
            return run_variance(regime, mechanisms, repeats, seed, out);
        if (classify->parsed()) {
            if (!cls.exact)
                cls.kind = crt::mechanism_kind_from_string(mechanism_name);
            return run_classify(train_path, test_path, cls, seed, out);
        }
        if (attention->parsed())
            return run_attention_bench(att_l, att_d, modes, ms, n_seeds, seed,
                                       out);
        if (gen->parsed()) return run_gen_data(regime, seed, out.out_path);
    } catch (const crt::NumericOverflowError& e) {
        std::cerr << "numeric overflow: " << e.what() << '\n';
        return 3;
    } catch (const crt::DegenerateDenominatorError& e) {
        std::cerr << "degenerate denominator: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
