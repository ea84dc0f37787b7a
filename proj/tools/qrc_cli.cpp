// qrc: command-line front end for data generation, feature extraction,
// readout training, evaluation, sweeps, depth tables and diagnostics.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 runtime or
// numerical failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "qrc/qrc.hpp"

namespace fs = std::filesystem;
using namespace qrc;

namespace {

struct ConfigArgs {
    std::string config_file;
    std::vector<std::string> overrides;

    void attach(CLI::App *cmd) {
        cmd->add_option("--config", config_file, "key=value configuration file");
        cmd->add_option("overrides", overrides, "key=value overrides applied after --config");
    }

    ExperimentConfig resolve() const {
        csv::KeyValues kv;
        if (!config_file.empty()) {
            kv = csv::read_key_values(config_file);
        }
        for (const auto &o : overrides) {
            const auto eq = o.find('=');
            if (eq == std::string::npos) {
                detail::config_fail("override '" + o + "' is not key=value");
            }
            kv[csv::trim(o.substr(0, eq))] = csv::trim(o.substr(eq + 1));
        }
        return parse_config(kv);
    }
};

void emit(const std::string &text, const std::string &out) {
    if (out.empty()) {
        std::cout << text;
    } else {
        csv::write_atomic(out, text);
    }
}

std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> out;
    for (auto &v : csv::split(s)) {
        auto t = csv::trim(v);
        if (!t.empty()) {
            out.push_back(t);
        }
    }
    return out;
}

int cmd_generate(const ConfigArgs &args, const std::string &out) {
    const auto cfg = args.resolve();
    const auto raw = load_series(cfg);
    write_series(fs::path(out) / "raw.csv", raw);
    write_dataset(out, split(raw, cfg.split));
    std::cout << "rows=" << raw.length() << "\ndt=" << csv::format_double(raw.dt) << '\n';
    return 0;
}

int cmd_features(const ConfigArgs &args, const std::string &data, std::uint64_t seed,
                 const std::string &out) {
    const auto cfg = args.resolve();
    const auto ds = read_dataset(data);
    const auto fset = compute_features(cfg, seed, ds);
    write_features(fs::path(out) / "train_features.csv", fset.train);
    write_features(fs::path(out) / "test_features.csv", fset.test);
    csv::write_atomic(fs::path(out) / "manifest.txt", csv::to_string(manifest(cfg, seed)));
    std::cout << "train_rows=" << fset.train.rows.rows() << "\ntest_rows=" << fset.test.rows.rows()
              << "\nconfig_hash=" << config_hash(cfg) << '\n';
    return 0;
}

int cmd_train(const ConfigArgs &args, const std::string &data, const std::string &features,
              const std::string &model_out) {
    const auto cfg = args.resolve();
    const auto ds = read_dataset(data);
    const auto train = align_supervised(read_features(fs::path(features) / "train_features.csv"),
                                        ds.train);
    const auto model = fit_ridge(train.R, train.Y, {cfg.beta, cfg.bias, cfg.standardize});
    write_model(model_out, model);
    std::cout << metrics_report(mse(train.Y, predict_rows(model, train.R)), "train_");
    return 0;
}

int cmd_eval(const std::string &data, const std::string &features, const std::string &model_path,
             const std::string &out) {
    const auto ds = read_dataset(data);
    const auto test =
        align_supervised(read_features(fs::path(features) / "test_features.csv"), ds.test);
    const auto model = read_model(model_path);
    std::string report = metrics_report(mse(test.Y, predict_rows(model, test.R)), "test_");
    report += metrics_report(baseline_copy(ds.test), "baseline_");
    emit(report, out);
    return 0;
}

int cmd_run(const ConfigArgs &args, const std::string &cache, const std::string &out) {
    const auto cfg = args.resolve();
    std::string text;
    for (auto seed : cfg.seeds) {
        text += "# run seed " + std::to_string(seed) + "\n";
        text += record_report(run_single(cfg, seed, cache));
    }
    emit(text, out);
    return 0;
}

int cmd_sweep(const ConfigArgs &args, const std::vector<std::string> &axis_specs,
              const std::string &mode, const std::string &cache, const std::string &out) {
    const auto cfg = args.resolve();
    std::vector<SweepAxis> axes;
    for (const auto &spec : axis_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) {
            detail::config_fail("--axis expects key=v1,v2,...: " + spec);
        }
        axes.push_back({csv::trim(spec.substr(0, eq)), split_list(spec.substr(eq + 1))});
    }
    if (mode != "grid" && mode != "one-factor") {
        detail::config_fail("--mode must be grid or one-factor");
    }
    const auto result = run_sweep(cfg, axes, mode == "grid" ? SweepMode::Grid : SweepMode::OneFactor,
                                  cfg.seeds, cache, cfg.threads);
    emit(sweep_summary_csv(result), out);
    for (const auto &cell : result.cells) {
        for (const auto &e : cell.errors) {
            std::cerr << "cell " << csv::to_string(cell.overrides) << "  failed: " << e << '\n';
        }
    }
    return 0;
}

int cmd_depth(const std::string &variants, const std::string &ns, int t_w,
              const std::string &out, const std::string &circuit_out) {
    std::vector<Variant> vs;
    for (const auto &v : split_list(variants)) {
        vs.push_back(parse_variant(v));
    }
    std::vector<int> sizes;
    for (const auto &n : split_list(ns)) {
        sizes.push_back(detail::parse_int("--n", n));
    }
    if (t_w < 1) {
        detail::config_fail("--t-w must be >= 1");
    }
    emit(depth_report_csv(depth_report(vs, sizes, t_w)), out);
    if (!circuit_out.empty()) {
        for (auto v : vs) {
            for (int n : sizes) {
                const auto spec = make_spec(build_layout(3, n / 3 - 1), v, 0.5, 1.0, 1, 0);
                const auto c = build_window_circuit(Eigen::MatrixXd::Constant(t_w, 3, 0.5), spec);
                csv::write_atomic(fs::path(circuit_out) /
                                      (to_string(v) + "_N" + std::to_string(n) + ".txt"),
                                  to_text(c));
            }
        }
    }
    return 0;
}

int cmd_diagnose(const std::string &a, const std::string &b, const std::string &prefix) {
    const auto d = diagnose(a, b);
    if (!prefix.empty()) {
        write_report(prefix + "a_svd.csv", d.a);
        write_report(prefix + "b_svd.csv", d.b);
    }
    std::cout << summary(d.a, "a_") << summary(d.b, "b_") << summary(d.comparison);
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Gate-based quantum reservoir computing for multivariate forecasting"};
    app.require_subcommand(1);

    ConfigArgs gen_args, feat_args, train_args, run_args, sweep_args;
    std::string out, data, features, model, cache, mode = "grid", circuit_out, prefix;
    std::string variants = "FC-TFI,NN-TFI,Opt-NN-TFI", ns = "6,9,12,15";
    std::string diag_a, diag_b;
    std::vector<std::string> axes;
    std::uint64_t seed = 0;
    int t_w = 10;

    auto *gen = app.add_subcommand("generate", "Integrate a benchmark system and split it");
    gen_args.attach(gen);
    gen->add_option("--out", out, "output directory")->required();

    auto *feat = app.add_subcommand("features", "Extract reservoir features for one seed");
    feat_args.attach(feat);
    feat->add_option("--data", data, "dataset directory from generate")->required();
    feat->add_option("--seed", seed, "run seed");
    feat->add_option("--out", out, "output directory")->required();

    auto *train = app.add_subcommand("train", "Fit the ridge readout on train features");
    train_args.attach(train);
    train->add_option("--data", data, "dataset directory")->required();
    train->add_option("--features", features, "feature directory")->required();
    train->add_option("--model", model, "model CSV to write")->required();

    auto *eval = app.add_subcommand("eval", "Score a model on the test partition");
    eval->add_option("--data", data, "dataset directory")->required();
    eval->add_option("--features", features, "feature directory")->required();
    eval->add_option("--model", model, "model CSV")->required();
    eval->add_option("--out", out, "report file (default stdout)");

    auto *run = app.add_subcommand("run", "Full pipeline for every configured seed");
    run_args.attach(run);
    run->add_option("--cache", cache, "feature cache root");
    run->add_option("--out", out, "report file (default stdout)");

    auto *sweep = app.add_subcommand("sweep", "Seeded hyperparameter sweep");
    sweep_args.attach(sweep);
    sweep->add_option("--axis", axes, "key=v1,v2,... (repeatable)")->required()->expected(1)->take_all();
    sweep->add_option("--mode", mode, "grid or one-factor");
    sweep->add_option("--cache", cache, "feature cache root");
    sweep->add_option("--out", out, "summary CSV (default stdout)");

    auto *depth = app.add_subcommand("depth-report", "Logical depth and gate counts");
    depth->add_option("--variants", variants, "comma-separated variants");
    depth->add_option("--n", ns, "comma-separated qubit counts (3 * (1 + m_per))");
    depth->add_option("--t-w", t_w, "window length");
    depth->add_option("--out", out, "CSV file (default stdout)");
    depth->add_option("--circuit-out", circuit_out, "directory for circuit text dumps");

    auto *diag = app.add_subcommand("diagnose", "Compare singular spectra of two feature CSVs");
    diag->add_option("a", diag_a, "reference features CSV")->required();
    diag->add_option("b", diag_b, "comparison features CSV")->required();
    diag->add_option("--out-prefix", prefix, "write <prefix>a_svd.csv and <prefix>b_svd.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*gen) {
            return cmd_generate(gen_args, out);
        }
        if (*feat) {
            return cmd_features(feat_args, data, seed, out);
        }
        if (*train) {
            return cmd_train(train_args, data, features, model);
        }
        if (*eval) {
            return cmd_eval(data, features, model, out);
        }
        if (*run) {
            return cmd_run(run_args, cache, out);
        }
        if (*sweep) {
            return cmd_sweep(sweep_args, axes, mode, cache, out);
        }
        if (*depth) {
            return cmd_depth(variants, ns, t_w, out, circuit_out);
        }
        if (*diag) {
            return cmd_diagnose(diag_a, diag_b, prefix);
        }
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
