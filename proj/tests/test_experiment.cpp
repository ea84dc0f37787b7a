#include <gtest/gtest.h>

#include <filesystem>

#include "qrc/experiment.hpp"

using namespace qrc;

namespace {

// Short series keeps each run around a second.
ExperimentConfig small_config(Eigen::Index n = 150) {
    ExperimentConfig c;
    c.data_n = n;
    c.threads = 1;
    return c;
}

std::filesystem::path fresh_dir(const std::string &name) {
    auto p = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(p);
    return p;
}

} // namespace

TEST(Sha256, KnownVector) {
    EXPECT_EQ(sha256_hex("abc"),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Config, DefaultsMatchHyperparameterGrid) {
    const ExperimentConfig c;
    EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{0, 1, 2, 3, 4}));
    EXPECT_EQ(c.t_w, 10);
    EXPECT_DOUBLE_EQ(c.h, 0.5);
    EXPECT_DOUBLE_EQ(c.split, 0.8);
    EXPECT_NO_THROW(validate(c));
}

TEST(Config, HashStableUnderKeyOrder) {
    std::istringstream a("tau=0.1\nm_per=2\ndataset=enso\n");
    std::istringstream b("# comment\ndataset = enso\nm_per=2\n\ntau=0.1\n");
    const auto ca = parse_config(csv::parse_key_values(a, "a"));
    const auto cb = parse_config(csv::parse_key_values(b, "b"));
    EXPECT_EQ(config_hash(ca), config_hash(cb));
    EXPECT_NE(config_hash(ca), config_hash(ExperimentConfig{}));
    auto seeds_only = ca;
    seeds_only.seeds = {7};
    seeds_only.threads = 3;
    EXPECT_EQ(config_hash(seeds_only), config_hash(ca));
}

TEST(Config, CanonicalFormRoundTrips) {
    auto c = parse_config({{"dataset", "enso"}, {"backend", "trajectory"}, {"n_traj", "500"},
                           {"variant", "FC-TFI"}, {"p1", "0.01"}});
    const auto again = parse_config(to_key_values(c));
    EXPECT_EQ(config_hash(again), config_hash(c));
    EXPECT_EQ(again.backend.count, 500U);
    EXPECT_EQ(again.variant, Variant::FullyConnected);
}

TEST(Config, Errors) {
    EXPECT_THROW(parse_config({{"colour", "red"}}), ConfigError);
    EXPECT_THROW(parse_config({{"tau", "0.5"}}), ConfigError);
    EXPECT_NO_THROW(parse_config({{"tau", "0.5"}, {"off_grid", "1"}}));
    EXPECT_THROW(parse_config({{"m_per", "x"}}), ConfigError);
    EXPECT_THROW(parse_config({{"m_per", "5"}}), ConfigError);
    EXPECT_THROW(parse_config({{"m_per", "3"}}), ConfigError);
    EXPECT_NO_THROW(parse_config({{"m_per", "3"}, {"allow_long", "1"}}));
    EXPECT_THROW(parse_config({{"m_per", "4"}, {"allow_long", "1"}}), ConfigError);
    EXPECT_NO_THROW(parse_config({{"m_per", "4"}, {"backend", "trajectory"}}));
    EXPECT_THROW(parse_config({{"n_traj", "10"}}), ConfigError);
    EXPECT_THROW(parse_config({{"backend", "gpu"}}), ConfigError);
    EXPECT_THROW(parse_config({{"split", "1.0"}}), ConfigError);
    EXPECT_THROW(parse_config({{"p1", "1.0"}}), ConfigError);
    EXPECT_THROW(parse_config({{"seeds", ""}}), ConfigError);
    EXPECT_EQ(parse_config({{"seeds", "3,5"}}).seeds, (std::vector<std::uint64_t>{3, 5}));
}

TEST(RunSingle, BeatsPersistenceAndIsDeterministic) {
    const auto c = small_config(300);
    const auto a = run_single(c, 0);
    const auto b = run_single(c, 0);
    EXPECT_EQ(a.test.mse, b.test.mse);
    EXPECT_EQ(a.train.per_variable_mse, b.train.per_variable_mse);
    EXPECT_EQ(a.n_qubits, 6);
    EXPECT_LT(a.test.mse, a.baseline.mse);
    EXPECT_EQ(a.config_hash, config_hash(c));
}

TEST(RunSingle, ThreadCountDoesNotChangeMetrics) {
    auto c = small_config();
    const auto a = run_single(c, 2);
    c.threads = 4;
    const auto b = run_single(c, 2);
    EXPECT_EQ(a.test.mse, b.test.mse);
    EXPECT_EQ(a.train.mse, b.train.mse);
}

TEST(RunSingle, SeedOnlyChangesCouplings) {
    const auto c = small_config();
    const auto s0 = make_spec(c, 0);
    const auto s1 = make_spec(c, 1);
    EXPECT_NE(s0.edges, s1.edges);
    EXPECT_EQ(load_series(c).values, load_series(c).values);
    EXPECT_NE(run_single(c, 0).test.mse, run_single(c, 1).test.mse);
}

TEST(RunSingle, CachedFeaturesReproduceMetrics) {
    const auto root = fresh_dir("qrc_cache_test");
    const auto c = small_config();
    const auto fresh = run_single(c, 1, root);
    EXPECT_FALSE(fresh.from_cache);
    EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(fresh.feature_cache) /
                                        "manifest.txt"));
    const auto cached = run_single(c, 1, root);
    EXPECT_TRUE(cached.from_cache);
    EXPECT_NEAR(cached.test.mse, fresh.test.mse, 1e-12);
    EXPECT_NEAR(cached.train.mse, fresh.train.mse, 1e-12);
    // a changed config lands in a different cache entry
    auto other = c;
    other.tau = 0.1;
    EXPECT_FALSE(run_single(other, 1, root).from_cache);
    std::filesystem::remove_all(root);
}

TEST(RunSingle, CsvDataset) {
    const auto dir = fresh_dir("qrc_csv_dataset");
    const auto c = small_config();
    write_series(dir / "raw.csv", load_series(c));
    auto from_csv = c;
    from_csv.dataset = (dir / "raw.csv").string();
    EXPECT_NEAR(run_single(from_csv, 0).test.mse, run_single(c, 0).test.mse, 1e-12);
    from_csv.dataset = (dir / "missing.csv").string();
    EXPECT_THROW(run_single(from_csv, 0), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST(RunSingle, ReportHasMetrics) {
    const auto kv = csv::parse_key_values(record_report(run_single(small_config(), 0)));
    for (const char *k : {"config_hash", "seed", "test_mse", "test_rmse", "train_mse",
                          "baseline_mse", "test_mse_var2", "wall_seconds"}) {
        EXPECT_TRUE(kv.count(k)) << k;
    }
}

TEST(Sweep, TauAxisOverFiveSeeds) {
    const auto base = small_config(100);
    const auto r = run_sweep(base, {{"tau", {"0.01", "0.1", "1.0", "10"}}}, SweepMode::Grid,
                             base.seeds, {}, 1);
    ASSERT_EQ(r.cells.size(), 4U);
    std::size_t runs = 0;
    for (const auto &cell : r.cells) {
        runs += cell.records.size();
        EXPECT_TRUE(cell.errors.empty());
        EXPECT_GE(cell.std_mse, 0.0);
    }
    EXPECT_EQ(runs, 20U);
    const auto summary = sweep_summary_csv(r);
    EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 5);
    EXPECT_EQ(summary.substr(0, summary.find('\n')),
              "tau,mse_mean,mse_std,runs,failed,baseline_mse");
}

TEST(Sweep, OneCellMatchesRunSingle) {
    const auto base = small_config(100);
    const std::vector<std::uint64_t> seeds{0, 3};
    const auto r = run_sweep(base, {{"tau", {"1.0"}}}, SweepMode::Grid, seeds, {}, 2);
    ASSERT_EQ(r.cells.size(), 1U);
    ASSERT_EQ(r.cells[0].records.size(), 2U);
    for (std::size_t s = 0; s < 2; ++s) {
        EXPECT_EQ(r.cells[0].records[s].test.mse, run_single(base, seeds[s]).test.mse);
    }
}

TEST(Sweep, GridModesAndFailures) {
    const std::vector<SweepAxis> axes{{"tau", {"0.1", "1.0"}}, {"m_per", {"1", "2", "7"}}};
    EXPECT_EQ(expand_grid(axes, SweepMode::Grid).size(), 6U);
    EXPECT_EQ(expand_grid(axes, SweepMode::OneFactor).size(), 5U);
    EXPECT_THROW(expand_grid({}, SweepMode::Grid), ConfigError);
    EXPECT_THROW(expand_grid({{"tau", {}}}, SweepMode::Grid), ConfigError);

    const auto base = small_config(60);
    const auto r =
        run_sweep(base, {{"m_per", {"1", "7"}}}, SweepMode::OneFactor, {0}, {}, 1);
    ASSERT_EQ(r.cells.size(), 2U);
    EXPECT_FALSE(r.cells[0].failed());
    EXPECT_TRUE(r.cells[1].failed());
    EXPECT_EQ(r.cells[1].errors.size(), 1U);
    EXPECT_NE(sweep_summary_csv(r).find("7,nan,nan,0,1"), std::string::npos);
}

TEST(DepthReport, ScalingProperties) {
    const auto rows = depth_report(
        {Variant::FullyConnected, Variant::NearestNeighbor, Variant::OptNearestNeighbor},
        {6, 9, 12, 15});
    ASSERT_EQ(rows.size(), 12U);
    auto at = [&](Variant v, int n) {
        for (const auto &r : rows) {
            if (r.variant == v && r.n_qubits == n) {
                return r;
            }
        }
        throw std::logic_error("missing row");
    };
    for (int n : {6, 9, 12, 15}) {
        const auto opt = at(Variant::OptNearestNeighbor, n);
        EXPECT_EQ(opt.logical.depth, at(Variant::OptNearestNeighbor, 6).logical.depth);
        EXPECT_EQ(opt.block_depth, 3);
        EXPECT_GE(at(Variant::NearestNeighbor, n).logical.depth, opt.logical.depth);
        EXPECT_GT(opt.decomposed.gates, opt.logical.gates);
    }
    EXPECT_EQ(at(Variant::OptNearestNeighbor, 6).logical.gates, 170U);
    for (int n : {9, 12, 15}) {
        EXPECT_GT(at(Variant::FullyConnected, n).logical.depth,
                  at(Variant::FullyConnected, n - 3).logical.depth);
    }
    EXPECT_GE(at(Variant::FullyConnected, 15).logical.depth,
              2 * at(Variant::FullyConnected, 6).logical.depth);
    EXPECT_THROW(depth_report({Variant::FullyConnected}, {7}), ConfigError);
    const auto text = depth_report_csv(rows);
    EXPECT_EQ(text.substr(0, text.find('\n')),
              "variant,n_qubits,depth,gates,depth_decomposed,gates_decomposed,block_depth");
}

TEST(Diagnose, SameScaledAndNoisy) {
    const auto root = fresh_dir("qrc_diag_test");
    const auto c = small_config(200);
    const auto ds = split(load_series(c), c.split);
    const auto clean = compute_features(c, 0, ds);
    write_features(root / "a.csv", clean.train);

    const auto same = diagnose(root / "a.csv", root / "a.csv");
    EXPECT_EQ(same.comparison.rank_delta, 0.0);
    EXPECT_EQ(same.comparison.sigma_delta.norm(), 0.0);

    auto scaled = clean.train;
    scaled.rows *= 2.0;
    const auto sc = diagnose(clean.train, scaled);
    EXPECT_NEAR(sc.comparison.rank_delta, 0.0, 1e-10);
    EXPECT_LT(sc.comparison.variance_delta.norm(), 1e-10);

    auto noisy_cfg = c;
    noisy_cfg.noise.p1 = noisy_cfg.noise.p2 = 0.01;
    const auto noisy = compute_features(noisy_cfg, 0, ds);
    const auto d = diagnose(clean.train, noisy.train);
    EXPECT_NE(d.comparison.rank_delta, 0.0);
    EXPECT_GE(d.a.effective_rank, 1.0);
    EXPECT_LE(d.b.effective_rank, 6.0);

    EXPECT_THROW(diagnose(root / "a.csv", root / "missing.csv"), ConfigError);
    std::filesystem::remove_all(root);
}
