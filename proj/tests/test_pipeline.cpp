#include <gtest/gtest.h>

#include <filesystem>

#include "qrc/chaotic_systems.hpp"
#include "qrc/pipeline.hpp"

using namespace qrc;

namespace {

ReservoirConfig six_qubit_config(std::uint64_t seed = 3) {
    ReservoirConfig rc;
    rc.spec = make_spec(build_layout(3, 1), Variant::OptNearestNeighbor, 0.5, 1.0, 1, seed);
    rc.t_w = 10;
    rc.threads = 1;
    return rc;
}

Eigen::MatrixXd normalized_lorenz(Eigen::Index n) {
    auto raw = generate_lorenz({}, default_init(SystemKind::Lorenz), {0.1, 1, n, 100});
    return apply_scaler(fit_scaler(raw.values), raw.values);
}

} // namespace

TEST(ExtractFeatures, SingleWindow) {
    const auto series = normalized_lorenz(10);
    const auto fm = extract_features(series, six_qubit_config());
    EXPECT_EQ(fm.rows.rows(), 1);
    EXPECT_EQ(fm.rows.cols(), 6);
    EXPECT_EQ(fm.t_index, (std::vector<Eigen::Index>{10}));
}

TEST(ExtractFeatures, RowCountsAndBounds) {
    const auto series = normalized_lorenz(1000);
    const auto full = extract_features(series, six_qubit_config());
    EXPECT_EQ(full.rows.rows(), 991);
    EXPECT_EQ(full.t_index.front(), 10);
    EXPECT_EQ(full.t_index.back(), 1000);
    EXPECT_GE(full.rows.minCoeff(), -1.0);
    EXPECT_LE(full.rows.maxCoeff(), 1.0);
    const auto test_part = extract_features(series.bottomRows(200), six_qubit_config());
    EXPECT_EQ(test_part.rows.rows(), 191);
    const auto pairs = align_supervised(full, series);
    EXPECT_EQ(pairs.R.rows(), 990);
}

TEST(ExtractFeatures, ConstantSeriesGivesIdenticalRows) {
    const Eigen::MatrixXd series = Eigen::MatrixXd::Constant(15, 3, 0.4);
    const auto fm = extract_features(series, six_qubit_config());
    for (Eigen::Index i = 1; i < fm.rows.rows(); ++i) {
        EXPECT_EQ(fm.rows.row(i), fm.rows.row(0));
    }
}

TEST(ExtractFeatures, RewindingForgetsEarlierHistory) {
    Eigen::MatrixXd a = normalized_lorenz(30);
    Eigen::MatrixXd b = a;
    b.topRows(15).setConstant(0.9);
    const auto fa = extract_features(a, six_qubit_config());
    const auto fb = extract_features(b, six_qubit_config());
    // windows ending at t >= 25 only see rows 16.. and are unaffected
    for (Eigen::Index i = 0; i < fa.rows.rows(); ++i) {
        if (fa.t_index[static_cast<std::size_t>(i)] >= 25) {
            EXPECT_EQ(fa.rows.row(i), fb.rows.row(i));
        } else {
            EXPECT_NE(fa.rows.row(i), fb.rows.row(i));
        }
    }
}

TEST(ExtractFeatures, IndependentOfScheduleAndThreads) {
    const auto series = normalized_lorenz(60);
    auto rc = six_qubit_config();
    const auto serial = extract_features(series, rc);
    rc.threads = 4;
    EXPECT_EQ(extract_features(series, rc).rows, serial.rows);
    // each window computed alone matches its row
    for (Eigen::Index start : {Eigen::Index{0}, Eigen::Index{17}, Eigen::Index{50}}) {
        rc.threads = 1;
        const auto single = extract_features(series.middleRows(start, 10), rc);
        EXPECT_EQ(single.rows.row(0), serial.rows.row(start));
    }
}

TEST(ExtractFeatures, TrajectoryBackendReproducible) {
    const auto series = normalized_lorenz(14);
    auto rc = six_qubit_config();
    rc.backend = Backend::trajectory(64);
    rc.seed = 99;
    const auto a = extract_features(series, rc);
    rc.threads = 3;
    const auto b = extract_features(series, rc);
    EXPECT_EQ(a.rows, b.rows);
    rc.seed = 100;
    EXPECT_NE(extract_features(series, rc).rows, a.rows);
}

TEST(ExtractFeatures, ShotBackendIsCloseToExact) {
    const auto series = normalized_lorenz(12);
    auto rc = six_qubit_config();
    const auto exact = extract_features(series, rc);
    rc.backend = Backend::shots(4096);
    const auto shots = extract_features(series, rc);
    EXPECT_LT((shots.rows - exact.rows).cwiseAbs().maxCoeff(), 5.0 / std::sqrt(4096.0));
}

TEST(ExtractFeatures, Errors) {
    auto rc = six_qubit_config();
    EXPECT_THROW(extract_features(Eigen::MatrixXd::Constant(9, 3, 0.5), rc), ConfigError);
    EXPECT_THROW(extract_features(Eigen::MatrixXd::Constant(12, 2, 0.5), rc), ConfigError);
    EXPECT_THROW(extract_features(Eigen::MatrixXd::Constant(12, 3, 1.5), rc), ConfigError);
    rc.t_w = 1;
    EXPECT_THROW(extract_features(Eigen::MatrixXd::Constant(12, 3, 0.5), rc), ConfigError);
    auto big = rc;
    big.t_w = 10;
    big.spec = make_spec(build_layout(13, 1), Variant::OptNearestNeighbor, 0.5, 1, 1, 0);
    EXPECT_THROW(extract_features(Eigen::MatrixXd::Constant(12, 13, 0.5), big), ConfigError);
    rc = six_qubit_config();
    rc.backend = Backend::trajectory(0);
    EXPECT_THROW(extract_features(Eigen::MatrixXd::Constant(12, 3, 0.5), rc), ConfigError);
}

TEST(Align, NextStepTargets) {
    const auto series = normalized_lorenz(25);
    const auto fm = extract_features(series, six_qubit_config());
    const auto s = align_supervised(fm, series);
    ASSERT_EQ(s.R.rows(), 15);
    EXPECT_EQ(s.R, fm.rows.topRows(15));
    for (Eigen::Index i = 0; i < 15; ++i) {
        // feature row for time t (1-based) is paired with u_{t+1}, i.e. 0-based row t
        const auto t = fm.t_index[static_cast<std::size_t>(i)];
        EXPECT_EQ(s.Y.row(i), series.row(t));
    }
}

TEST(Align, MinimalAndEmpty) {
    const auto series = normalized_lorenz(11);
    const auto fm = extract_features(series, six_qubit_config());
    EXPECT_EQ(align_supervised(fm, series).R.rows(), 1);
    const auto one = extract_features(series.topRows(10), six_qubit_config());
    EXPECT_THROW(align_supervised(one, series.topRows(10)), ConfigError);
    EXPECT_THROW(align_supervised(fm, series.topRows(10)), ConfigError);
}

TEST(FeatureCsv, RoundTripIsExact) {
    const auto series = normalized_lorenz(20);
    const auto fm = extract_features(series, six_qubit_config());
    const auto path = std::filesystem::temp_directory_path() / "qrc_features.csv";
    write_features(path, fm);
    const auto t = csv::read(path);
    EXPECT_EQ(t.header, (std::vector<std::string>{"t", "z0", "z1", "z2", "z3", "z4", "z5"}));
    const auto back = read_features(path);
    EXPECT_EQ(back.rows, fm.rows);
    EXPECT_EQ(back.t_index, fm.t_index);
    std::filesystem::remove(path);
}

TEST(Threads, Resolution) {
    EXPECT_EQ(resolve_threads(3), 3);
    EXPECT_GE(resolve_threads(0), 1);
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) {
        EXPECT_EQ(h, 1);
    }
    EXPECT_THROW(parallel_for(10, 3,
                              [](std::size_t i) {
                                  if (i == 5) {
                                      detail::numeric_fail("boom");
                                  }
                              }),
                 NumericalError);
}
