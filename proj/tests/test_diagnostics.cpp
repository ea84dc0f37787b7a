#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <filesystem>

#include "qrc/diagnostics.hpp"
#include "qrc/random.hpp"

using namespace qrc;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, Rng &rng) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = uniform(rng, -1.0, 1.0);
    }
    return m;
}

// Singular values as square roots of Gram eigenvalues, descending.
Eigen::VectorXd gram_oracle(const Eigen::MatrixXd &R) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R.transpose() * R);
    Eigen::VectorXd ev = es.eigenvalues().reverse();
    return ev.cwiseMax(0.0).cwiseSqrt();
}

} // namespace

TEST(Standardize, SimpleColumn) {
    Eigen::MatrixXd c(3, 1);
    c << 1, 2, 3;
    const auto s = standardize(c);
    EXPECT_NEAR(s.values(0, 0), -std::sqrt(1.5), 1e-12);
    EXPECT_NEAR(s.values(1, 0), 0.0, 1e-12);
    EXPECT_NEAR(s.values(2, 0), std::sqrt(1.5), 1e-12);
    EXPECT_DOUBLE_EQ(s.means[0], 2.0);
}

TEST(Standardize, MomentsAndIdempotence) {
    Rng rng(1);
    Eigen::MatrixXd R = random_matrix(40, 6, rng);
    R.col(2) = 5.0 * R.col(2).array() + 3.0;
    const auto s = standardize(R);
    for (Eigen::Index j = 0; j < 6; ++j) {
        EXPECT_NEAR(s.values.col(j).mean(), 0.0, 1e-10);
        EXPECT_NEAR(std::sqrt(s.values.col(j).squaredNorm() / 40.0), 1.0, 1e-10);
    }
    EXPECT_LT((standardize(s.values).values - s.values).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Standardize, ZeroVarianceNamesColumn) {
    Eigen::MatrixXd R(4, 3);
    R << 1, 5, 2, 2, 5, 3, 3, 5, 1, 4, 5, 0;
    try {
        standardize(R);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("column 1"), std::string::npos);
    }
    EXPECT_THROW(standardize(Eigen::MatrixXd::Ones(1, 2)), ConfigError);
}

TEST(Svd, IdentityAndRankOne) {
    EXPECT_LT((svd_spectrum(Eigen::MatrixXd::Identity(5, 5)) - Eigen::VectorXd::Ones(5)).norm(),
              1e-14);
    const Eigen::Vector4d a(1, 2, 3, 4);
    const Eigen::Vector3d b(0.5, -1, 2);
    const auto s = svd_spectrum(a * b.transpose());
    EXPECT_NEAR(s[0], a.norm() * b.norm(), 1e-12);
    EXPECT_LT(s[1], 1e-12);
    EXPECT_LT(s[2], 1e-12);
    EXPECT_THROW(svd_spectrum(Eigen::MatrixXd::Ones(2, 3)), ConfigError);
}

TEST(Svd, MatchesGramEigenOracle) {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const auto R = random_matrix(50, 12, rng);
        const auto s = svd_spectrum(R);
        const auto ref = gram_oracle(R);
        for (Eigen::Index i = 0; i < 12; ++i) {
            EXPECT_NEAR(s[i] * s[i], ref[i] * ref[i], 1e-8 * ref[0] * ref[0]);
        }
        for (Eigen::Index i = 1; i < 12; ++i) {
            EXPECT_GE(s[i - 1], s[i]);
        }
    }
}

TEST(Svd, RowPermutationAndFrobenius) {
    Rng rng(3);
    const auto R = standardize(random_matrix(30, 5, rng)).values;
    Eigen::MatrixXd P = R.colwise().reverse();
    P.row(0).swap(P.row(17));
    const auto a = svd_spectrum(R);
    EXPECT_LT((a - svd_spectrum(P)).norm(), 1e-12);
    EXPECT_NEAR(a.squaredNorm(), 30.0 * 5.0, 1e-6 * 150.0);
}

TEST(Variance, HandValues) {
    const Eigen::Vector3d s(2, 1, 1);
    const auto r = explained_variance_ratio(s);
    EXPECT_NEAR(r[0], 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(r[1], 1.0 / 6.0, 1e-12);
    EXPECT_NEAR(r[2], 1.0 / 6.0, 1e-12);
    EXPECT_NEAR(effective_rank(s), 8.0 / 3.0, 1e-12);
    EXPECT_DOUBLE_EQ(explained_variance_ratio(Eigen::VectorXd::Constant(1, 3.0))[0], 1.0);
}

TEST(Variance, AllZeroRejected) {
    EXPECT_THROW(explained_variance_ratio(Eigen::VectorXd::Zero(3)), ConfigError);
    EXPECT_THROW(effective_rank(Eigen::VectorXd::Zero(3)), ConfigError);
    EXPECT_THROW(effective_rank(Eigen::Vector2d(1, -1)), ConfigError);
}

TEST(EffectiveRank, UniformAndSingle) {
    for (int n = 1; n <= 15; ++n) {
        EXPECT_NEAR(effective_rank(Eigen::VectorXd::Constant(n, 0.7)), n, 1e-12);
    }
    EXPECT_DOUBLE_EQ(effective_rank(Eigen::Vector3d(4, 0, 0)), 1.0);
}

TEST(EffectiveRank, ScaleInvarianceAndBounds) {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd s(8);
        int nonzero = 0;
        for (Eigen::Index i = 0; i < 8; ++i) {
            s[i] = uniform01(rng) < 0.8 ? uniform01(rng) + 0.01 : 0.0;
            nonzero += s[i] > 0.0 ? 1 : 0;
        }
        if (nonzero == 0) {
            continue;
        }
        const double c = uniform(rng, 0.1, 10.0);
        EXPECT_NEAR(effective_rank(c * s), effective_rank(s), 1e-12);
        EXPECT_LT((explained_variance_ratio(c * s) - explained_variance_ratio(s)).norm(), 1e-12);
        EXPECT_NEAR(explained_variance_ratio(s).sum(), 1.0, 1e-10);
        EXPECT_GE(effective_rank(s), 1.0 - 1e-12);
        EXPECT_LE(effective_rank(s), nonzero + 1e-12);
    }
}

TEST(Report, CompareIdenticalAndScaled) {
    const auto a = make_report(Eigen::Vector4d(3, 2, 1, 0.5));
    const auto same = compare_reports(a, a);
    EXPECT_EQ(same.rank_delta, 0.0);
    EXPECT_EQ(same.sigma_delta.norm(), 0.0);
    EXPECT_DOUBLE_EQ(same.flatness_a, 6.0);

    const auto b = make_report(2.0 * a.singular_values);
    const auto cmp = compare_reports(a, b);
    EXPECT_NEAR(cmp.rank_delta, 0.0, 1e-12);
    EXPECT_LT(cmp.variance_delta.norm(), 1e-12);
    EXPECT_LT((cmp.sigma_delta - a.singular_values).norm(), 1e-15);
    EXPECT_THROW(compare_reports(a, make_report(Eigen::Vector3d(1, 1, 1))), ConfigError);
}

TEST(Report, AnalyzeFeaturesIsScaleFree) {
    Rng rng(5);
    const auto R = random_matrix(60, 6, rng);
    const auto a = analyze_features(R);
    const auto b = analyze_features(2.0 * R);
    EXPECT_NEAR(a.effective_rank, b.effective_rank, 1e-10);
    EXPECT_GE(a.effective_rank, 1.0);
    EXPECT_LE(a.effective_rank, 6.0);
}

TEST(Report, CsvAndSummary) {
    const auto r = make_report(Eigen::Vector3d(2, 1, 1));
    const auto path = std::filesystem::temp_directory_path() / "qrc_svd_report.csv";
    write_report(path, r);
    const auto t = csv::read(path);
    EXPECT_EQ(t.header, (std::vector<std::string>{"index", "sigma", "variance_ratio"}));
    EXPECT_EQ(t.values(0, 1), 2.0);
    EXPECT_NEAR(t.values(2, 2), 1.0 / 6.0, 1e-16);
    const auto kv = csv::parse_key_values(summary(r));
    EXPECT_NEAR(csv::parse_double(kv.at("effective_rank")), 8.0 / 3.0, 1e-15);
    EXPECT_EQ(csv::parse_double(kv.at("flatness")), 2.0);
    std::filesystem::remove(path);
}
