#pragma once

// Singular-spectrum diagnostics for reservoir feature matrices.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>

#include "qrc/csv.hpp"
#include "qrc/error.hpp"

namespace qrc {

struct Standardized {
    Eigen::MatrixXd values;
    Eigen::VectorXd means;
    Eigen::VectorXd stds;
};

/// Column-wise z-scores using the population standard deviation.
inline Standardized standardize(const Eigen::MatrixXd &R) {
    if (R.rows() < 2) {
        detail::config_fail("standardize: need at least 2 rows");
    }
    Standardized s;
    s.means = R.colwise().mean().transpose();
    const Eigen::MatrixXd centered = R.rowwise() - s.means.transpose();
    s.stds = (centered.colwise().squaredNorm() / static_cast<double>(R.rows()))
                 .cwiseSqrt()
                 .transpose();
    for (Eigen::Index j = 0; j < s.stds.size(); ++j) {
        // Relative threshold: a column that is constant up to rounding is dead.
        const double ref = std::max(1.0, std::abs(s.means[j]));
        if (!(s.stds[j] > 1e-12 * ref)) {
            detail::config_fail("standardize: column " + std::to_string(j) +
                                " has zero variance (degenerate reservoir feature)");
        }
    }
    s.values = centered.array().rowwise() / s.stds.transpose().array();
    return s;
}

/// Singular values in descending order (one per column).
inline Eigen::VectorXd svd_spectrum(const Eigen::MatrixXd &R) {
    if (R.rows() < R.cols() || R.cols() == 0) {
        detail::config_fail("svd_spectrum: need rows >= columns >= 1");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
    if (svd.info() != Eigen::Success) {
        detail::numeric_fail("svd_spectrum: SVD did not converge");
    }
    return svd.singularValues();
}

inline void require_positive_spectrum(const Eigen::VectorXd &sigma, const char *who) {
    if (sigma.size() == 0 || !(sigma.maxCoeff() > 0.0) || sigma.minCoeff() < 0.0) {
        detail::config_fail(std::string(who) +
                            ": need nonnegative values with at least one > 0");
    }
}

inline Eigen::VectorXd explained_variance_ratio(const Eigen::VectorXd &sigma) {
    require_positive_spectrum(sigma, "explained_variance_ratio");
    const Eigen::VectorXd sq = sigma.array().square();
    return sq / sq.sum();
}

/// Inverse Herfindahl index of the normalized singular values.
inline double effective_rank(const Eigen::VectorXd &sigma) {
    require_positive_spectrum(sigma, "effective_rank");
    const Eigen::VectorXd p = sigma / sigma.sum();
    return 1.0 / p.squaredNorm();
}

struct SvdReport {
    Eigen::VectorXd singular_values;
    Eigen::VectorXd explained_variance;
    double effective_rank = 0.0;

    /// sigma_1 / sigma_N; infinite when the smallest value is zero.
    double flatness() const {
        const double last = singular_values[singular_values.size() - 1];
        return last > 0.0 ? singular_values[0] / last
                          : std::numeric_limits<double>::infinity();
    }
};

inline SvdReport make_report(const Eigen::VectorXd &sigma) {
    return {sigma, explained_variance_ratio(sigma), effective_rank(sigma)};
}

/// standardize -> svd_spectrum -> report.
inline SvdReport analyze_features(const Eigen::MatrixXd &R) {
    return make_report(svd_spectrum(standardize(R).values));
}

struct SvdComparison {
    Eigen::VectorXd sigma_delta;    // b - a, per index
    Eigen::VectorXd variance_delta; // b - a, per index
    double rank_delta = 0.0;
    double flatness_a = 0.0;
    double flatness_b = 0.0;
};

inline SvdComparison compare_reports(const SvdReport &a, const SvdReport &b) {
    if (a.singular_values.size() != b.singular_values.size()) {
        detail::config_fail("compare_reports: size mismatch");
    }
    return {b.singular_values - a.singular_values,
            b.explained_variance - a.explained_variance, b.effective_rank - a.effective_rank,
            a.flatness(), b.flatness()};
}

inline void write_report(const std::filesystem::path &csv_path, const SvdReport &r) {
    Eigen::MatrixXd t(r.singular_values.size(), 3);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
        t(i, 0) = static_cast<double>(i);
        t(i, 1) = r.singular_values[i];
        t(i, 2) = r.explained_variance[i];
    }
    csv::write(csv_path, {{"index", "sigma", "variance_ratio"}, t});
}

inline std::string summary(const SvdReport &r, const std::string &prefix = "") {
    return csv::to_string(csv::KeyValues{
        {prefix + "effective_rank", csv::format_double(r.effective_rank)},
        {prefix + "flatness", csv::format_double(r.flatness())}});
}

inline std::string summary(const SvdComparison &c) {
    csv::KeyValues kv{{"effective_rank_delta", csv::format_double(c.rank_delta)},
                      {"flatness_a", csv::format_double(c.flatness_a)},
                      {"flatness_b", csv::format_double(c.flatness_b)}};
    for (Eigen::Index i = 0; i < c.sigma_delta.size(); ++i) {
        kv["sigma_delta" + std::to_string(i)] = csv::format_double(c.sigma_delta[i]);
        kv["variance_delta" + std::to_string(i)] = csv::format_double(c.variance_delta[i]);
    }
    return csv::to_string(kv);
}

} // namespace qrc
