#pragma once

/**
 * @file
 * Linear readout: ridge regression with an optional bias column, forecast
 * metrics, the copy-last persistence baseline and a small reference echo
 * state network.
 */

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qrc/csv.hpp"
#include "qrc/error.hpp"
#include "qrc/random.hpp"

namespace qrc {

struct RidgeOptions {
    double beta = 1e-6;
    bool bias = true;
    bool standardize = false;
};

struct RidgeModel {
    Eigen::MatrixXd W_out; // d x (p [+1]); last column holds the bias when enabled
    double beta = 0.0;
    bool bias = true;
    Eigen::VectorXd feature_means;  // empty unless standardized
    Eigen::VectorXd feature_scales; // empty unless standardized

    Eigen::Index n_features() const { return W_out.cols() - (bias ? 1 : 0); }
    Eigen::Index n_outputs() const { return W_out.rows(); }
};

namespace detail {

inline Eigen::MatrixXd design_matrix(const Eigen::MatrixXd &R, const RidgeModel &m) {
    Eigen::MatrixXd X = R;
    if (m.feature_means.size() > 0) {
        X = (X.rowwise() - m.feature_means.transpose()).array().rowwise() /
            m.feature_scales.transpose().array();
    }
    if (m.bias) {
        X.conservativeResize(Eigen::NoChange, X.cols() + 1);
        X.col(X.cols() - 1).setOnes();
    }
    return X;
}

} // namespace detail

/**
 * Tikhonov least squares W = argmin ||W X^T - Y^T||^2 + beta ||W||^2 with
 * rows of R as samples, solved through the normal equations
 * (X^T X + beta I) W^T = X^T Y by Cholesky, never by explicit inversion.
 */
inline RidgeModel fit_ridge(const Eigen::MatrixXd &R, const Eigen::MatrixXd &Y,
                            const RidgeOptions &opts = {}) {
    if (R.rows() < 1 || R.rows() != Y.rows()) {
        detail::config_fail("fit_ridge: need >= 1 row and matching row counts");
    }
    if (!(opts.beta >= 0.0) || !std::isfinite(opts.beta)) {
        detail::config_fail("fit_ridge: beta must be >= 0");
    }
    RidgeModel m;
    m.beta = opts.beta;
    m.bias = opts.bias;
    if (opts.standardize) {
        m.feature_means = R.colwise().mean().transpose();
        m.feature_scales =
            ((R.rowwise() - m.feature_means.transpose()).colwise().squaredNorm() /
             static_cast<double>(R.rows()))
                .cwiseSqrt()
                .transpose();
        for (Eigen::Index j = 0; j < m.feature_scales.size(); ++j) {
            if (!(m.feature_scales[j] > 0.0)) {
                detail::config_fail("fit_ridge: feature " + std::to_string(j) +
                                    " has zero variance");
            }
        }
    }
    const Eigen::MatrixXd X = detail::design_matrix(R, m);
    Eigen::MatrixXd G = X.transpose() * X;
    G.diagonal().array() += opts.beta;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    const auto &diag = ldlt.vectorD();
    const double scale = std::max(G.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    const bool singular = ldlt.info() != Eigen::Success ||
                          diag.minCoeff() <= 1e-13 * scale * static_cast<double>(G.rows());
    if (singular) {
        detail::numeric_fail("fit_ridge: singular normal equations (increase beta)");
    }
    m.W_out = ldlt.solve(X.transpose() * Y).transpose();
    if (!m.W_out.allFinite()) {
        detail::numeric_fail("fit_ridge: non-finite weights");
    }
    return m;
}

inline Eigen::VectorXd predict(const RidgeModel &m, const Eigen::VectorXd &r) {
    if (r.size() != m.n_features()) {
        detail::config_fail("predict: feature dimension mismatch");
    }
    const Eigen::MatrixXd X = detail::design_matrix(r.transpose(), m);
    return (X * m.W_out.transpose()).transpose();
}

/// Row-wise prediction for a rows x p feature matrix.
inline Eigen::MatrixXd predict_rows(const RidgeModel &m, const Eigen::MatrixXd &R) {
    if (R.cols() != m.n_features()) {
        detail::config_fail("predict: feature dimension mismatch");
    }
    return detail::design_matrix(R, m) * m.W_out.transpose();
}

/// The minimized objective: ||X W^T - Y||_F^2 + beta ||W||_F^2.
inline double ridge_objective(const RidgeModel &m, const Eigen::MatrixXd &R,
                              const Eigen::MatrixXd &Y) {
    const Eigen::MatrixXd X = detail::design_matrix(R, m);
    return (X * m.W_out.transpose() - Y).squaredNorm() + m.beta * m.W_out.squaredNorm();
}

// ---------------------------------------------------------------------------
// Metrics

struct ForecastMetrics {
    double mse = 0.0;
    double rmse = 0.0;
    Eigen::VectorXd per_variable_mse;
};

inline ForecastMetrics mse(const Eigen::MatrixXd &y_true, const Eigen::MatrixXd &y_pred) {
    if (y_true.rows() != y_pred.rows() || y_true.cols() != y_pred.cols() ||
        y_true.size() == 0) {
        detail::config_fail("mse: shape mismatch");
    }
    const Eigen::ArrayXXd sq = (y_true - y_pred).array().square();
    ForecastMetrics m;
    m.per_variable_mse = sq.colwise().mean().transpose();
    m.mse = sq.mean();
    m.rmse = std::sqrt(m.mse);
    return m;
}

/// Persistence forecast: u_t predicts u_{t+1} across the whole series.
inline ForecastMetrics baseline_copy(const Eigen::MatrixXd &series) {
    if (series.rows() < 2) {
        detail::config_fail("baseline_copy: series too short");
    }
    const auto n = series.rows() - 1;
    return mse(series.bottomRows(n), series.topRows(n));
}

inline void write_model(const std::filesystem::path &path, const RidgeModel &m) {
    // Rows: W_out rows, then optional mean/scale rows; metadata in a sidecar.
    std::vector<std::string> header;
    for (Eigen::Index j = 0; j < m.n_features(); ++j) {
        header.push_back("w" + std::to_string(j));
    }
    if (m.bias) {
        header.emplace_back("bias");
    }
    csv::write(path, {header, m.W_out});
    csv::KeyValues meta{{"beta", csv::format_double(m.beta)},
                        {"bias", m.bias ? "1" : "0"},
                        {"outputs", std::to_string(m.n_outputs())},
                        {"features", std::to_string(m.n_features())},
                        {"standardized", m.feature_means.size() ? "1" : "0"}};
    for (Eigen::Index j = 0; j < m.feature_means.size(); ++j) {
        meta["mean" + std::to_string(j)] = csv::format_double(m.feature_means[j]);
        meta["scale" + std::to_string(j)] = csv::format_double(m.feature_scales[j]);
    }
    auto meta_path = path;
    meta_path += ".meta";
    csv::write_atomic(meta_path, csv::to_string(meta));
}

inline RidgeModel read_model(const std::filesystem::path &path) {
    auto t = csv::read(path);
    auto meta_path = path;
    meta_path += ".meta";
    const auto meta = csv::read_key_values(meta_path);
    auto get = [&](const std::string &k) {
        auto it = meta.find(k);
        if (it == meta.end()) {
            detail::config_fail("read_model: missing key " + k);
        }
        return it->second;
    };
    RidgeModel m;
    m.W_out = std::move(t.values);
    m.beta = csv::parse_double(get("beta"));
    m.bias = get("bias") == "1";
    if (get("standardized") == "1") {
        const auto p = m.n_features();
        m.feature_means.resize(p);
        m.feature_scales.resize(p);
        for (Eigen::Index j = 0; j < p; ++j) {
            m.feature_means[j] = csv::parse_double(get("mean" + std::to_string(j)));
            m.feature_scales[j] = csv::parse_double(get("scale" + std::to_string(j)));
        }
    }
    return m;
}

inline std::string metrics_report(const ForecastMetrics &m, const std::string &prefix = "") {
    csv::KeyValues kv{{prefix + "mse", csv::format_double(m.mse)},
                      {prefix + "rmse", csv::format_double(m.rmse)}};
    for (Eigen::Index j = 0; j < m.per_variable_mse.size(); ++j) {
        kv[prefix + "mse_var" + std::to_string(j)] = csv::format_double(m.per_variable_mse[j]);
    }
    return csv::to_string(kv);
}

// ---------------------------------------------------------------------------
// Reference echo state network

struct EsnConfig {
    int size = 100;
    double spectral_radius = 0.9;
    double epsilon = 1.0;
    double input_scale = 1.0;
    double density = 0.1;
    std::uint64_t seed = 0;
};

/// Largest eigenvalue modulus via a dense real eigensolve.
inline double spectral_radius(const Eigen::MatrixXd &W) {
    if (W.rows() != W.cols() || W.rows() == 0) {
        detail::config_fail("spectral_radius: matrix must be square and non-empty");
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(W, false);
    if (es.info() != Eigen::Success) {
        detail::numeric_fail("spectral_radius: eigensolver did not converge");
    }
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline Eigen::MatrixXd rescale_spectral(const Eigen::MatrixXd &W, double target_rho) {
    if (!(target_rho > 0.0)) {
        detail::config_fail("rescale_spectral: target must be > 0");
    }
    const double rho = spectral_radius(W);
    if (!(rho > 0.0)) {
        detail::config_fail("rescale_spectral: matrix has zero spectral radius");
    }
    return W * (target_rho / rho);
}

class EchoStateNetwork {
  public:
    EchoStateNetwork(const EsnConfig &cfg, int input_dim) : cfg_(cfg) {
        detail::require(cfg.size >= 1 && input_dim >= 1, "EchoStateNetwork: bad sizes");
        detail::require(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0,
                        "EchoStateNetwork: epsilon must be in [0,1]");
        detail::require(cfg.spectral_radius > 0.0 && cfg.spectral_radius < 1.0,
                        "EchoStateNetwork: spectral radius must be in (0,1)");
        Rng rng(cfg.seed);
        W_res_ = Eigen::MatrixXd::Zero(cfg.size, cfg.size);
        // Resample until the sparse draw has a nonzero spectrum.
        while (true) {
            for (Eigen::Index i = 0; i < W_res_.rows(); ++i) {
                for (Eigen::Index j = 0; j < W_res_.cols(); ++j) {
                    W_res_(i, j) =
                        uniform01(rng) < cfg.density ? uniform(rng, -1.0, 1.0) : 0.0;
                }
            }
            if (spectral_radius(W_res_) > 1e-12) {
                break;
            }
        }
        W_res_ = rescale_spectral(W_res_, cfg.spectral_radius);
        W_in_.resize(cfg.size, input_dim);
        for (Eigen::Index i = 0; i < W_in_.size(); ++i) {
            W_in_.data()[i] = uniform(rng, -cfg.input_scale, cfg.input_scale);
        }
    }

    EchoStateNetwork(const EsnConfig &cfg, Eigen::MatrixXd W_res, Eigen::MatrixXd W_in)
        : cfg_(cfg), W_res_(std::move(W_res)), W_in_(std::move(W_in)) {}

    const Eigen::MatrixXd &reservoir_weights() const { return W_res_; }
    const Eigen::MatrixXd &input_weights() const { return W_in_; }
    const EsnConfig &config() const { return cfg_; }

    /// r' = (1 - eps) r + eps tanh(W_res r + W_in u)
    Eigen::VectorXd update(const Eigen::VectorXd &r, const Eigen::VectorXd &u) const {
        if (r.size() != W_res_.rows() || u.size() != W_in_.cols()) {
            detail::config_fail("esn_update: dimension mismatch");
        }
        const Eigen::VectorXd pre = W_res_ * r + W_in_ * u;
        return (1.0 - cfg_.epsilon) * r + cfg_.epsilon * pre.array().tanh().matrix();
    }

    /// Runs from the zero state; row t is the state after consuming input row t.
    Eigen::MatrixXd states(const Eigen::MatrixXd &inputs) const {
        Eigen::MatrixXd out(inputs.rows(), W_res_.rows());
        Eigen::VectorXd r = Eigen::VectorXd::Zero(W_res_.rows());
        for (Eigen::Index t = 0; t < inputs.rows(); ++t) {
            r = update(r, inputs.row(t).transpose());
            out.row(t) = r.transpose();
        }
        return out;
    }

  private:
    EsnConfig cfg_;
    Eigen::MatrixXd W_res_;
    Eigen::MatrixXd W_in_;
};

} // namespace qrc
