#pragma once

/**
 * @file
 * Benchmark series generation: Lorenz-63 and ENSO recharge-oscillator ODEs
 * integrated with fixed-step RK4, min-max normalization and train/test split.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "qrc/csv.hpp"
#include "qrc/error.hpp"

namespace qrc {

using State3 = std::array<double, 3>;

struct LorenzParams {
    double a = 10.0;
    double b = 28.0;
    double c = 8.0 / 3.0;
};

struct EnsoParams {
    double B = 940.0;
    double dx = 7.5;
    double C = 3.0;
    double u_star = -14.2;
    double T_bar = 16.0;
    double A = 1.0;
    double T_star = 28.0;
};

/// Lorenz-63 vector field at (x, y, z).
constexpr State3 lorenz_deriv(const State3 &s, const LorenzParams &p) {
    const auto [x, y, z] = s;
    return {p.a * (y - x), x * (p.b - z) - y, x * y - p.c * z};
}

/// ENSO vector field at (u, Tw, Te).
constexpr State3 enso_deriv(const State3 &s, const EnsoParams &p) {
    const auto [u, tw, te] = s;
    const double k = 1.0 / (2.0 * p.dx);
    return {p.B * k * (te - tw) - p.C * (u - p.u_star),
            u * k * (p.T_bar - te) - p.A * (tw - p.T_star),
            u * k * (tw - p.T_bar) - p.A * (te - p.T_star)};
}

/**
 * One classical fourth-order Runge-Kutta step of x' = f(x).
 *
 * `f` maps an Eigen::VectorXd to an Eigen::VectorXd of the same size.
 * A non-finite result raises NumericalError.
 */
template <class F>
Eigen::VectorXd rk4_step(F &&f, const Eigen::VectorXd &x, double dt) {
    detail::require(dt > 0.0 && std::isfinite(dt), "rk4_step: dt must be > 0");
    const Eigen::VectorXd k1 = f(x);
    const Eigen::VectorXd k2 = f(Eigen::VectorXd(x + 0.5 * dt * k1));
    const Eigen::VectorXd k3 = f(Eigen::VectorXd(x + 0.5 * dt * k2));
    const Eigen::VectorXd k4 = f(Eigen::VectorXd(x + dt * k3));
    Eigen::VectorXd next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite()) {
        detail::numeric_fail("rk4_step: integration produced a non-finite state");
    }
    return next;
}

/// Wraps a three-variable field into the VectorXd signature rk4_step uses.
template <class Field> auto as_vector_field(Field field) {
    return [field](const Eigen::VectorXd &x) {
        const State3 d = field(State3{x[0], x[1], x[2]});
        return Eigen::VectorXd(Eigen::Vector3d(d[0], d[1], d[2]));
    };
}

struct RawSeries {
    Eigen::MatrixXd values; // T x d
    double dt = 0.0;        // sampling interval between rows
    std::vector<std::string> names;

    Eigen::Index length() const { return values.rows(); }
    Eigen::Index dims() const { return values.cols(); }
};

struct SeriesOptions {
    double dt = 0.1;         // integration step
    int substeps = 1;        // integration steps per recorded row
    Eigen::Index n = 1000;   // recorded rows
    Eigen::Index transient = 0; // recorded-row intervals discarded first
};

inline constexpr double kDivergenceLimit = 1e12;

/**
 * Integrates `f` from `init` and records `opts.n` rows.
 *
 * Row 0 is the state after the transient; each later row advances by
 * `opts.substeps` RK4 steps of size `opts.dt`. Deterministic.
 */
template <class F>
RawSeries generate_series(F &&f, const Eigen::VectorXd &init,
                          const SeriesOptions &opts,
                          std::vector<std::string> names) {
    detail::require(opts.n >= 2, "generate_series: n must be >= 2");
    detail::require(opts.dt > 0.0, "generate_series: dt must be > 0");
    detail::require(opts.substeps >= 1, "generate_series: substeps must be >= 1");
    detail::require(opts.transient >= 0, "generate_series: transient must be >= 0");
    detail::require(init.size() >= 1 &&
                        static_cast<std::size_t>(init.size()) == names.size(),
                    "generate_series: init/name dimension mismatch");

    auto advance = [&](Eigen::VectorXd x) {
        for (int s = 0; s < opts.substeps; ++s) {
            x = rk4_step(f, x, opts.dt);
        }
        if (x.cwiseAbs().maxCoeff() > kDivergenceLimit) {
            detail::numeric_fail("generate_series: trajectory diverged");
        }
        return x;
    };

    Eigen::VectorXd x = init;
    for (Eigen::Index k = 0; k < opts.transient; ++k) {
        x = advance(x);
    }
    RawSeries out;
    out.values.resize(opts.n, init.size());
    out.dt = opts.dt * opts.substeps;
    out.names = std::move(names);
    out.values.row(0) = x.transpose();
    for (Eigen::Index k = 1; k < opts.n; ++k) {
        x = advance(x);
        out.values.row(k) = x.transpose();
    }
    return out;
}

enum class SystemKind { Lorenz, Enso };

inline SeriesOptions default_options(SystemKind kind) {
    SeriesOptions o;
    o.n = 1000;
    o.transient = 100;
    if (kind == SystemKind::Lorenz) {
        o.dt = 0.1;
        o.substeps = 1;
    } else {
        // The ENSO field is stiff; integrate at 0.01 and sample every 0.1.
        o.dt = 0.01;
        o.substeps = 10;
    }
    return o;
}

inline Eigen::VectorXd default_init(SystemKind kind) {
    return kind == SystemKind::Lorenz ? Eigen::Vector3d(1.0, 1.0, 1.0)
                                      : Eigen::Vector3d(10.0, 14.0, 24.0);
}

inline RawSeries generate_lorenz(const LorenzParams &p, const Eigen::VectorXd &init,
                                 const SeriesOptions &opts) {
    auto f = as_vector_field([p](const State3 &s) { return lorenz_deriv(s, p); });
    return generate_series(f, init, opts, {"x", "y", "z"});
}

inline RawSeries generate_enso(const EnsoParams &p, const Eigen::VectorXd &init,
                               const SeriesOptions &opts) {
    auto f = as_vector_field([p](const State3 &s) { return enso_deriv(s, p); });
    return generate_series(f, init, opts, {"u", "Tw", "Te"});
}

// ---------------------------------------------------------------------------
// Normalization

struct Scaler {
    Eigen::VectorXd min;
    Eigen::VectorXd max;
};

inline Scaler fit_scaler(const Eigen::MatrixXd &train) {
    detail::require(train.rows() >= 2, "fit_scaler: need at least 2 rows");
    Scaler s{train.colwise().minCoeff().transpose(),
             train.colwise().maxCoeff().transpose()};
    for (Eigen::Index j = 0; j < s.min.size(); ++j) {
        if (!(s.min[j] < s.max[j])) {
            detail::config_fail("fit_scaler: feature " + std::to_string(j) +
                                " is constant");
        }
    }
    return s;
}

/// Maps each column onto [0,1] using the fitted extrema; clamps outliers.
inline Eigen::MatrixXd apply_scaler(const Scaler &s, const Eigen::MatrixXd &m) {
    detail::require(m.cols() == s.min.size(), "apply_scaler: dimension mismatch");
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double lo = s.min[j];
        const double span = s.max[j] - lo;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            out(i, j) = std::clamp((m(i, j) - lo) / span, 0.0, 1.0);
        }
    }
    return out;
}

inline Eigen::MatrixXd invert_scaler(const Scaler &s, const Eigen::MatrixXd &m) {
    detail::require(m.cols() == s.min.size(), "invert_scaler: dimension mismatch");
    Eigen::MatrixXd out = m;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        out.col(j) = (m.col(j).array() * (s.max[j] - s.min[j]) + s.min[j]).matrix();
    }
    return out;
}

struct TimeSeriesDataset {
    Eigen::MatrixXd train;
    Eigen::MatrixXd test;
    Scaler scaler;
    double split_ratio = 0.8;
    std::vector<std::string> names;
};

/// Contiguous prefix/suffix split; the scaler only sees the training prefix.
inline TimeSeriesDataset split(const RawSeries &raw, double ratio) {
    detail::require(ratio > 0.0 && ratio < 1.0, "split: ratio must be in (0,1)");
    const auto total = raw.length();
    const auto n_train = static_cast<Eigen::Index>(
        std::llround(ratio * static_cast<double>(total)));
    if (n_train <= 0 || n_train >= total) {
        detail::config_fail("split: empty partition");
    }
    TimeSeriesDataset ds;
    ds.split_ratio = ratio;
    ds.names = raw.names;
    ds.scaler = fit_scaler(raw.values.topRows(n_train));
    ds.train = apply_scaler(ds.scaler, raw.values.topRows(n_train));
    ds.test = apply_scaler(ds.scaler, raw.values.bottomRows(total - n_train));
    return ds;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_series(const std::filesystem::path &path, const RawSeries &s) {
    csv::write(path, {s.names, s.values});
}

inline RawSeries read_series(const std::filesystem::path &path, double dt = 0.0) {
    auto t = csv::read(path);
    if (t.values.rows() < 2 || t.values.cols() < 1) {
        detail::config_fail("read_series: need >= 2 rows and >= 1 column: " +
                            path.string());
    }
    if (!t.values.allFinite()) {
        detail::config_fail("read_series: non-finite entry in " + path.string());
    }
    return RawSeries{std::move(t.values), dt, std::move(t.header)};
}

/// Writes train.csv, test.csv and scaler.csv (rows: min, max) under `dir`.
inline void write_dataset(const std::filesystem::path &dir,
                          const TimeSeriesDataset &ds) {
    csv::write(dir / "train.csv", {ds.names, ds.train});
    csv::write(dir / "test.csv", {ds.names, ds.test});
    Eigen::MatrixXd sc(2, ds.scaler.min.size());
    sc.row(0) = ds.scaler.min.transpose();
    sc.row(1) = ds.scaler.max.transpose();
    csv::write(dir / "scaler.csv", {ds.names, sc});
}

inline TimeSeriesDataset read_dataset(const std::filesystem::path &dir) {
    TimeSeriesDataset ds;
    auto tr = csv::read(dir / "train.csv");
    auto te = csv::read(dir / "test.csv");
    auto sc = csv::read(dir / "scaler.csv");
    if (te.header != tr.header || sc.header != tr.header || sc.values.rows() != 2) {
        detail::config_fail("read_dataset: inconsistent files in " + dir.string());
    }
    ds.names = tr.header;
    ds.train = std::move(tr.values);
    ds.test = std::move(te.values);
    ds.scaler.min = sc.values.row(0).transpose();
    ds.scaler.max = sc.values.row(1).transpose();
    const double total = static_cast<double>(ds.train.rows() + ds.test.rows());
    ds.split_ratio = static_cast<double>(ds.train.rows()) / total;
    return ds;
}

} // namespace qrc
