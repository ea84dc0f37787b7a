#pragma once

/**
 * @file
 * Sliding-window feature extraction under the rewinding protocol.
 *
 * Every window of t_w consecutive rows is processed by its own circuit that
 * starts from (|+><+|)^N, so a feature row depends only on its window. Rows
 * are indexed by the 1-based time t of the window's last point.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "qrc/circuit.hpp"
#include "qrc/csv.hpp"
#include "qrc/density.hpp"
#include "qrc/error.hpp"
#include "qrc/random.hpp"

namespace qrc {

struct Backend {
    enum class Kind { Density, Trajectory, Shots };
    Kind kind = Kind::Density;
    std::size_t count = 0; // trajectories or shots

    static Backend density() { return {Kind::Density, 0}; }
    static Backend trajectory(std::size_t n) { return {Kind::Trajectory, n}; }
    static Backend shots(std::size_t n) { return {Kind::Shots, n}; }

    std::string describe() const {
        switch (kind) {
        case Kind::Density:
            return "density";
        case Kind::Trajectory:
            return "trajectory(" + std::to_string(count) + ")";
        case Kind::Shots:
            return "shots(" + std::to_string(count) + ")";
        }
        return "?";
    }
};

struct ReservoirConfig {
    HamiltonianSpec spec;
    int t_w = 10;
    Backend backend = Backend::density();
    NoiseModel noise;
    std::uint64_t seed = 0; // stream for trajectory / shot randomness
    int threads = 0;        // 0: QRC_THREADS env var, else hardware concurrency
};

struct FeatureMatrix {
    Eigen::MatrixXd rows;               // (T - t_w + 1) x N
    std::vector<Eigen::Index> t_index;  // 1-based time of each row
};

/// Thread count: explicit request, else QRC_THREADS, else hardware concurrency.
inline int resolve_threads(int requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char *env = std::getenv("QRC_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) {
            return n;
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the first error.
template <class Fn> void parallel_for(std::size_t n, int threads, Fn fn) {
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(n);
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back(work);
    }
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

/// <Z_j> for every qubit after simulating one circuit with the chosen backend.
inline Eigen::VectorXd simulate_features(const Circuit &c, const Backend &backend,
                                         const NoiseModel &noise, std::uint64_t seed) {
    switch (backend.kind) {
    case Backend::Kind::Density:
        return expect_z_all(run_circuit_dm(c, noise));
    case Backend::Kind::Trajectory:
        return run_circuit_trajectory(c, seed, backend.count, noise).z_means;
    case Backend::Kind::Shots:
        return sample_shots(run_circuit_dm(c, noise), backend.count, seed).z_means;
    }
    return {};
}

inline FeatureMatrix extract_features(const Eigen::MatrixXd &series,
                                      const ReservoirConfig &cfg) {
    validate(cfg.spec);
    if (cfg.t_w < 2) {
        detail::config_fail("extract_features: window size must be > 1");
    }
    const Eigen::Index T = series.rows();
    if (T < cfg.t_w) {
        detail::config_fail("extract_features: series shorter than the window");
    }
    if (series.cols() != cfg.spec.layout.d) {
        detail::config_fail("extract_features: series has " + std::to_string(series.cols()) +
                            " features, layout expects " + std::to_string(cfg.spec.layout.d));
    }
    if ((series.array() < 0.0).any() || (series.array() > 1.0).any()) {
        detail::config_fail("extract_features: series entries must lie in [0,1]");
    }
    const int n = cfg.spec.n_qubits();
    if (cfg.backend.kind != Backend::Kind::Trajectory && n > kDensityMaxQubits) {
        detail::config_fail("extract_features: density backend supports at most " +
                            std::to_string(kDensityMaxQubits) + " qubits");
    }
    if (cfg.backend.kind != Backend::Kind::Density && cfg.backend.count < 1) {
        detail::config_fail("extract_features: backend sample count must be >= 1");
    }
    cfg.noise.validate();

    const auto windows = static_cast<std::size_t>(T - cfg.t_w + 1);
    FeatureMatrix fm;
    fm.rows.resize(static_cast<Eigen::Index>(windows), n);
    fm.t_index.resize(windows);
    parallel_for(windows, resolve_threads(cfg.threads), [&](std::size_t w) {
        const auto start = static_cast<Eigen::Index>(w);
        const Circuit c = build_window_circuit(series.middleRows(start, cfg.t_w), cfg.spec);
        const Eigen::VectorXd z = simulate_features(c, cfg.backend, cfg.noise,
                                                    derive_seed(cfg.seed, w));
        fm.rows.row(start) = z.cwiseMax(-1.0).cwiseMin(1.0).transpose();
        fm.t_index[w] = start + cfg.t_w;
    });
    return fm;
}

struct Supervised {
    Eigen::MatrixXd R; // features r_t
    Eigen::MatrixXd Y; // targets u_{t+1}
};

/// Pairs r_t with u_{t+1}; the row for t = T has no target and is dropped.
inline Supervised align_supervised(const FeatureMatrix &fm, const Eigen::MatrixXd &series) {
    const auto rows = fm.rows.rows();
    if (rows < 2) {
        detail::config_fail("align_supervised: no (feature, next value) pairs");
    }
    if (fm.t_index.empty() || fm.t_index.back() != series.rows()) {
        detail::config_fail("align_supervised: features do not match the series");
    }
    const Eigen::Index first_target = fm.t_index.front(); // 0-based index of u_{t+1}
    return {fm.rows.topRows(rows - 1), series.middleRows(first_target, rows - 1)};
}

// ---------------------------------------------------------------------------
// Persistence

inline void write_features(const std::filesystem::path &path, const FeatureMatrix &fm) {
    std::vector<std::string> header{"t"};
    for (Eigen::Index j = 0; j < fm.rows.cols(); ++j) {
        header.push_back("z" + std::to_string(j));
    }
    Eigen::MatrixXd table(fm.rows.rows(), fm.rows.cols() + 1);
    for (Eigen::Index i = 0; i < fm.rows.rows(); ++i) {
        table(i, 0) = static_cast<double>(fm.t_index[static_cast<std::size_t>(i)]);
    }
    table.rightCols(fm.rows.cols()) = fm.rows;
    csv::write(path, {header, table});
}

inline FeatureMatrix read_features(const std::filesystem::path &path) {
    auto t = csv::read(path);
    if (t.header.empty() || t.header.front() != "t" || t.values.cols() < 2) {
        detail::config_fail("read_features: expected header t,z0,... in " + path.string());
    }
    FeatureMatrix fm;
    fm.rows = t.values.rightCols(t.values.cols() - 1);
    for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
        fm.t_index.push_back(static_cast<Eigen::Index>(t.values(i, 0)));
    }
    return fm;
}

} // namespace qrc
