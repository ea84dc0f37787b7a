#pragma once

/**
 * @file
 * Experiment orchestration: flat key=value configs, single runs, seeded
 * sweeps with feature caching, circuit depth tables and feature diagnostics.
 *
 * Only the Ising couplings and the simulation randomness depend on the run
 * seed; the benchmark series are regenerated identically for every run.
 */

#include <openssl/evp.h>

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qrc/chaotic_systems.hpp"
#include "qrc/circuit.hpp"
#include "qrc/csv.hpp"
#include "qrc/density.hpp"
#include "qrc/diagnostics.hpp"
#include "qrc/error.hpp"
#include "qrc/pipeline.hpp"
#include "qrc/random.hpp"
#include "qrc/readout.hpp"

namespace qrc {

inline std::string sha256_hex(const std::string &content) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(content.data(), content.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        detail::numeric_fail("sha256: digest failed");
    }
    std::ostringstream os;
    os << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) {
        os << std::setw(2) << static_cast<int>(digest[i]);
    }
    return os.str();
}

struct ExperimentConfig {
    std::string dataset = "lorenz"; // lorenz | enso | path to a raw-series CSV
    int m_per = 1;
    Variant variant = Variant::OptNearestNeighbor;
    double tau = 1.0;
    double h = 0.5;
    double j_lo = -0.5;
    double j_hi = 0.5;
    int kappa = 1;
    int t_w = 10;
    double beta = 1e-6;
    bool bias = true;
    bool standardize = false;
    Backend backend = Backend::density();
    NoiseModel noise;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    double split = 0.8;

    // Series generation (lorenz / enso); unset fields use the system defaults.
    std::optional<double> data_dt;
    std::optional<int> data_substeps;
    std::optional<Eigen::Index> data_n;
    std::optional<Eigen::Index> data_transient;
    LorenzParams lorenz;
    EnsoParams enso;

    bool off_grid = false;   // allow values outside the hyperparameter grid
    bool allow_long = false; // allow density runs above 9 qubits
    int threads = 0;

    int d() const { return 3; }
};

namespace detail {

inline int parse_int(const std::string &key, const std::string &v) {
    std::size_t pos = 0;
    int out = 0;
    try {
        out = std::stoi(v, &pos);
    } catch (const std::exception &) {
        config_fail("config: " + key + " expects an integer, got '" + v + "'");
    }
    if (pos != v.size()) {
        config_fail("config: " + key + " expects an integer, got '" + v + "'");
    }
    return out;
}

inline double parse_number(const std::string &key, const std::string &v) {
    try {
        return csv::parse_double(v);
    } catch (const ConfigError &) {
        config_fail("config: " + key + " expects a number, got '" + v + "'");
    }
}

inline bool parse_bool(const std::string &key, const std::string &v) {
    if (v == "1" || v == "true" || v == "yes") {
        return true;
    }
    if (v == "0" || v == "false" || v == "no") {
        return false;
    }
    config_fail("config: " + key + " expects a boolean, got '" + v + "'");
}

inline bool in_grid(double v, std::initializer_list<double> grid) {
    return std::any_of(grid.begin(), grid.end(),
                       [v](double g) { return std::abs(v - g) <= 1e-12 * std::abs(g); });
}

} // namespace detail

inline void validate(const ExperimentConfig &c) {
    using detail::require;
    require(c.split > 0.0 && c.split < 1.0, "config: split must be in (0,1)");
    require(c.t_w >= 2, "config: t_w must be > 1");
    require(c.kappa >= 1, "config: kappa must be >= 1");
    require(c.m_per >= 1, "config: m_per must be >= 1");
    require(c.tau > 0.0, "config: tau must be > 0");
    require(c.j_lo < c.j_hi, "config: j_lo must be < j_hi");
    require(c.beta >= 0.0, "config: beta must be >= 0");
    require(!c.seeds.empty(), "config: seeds must not be empty");
    c.noise.validate();
    if (c.backend.kind != Backend::Kind::Density) {
        require(c.backend.count >= 1, "config: backend sample count must be >= 1");
    }
    if (!c.off_grid) {
        require(c.m_per >= 1 && c.m_per <= 4, "config: m_per must be in {1,2,3,4} (off_grid=1 to override)");
        require(detail::in_grid(c.tau, {0.01, 0.1, 1.0, 10.0}),
                "config: tau must be in {0.01,0.1,1,10} (off_grid=1 to override)");
        require(c.h == 0.5, "config: h must be 0.5 (off_grid=1 to override)");
        require(c.j_lo == -0.5 && c.j_hi == 0.5,
                "config: J range must be (-0.5,0.5) (off_grid=1 to override)");
        require(c.t_w == 10, "config: t_w must be 10 (off_grid=1 to override)");
    }
    const int n = c.d() * (1 + c.m_per);
    if (c.backend.kind != Backend::Kind::Trajectory) {
        require(n <= kDensityMaxQubits,
                "config: density backend supports at most 12 qubits");
        require(n <= 9 || c.allow_long,
                "config: density runs above 9 qubits are long; set allow_long=1");
    }
}

/// Applies key=value overrides on top of `base`; unknown keys are errors.
inline ExperimentConfig apply_overrides(ExperimentConfig c, const csv::KeyValues &kv) {
    using namespace detail;
    for (const auto &[k, v] : kv) {
        if (k == "dataset") {
            c.dataset = v;
        } else if (k == "m_per") {
            c.m_per = parse_int(k, v);
        } else if (k == "variant") {
            c.variant = parse_variant(v);
        } else if (k == "tau") {
            c.tau = parse_number(k, v);
        } else if (k == "h") {
            c.h = parse_number(k, v);
        } else if (k == "j_lo") {
            c.j_lo = parse_number(k, v);
        } else if (k == "j_hi") {
            c.j_hi = parse_number(k, v);
        } else if (k == "kappa") {
            c.kappa = parse_int(k, v);
        } else if (k == "t_w") {
            c.t_w = parse_int(k, v);
        } else if (k == "beta") {
            c.beta = parse_number(k, v);
        } else if (k == "bias") {
            c.bias = parse_bool(k, v);
        } else if (k == "standardize") {
            c.standardize = parse_bool(k, v);
        } else if (k == "backend") {
            if (v == "density") {
                c.backend = Backend::density();
            } else if (v == "trajectory") {
                c.backend = Backend::trajectory(c.backend.kind == Backend::Kind::Trajectory
                                                    ? c.backend.count
                                                    : 2000);
            } else if (v == "shots") {
                c.backend = Backend::shots(
                    c.backend.kind == Backend::Kind::Shots ? c.backend.count : 4096);
            } else {
                config_fail("config: unknown backend '" + v + "'");
            }
        } else if (k == "n_traj" || k == "shots") {
            // Applied after the loop so key order does not matter.
        } else if (k == "p1") {
            c.noise.p1 = parse_number(k, v);
        } else if (k == "p2") {
            c.noise.p2 = parse_number(k, v);
        } else if (k == "p_reset") {
            c.noise.p_reset = parse_number(k, v);
        } else if (k == "seeds") {
            c.seeds.clear();
            for (const auto &s : csv::split(v)) {
                if (!s.empty()) {
                    c.seeds.push_back(static_cast<std::uint64_t>(parse_int(k, s)));
                }
            }
        } else if (k == "split") {
            c.split = parse_number(k, v);
        } else if (k == "data_dt") {
            c.data_dt = parse_number(k, v);
        } else if (k == "data_substeps") {
            c.data_substeps = parse_int(k, v);
        } else if (k == "data_n") {
            c.data_n = parse_int(k, v);
        } else if (k == "data_transient") {
            c.data_transient = parse_int(k, v);
        } else if (k == "lorenz_a") {
            c.lorenz.a = parse_number(k, v);
        } else if (k == "lorenz_b") {
            c.lorenz.b = parse_number(k, v);
        } else if (k == "lorenz_c") {
            c.lorenz.c = parse_number(k, v);
        } else if (k == "off_grid") {
            c.off_grid = parse_bool(k, v);
        } else if (k == "allow_long") {
            c.allow_long = parse_bool(k, v);
        } else if (k == "threads") {
            c.threads = parse_int(k, v);
        } else {
            config_fail("config: unknown key '" + k + "'");
        }
    }
    if (auto it = kv.find("n_traj"); it != kv.end()) {
        if (c.backend.kind != Backend::Kind::Trajectory) {
            config_fail("config: n_traj requires backend=trajectory");
        }
        c.backend.count = static_cast<std::size_t>(parse_int("n_traj", it->second));
    }
    if (auto it = kv.find("shots"); it != kv.end()) {
        if (c.backend.kind != Backend::Kind::Shots) {
            config_fail("config: shots requires backend=shots");
        }
        c.backend.count = static_cast<std::size_t>(parse_int("shots", it->second));
    }
    validate(c);
    return c;
}

inline ExperimentConfig parse_config(const csv::KeyValues &kv) {
    return apply_overrides(ExperimentConfig{}, kv);
}

/// Canonical, fully resolved form. Seeds and threads are excluded: they do
/// not change which experiment a record belongs to.
inline csv::KeyValues to_key_values(const ExperimentConfig &c) {
    using csv::format_double;
    const auto defaults = c.dataset == "enso" ? default_options(SystemKind::Enso)
                                              : default_options(SystemKind::Lorenz);
    csv::KeyValues kv{
        {"dataset", c.dataset},
        {"m_per", std::to_string(c.m_per)},
        {"variant", to_string(c.variant)},
        {"tau", format_double(c.tau)},
        {"h", format_double(c.h)},
        {"j_lo", format_double(c.j_lo)},
        {"j_hi", format_double(c.j_hi)},
        {"kappa", std::to_string(c.kappa)},
        {"t_w", std::to_string(c.t_w)},
        {"beta", format_double(c.beta)},
        {"bias", c.bias ? "1" : "0"},
        {"standardize", c.standardize ? "1" : "0"},
        {"p1", format_double(c.noise.p1)},
        {"p2", format_double(c.noise.p2)},
        {"p_reset", format_double(c.noise.p_reset)},
        {"split", format_double(c.split)},
        {"data_dt", format_double(c.data_dt.value_or(defaults.dt))},
        {"data_substeps", std::to_string(c.data_substeps.value_or(defaults.substeps))},
        {"data_n", std::to_string(c.data_n.value_or(defaults.n))},
        {"data_transient", std::to_string(c.data_transient.value_or(defaults.transient))},
    };
    switch (c.backend.kind) {
    case Backend::Kind::Density:
        kv["backend"] = "density";
        break;
    case Backend::Kind::Trajectory:
        kv["backend"] = "trajectory";
        kv["n_traj"] = std::to_string(c.backend.count);
        break;
    case Backend::Kind::Shots:
        kv["backend"] = "shots";
        kv["shots"] = std::to_string(c.backend.count);
        break;
    }
    if (c.dataset == "lorenz") {
        kv["lorenz_a"] = format_double(c.lorenz.a);
        kv["lorenz_b"] = format_double(c.lorenz.b);
        kv["lorenz_c"] = format_double(c.lorenz.c);
    }
    return kv;
}

inline std::string config_hash(const ExperimentConfig &c) {
    return sha256_hex(csv::to_string(to_key_values(c)));
}

inline RawSeries load_series(const ExperimentConfig &c) {
    if (c.dataset == "lorenz" || c.dataset == "enso") {
        const auto kind = c.dataset == "lorenz" ? SystemKind::Lorenz : SystemKind::Enso;
        auto opts = default_options(kind);
        opts.dt = c.data_dt.value_or(opts.dt);
        opts.substeps = c.data_substeps.value_or(opts.substeps);
        opts.n = c.data_n.value_or(opts.n);
        opts.transient = c.data_transient.value_or(opts.transient);
        return kind == SystemKind::Lorenz ? generate_lorenz(c.lorenz, default_init(kind), opts)
                                          : generate_enso(c.enso, default_init(kind), opts);
    }
    auto raw = read_series(c.dataset);
    if (raw.dims() != c.d()) {
        detail::config_fail("dataset " + c.dataset + ": expected 3 feature columns");
    }
    return raw;
}

inline HamiltonianSpec make_spec(const ExperimentConfig &c, std::uint64_t seed) {
    return make_spec(build_layout(c.d(), c.m_per), c.variant, c.h, c.tau, c.kappa,
                     derive_seed(seed, 0), c.j_lo, c.j_hi);
}

inline ReservoirConfig reservoir_config(const ExperimentConfig &c, std::uint64_t seed,
                                        std::uint64_t partition) {
    ReservoirConfig rc;
    rc.spec = make_spec(c, seed);
    rc.t_w = c.t_w;
    rc.backend = c.backend;
    rc.noise = c.noise;
    rc.seed = derive_seed(seed, 1 + partition);
    rc.threads = c.threads;
    return rc;
}

struct RunRecord {
    std::string config_hash;
    std::uint64_t seed = 0;
    int n_qubits = 0;
    ForecastMetrics train;
    ForecastMetrics test;
    ForecastMetrics baseline; // copy-last on the normalized test partition
    double wall_seconds = 0.0;
    std::string feature_cache;
    bool from_cache = false;
};

struct FeatureSet {
    FeatureMatrix train;
    FeatureMatrix test;
    bool from_cache = false;
};

inline std::filesystem::path cache_dir_for(const std::filesystem::path &root,
                                           const ExperimentConfig &c, std::uint64_t seed) {
    return root / config_hash(c).substr(0, 16) / ("seed" + std::to_string(seed));
}

inline csv::KeyValues manifest(const ExperimentConfig &c, std::uint64_t seed) {
    auto kv = to_key_values(c);
    kv["config_hash"] = config_hash(c);
    kv["seed"] = std::to_string(seed);
    kv["backend_desc"] = c.backend.describe();
    kv["n_qubits"] = std::to_string(c.d() * (1 + c.m_per));
    return kv;
}

/// Extracts train and test features for one seed, reusing a matching cache.
inline FeatureSet compute_features(const ExperimentConfig &c, std::uint64_t seed,
                                   const TimeSeriesDataset &ds,
                                   const std::filesystem::path &cache_root = {}) {
    std::filesystem::path dir;
    if (!cache_root.empty()) {
        dir = cache_dir_for(cache_root, c, seed);
        const auto mpath = dir / "manifest.txt";
        if (std::filesystem::exists(mpath) &&
            csv::read_key_values(mpath) == manifest(c, seed) &&
            std::filesystem::exists(dir / "train_features.csv") &&
            std::filesystem::exists(dir / "test_features.csv")) {
            return {read_features(dir / "train_features.csv"),
                    read_features(dir / "test_features.csv"), true};
        }
    }
    FeatureSet fs{extract_features(ds.train, reservoir_config(c, seed, 0)),
                  extract_features(ds.test, reservoir_config(c, seed, 1)), false};
    if (!dir.empty()) {
        write_features(dir / "train_features.csv", fs.train);
        write_features(dir / "test_features.csv", fs.test);
        csv::write_atomic(dir / "manifest.txt", csv::to_string(manifest(c, seed)));
    }
    return fs;
}

struct Evaluation {
    RidgeModel model;
    ForecastMetrics train;
    ForecastMetrics test;
};

inline Evaluation train_and_evaluate(const ExperimentConfig &c, const FeatureSet &fs,
                                     const TimeSeriesDataset &ds) {
    const auto tr = align_supervised(fs.train, ds.train);
    const auto te = align_supervised(fs.test, ds.test);
    Evaluation ev;
    ev.model = fit_ridge(tr.R, tr.Y, {c.beta, c.bias, c.standardize});
    ev.train = mse(tr.Y, predict_rows(ev.model, tr.R));
    ev.test = mse(te.Y, predict_rows(ev.model, te.R));
    return ev;
}

/// generate -> split -> features (train, test) -> ridge on train -> test metrics.
inline RunRecord run_single(const ExperimentConfig &c, std::uint64_t seed,
                            const std::filesystem::path &cache_root = {}) {
    validate(c);
    const auto start = std::chrono::steady_clock::now();
    const auto ds = split(load_series(c), c.split);
    const auto fs = compute_features(c, seed, ds, cache_root);
    const auto ev = train_and_evaluate(c, fs, ds);

    RunRecord rec;
    rec.config_hash = config_hash(c);
    rec.seed = seed;
    rec.n_qubits = c.d() * (1 + c.m_per);
    rec.train = ev.train;
    rec.test = ev.test;
    rec.baseline = baseline_copy(ds.test);
    rec.from_cache = fs.from_cache;
    if (!cache_root.empty()) {
        rec.feature_cache = cache_dir_for(cache_root, c, seed).string();
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

inline std::string record_report(const RunRecord &r) {
    csv::KeyValues kv{{"config_hash", r.config_hash},
                      {"seed", std::to_string(r.seed)},
                      {"n_qubits", std::to_string(r.n_qubits)},
                      {"wall_seconds", csv::format_double(r.wall_seconds)},
                      {"feature_cache", r.feature_cache},
                      {"from_cache", r.from_cache ? "1" : "0"}};
    std::string out = csv::to_string(kv);
    out += metrics_report(r.train, "train_");
    out += metrics_report(r.test, "test_");
    out += metrics_report(r.baseline, "baseline_");
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

enum class SweepMode { Grid, OneFactor };

struct SweepCell {
    csv::KeyValues overrides;
    std::vector<RunRecord> records;
    std::vector<std::string> errors; // one per failed seed
    double mean_mse = 0.0;
    double std_mse = 0.0;
    bool failed() const { return records.empty(); }
};

struct SweepResult {
    std::vector<SweepCell> cells;
};

inline std::vector<csv::KeyValues> expand_grid(const std::vector<SweepAxis> &axes,
                                               SweepMode mode) {
    if (axes.empty() || std::any_of(axes.begin(), axes.end(),
                                    [](const SweepAxis &a) { return a.values.empty(); })) {
        detail::config_fail("sweep: grid must have at least one non-empty axis");
    }
    std::vector<csv::KeyValues> cells;
    if (mode == SweepMode::OneFactor) {
        for (const auto &axis : axes) {
            for (const auto &v : axis.values) {
                cells.push_back({{axis.key, v}});
            }
        }
        return cells;
    }
    cells.emplace_back();
    for (const auto &axis : axes) {
        std::vector<csv::KeyValues> next;
        for (const auto &partial : cells) {
            for (const auto &v : axis.values) {
                auto kv = partial;
                kv[axis.key] = v;
                next.push_back(std::move(kv));
            }
        }
        cells = std::move(next);
    }
    return cells;
}

/**
 * Runs every cell of the grid over `seeds`. Each (cell, seed) run is
 * independent, so runs execute in parallel; a failed run is recorded in its
 * cell rather than aborting the sweep.
 */
inline SweepResult run_sweep(const ExperimentConfig &base, const std::vector<SweepAxis> &axes,
                             SweepMode mode, const std::vector<std::uint64_t> &seeds,
                             const std::filesystem::path &cache_root = {}, int threads = 0) {
    if (seeds.empty()) {
        detail::config_fail("sweep: need at least one seed");
    }
    const auto grid = expand_grid(axes, mode);
    SweepResult result;
    result.cells.resize(grid.size());
    std::vector<std::optional<ExperimentConfig>> configs(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        result.cells[i].overrides = grid[i];
        try {
            auto cfg = apply_overrides(base, grid[i]);
            cfg.threads = 1;
            configs[i] = std::move(cfg);
        } catch (const Error &e) {
            result.cells[i].errors.emplace_back(e.what());
        }
    }
    const std::size_t n_seeds = seeds.size();
    std::vector<std::optional<RunRecord>> records(grid.size() * n_seeds);
    std::vector<std::string> errors(grid.size() * n_seeds);
    parallel_for(records.size(), resolve_threads(threads), [&](std::size_t k) {
        const std::size_t cell = k / n_seeds;
        if (!configs[cell]) {
            return;
        }
        try {
            records[k] = run_single(*configs[cell], seeds[k % n_seeds], cache_root);
        } catch (const std::exception &e) {
            errors[k] = e.what();
        }
    });
    for (std::size_t cell = 0; cell < grid.size(); ++cell) {
        auto &out = result.cells[cell];
        for (std::size_t s = 0; s < n_seeds; ++s) {
            const std::size_t k = cell * n_seeds + s;
            if (records[k]) {
                out.records.push_back(*records[k]);
            } else if (!errors[k].empty()) {
                out.errors.push_back(errors[k]);
            }
        }
        if (!out.records.empty()) {
            double sum = 0.0;
            for (const auto &r : out.records) {
                sum += r.test.mse;
            }
            out.mean_mse = sum / static_cast<double>(out.records.size());
            double var = 0.0;
            for (const auto &r : out.records) {
                var += (r.test.mse - out.mean_mse) * (r.test.mse - out.mean_mse);
            }
            out.std_mse = out.records.size() > 1
                              ? std::sqrt(var / static_cast<double>(out.records.size() - 1))
                              : 0.0;
        }
    }
    return result;
}

/// One row per cell: the varied keys, then mean/std test MSE, run and failure counts.
inline std::string sweep_summary_csv(const SweepResult &r) {
    std::set<std::string> keys;
    for (const auto &c : r.cells) {
        for (const auto &[k, v] : c.overrides) {
            keys.insert(k);
        }
    }
    std::ostringstream os;
    os << std::setprecision(17);
    for (const auto &k : keys) {
        os << k << ',';
    }
    os << "mse_mean,mse_std,runs,failed,baseline_mse\n";
    for (const auto &c : r.cells) {
        for (const auto &k : keys) {
            auto it = c.overrides.find(k);
            os << (it == c.overrides.end() ? "" : it->second) << ',';
        }
        const double baseline = c.records.empty() ? NAN : c.records.front().baseline.mse;
        os << (c.failed() ? NAN : c.mean_mse) << ',' << (c.failed() ? NAN : c.std_mse) << ','
           << c.records.size() << ',' << c.errors.size() << ',' << baseline << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Depth report

struct DepthRow {
    Variant variant{};
    int n_qubits = 0;
    DepthCounts logical;
    DepthCounts decomposed;
    int block_depth = 0; // one Trotter step on its own
};

/// Depth and gate counts of a full window circuit, d = 3 injection qubits.
inline std::vector<DepthRow> depth_report(const std::vector<Variant> &variants,
                                          const std::vector<int> &n_qubits, int t_w = 10) {
    std::vector<DepthRow> rows;
    for (auto v : variants) {
        for (int n : n_qubits) {
            if (n < 6 || n % 3 != 0) {
                detail::config_fail("depth_report: N must be 3 * (1 + m_per) with m_per >= 1");
            }
            const auto spec = make_spec(build_layout(3, n / 3 - 1), v, 0.5, 1.0, 1, 0);
            const Circuit c =
                build_window_circuit(Eigen::MatrixXd::Constant(t_w, 3, 0.5), spec);
            DepthRow row{v, n, depth_and_counts(c, false), depth_and_counts(c, true), 0};
            row.block_depth =
                depth_and_counts(make_circuit(n, build_trotter_step(spec)), false).depth;
            rows.push_back(row);
        }
    }
    return rows;
}

inline std::string depth_report_csv(const std::vector<DepthRow> &rows) {
    std::ostringstream os;
    os << "variant,n_qubits,depth,gates,depth_decomposed,gates_decomposed,block_depth\n";
    for (const auto &r : rows) {
        os << to_string(r.variant) << ',' << r.n_qubits << ',' << r.logical.depth << ','
           << r.logical.gates << ',' << r.decomposed.depth << ',' << r.decomposed.gates << ','
           << r.block_depth << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Diagnostics over cached feature files

struct Diagnosis {
    SvdReport a;
    SvdReport b;
    SvdComparison comparison;
};

inline Diagnosis diagnose(const FeatureMatrix &a, const FeatureMatrix &b) {
    if (a.rows.cols() != b.rows.cols()) {
        detail::config_fail("diagnose: feature matrices have different widths");
    }
    Diagnosis d{analyze_features(a.rows), analyze_features(b.rows), {}};
    d.comparison = compare_reports(d.a, d.b);
    return d;
}

inline Diagnosis diagnose(const std::filesystem::path &a, const std::filesystem::path &b) {
    return diagnose(read_features(a), read_features(b));
}

} // namespace qrc
