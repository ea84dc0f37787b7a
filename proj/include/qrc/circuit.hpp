#pragma once

/**
 * @file
 * Reservoir layout, Ising couplings and gate-level circuit construction.
 *
 * Qubits are arranged in blocks: each injection qubit is followed by its
 * memory qubits. A window circuit contains one block per time step
 * (reset injection qubits, angle-encode the input, Trotterized evolution).
 */

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qrc/error.hpp"
#include "qrc/random.hpp"

namespace qrc {

enum class Role : std::uint8_t { Injection, Memory };

struct QubitLayout {
    int d = 0;
    int m_per = 0;
    std::vector<Role> roles;

    int n_qubits() const { return static_cast<int>(roles.size()); }

    std::vector<int> injection_qubits() const {
        std::vector<int> out;
        for (int q = 0; q < n_qubits(); ++q) {
            if (roles[static_cast<std::size_t>(q)] == Role::Injection) {
                out.push_back(q);
            }
        }
        return out;
    }
};

inline QubitLayout build_layout(int d, int m_per) {
    if (d < 1 || m_per < 1) {
        detail::config_fail("build_layout: d and m_per must be >= 1");
    }
    QubitLayout layout{d, m_per, {}};
    layout.roles.reserve(static_cast<std::size_t>(d * (1 + m_per)));
    for (int i = 0; i < d; ++i) {
        layout.roles.push_back(Role::Injection);
        layout.roles.insert(layout.roles.end(), static_cast<std::size_t>(m_per),
                            Role::Memory);
    }
    return layout;
}

enum class Variant : std::uint8_t { FullyConnected, NearestNeighbor, OptNearestNeighbor };

inline std::string to_string(Variant v) {
    switch (v) {
    case Variant::FullyConnected:
        return "FC-TFI";
    case Variant::NearestNeighbor:
        return "NN-TFI";
    case Variant::OptNearestNeighbor:
        return "Opt-NN-TFI";
    }
    return "?";
}

inline Variant parse_variant(const std::string &s) {
    if (s == "FC-TFI" || s == "fc") {
        return Variant::FullyConnected;
    }
    if (s == "NN-TFI" || s == "nn") {
        return Variant::NearestNeighbor;
    }
    if (s == "Opt-NN-TFI" || s == "opt-nn" || s == "opt") {
        return Variant::OptNearestNeighbor;
    }
    detail::config_fail("unknown variant: " + s);
}

struct Edge {
    int i = 0;
    int j = 0;
    double J = 0.0;

    friend bool operator==(const Edge &, const Edge &) = default;
};

/// Interaction graph of a variant: all pairs (FC) or the open chain (NN, Opt-NN).
inline std::vector<std::pair<int, int>> interaction_pairs(Variant v, int n_qubits) {
    std::vector<std::pair<int, int>> pairs;
    if (v == Variant::FullyConnected) {
        for (int i = 0; i < n_qubits; ++i) {
            for (int j = i + 1; j < n_qubits; ++j) {
                pairs.emplace_back(i, j);
            }
        }
    } else {
        for (int i = 0; i + 1 < n_qubits; ++i) {
            pairs.emplace_back(i, i + 1);
        }
    }
    return pairs;
}

/// Draws one coupling per pair, i.i.d. uniform in [lo, hi), from `seed`.
inline std::vector<Edge> sample_couplings(std::uint64_t seed,
                                          std::span<const std::pair<int, int>> pairs,
                                          double lo = -0.5, double hi = 0.5) {
    if (!(lo < hi)) {
        detail::config_fail("sample_couplings: require lo < hi");
    }
    Rng rng(seed);
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (const auto &[i, j] : pairs) {
        edges.push_back({i, j, uniform(rng, lo, hi)});
    }
    return edges;
}

struct HamiltonianSpec {
    QubitLayout layout;
    Variant variant = Variant::OptNearestNeighbor;
    std::vector<Edge> edges;
    double h = 0.5;
    double tau = 1.0;
    int kappa = 1;

    int n_qubits() const { return layout.n_qubits(); }
};

inline void validate(const HamiltonianSpec &spec) {
    const int n = spec.n_qubits();
    detail::require(n >= 1, "HamiltonianSpec: empty layout");
    detail::require(spec.tau > 0.0 && std::isfinite(spec.tau),
                    "HamiltonianSpec: tau must be > 0");
    detail::require(spec.kappa >= 1, "HamiltonianSpec: kappa must be >= 1");
    detail::require(std::isfinite(spec.h), "HamiltonianSpec: h must be finite");
    const auto pairs = interaction_pairs(spec.variant, n);
    detail::require(pairs.size() == spec.edges.size(),
                    "HamiltonianSpec: edge set does not match variant");
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto &e = spec.edges[k];
        detail::require(e.i == pairs[k].first && e.j == pairs[k].second,
                        "HamiltonianSpec: edge set does not match variant");
        detail::require(std::isfinite(e.J), "HamiltonianSpec: non-finite coupling");
    }
}

/// Builds a spec with couplings sampled from `seed` over the variant's pairs.
inline HamiltonianSpec make_spec(QubitLayout layout, Variant variant, double h,
                                 double tau, int kappa, std::uint64_t seed,
                                 double j_lo = -0.5, double j_hi = 0.5) {
    HamiltonianSpec spec;
    spec.layout = std::move(layout);
    spec.variant = variant;
    spec.h = h;
    spec.tau = tau;
    spec.kappa = kappa;
    const auto pairs = interaction_pairs(variant, spec.n_qubits());
    spec.edges = sample_couplings(seed, pairs, j_lo, j_hi);
    validate(spec);
    return spec;
}

// ---------------------------------------------------------------------------
// Gates and circuits

enum class GateKind : std::uint8_t { RY, RZ, RXX, H, CNOT, RESET };

inline std::string to_string(GateKind k) {
    switch (k) {
    case GateKind::RY:
        return "RY";
    case GateKind::RZ:
        return "RZ";
    case GateKind::RXX:
        return "RXX";
    case GateKind::H:
        return "H";
    case GateKind::CNOT:
        return "CNOT";
    case GateKind::RESET:
        return "RESET";
    }
    return "?";
}

inline GateKind parse_gate_kind(const std::string &s) {
    for (auto k : {GateKind::RY, GateKind::RZ, GateKind::RXX, GateKind::H,
                   GateKind::CNOT, GateKind::RESET}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    detail::config_fail("unknown gate kind: " + s);
}

constexpr bool is_two_qubit(GateKind k) {
    return k == GateKind::RXX || k == GateKind::CNOT;
}

constexpr bool has_angle(GateKind k) {
    return k == GateKind::RY || k == GateKind::RZ || k == GateKind::RXX;
}

struct Gate {
    GateKind kind = GateKind::H;
    int q0 = 0;
    int q1 = -1; // second qubit for two-qubit kinds; CNOT: q0 control, q1 target
    double angle = 0.0;

    int arity() const { return is_two_qubit(kind) ? 2 : 1; }

    static Gate ry(int q, double theta) { return {GateKind::RY, q, -1, theta}; }
    static Gate rz(int q, double theta) { return {GateKind::RZ, q, -1, theta}; }
    static Gate rxx(int a, int b, double theta) { return {GateKind::RXX, a, b, theta}; }
    static Gate hadamard(int q) { return {GateKind::H, q, -1, 0.0}; }
    static Gate cnot(int control, int target) {
        return {GateKind::CNOT, control, target, 0.0};
    }
    static Gate reset(int q) { return {GateKind::RESET, q, -1, 0.0}; }

    friend bool operator==(const Gate &, const Gate &) = default;
};

inline void validate(const Gate &g, int n_qubits) {
    const auto in_range = [n_qubits](int q) { return q >= 0 && q < n_qubits; };
    if (!in_range(g.q0) || (g.arity() == 2 && (!in_range(g.q1) || g.q1 == g.q0))) {
        detail::config_fail("gate " + to_string(g.kind) + ": invalid qubit index");
    }
    if (!std::isfinite(g.angle)) {
        detail::config_fail("gate " + to_string(g.kind) + ": non-finite angle");
    }
}

struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;
    std::vector<std::size_t> block_starts; // gate index where each time step begins

    friend bool operator==(const Circuit &, const Circuit &) = default;
};

/// Angle that rotates |0> onto sqrt(1-u)|0> + sqrt(u)|1> under RY.
inline double encoding_angle(double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        detail::config_fail("encoding_angle: input outside [0,1]");
    }
    return 2.0 * std::asin(std::sqrt(u));
}

inline std::vector<Gate> build_encoding(std::span<const double> u,
                                        const QubitLayout &layout) {
    const auto inj = layout.injection_qubits();
    if (u.size() != inj.size()) {
        detail::config_fail("build_encoding: input dimension " +
                            std::to_string(u.size()) + " != injection qubits " +
                            std::to_string(inj.size()));
    }
    std::vector<Gate> gates;
    gates.reserve(inj.size());
    for (std::size_t k = 0; k < inj.size(); ++k) {
        gates.push_back(Gate::ry(inj[k], encoding_angle(u[k])));
    }
    return gates;
}

/**
 * First-order Trotter product for the transverse-field Ising Hamiltonian,
 * repeated `kappa` times. Each repetition applies the XX entanglers in the
 * variant's schedule, then an RZ column.
 */
inline std::vector<Gate> build_trotter_step(const HamiltonianSpec &spec) {
    validate(spec);
    const int n = spec.n_qubits();
    const double dt = spec.tau / spec.kappa;
    std::vector<Gate> block;
    block.reserve(spec.edges.size() + static_cast<std::size_t>(n));

    auto push_edge = [&](const Edge &e) {
        block.push_back(Gate::rxx(e.i, e.j, 2.0 * e.J * dt));
    };
    if (spec.variant == Variant::OptNearestNeighbor) {
        // Brick layout: even bonds form one layer, odd bonds the next.
        for (int parity = 0; parity < 2; ++parity) {
            for (const auto &e : spec.edges) {
                if (e.i % 2 == parity) {
                    push_edge(e);
                }
            }
        }
    } else {
        for (const auto &e : spec.edges) {
            push_edge(e);
        }
    }
    for (int q = 0; q < n; ++q) {
        block.push_back(Gate::rz(q, 2.0 * spec.h * dt));
    }

    std::vector<Gate> out;
    out.reserve(block.size() * static_cast<std::size_t>(spec.kappa));
    for (int r = 0; r < spec.kappa; ++r) {
        out.insert(out.end(), block.begin(), block.end());
    }
    return out;
}

/// RXX(theta) as H H . CNOT . RZ(theta) on the target . CNOT . H H.
inline std::vector<Gate> decompose_rxx(const Gate &g) {
    if (g.kind != GateKind::RXX) {
        detail::config_fail("decompose_rxx: gate is " + to_string(g.kind));
    }
    const int a = g.q0;
    const int b = g.q1;
    return {Gate::hadamard(a), Gate::hadamard(b), Gate::cnot(a, b),
            Gate::rz(b, g.angle),  Gate::cnot(a, b),  Gate::hadamard(a),
            Gate::hadamard(b)};
}

/**
 * One block per window row: reset injection qubits, encode the row, evolve.
 * `window` is t_w x d with entries in [0,1].
 */
inline Circuit build_window_circuit(const Eigen::Ref<const Eigen::MatrixXd> &window,
                                    const HamiltonianSpec &spec) {
    const auto inj = spec.layout.injection_qubits();
    if (window.cols() != static_cast<Eigen::Index>(inj.size())) {
        detail::config_fail("build_window_circuit: window has " +
                            std::to_string(window.cols()) + " columns, layout expects " +
                            std::to_string(inj.size()));
    }
    const auto evolution = build_trotter_step(spec);
    Circuit c;
    c.n_qubits = spec.n_qubits();
    c.gates.reserve(static_cast<std::size_t>(window.rows()) *
                    (2 * inj.size() + evolution.size()));
    std::vector<double> row(inj.size());
    for (Eigen::Index t = 0; t < window.rows(); ++t) {
        c.block_starts.push_back(c.gates.size());
        for (int q : inj) {
            c.gates.push_back(Gate::reset(q));
        }
        for (std::size_t k = 0; k < inj.size(); ++k) {
            row[k] = window(t, static_cast<Eigen::Index>(k));
        }
        const auto enc = build_encoding(row, spec.layout);
        c.gates.insert(c.gates.end(), enc.begin(), enc.end());
        c.gates.insert(c.gates.end(), evolution.begin(), evolution.end());
    }
    return c;
}

struct DepthCounts {
    int depth = 0;
    std::size_t gates = 0;
};

/**
 * As-soon-as-possible layering: a gate lands one layer after the latest
 * layer used by any of its qubits. RESET occupies one slot like any
 * single-qubit gate. With `decompose`, RXX gates are expanded first.
 */
inline DepthCounts depth_and_counts(const Circuit &c, bool decompose = false) {
    std::vector<int> last(static_cast<std::size_t>(c.n_qubits), 0);
    DepthCounts out;
    auto place = [&](const Gate &g) {
        auto &l0 = last[static_cast<std::size_t>(g.q0)];
        if (g.arity() == 2) {
            auto &l1 = last[static_cast<std::size_t>(g.q1)];
            l0 = l1 = std::max(l0, l1) + 1;
        } else {
            ++l0;
        }
        out.depth = std::max({out.depth, l0});
        ++out.gates;
    };
    for (const auto &g : c.gates) {
        validate(g, c.n_qubits);
        if (decompose && g.kind == GateKind::RXX) {
            for (const auto &sub : decompose_rxx(g)) {
                place(sub);
            }
        } else {
            place(g);
        }
    }
    return out;
}

inline Circuit make_circuit(int n_qubits, std::vector<Gate> gates) {
    Circuit c{n_qubits, std::move(gates), {0}};
    return c;
}

// ---------------------------------------------------------------------------
// Text format: one gate per line "KIND q0 [q1] [angle]"; "# block k" lines.

inline void write_circuit(std::ostream &os, const Circuit &c) {
    os << "# qubits " << c.n_qubits << '\n';
    std::size_t next_block = 0;
    for (std::size_t k = 0; k < c.gates.size(); ++k) {
        while (next_block < c.block_starts.size() && c.block_starts[next_block] == k) {
            os << "# block " << next_block << '\n';
            ++next_block;
        }
        const auto &g = c.gates[k];
        os << to_string(g.kind) << ' ' << g.q0;
        if (g.arity() == 2) {
            os << ' ' << g.q1;
        }
        if (has_angle(g.kind)) {
            os << ' ' << std::setprecision(17) << g.angle;
        }
        os << '\n';
    }
}

inline std::string to_text(const Circuit &c) {
    std::ostringstream os;
    write_circuit(os, c);
    return os.str();
}

inline Circuit read_circuit(std::istream &is) {
    Circuit c;
    std::string line;
    bool have_qubits = false;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        if (line[0] == '#') {
            std::string hash, tag;
            ls >> hash >> tag;
            if (tag == "qubits") {
                ls >> c.n_qubits;
                have_qubits = true;
            } else if (tag == "block") {
                c.block_starts.push_back(c.gates.size());
            }
            continue;
        }
        std::string kind;
        ls >> kind;
        Gate g;
        g.kind = parse_gate_kind(kind);
        ls >> g.q0;
        if (is_two_qubit(g.kind)) {
            ls >> g.q1;
        }
        if (has_angle(g.kind)) {
            ls >> g.angle;
        }
        if (ls.fail()) {
            detail::config_fail("read_circuit: malformed line '" + line + "'");
        }
        c.gates.push_back(g);
    }
    if (!have_qubits) {
        detail::config_fail("read_circuit: missing '# qubits' header");
    }
    for (const auto &g : c.gates) {
        validate(g, c.n_qubits);
    }
    return c;
}

} // namespace qrc
