#pragma once

/**
 * @file
 * Simulation backends for reservoir circuits.
 *
 *  - DensityMatrix: exact mixed-state evolution, including the reset channel
 *    and optional depolarizing / reset-error noise.
 *  - PureState trajectories: stochastic unravelling in which RESET becomes a
 *    Born-rule Z measurement followed by preparation of |0>.
 *  - Shot sampling of computational-basis bitstrings from a density matrix.
 *
 * Basis-state index convention: qubit j is bit j of the index.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "qrc/circuit.hpp"
#include "qrc/error.hpp"
#include "qrc/random.hpp"

namespace qrc {

using Complex = std::complex<double>;
using Mat2 = std::array<Complex, 4>;  // row-major 2x2
using Mat4 = std::array<Complex, 16>; // row-major 4x4, local index 2*b(q0) + b(q1)

inline constexpr int kDensityMaxQubits = 12;
inline constexpr int kStateMaxQubits = 24;

namespace gates {

inline Mat2 ry(double t) {
    const double c = std::cos(t / 2), s = std::sin(t / 2);
    return {c, -s, s, c};
}

inline Mat2 rz(double t) {
    return {std::polar(1.0, -t / 2), 0.0, 0.0, std::polar(1.0, t / 2)};
}

inline Mat2 hadamard() {
    const double r = 1.0 / std::numbers::sqrt2;
    return {r, r, r, -r};
}

inline Mat4 rxx(double t) {
    const Complex c = std::cos(t / 2);
    const Complex s = Complex(0.0, -std::sin(t / 2));
    return {c, 0, 0, s, //
            0, c, s, 0, //
            0, s, c, 0, //
            s, 0, 0, c};
}

inline Mat4 cnot() {
    return {1, 0, 0, 0, //
            0, 1, 0, 0, //
            0, 0, 0, 1, //
            0, 0, 1, 0};
}

inline Mat2 conj(const Mat2 &m) {
    Mat2 out;
    std::transform(m.begin(), m.end(), out.begin(), [](Complex z) { return std::conj(z); });
    return out;
}

inline Mat4 conj(const Mat4 &m) {
    Mat4 out;
    std::transform(m.begin(), m.end(), out.begin(), [](Complex z) { return std::conj(z); });
    return out;
}

} // namespace gates

namespace detail {

/// Applies a 2x2 matrix to bit `bit` of a vector of amplitudes.
inline void apply_1q(std::span<Complex> v, int bit, const Mat2 &m) {
    const std::size_t stride = std::size_t{1} << bit;
    const bool diagonal = m[1] == Complex{} && m[2] == Complex{};
    for (std::size_t base = 0; base < v.size(); base += 2 * stride) {
        for (std::size_t k = base; k < base + stride; ++k) {
            const Complex a0 = v[k];
            const Complex a1 = v[k + stride];
            if (diagonal) {
                v[k] = m[0] * a0;
                v[k + stride] = m[3] * a1;
            } else {
                v[k] = m[0] * a0 + m[1] * a1;
                v[k + stride] = m[2] * a0 + m[3] * a1;
            }
        }
    }
}

/// Applies a 4x4 matrix to bits (hi, lo); local index is 2*b(hi) + b(lo).
inline void apply_2q(std::span<Complex> v, int hi, int lo, const Mat4 &m) {
    const std::size_t mh = std::size_t{1} << hi;
    const std::size_t ml = std::size_t{1} << lo;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if ((i & mh) || (i & ml)) {
            continue;
        }
        const std::array<std::size_t, 4> idx{i, i | ml, i | mh, i | mh | ml};
        std::array<Complex, 4> a{v[idx[0]], v[idx[1]], v[idx[2]], v[idx[3]]};
        for (int r = 0; r < 4; ++r) {
            v[idx[r]] = m[4 * r] * a[0] + m[4 * r + 1] * a[1] + m[4 * r + 2] * a[2] +
                        m[4 * r + 3] * a[3];
        }
    }
}

inline double pairwise_sum(std::span<const double> x) {
    if (x.size() <= 8) {
        return std::accumulate(x.begin(), x.end(), 0.0);
    }
    const auto half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

inline void check_qubit(int q, int n) {
    if (q < 0 || q >= n) {
        config_fail("qubit index " + std::to_string(q) + " out of range for " +
                    std::to_string(n) + " qubits");
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Density matrix

/// Row-major 2^N x 2^N density matrix; entry (r, c) lives at r * 2^N + c.
class DensityMatrix {
  public:
    explicit DensityMatrix(int n_qubits) : n_(n_qubits) {
        if (n_qubits < 1 || n_qubits > kDensityMaxQubits) {
            detail::config_fail("DensityMatrix: supports 1.." +
                                std::to_string(kDensityMaxQubits) + " qubits, got " +
                                std::to_string(n_qubits));
        }
        data_.assign(dim() * dim(), Complex{});
    }

    /// (|+><+|)^{\otimes N}: every entry equals 2^-N.
    static DensityMatrix plus_state(int n_qubits) {
        DensityMatrix rho(n_qubits);
        std::fill(rho.data_.begin(), rho.data_.end(),
                  Complex(1.0 / static_cast<double>(rho.dim()), 0.0));
        return rho;
    }

    static DensityMatrix basis_state(int n_qubits, std::size_t index) {
        DensityMatrix rho(n_qubits);
        rho(index, index) = 1.0;
        return rho;
    }

    static DensityMatrix from_dense(const Eigen::MatrixXcd &m) {
        const auto d = static_cast<std::size_t>(m.rows());
        int n = 0;
        while ((std::size_t{1} << n) < d) {
            ++n;
        }
        if ((std::size_t{1} << n) != d || m.cols() != m.rows()) {
            detail::config_fail("DensityMatrix::from_dense: not a 2^N square matrix");
        }
        DensityMatrix rho(n);
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                rho(r, c) = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            }
        }
        return rho;
    }

    int n_qubits() const { return n_; }
    std::size_t dim() const { return std::size_t{1} << n_; }

    Complex &operator()(std::size_t r, std::size_t c) { return data_[r * dim() + c]; }
    const Complex &operator()(std::size_t r, std::size_t c) const {
        return data_[r * dim() + c];
    }

    std::span<Complex> data() { return data_; }
    std::span<const Complex> data() const { return data_; }

    Eigen::MatrixXcd dense() const {
        const auto d = static_cast<Eigen::Index>(dim());
        Eigen::MatrixXcd m(d, d);
        for (Eigen::Index r = 0; r < d; ++r) {
            for (Eigen::Index c = 0; c < d; ++c) {
                m(r, c) = (*this)(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            }
        }
        return m;
    }

    Complex trace() const {
        Complex t{};
        for (std::size_t i = 0; i < dim(); ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

    /// Tr(rho^2) = sum |rho_rc|^2 for Hermitian rho.
    double purity() const {
        double s = 0.0;
        for (const auto &z : data_) {
            s += std::norm(z);
        }
        return s;
    }

    double hermiticity_error() const {
        double e = 0.0;
        for (std::size_t r = 0; r < dim(); ++r) {
            for (std::size_t c = r; c < dim(); ++c) {
                e = std::max(e, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
            }
        }
        return e;
    }

  private:
    int n_;
    std::vector<Complex> data_;
};

inline DensityMatrix init_plus(int n_qubits) { return DensityMatrix::plus_state(n_qubits); }

/// rho <- U rho U^dagger for a unitary gate kind.
/// Row bits sit above the column bits in the flattened index, so U acts on
/// bit q + N and conj(U) on bit q.
inline void apply_gate(DensityMatrix &rho, const Gate &g) {
    const int n = rho.n_qubits();
    validate(g, n);
    auto v = rho.data();
    auto one = [&](const Mat2 &m) {
        detail::apply_1q(v, g.q0 + n, m);
        detail::apply_1q(v, g.q0, gates::conj(m));
    };
    auto two = [&](const Mat4 &m) {
        detail::apply_2q(v, g.q0 + n, g.q1 + n, m);
        detail::apply_2q(v, g.q0, g.q1, gates::conj(m));
    };
    switch (g.kind) {
    case GateKind::RY:
        one(gates::ry(g.angle));
        break;
    case GateKind::RZ:
        one(gates::rz(g.angle));
        break;
    case GateKind::H:
        one(gates::hadamard());
        break;
    case GateKind::RXX:
        two(gates::rxx(g.angle));
        break;
    case GateKind::CNOT:
        two(gates::cnot());
        break;
    case GateKind::RESET:
        detail::config_fail("apply_gate: RESET is not unitary; use reset_qubits");
    }
}

namespace detail {

/**
 * Visits every 2^k x 2^k block of rho spanned by the local bits in `mask`
 * (k = popcount(mask) <= 2). `fn` receives the block as a row-major array
 * indexed by local patterns and may rewrite it.
 */
template <class Fn> void for_each_local_block(DensityMatrix &rho, std::size_t mask, Fn fn) {
    std::vector<std::size_t> offsets; // all sub-patterns of mask in increasing local order
    for (std::size_t sub = 0;; sub = (sub - mask) & mask) {
        offsets.push_back(sub);
        if (((sub - mask) & mask) == 0) {
            break;
        }
    }
    std::sort(offsets.begin(), offsets.end());
    const std::size_t k = offsets.size();
    std::array<Complex, 16> block{};
    const std::size_t d = rho.dim();
    for (std::size_t r0 = 0; r0 < d; ++r0) {
        if (r0 & mask) {
            continue;
        }
        for (std::size_t c0 = 0; c0 < d; ++c0) {
            if (c0 & mask) {
                continue;
            }
            for (std::size_t a = 0; a < k; ++a) {
                for (std::size_t b = 0; b < k; ++b) {
                    block[a * k + b] = rho(r0 | offsets[a], c0 | offsets[b]);
                }
            }
            fn(std::span<Complex>(block.data(), k * k), k);
            for (std::size_t a = 0; a < k; ++a) {
                for (std::size_t b = 0; b < k; ++b) {
                    rho(r0 | offsets[a], c0 | offsets[b]) = block[a * k + b];
                }
            }
        }
    }
}

inline Complex block_trace(std::span<const Complex> block, std::size_t k) {
    Complex t{};
    for (std::size_t a = 0; a < k; ++a) {
        t += block[a * k + a];
    }
    return t;
}

} // namespace detail

/// Reset channel on one qubit, ending in |1> with probability `p_error`.
inline void reset_qubit(DensityMatrix &rho, int q, double p_error = 0.0) {
    detail::check_qubit(q, rho.n_qubits());
    detail::for_each_local_block(rho, std::size_t{1} << q,
                                 [p_error](std::span<Complex> b, std::size_t) {
                                     const Complex t = b[0] + b[3];
                                     b[0] = (1.0 - p_error) * t;
                                     b[1] = b[2] = 0.0;
                                     b[3] = p_error * t;
                                 });
}

/// rho <- |0><0|_q (x) Tr_q(rho) for each q, i.e. Kraus {|0><0|, |0><1|}.
inline void reset_qubits(DensityMatrix &rho, std::span<const int> qubits) {
    for (int q : qubits) {
        reset_qubit(rho, q);
    }
}

/// rho <- (1-p) rho + p (I/2^k (x) Tr_S rho) over the k <= 2 qubits in S.
inline void apply_depolarizing(DensityMatrix &rho, std::span<const int> qubits, double p) {
    if (!(p >= 0.0 && p < 1.0)) {
        detail::config_fail("apply_depolarizing: p must be in [0,1)");
    }
    if (qubits.empty() || qubits.size() > 2) {
        detail::config_fail("apply_depolarizing: expects one or two qubits");
    }
    if (p == 0.0) {
        return;
    }
    std::size_t mask = 0;
    for (int q : qubits) {
        detail::check_qubit(q, rho.n_qubits());
        mask |= std::size_t{1} << q;
    }
    if (qubits.size() == 2 && qubits[0] == qubits[1]) {
        detail::config_fail("apply_depolarizing: repeated qubit");
    }
    detail::for_each_local_block(rho, mask, [p](std::span<Complex> b, std::size_t k) {
        const Complex mixed = detail::block_trace(b, k) / static_cast<double>(k);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t c = 0; c < k; ++c) {
                b[a * k + c] *= (1.0 - p);
            }
            b[a * k + a] += p * mixed;
        }
    });
}

inline double expect_z(const DensityMatrix &rho, int j) {
    detail::check_qubit(j, rho.n_qubits());
    const std::size_t mask = std::size_t{1} << j;
    double s = 0.0;
    for (std::size_t i = 0; i < rho.dim(); ++i) {
        const double p = rho(i, i).real();
        s += (i & mask) ? -p : p;
    }
    return s;
}

inline Eigen::VectorXd expect_z_all(const DensityMatrix &rho) {
    Eigen::VectorXd z(rho.n_qubits());
    for (int j = 0; j < rho.n_qubits(); ++j) {
        z[j] = expect_z(rho, j);
    }
    return z;
}

struct NoiseModel {
    double p1 = 0.0;      // depolarizing after single-qubit gates
    double p2 = 0.0;      // depolarizing after two-qubit gates
    double p_reset = 0.0; // reset leaves the qubit in |1>

    bool enabled() const { return p1 > 0.0 || p2 > 0.0 || p_reset > 0.0; }

    void validate() const {
        for (double p : {p1, p2, p_reset}) {
            if (!(p >= 0.0 && p < 1.0)) {
                detail::config_fail("NoiseModel: probabilities must be in [0,1)");
            }
        }
    }
};

/// Evolves (|+><+|)^N through the circuit, applying noise after each gate.
inline DensityMatrix run_circuit_dm(const Circuit &c, const NoiseModel &noise = {}) {
    noise.validate();
    DensityMatrix rho = init_plus(c.n_qubits);
    for (const auto &g : c.gates) {
        if (g.kind == GateKind::RESET) {
            reset_qubit(rho, g.q0, noise.p_reset);
            continue;
        }
        apply_gate(rho, g);
        if (g.arity() == 2) {
            if (noise.p2 > 0.0) {
                const std::array<int, 2> qs{g.q0, g.q1};
                apply_depolarizing(rho, qs, noise.p2);
            }
        } else if (noise.p1 > 0.0) {
            const std::array<int, 1> qs{g.q0};
            apply_depolarizing(rho, qs, noise.p1);
        }
    }
    return rho;
}

// ---------------------------------------------------------------------------
// Pure-state trajectories

class PureState {
  public:
    explicit PureState(int n_qubits) : n_(n_qubits) {
        if (n_qubits < 1 || n_qubits > kStateMaxQubits) {
            detail::config_fail("PureState: supports 1.." + std::to_string(kStateMaxQubits) +
                                " qubits, got " + std::to_string(n_qubits));
        }
        amp_.assign(std::size_t{1} << n_qubits, Complex{});
        amp_[0] = 1.0;
    }

    static PureState plus_state(int n_qubits) {
        PureState s(n_qubits);
        const double a = 1.0 / std::sqrt(static_cast<double>(s.amp_.size()));
        std::fill(s.amp_.begin(), s.amp_.end(), Complex(a, 0.0));
        return s;
    }

    int n_qubits() const { return n_; }
    std::size_t dim() const { return amp_.size(); }
    std::span<Complex> amplitudes() { return amp_; }
    std::span<const Complex> amplitudes() const { return amp_; }

    double norm2() const {
        double s = 0.0;
        for (const auto &a : amp_) {
            s += std::norm(a);
        }
        return s;
    }

    double prob_one(int q) const {
        const std::size_t mask = std::size_t{1} << q;
        double p = 0.0;
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            if (i & mask) {
                p += std::norm(amp_[i]);
            }
        }
        return p;
    }

    double expect_z(int q) const {
        detail::check_qubit(q, n_);
        return 1.0 - 2.0 * prob_one(q);
    }

    /// Projects qubit q onto `outcome`, renormalizes, then maps it to `target`.
    void collapse(int q, int outcome, int target) {
        const std::size_t mask = std::size_t{1} << q;
        double keep = 0.0;
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            if (((i & mask) != 0) != (outcome == 1)) {
                amp_[i] = 0.0;
            } else {
                keep += std::norm(amp_[i]);
            }
        }
        if (!(keep > 0.0)) {
            detail::numeric_fail("PureState::collapse: zero-probability outcome");
        }
        const double scale = 1.0 / std::sqrt(keep);
        for (auto &a : amp_) {
            a *= scale;
        }
        if (outcome != target) {
            for (std::size_t i = 0; i < amp_.size(); ++i) {
                if (!(i & mask)) {
                    std::swap(amp_[i], amp_[i | mask]);
                }
            }
        }
    }

  private:
    int n_;
    std::vector<Complex> amp_;
};

inline void apply_gate(PureState &psi, const Gate &g) {
    validate(g, psi.n_qubits());
    auto v = psi.amplitudes();
    switch (g.kind) {
    case GateKind::RY:
        detail::apply_1q(v, g.q0, gates::ry(g.angle));
        break;
    case GateKind::RZ:
        detail::apply_1q(v, g.q0, gates::rz(g.angle));
        break;
    case GateKind::H:
        detail::apply_1q(v, g.q0, gates::hadamard());
        break;
    case GateKind::RXX:
        detail::apply_2q(v, g.q0, g.q1, gates::rxx(g.angle));
        break;
    case GateKind::CNOT:
        detail::apply_2q(v, g.q0, g.q1, gates::cnot());
        break;
    case GateKind::RESET:
        detail::config_fail("apply_gate: RESET is not unitary");
    }
}

namespace detail {

/// Applies a Pauli (0=I, 1=X, 2=Y, 3=Z) to qubit q.
inline void apply_pauli(PureState &psi, int q, int which) {
    static const Mat2 paulis[4] = {{1, 0, 0, 1},
                                   {0, 1, 1, 0},
                                   {0, Complex(0, -1), Complex(0, 1), 0},
                                   {1, 0, 0, -1}};
    if (which != 0) {
        apply_1q(psi.amplitudes(), q, paulis[which]);
    }
}

/// Unravelled depolarizing: with probability p apply a uniform random Pauli
/// string on the given qubits (identity included).
inline void depolarize_trajectory(PureState &psi, std::span<const int> qubits, double p,
                                  Rng &rng) {
    if (p <= 0.0 || uniform01(rng) >= p) {
        return;
    }
    for (int q : qubits) {
        apply_pauli(psi, q, static_cast<int>(rng() >> 62));
    }
}

} // namespace detail

/// Evolves one trajectory from |+>^N; randomness only enters at RESET and noise.
inline PureState run_trajectory(const Circuit &c, Rng &rng, const NoiseModel &noise = {}) {
    PureState psi = PureState::plus_state(c.n_qubits);
    for (const auto &g : c.gates) {
        if (g.kind == GateKind::RESET) {
            detail::check_qubit(g.q0, c.n_qubits);
            const double p1 = std::clamp(psi.prob_one(g.q0), 0.0, 1.0);
            const int outcome = uniform01(rng) < p1 ? 1 : 0;
            int target = 0;
            if (noise.p_reset > 0.0 && uniform01(rng) < noise.p_reset) {
                target = 1;
            }
            psi.collapse(g.q0, outcome, target);
            continue;
        }
        apply_gate(psi, g);
        if (g.arity() == 2) {
            const std::array<int, 2> qs{g.q0, g.q1};
            detail::depolarize_trajectory(psi, qs, noise.p2, rng);
        } else {
            const std::array<int, 1> qs{g.q0};
            detail::depolarize_trajectory(psi, qs, noise.p1, rng);
        }
    }
    return psi;
}

struct TrajectoryEstimate {
    Eigen::VectorXd z_means;
    Eigen::VectorXd std_errors;
    std::size_t n_traj = 0;
};

/**
 * Averages <Z_j> over `n_traj` trajectories. Trajectory t draws from its own
 * stream derive_seed(seed, t), and means use pairwise summation, so the
 * result does not depend on evaluation order.
 */
inline TrajectoryEstimate run_circuit_trajectory(const Circuit &c, std::uint64_t seed,
                                                 std::size_t n_traj,
                                                 const NoiseModel &noise = {}) {
    if (n_traj < 1) {
        detail::config_fail("run_circuit_trajectory: n_traj must be >= 1");
    }
    noise.validate();
    const auto n = static_cast<std::size_t>(c.n_qubits);
    const bool stochastic =
        noise.enabled() || std::any_of(c.gates.begin(), c.gates.end(), [](const Gate &g) {
            return g.kind == GateKind::RESET;
        });

    // samples[j * n_traj + t] = <Z_j> on trajectory t
    std::vector<double> samples(n * n_traj);
    const std::size_t runs = stochastic ? n_traj : 1;
    for (std::size_t t = 0; t < runs; ++t) {
        Rng rng(derive_seed(seed, t));
        const PureState psi = run_trajectory(c, rng, noise);
        for (std::size_t j = 0; j < n; ++j) {
            samples[j * n_traj + t] = psi.expect_z(static_cast<int>(j));
        }
    }
    if (!stochastic) {
        for (std::size_t j = 0; j < n; ++j) {
            std::fill_n(samples.begin() + static_cast<std::ptrdiff_t>(j * n_traj + 1),
                        n_traj - 1, samples[j * n_traj]);
        }
    }

    TrajectoryEstimate est;
    est.n_traj = n_traj;
    est.z_means.resize(static_cast<Eigen::Index>(n));
    est.std_errors.resize(static_cast<Eigen::Index>(n));
    std::vector<double> dev(n_traj);
    for (std::size_t j = 0; j < n; ++j) {
        std::span<const double> col(samples.data() + j * n_traj, n_traj);
        const double mean = detail::pairwise_sum(col) / static_cast<double>(n_traj);
        for (std::size_t t = 0; t < n_traj; ++t) {
            dev[t] = (col[t] - mean) * (col[t] - mean);
        }
        double se = 0.0;
        if (n_traj > 1) {
            const double var = detail::pairwise_sum(dev) / static_cast<double>(n_traj - 1);
            se = std::sqrt(var / static_cast<double>(n_traj));
        }
        if (!stochastic) {
            se = 0.0;
        }
        est.z_means[static_cast<Eigen::Index>(j)] = mean;
        est.std_errors[static_cast<Eigen::Index>(j)] = se;
    }
    return est;
}

// ---------------------------------------------------------------------------
// Shots

struct ShotEstimate {
    std::size_t shots = 0;
    Eigen::VectorXd z_means;
    std::map<std::uint64_t, std::size_t> counts; // basis index -> occurrences
};

/// Samples computational-basis outcomes from the diagonal of rho.
inline ShotEstimate sample_shots(const DensityMatrix &rho, std::size_t shots,
                                 std::uint64_t seed) {
    if (shots < 1) {
        detail::config_fail("sample_shots: shots must be >= 1");
    }
    std::vector<double> cdf(rho.dim());
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.dim(); ++i) {
        acc += std::max(0.0, rho(i, i).real());
        cdf[i] = acc;
    }
    if (!(acc > 0.0)) {
        detail::numeric_fail("sample_shots: density matrix has no positive diagonal");
    }
    Rng rng(seed);
    ShotEstimate est;
    est.shots = shots;
    for (std::size_t s = 0; s < shots; ++s) {
        const double u = uniform01(rng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) {
            --it;
        }
        ++est.counts[static_cast<std::uint64_t>(it - cdf.begin())];
    }
    const int n = rho.n_qubits();
    est.z_means = Eigen::VectorXd::Zero(n);
    for (const auto &[index, count] : est.counts) {
        for (int j = 0; j < n; ++j) {
            est.z_means[j] += ((index >> j) & 1U ? -1.0 : 1.0) * static_cast<double>(count);
        }
    }
    est.z_means /= static_cast<double>(shots);
    return est;
}

} // namespace qrc
