#pragma once

// Dense complex state registers and the linear algebra the optical models
// are built on.
//
// Subsystem ordering convention: a router register has dims {P, 2, c...}
// where P is the number of spatial paths, 2 is the polarization (H = 0,
// V = 1) and c... are explicit control qubits. The first subsystem is the
// slowest-varying index, so amplitude (path p, pol s) of a {P, 2} register
// lives at index 2 * p + s.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrouter {

using Amplitude = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Amplitude kI{0.0, 1.0};

/// Tolerance for algebraic identities evaluated in double precision.
inline constexpr double kAlgebraTol = 1e-12;
/// Tolerance for normalization of user-supplied states.
inline constexpr double kInputTol = 1e-9;
/// Below this squared weight a path is treated as empty.
inline constexpr double kEmptyWeight = 1e-14;
inline constexpr std::size_t kDefaultCapacity = std::size_t{1} << 20;

inline bool is_finite(Amplitude a) { return std::isfinite(a.real()) && std::isfinite(a.imag()); }

/// Polarization qubit alpha|H> + beta|V>. Always normalized.
class JonesVector {
public:
    JonesVector(Amplitude h, Amplitude v) : h_(h), v_(v) {
        if (!is_finite(h) || !is_finite(v)) {
            throw std::invalid_argument("JonesVector: non-finite amplitude");
        }
        if (std::abs(norm_sq() - 1.0) > kInputTol) {
            throw std::invalid_argument("JonesVector: |alpha|^2 + |beta|^2 must be 1, got " +
                                        std::to_string(norm_sq()));
        }
    }

    /// Scales (h, v) to unit norm. Throws on the zero vector.
    static JonesVector normalized(Amplitude h, Amplitude v) {
        double n = std::sqrt(std::norm(h) + std::norm(v));
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw std::invalid_argument("JonesVector: cannot normalize zero vector");
        }
        return {h / n, v / n};
    }

    static JonesVector horizontal() { return {1.0, 0.0}; }
    static JonesVector vertical() { return {0.0, 1.0}; }
    static JonesVector diagonal() { return {std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2}; }

    Amplitude h() const { return h_; }
    Amplitude v() const { return v_; }
    double norm_sq() const { return std::norm(h_) + std::norm(v_); }

    friend bool operator==(const JonesVector&, const JonesVector&) = default;

private:
    Amplitude h_;
    Amplitude v_;
};

/// Dense amplitude vector over a tensor product of subsystems.
/// Sub-normalized states are allowed (Kraus branches); norm never exceeds 1.
class RegisterState {
public:
    RegisterState(std::vector<std::size_t> dims, std::vector<Amplitude> amps,
                  std::size_t capacity = kDefaultCapacity)
        : dims_(std::move(dims)), amps_(std::move(amps)) {
        if (dims_.empty()) {
            throw std::invalid_argument("RegisterState: no subsystems");
        }
        std::size_t total = 1;
        for (std::size_t d : dims_) {
            if (d == 0) {
                throw std::invalid_argument("RegisterState: zero subsystem dimension");
            }
            if (total > capacity / d) {
                throw std::length_error("RegisterState: dimension exceeds capacity");
            }
            total *= d;
        }
        if (amps_.size() != total) {
            throw std::invalid_argument("RegisterState: expected " + std::to_string(total) +
                                        " amplitudes, got " + std::to_string(amps_.size()));
        }
        if (!std::all_of(amps_.begin(), amps_.end(), is_finite)) {
            throw std::invalid_argument("RegisterState: non-finite amplitude");
        }
        if (norm_sq() > 1.0 + kAlgebraTol) {
            throw std::invalid_argument("RegisterState: squared norm exceeds 1");
        }
    }

    static RegisterState basis(std::vector<std::size_t> dims, std::size_t index) {
        std::size_t total = std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                                            std::multiplies<>());
        if (index >= total) {
            throw std::out_of_range("RegisterState::basis: index out of range");
        }
        std::vector<Amplitude> amps(total);
        amps[index] = 1.0;
        return {std::move(dims), std::move(amps)};
    }

    /// Single polarization qubit, dims {2}.
    static RegisterState polarization(const JonesVector& j) { return {{2}, {j.h(), j.v()}}; }

    /// Photon with polarization j in spatial mode `path` of a {paths, 2} register.
    static RegisterState routed(const JonesVector& j, std::size_t paths, std::size_t path) {
        if (path >= paths) {
            throw std::out_of_range("RegisterState::routed: path index out of range");
        }
        std::vector<Amplitude> amps(2 * paths);
        amps[2 * path] = j.h();
        amps[2 * path + 1] = j.v();
        return {{paths, 2}, std::move(amps)};
    }

    const std::vector<std::size_t>& dims() const { return dims_; }
    std::span<const Amplitude> amps() const { return amps_; }
    std::size_t size() const { return amps_.size(); }
    Amplitude operator[](std::size_t i) const { return amps_[i]; }

    double norm_sq() const {
        double s = 0.0;
        for (Amplitude a : amps_) s += std::norm(a);
        return s;
    }

    /// Copy scaled by a complex factor.
    RegisterState scaled(Amplitude factor) const {
        std::vector<Amplitude> out(amps_);
        for (Amplitude& a : out) a *= factor;
        return {dims_, std::move(out)};
    }

    /// Copy rescaled to unit norm. Throws on a zero state.
    RegisterState normalized() const {
        double n = std::sqrt(norm_sq());
        if (!(n > 0.0)) {
            throw std::domain_error("RegisterState: cannot normalize zero state");
        }
        return scaled(1.0 / n);
    }

    friend bool operator==(const RegisterState&, const RegisterState&) = default;

private:
    std::vector<std::size_t> dims_;
    std::vector<Amplitude> amps_;
};

enum class OperatorKind { kUnitary, kKraus };

/// Dense row-major square matrix acting on one or more subsystems.
class SquareOperator {
public:
    SquareOperator(std::size_t dim, std::vector<Amplitude> entries, OperatorKind kind)
        : dim_(dim), entries_(std::move(entries)), kind_(kind) {
        if (dim_ == 0 || entries_.size() != dim_ * dim_) {
            throw std::invalid_argument("SquareOperator: entries do not form a dim x dim matrix");
        }
        if (!std::all_of(entries_.begin(), entries_.end(), is_finite)) {
            throw std::invalid_argument("SquareOperator: non-finite entry");
        }
        if (kind_ == OperatorKind::kUnitary && unitarity_error() > kAlgebraTol) {
            throw std::invalid_argument("SquareOperator: matrix is not unitary");
        }
    }

    static SquareOperator identity(std::size_t dim) {
        std::vector<Amplitude> e(dim * dim);
        for (std::size_t i = 0; i < dim; ++i) e[i * dim + i] = 1.0;
        return {dim, std::move(e), OperatorKind::kUnitary};
    }

    std::size_t dim() const { return dim_; }
    OperatorKind kind() const { return kind_; }
    Amplitude operator()(std::size_t row, std::size_t col) const { return entries_[row * dim_ + col]; }
    std::span<const Amplitude> entries() const { return entries_; }

    SquareOperator adjoint() const {
        std::vector<Amplitude> e(entries_.size());
        for (std::size_t r = 0; r < dim_; ++r)
            for (std::size_t c = 0; c < dim_; ++c) e[c * dim_ + r] = std::conj((*this)(r, c));
        return {dim_, std::move(e), kind_};
    }

    /// max |(A^dagger A - I)_{rc}|.
    double unitarity_error() const {
        double worst = 0.0;
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t c = 0; c < dim_; ++c) {
                Amplitude s = 0.0;
                for (std::size_t k = 0; k < dim_; ++k) s += std::conj((*this)(k, r)) * (*this)(k, c);
                worst = std::max(worst, std::abs(s - (r == c ? 1.0 : 0.0)));
            }
        }
        return worst;
    }

private:
    std::size_t dim_;
    std::vector<Amplitude> entries_;
    OperatorKind kind_;
};

/// Kronecker product; `a` becomes the slower-varying factor.
inline RegisterState tensor(const RegisterState& a, const RegisterState& b,
                            std::size_t capacity = kDefaultCapacity) {
    if (a.size() > capacity / b.size()) {
        throw std::length_error("tensor: product dimension exceeds capacity");
    }
    std::vector<std::size_t> dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    std::vector<Amplitude> amps;
    amps.reserve(a.size() * b.size());
    for (Amplitude x : a.amps())
        for (Amplitude y : b.amps()) amps.push_back(x * y);
    return {std::move(dims), std::move(amps), capacity};
}

/// Applies `op` to the listed subsystems (first target is the most significant
/// digit of the operator's index) and the identity everywhere else.
inline RegisterState apply(const RegisterState& state, const SquareOperator& op,
                           const std::vector<std::size_t>& targets) {
    const auto& dims = state.dims();
    std::size_t block = 1;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] >= dims.size()) {
            throw std::out_of_range("apply: target subsystem out of range");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (targets[j] == targets[i]) throw std::invalid_argument("apply: duplicate target index");
        }
        block *= dims[targets[i]];
    }
    if (targets.empty() || block != op.dim()) {
        throw std::invalid_argument("apply: operator dimension " + std::to_string(op.dim()) +
                                    " does not match targets (" + std::to_string(block) + ")");
    }

    std::vector<std::size_t> stride(dims.size());
    stride.back() = 1;
    for (std::size_t i = dims.size() - 1; i > 0; --i) stride[i - 1] = stride[i] * dims[i];

    // Offset of each local operator index relative to a base index whose target digits are zero.
    std::vector<std::size_t> offset(block, 0);
    for (std::size_t local = 0; local < block; ++local) {
        std::size_t rest = local;
        for (std::size_t k = targets.size(); k-- > 0;) {
            std::size_t d = dims[targets[k]];
            offset[local] += (rest % d) * stride[targets[k]];
            rest /= d;
        }
    }

    std::vector<Amplitude> out(state.size());
    std::vector<Amplitude> gathered(block);
    for (std::size_t base = 0; base < state.size(); ++base) {
        bool is_base = std::all_of(targets.begin(), targets.end(), [&](std::size_t t) {
            return (base / stride[t]) % dims[t] == 0;
        });
        if (!is_base) continue;
        for (std::size_t c = 0; c < block; ++c) gathered[c] = state[base + offset[c]];
        for (std::size_t r = 0; r < block; ++r) {
            Amplitude acc = 0.0;
            for (std::size_t c = 0; c < block; ++c) acc += op(r, c) * gathered[c];
            out[base + offset[r]] = acc;
        }
    }
    return {dims, std::move(out)};
}

inline Amplitude inner_product(const RegisterState& a, const RegisterState& b) {
    if (a.dims() != b.dims()) {
        throw std::invalid_argument("inner_product: dimension mismatch");
    }
    Amplitude s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

/// |<a|b>|^2 for normalized pure states.
inline double fidelity(const RegisterState& a, const RegisterState& b) {
    if (a.dims() != b.dims()) {
        throw std::invalid_argument("fidelity: dimension mismatch");
    }
    if (std::abs(a.norm_sq() - 1.0) > kInputTol || std::abs(b.norm_sq() - 1.0) > kInputTol) {
        throw std::invalid_argument("fidelity: states must be normalized");
    }
    return std::clamp(std::norm(inner_product(a, b)), 0.0, 1.0);
}

inline double fidelity(const JonesVector& a, const JonesVector& b) {
    return fidelity(RegisterState::polarization(a), RegisterState::polarization(b));
}

struct PathProjection {
    double probability = 0.0;
    std::optional<JonesVector> conditional;  ///< absent when the path is empty
};

/// Weight of one path of a {P, 2} register and the polarization state found there.
inline PathProjection project_path(const RegisterState& state, std::size_t path) {
    if (state.dims().size() != 2 || state.dims()[1] != 2) {
        throw std::invalid_argument("project_path: state must be over (path x polarization)");
    }
    if (path >= state.dims()[0]) {
        throw std::out_of_range("project_path: path index out of range");
    }
    Amplitude h = state[2 * path];
    Amplitude v = state[2 * path + 1];
    PathProjection out;
    out.probability = std::norm(h) + std::norm(v);
    if (out.probability >= kEmptyWeight) {
        out.conditional = JonesVector::normalized(h, v);
    }
    return out;
}

/// Index used to fix global phase: the first amplitude whose magnitude is
/// within a relative 1e-6 of the largest one.
inline std::size_t phase_reference_index(std::span<const Amplitude> amps) {
    double largest = 0.0;
    for (Amplitude a : amps) largest = std::max(largest, std::abs(a));
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (std::abs(amps[i]) >= largest * (1.0 - 1e-6)) return i;
    }
    return 0;
}

/// Copy of `amps` rotated so that amps[ref] is real and non-negative.
inline std::vector<Amplitude> fix_phase(std::span<const Amplitude> amps, std::size_t ref) {
    std::vector<Amplitude> out(amps.begin(), amps.end());
    if (ref < out.size() && std::abs(out[ref]) > 0.0) {
        Amplitude rot = std::conj(out[ref]) / std::abs(out[ref]);
        for (Amplitude& a : out) a *= rot;
    }
    return out;
}

/// Largest entrywise |a - b| after rotating both vectors so that the
/// largest-magnitude amplitude of `a` is real-positive in each.
inline double max_discrepancy_up_to_phase(std::span<const Amplitude> a, std::span<const Amplitude> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("max_discrepancy_up_to_phase: length mismatch");
    }
    std::size_t ref = phase_reference_index(a);
    auto fa = fix_phase(a, ref);
    auto fb = fix_phase(b, ref);
    double worst = 0.0;
    for (std::size_t i = 0; i < fa.size(); ++i) worst = std::max(worst, std::abs(fa[i] - fb[i]));
    return worst;
}

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double x) {
    double r = std::remainder(x, 2.0 * kPi);
    return r <= -kPi ? r + 2.0 * kPi : r;
}

}  // namespace qrouter
