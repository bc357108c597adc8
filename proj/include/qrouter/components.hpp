#pragma once

// Jones-calculus models of the passive elements: half-wave plates, polarizing
// beam splitters and phase shifters. All act on {P, 2} registers.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrouter/qstate.hpp"

namespace qrouter {

/// Rotation of a wave plate's optical axis from horizontal, kept in [0, pi).
class WavePlateAngle {
public:
    explicit WavePlateAngle(double theta) {
        if (!std::isfinite(theta)) {
            throw std::invalid_argument("WavePlateAngle: non-finite angle");
        }
        theta_ = std::fmod(theta, kPi);
        if (theta_ < 0.0) theta_ += kPi;
        if (theta_ >= kPi) theta_ = 0.0;
    }

    static WavePlateAngle degrees(double deg) { return WavePlateAngle(deg / 180.0 * kPi); }

    double radians() const { return theta_; }

    friend bool operator==(const WavePlateAngle&, const WavePlateAngle&) = default;

private:
    double theta_ = 0.0;
};

/// [[cos 2t, sin 2t], [sin 2t, -cos 2t]] in the (H, V) basis. The physical
/// overall -i of a half-wave retarder is dropped.
inline SquareOperator hwp_matrix(WavePlateAngle angle) {
    double c = std::cos(2.0 * angle.radians());
    double s = std::sin(2.0 * angle.radians());
    // Snap the textbook angles so 0, 22.5 and 45 degrees give exact entries.
    auto snap = [](double x) {
        for (double ref : {0.0, 1.0, -1.0, std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2}) {
            if (std::abs(x - ref) < 1e-15) return ref;
        }
        return x;
    };
    c = snap(c);
    s = snap(s);
    return {2, {c, s, s, -c}, OperatorKind::kUnitary};
}

/// Phase picked up by the vertically polarized component on reflection.
///
/// kReal: reflection from the `in_a` side is +1, from the `in_b` side -1
///   (the real orthogonal beam-splitter convention). The V component
///   recombined into output 1 therefore carries a minus sign.
/// kImaginary: every reflection picks up a factor i.
enum class ReflectionPhase { kReal, kImaginary };

/// Explicit path relabeling across a PBS. H is transmitted
/// (in_a -> out_a, in_b -> out_b); V is reflected (in_a -> out_b, in_b -> out_a).
struct PbsWiring {
    std::size_t in_a;
    std::size_t in_b;
    std::size_t out_a;
    std::size_t out_b;

    PbsWiring(std::size_t ia, std::size_t ib, std::size_t oa, std::size_t ob)
        : in_a(ia), in_b(ib), out_a(oa), out_b(ob) {
        if (in_a == in_b || out_a == out_b) {
            throw std::invalid_argument("PbsWiring: ports of a PBS must be distinct paths");
        }
        bool same_pair = (in_a == out_a && in_b == out_b) || (in_a == out_b && in_b == out_a);
        if (!same_pair) {
            throw std::invalid_argument("PbsWiring: outputs must be the same path pair as inputs");
        }
    }

    /// The same splitter traversed backwards. Under ReflectionPhase::kReal the
    /// mirrored element is the exact inverse of this one.
    PbsWiring mirrored() const { return {out_b, out_a, in_b, in_a}; }

    friend bool operator==(const PbsWiring&, const PbsWiring&) = default;
};

inline RegisterState pbs_apply(const RegisterState& state, const PbsWiring& w,
                               ReflectionPhase phase = ReflectionPhase::kReal) {
    if (state.dims().size() != 2 || state.dims()[1] != 2) {
        throw std::invalid_argument("pbs_apply: state must be over (path x polarization)");
    }
    std::size_t paths = state.dims()[0];
    for (std::size_t p : {w.in_a, w.in_b, w.out_a, w.out_b}) {
        if (p >= paths) throw std::out_of_range("pbs_apply: wired path index out of range");
    }
    Amplitude refl_a = phase == ReflectionPhase::kReal ? Amplitude{1.0} : kI;
    Amplitude refl_b = phase == ReflectionPhase::kReal ? Amplitude{-1.0} : kI;

    std::vector<Amplitude> out(state.amps().begin(), state.amps().end());
    auto idx = [](std::size_t path, std::size_t pol) { return 2 * path + pol; };
    for (std::size_t p : {w.out_a, w.out_b}) {
        out[idx(p, 0)] = 0.0;
        out[idx(p, 1)] = 0.0;
    }
    out[idx(w.out_a, 0)] += state[idx(w.in_a, 0)];
    out[idx(w.out_b, 1)] += refl_a * state[idx(w.in_a, 1)];
    out[idx(w.out_b, 0)] += state[idx(w.in_b, 0)];
    out[idx(w.out_a, 1)] += refl_b * state[idx(w.in_b, 1)];
    return {state.dims(), std::move(out)};
}

/// 1x1 unitary e^{i phi}; applied with apply_on_path it multiplies every
/// amplitude of one path.
inline SquareOperator phase_shifter(double phi) {
    return {1, {std::polar(1.0, phi)}, OperatorKind::kUnitary};
}

/// Applies a path-local operator: dim 1 scales the whole path, dim 2 acts on
/// the polarization of that path only.
inline RegisterState apply_on_path(const RegisterState& state, std::size_t path, const SquareOperator& local) {
    if (state.dims().size() != 2 || state.dims()[1] != 2) {
        throw std::invalid_argument("apply_on_path: state must be over (path x polarization)");
    }
    if (path >= state.dims()[0]) {
        throw std::out_of_range("apply_on_path: path index out of range");
    }
    std::vector<Amplitude> out(state.amps().begin(), state.amps().end());
    Amplitude h = state[2 * path];
    Amplitude v = state[2 * path + 1];
    if (local.dim() == 1) {
        out[2 * path] = local(0, 0) * h;
        out[2 * path + 1] = local(0, 0) * v;
    } else if (local.dim() == 2) {
        out[2 * path] = local(0, 0) * h + local(0, 1) * v;
        out[2 * path + 1] = local(1, 0) * h + local(1, 1) * v;
    } else {
        throw std::invalid_argument("apply_on_path: operator must be 1x1 or 2x2");
    }
    return {state.dims(), std::move(out)};
}

}  // namespace qrouter
