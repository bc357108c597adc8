#pragma once

// The programmable phase gate (PPG) as a heralded probabilistic channel.
//
// Two models are provided:
//  * Kraus: used inside router circuits. On success the gate's arm receives
//    diag(1, e^{i phi}) and the *whole* register is scaled by 1/sqrt(2); on
//    failure the same with e^{-i phi}. The heralding probability is therefore
//    1/2 regardless of where the photon is, which keeps path superpositions
//    coherent. Behavior when the arm holds vacuum is an idealization.
//  * Explicit: a standalone two-qubit construction (signal + program qubit)
//    used to validate the Kraus model. Only defined when the signal photon is
//    certainly present at the gate.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qrouter/components.hpp"
#include "qrouter/qstate.hpp"

namespace qrouter {

/// Phase encoded in a program (control) qubit, kept in [0, 2 pi).
class ProgramPhase {
public:
    explicit ProgramPhase(double phi = 0.0) {
        if (!std::isfinite(phi)) {
            throw std::invalid_argument("ProgramPhase: non-finite phase");
        }
        phi_ = std::fmod(phi, 2.0 * kPi);
        if (phi_ < 0.0) phi_ += 2.0 * kPi;
        if (phi_ >= 2.0 * kPi) phi_ = 0.0;
    }

    double radians() const { return phi_; }

    friend bool operator==(const ProgramPhase&, const ProgramPhase&) = default;

private:
    double phi_ = 0.0;
};

/// (|H> + e^{i phi}|V>) / sqrt(2).
inline JonesVector program_state(ProgramPhase phase) {
    constexpr double r = std::numbers::sqrt2 / 2;
    return {r, r * std::polar(1.0, phase.radians())};
}

enum class PpgModel { kKraus, kExplicit };

struct PpgPlacement {
    std::size_t arm = 0;
    ProgramPhase phase;
    PpgModel model = PpgModel::kKraus;
};

enum class Herald : char { kSuccess = 'S', kFailure = 'F' };

struct BranchOutcome {
    std::vector<Herald> labels;  ///< one per gate fired, in order
    double probability = 0.0;    ///< squared norm of `state`
    RegisterState state;         ///< unnormalized post-measurement state

    bool all_success() const {
        for (Herald h : labels)
            if (h != Herald::kSuccess) return false;
        return true;
    }
};

struct KrausPair {
    SquareOperator success;
    SquareOperator failure;
};

/// Kraus elements of a gate over a {paths, 2} register (operator dim 2*paths).
inline KrausPair ppg_kraus(const PpgPlacement& gate, std::size_t paths) {
    if (gate.model != PpgModel::kKraus) {
        throw std::invalid_argument("ppg_kraus: gate is not in the Kraus model");
    }
    if (gate.arm >= paths) {
        throw std::out_of_range("ppg_kraus: gate arm outside register");
    }
    const std::size_t n = 2 * paths;
    const double r = std::numbers::sqrt2 / 2;
    auto make = [&](double sign) {
        std::vector<Amplitude> e(n * n);
        for (std::size_t i = 0; i < n; ++i) e[i * n + i] = r;
        std::size_t v = 2 * gate.arm + 1;
        e[v * n + v] = r * std::polar(1.0, sign * gate.phase.radians());
        return SquareOperator(n, std::move(e), OperatorKind::kKraus);
    };
    return {make(+1.0), make(-1.0)};
}

/// max |K_s^dagger K_s + K_f^dagger K_f - I| entrywise.
inline double kraus_completeness_error(const KrausPair& k) {
    const std::size_t n = k.success.dim();
    double worst = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            Amplitude s = 0.0;
            for (std::size_t m = 0; m < n; ++m) {
                s += std::conj(k.success(m, r)) * k.success(m, c);
                s += std::conj(k.failure(m, r)) * k.failure(m, c);
            }
            worst = std::max(worst, std::abs(s - (r == c ? 1.0 : 0.0)));
        }
    }
    return worst;
}

/// Structured application of one Kraus element: phase on the arm's V
/// component, 1/sqrt(2) on the whole register.
inline RegisterState apply_ppg_branch(const RegisterState& state, const PpgPlacement& gate, Herald outcome) {
    if (gate.arm >= state.dims()[0]) {
        throw std::out_of_range("PPG arm " + std::to_string(gate.arm) + " outside register");
    }
    double sign = outcome == Herald::kSuccess ? 1.0 : -1.0;
    SquareOperator local(2, {1.0, 0.0, 0.0, std::polar(1.0, sign * gate.phase.radians())},
                         OperatorKind::kUnitary);
    return apply_on_path(state, gate.arm, local).scaled(std::numbers::sqrt2 / 2);
}

/// Two-qubit gate-plus-measurement model. The program qubit is adjoined,
/// a CNOT flips it conditioned on the signal being V, and the program qubit
/// is measured in the H/V basis: H heralds success (e^{i phi} on V), V
/// heralds failure (e^{-i phi} on V after removing the global e^{i phi}).
/// Returned states are {1, 2} registers; probabilities are exactly 1/2.
inline std::vector<BranchOutcome> ppg_explicit(const JonesVector& signal, ProgramPhase phase) {
    RegisterState sig({1, 2}, {signal.h(), signal.v()});
    RegisterState joint = tensor(sig, RegisterState::polarization(program_state(phase)));
    // |s, p> -> |s, p xor s> on (polarization, program).
    SquareOperator cnot(4,
                        {1, 0, 0, 0,  //
                         0, 1, 0, 0,  //
                         0, 0, 0, 1,  //
                         0, 0, 1, 0},
                        OperatorKind::kUnitary);
    joint = apply(joint, cnot, {1, 2});

    std::vector<BranchOutcome> out;
    for (std::size_t program = 0; program < 2; ++program) {
        Amplitude h = joint[0 * 2 + program];
        Amplitude v = joint[1 * 2 + program];
        Herald label = program == 0 ? Herald::kSuccess : Herald::kFailure;
        if (label == Herald::kFailure) {
            Amplitude unwind = std::polar(1.0, -phase.radians());
            h *= unwind;
            v *= unwind;
        }
        RegisterState st({1, 2}, {h, v});
        out.push_back({{label}, st.norm_sq(), st});
    }
    return out;
}

}  // namespace qrouter
