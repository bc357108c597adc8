#pragma once

// Router circuits, their simulation, and the closed-form transformation laws.
//
// Path wiring (0-based indices):
//
//   path | basic interferometer         | phase block (full / generalized)
//   -----+------------------------------+---------------------------------
//    0   | input; arm 1 (H from PBS1);  | untouched
//        | output 1                     |
//    1   | arm 2 (V from PBS1); output 2| output 2 in; H arm of the block;
//        |                              | output 2 out
//    2   | unused                       | V arm of the block
//
// PBS1 and PBS2 share the wiring (in_a=0, in_b=1, out_a=0, out_b=1), so
// output 1 collects H from arm 1 and V from arm 2. PBS4 is PBS3 mirrored.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "qrouter/circuit.hpp"

namespace qrouter {

enum class Variant { kBasic, kFull, kGeneralized };

inline std::string to_string(Variant v) {
    switch (v) {
        case Variant::kBasic: return "basic";
        case Variant::kFull: return "full";
        case Variant::kGeneralized: return "generalized";
    }
    return "?";
}

inline std::optional<Variant> parse_variant(std::string_view s) {
    if (s == "basic") return Variant::kBasic;
    if (s == "full") return Variant::kFull;
    if (s == "generalized") return Variant::kGeneralized;
    return std::nullopt;
}

/// Whether program phase `index` (1..4) may be set explicitly for a variant.
/// phi2 is tied to phi1 and phi4 to phi3 except in the generalized router.
inline bool phase_allowed(Variant v, int index) {
    switch (v) {
        case Variant::kBasic: return index == 1;
        case Variant::kFull: return index == 1 || index == 3;
        case Variant::kGeneralized: return index >= 1 && index <= 4;
    }
    return false;
}

struct RouterConfig {
    Variant variant = Variant::kBasic;
    ProgramPhase phi1;
    std::optional<ProgramPhase> phi2;  ///< unset: follows phi1
    ProgramPhase phi3;
    std::optional<ProgramPhase> phi4;  ///< unset: follows phi3

    static RouterConfig basic(double phi1) { return {Variant::kBasic, ProgramPhase(phi1), {}, ProgramPhase(), {}}; }
    static RouterConfig full(double phi1, double phi3) {
        return {Variant::kFull, ProgramPhase(phi1), {}, ProgramPhase(phi3), {}};
    }
    static RouterConfig generalized(double phi1, double phi2, double phi3, double phi4) {
        return {Variant::kGeneralized, ProgramPhase(phi1), ProgramPhase(phi2), ProgramPhase(phi3),
                ProgramPhase(phi4)};
    }

    bool has_phase_block() const { return variant != Variant::kBasic; }

    void validate() const {
        if (variant != Variant::kGeneralized && (phi2 || phi4)) {
            throw std::invalid_argument("phi2/phi4 are tied to phi1/phi3 for the " + to_string(variant) +
                                        " router");
        }
    }

    /// Phases actually loaded into the four gates, after tying.
    std::array<double, 4> effective() const {
        double p1 = phi1.radians();
        double p3 = phi3.radians();
        return {p1, phi2 ? phi2->radians() : p1, p3, phi4 ? phi4->radians() : p3};
    }

    /// Sets phase `index` (1..4).
    void set_phase(int index, double value) {
        switch (index) {
            case 1: phi1 = ProgramPhase(value); break;
            case 2: phi2 = ProgramPhase(value); break;
            case 3: phi3 = ProgramPhase(value); break;
            case 4: phi4 = ProgramPhase(value); break;
            default: throw std::out_of_range("phase index must be 1..4");
        }
    }

    friend bool operator==(const RouterConfig&, const RouterConfig&) = default;
};

struct RunOptions {
    ReflectionPhase reflection = ReflectionPhase::kReal;
    /// Fault injection: added to every gate phase in the simulated circuit.
    double fault_phi_offset = 0.0;
};

namespace paths {
inline constexpr std::size_t kOut1 = 0;
inline constexpr std::size_t kOut2 = 1;
inline constexpr std::size_t kBlockArm = 2;
}  // namespace paths

namespace checkpoints {
inline constexpr const char* kPbs1 = "pbs1";
inline constexpr const char* kPpgStage = "ppg-stage";
inline constexpr const char* kPbs2 = "pbs2";
inline constexpr const char* kCorrections = "corrections";
inline constexpr const char* kPhaseBlock = "phase-block";
}  // namespace checkpoints

namespace detail {

inline PpgElement gate(std::size_t arm, double phi, const RunOptions& opts) {
    return {PpgPlacement{arm, ProgramPhase(phi + opts.fault_phi_offset), PpgModel::kKraus}};
}

/// Split on PBS1, Hadamard-PPG-Hadamard in each arm, recombine on PBS2,
/// then HWP(0) on output 1 and HWP(45 deg) on output 2.
inline CircuitSpec interferometer(double phi_arm1, double phi_arm2, const RunOptions& opts) {
    const WavePlateAngle hadamard = WavePlateAngle::degrees(22.5);
    const PbsWiring wiring(paths::kOut1, paths::kOut2, paths::kOut1, paths::kOut2);

    CircuitSpec c;
    c.paths = 2;
    auto& e = c.elements;
    e.emplace_back(PbsElement{wiring, opts.reflection});
    e.emplace_back(CheckpointElement{checkpoints::kPbs1});
    for (std::size_t arm : {paths::kOut1, paths::kOut2}) {
        e.emplace_back(HwpElement{arm, hadamard});
        e.emplace_back(gate(arm, arm == paths::kOut1 ? phi_arm1 : phi_arm2, opts));
        e.emplace_back(HwpElement{arm, hadamard});
    }
    e.emplace_back(CheckpointElement{checkpoints::kPpgStage});
    e.emplace_back(PbsElement{wiring, opts.reflection});
    e.emplace_back(CheckpointElement{checkpoints::kPbs2});
    e.emplace_back(HwpElement{paths::kOut1, WavePlateAngle::degrees(0.0)});
    e.emplace_back(HwpElement{paths::kOut2, WavePlateAngle::degrees(45.0)});
    e.emplace_back(CheckpointElement{checkpoints::kCorrections});
    return c;
}

}  // namespace detail

inline CircuitSpec build_basic(const RouterConfig& cfg, const RunOptions& opts = {}) {
    cfg.validate();
    if (cfg.variant != Variant::kBasic) {
        throw std::invalid_argument("build_basic: variant must be basic");
    }
    auto phis = cfg.effective();
    return detail::interferometer(phis[0], phis[1], opts);
}

/// Phase block on output 2: PBS3 split, HWP(45)-PPG(phi3)-HWP(45) on the H
/// arm, bare PPG(phi4) on the V arm, PBS4 recombine.
inline CircuitSpec build_phase_block(const RouterConfig& cfg, const RunOptions& opts = {}) {
    cfg.validate();
    if (!cfg.has_phase_block()) {
        throw std::invalid_argument("build_phase_block: basic router has no phase block");
    }
    auto phis = cfg.effective();
    const WavePlateAngle swap = WavePlateAngle::degrees(45.0);
    const PbsWiring split(paths::kOut2, paths::kBlockArm, paths::kOut2, paths::kBlockArm);

    CircuitSpec c;
    c.paths = 3;
    auto& e = c.elements;
    e.emplace_back(PbsElement{split, opts.reflection});
    e.emplace_back(HwpElement{paths::kOut2, swap});
    e.emplace_back(detail::gate(paths::kOut2, phis[2], opts));
    e.emplace_back(HwpElement{paths::kOut2, swap});
    e.emplace_back(detail::gate(paths::kBlockArm, phis[3], opts));
    e.emplace_back(PbsElement{split.mirrored(), opts.reflection});
    e.emplace_back(CheckpointElement{checkpoints::kPhaseBlock});
    return c;
}

/// Complete circuit for any variant. The generalized router loads
/// independent phases into the two interferometer arms.
inline CircuitSpec build_circuit(const RouterConfig& cfg, const RunOptions& opts = {}) {
    cfg.validate();
    auto phis = cfg.effective();
    CircuitSpec c = detail::interferometer(phis[0], phis[1], opts);
    if (cfg.has_phase_block()) c.append(build_phase_block(cfg, opts));
    return c;
}

/// Input register for a circuit: the signal in path 0.
inline RegisterState input_register(const JonesVector& signal, const CircuitSpec& circuit) {
    return RegisterState::routed(signal, circuit.paths, paths::kOut1);
}

struct RoutingResult {
    /// Post-selected, renormalized output amplitudes.
    Amplitude ampH1, ampV1, ampH2, ampV2;
    /// Routing amplitudes <signal|output k>.
    Amplitude A1, A2;
    double T = 0.0;
    double R = 0.0;
    /// arg(A2) - arg(A1) wrapped to (-pi, pi]; absent when either arm is empty.
    std::optional<double> interArmPhase;
    /// Fidelity of each arm's conditional polarization with the input; absent when the arm is empty.
    std::optional<double> fidelity1, fidelity2;
    double successProb = 0.0;
    std::size_t gates = 0;

    std::array<Amplitude, 4> amplitudes() const { return {ampH1, ampV1, ampH2, ampV2}; }
};

inline RoutingResult extract_result(const JonesVector& signal, const SimulationTrace& trace, std::size_t gates) {
    const BranchOutcome& s = trace.all_success();
    RegisterState out = s.state.normalized();

    RoutingResult r;
    r.successProb = s.probability;
    r.gates = gates;
    r.ampH1 = out[2 * paths::kOut1];
    r.ampV1 = out[2 * paths::kOut1 + 1];
    r.ampH2 = out[2 * paths::kOut2];
    r.ampV2 = out[2 * paths::kOut2 + 1];
    r.A1 = std::conj(signal.h()) * r.ampH1 + std::conj(signal.v()) * r.ampV1;
    r.A2 = std::conj(signal.h()) * r.ampH2 + std::conj(signal.v()) * r.ampV2;

    PathProjection p1 = project_path(out, paths::kOut1);
    PathProjection p2 = project_path(out, paths::kOut2);
    r.T = std::clamp(p1.probability, 0.0, 1.0);  // rounding can push it a few ulp past 1
    r.R = 1.0 - r.T;
    if (p1.conditional) r.fidelity1 = fidelity(*p1.conditional, signal);
    if (p2.conditional) r.fidelity2 = fidelity(*p2.conditional, signal);
    if (r.T >= kEmptyWeight && r.R >= kEmptyWeight && std::norm(r.A1) >= kEmptyWeight &&
        std::norm(r.A2) >= kEmptyWeight) {
        r.interArmPhase = wrap_phase(std::arg(r.A2) - std::arg(r.A1));
    }
    return r;
}

/// Builds the circuit, fires every PPG, post-selects the all-success branch.
inline RoutingResult run(const JonesVector& signal, const RouterConfig& cfg, const RunOptions& opts = {}) {
    CircuitSpec c = build_circuit(cfg, opts);
    return extract_result(signal, simulate(c, input_register(signal, c)), c.ppg_count());
}

/// Closed-form output for |H>_1 and |V>_1 inputs: (amplitude in output 1,
/// amplitude in output 2), polarization unchanged.
struct AnalyticMap {
    std::array<Amplitude, 2> h;
    std::array<Amplitude, 2> v;

    /// Predicted (H1, V1, H2, V2) for an arbitrary signal.
    std::array<Amplitude, 4> predict(const JonesVector& s) const {
        return {s.h() * h[0], s.v() * v[0], s.h() * h[1], s.v() * v[1]};
    }
};

/// Transformation laws:
///   basic:       A1 = (1 + e^{i phi1}) / 2, A2 = (1 - e^{i phi1}) / 2 for both polarizations
///   full:        as basic with A2 multiplied by e^{i phi3}
///   generalized: H -> e^{i phi1/2} (sqrt T1, sqrt R1 e^{i(phi3 - pi/2)}),
///                V -> e^{i phi2/2} (sqrt T2, sqrt R2 e^{i(phi4 - pi/2)}),
///                T_N = (1 + cos phi_N) / 2.
/// In the generalized law sqrt T_N is taken as cos(phi_N / 2) and sqrt R_N as
/// sin(phi_N / 2) with phi_N in [0, 2 pi); these equal the positive roots for
/// phi_N in [0, pi] and continue the law with the correct sign beyond.
inline AnalyticMap analytic(const RouterConfig& cfg) {
    cfg.validate();
    auto phis = cfg.effective();
    auto basic_pair = [](double phi) {
        Amplitude e = std::polar(1.0, phi);
        return std::array<Amplitude, 2>{(1.0 + e) / 2.0, (1.0 - e) / 2.0};
    };
    switch (cfg.variant) {
        case Variant::kBasic: {
            auto a = basic_pair(phis[0]);
            return {a, a};
        }
        case Variant::kFull: {
            auto a = basic_pair(phis[0]);
            a[1] *= std::polar(1.0, phis[2]);
            return {a, a};
        }
        case Variant::kGeneralized: {
            auto law = [](double phi_split, double phi_phase) {
                Amplitude pre = std::polar(1.0, phi_split / 2.0);
                double sqrt_t = std::cos(phi_split / 2.0);
                double sqrt_r = std::sin(phi_split / 2.0);
                return std::array<Amplitude, 2>{pre * sqrt_t, pre * sqrt_r * std::polar(1.0, phi_phase - kPi / 2)};
            };
            return {law(phis[0], phis[2]), law(phis[1], phis[3])};
        }
    }
    throw std::logic_error("analytic: unknown variant");
}

struct Comparison {
    double max_discrepancy = 0.0;
    bool phase_defined = false;  ///< false when one output arm is empty

    static constexpr double kVerifiedBound = 1e-10;
    bool verified() const { return max_discrepancy < kVerifiedBound; }
};

/// Simulated vs closed-form amplitudes, after aligning global phase.
inline Comparison compare(const JonesVector& signal, const RouterConfig& cfg, const RunOptions& opts = {}) {
    RoutingResult sim = run(signal, cfg, opts);
    auto predicted = analytic(cfg).predict(signal);
    auto simulated = sim.amplitudes();
    return {max_discrepancy_up_to_phase(predicted, simulated), sim.interArmPhase.has_value()};
}

}  // namespace qrouter
