#pragma once

// Linear-optical circuits over a {P, 2} register and their branch-resolved
// simulation. Every PPG splits each live branch into a success and a failure
// branch, so a circuit with n gates yields 2^n BranchOutcomes.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qrouter/components.hpp"
#include "qrouter/ppg.hpp"
#include "qrouter/qstate.hpp"

namespace qrouter {

struct HwpElement {
    std::size_t path;
    WavePlateAngle angle;
};

struct PbsElement {
    PbsWiring wiring;
    ReflectionPhase reflection = ReflectionPhase::kReal;
};

struct PhaseElement {
    std::size_t path;
    double phi;
};

struct PpgElement {
    PpgPlacement gate;
};

/// Records the post-selected (all-success-so-far) state at this point.
struct CheckpointElement {
    std::string name;
};

using Element = std::variant<HwpElement, PbsElement, PhaseElement, PpgElement, CheckpointElement>;

struct CircuitSpec {
    std::size_t paths = 1;
    std::vector<Element> elements;

    CircuitSpec& append(const CircuitSpec& other) {
        paths = std::max(paths, other.paths);
        elements.insert(elements.end(), other.elements.begin(), other.elements.end());
        return *this;
    }

    std::size_t ppg_count() const {
        std::size_t n = 0;
        for (const auto& e : elements) n += std::holds_alternative<PpgElement>(e);
        return n;
    }

    std::vector<PpgPlacement> gates() const {
        std::vector<PpgPlacement> out;
        for (const auto& e : elements)
            if (const auto* p = std::get_if<PpgElement>(&e)) out.push_back(p->gate);
        return out;
    }
};

struct Checkpoint {
    std::string name;
    RegisterState state;  ///< renormalized all-success branch
};

struct SimulationTrace {
    std::vector<BranchOutcome> branches;  ///< lexicographic in labels, S before F
    std::vector<Checkpoint> checkpoints;

    const BranchOutcome& all_success() const { return branches.front(); }

    const RegisterState& checkpoint(const std::string& name) const {
        for (const auto& c : checkpoints)
            if (c.name == name) return c.state;
        throw std::out_of_range("no checkpoint named '" + name + "'");
    }

    double total_probability() const {
        double s = 0.0;
        for (const auto& b : branches) s += b.probability;
        return s;
    }
};

namespace detail {

inline RegisterState apply_passive(const RegisterState& s, const Element& e) {
    if (const auto* h = std::get_if<HwpElement>(&e)) return apply_on_path(s, h->path, hwp_matrix(h->angle));
    if (const auto* p = std::get_if<PbsElement>(&e)) return pbs_apply(s, p->wiring, p->reflection);
    if (const auto* ph = std::get_if<PhaseElement>(&e)) return apply_on_path(s, ph->path, phase_shifter(ph->phi));
    return s;
}

}  // namespace detail

inline SimulationTrace simulate(const CircuitSpec& circuit, const RegisterState& input) {
    if (input.dims().size() != 2 || input.dims()[1] != 2 || input.dims()[0] != circuit.paths) {
        throw std::invalid_argument("simulate: input must be a {" + std::to_string(circuit.paths) +
                                    ", 2} register");
    }
    if (!(input.norm_sq() > 0.0)) {
        throw std::invalid_argument("simulate: zero input state");
    }
    SimulationTrace trace;
    trace.branches.push_back({{}, input.norm_sq(), input});
    for (const auto& element : circuit.elements) {
        if (const auto* ppg = std::get_if<PpgElement>(&element)) {
            if (ppg->gate.model != PpgModel::kKraus) {
                throw std::invalid_argument(
                    "explicit PPG model is only defined for a photon certainly present at the gate");
            }
            std::vector<BranchOutcome> next;
            next.reserve(2 * trace.branches.size());
            for (const auto& b : trace.branches) {
                for (Herald h : {Herald::kSuccess, Herald::kFailure}) {
                    BranchOutcome child{b.labels, 0.0, apply_ppg_branch(b.state, ppg->gate, h)};
                    child.labels.push_back(h);
                    child.probability = child.state.norm_sq();
                    next.push_back(std::move(child));
                }
            }
            trace.branches = std::move(next);
        } else if (const auto* cp = std::get_if<CheckpointElement>(&element)) {
            trace.checkpoints.push_back({cp->name, trace.branches.front().state.normalized()});
        } else {
            for (auto& b : trace.branches) b.state = detail::apply_passive(b.state, element);
        }
    }
    return trace;
}

/// Fires each gate's Kraus pair in order and enumerates all 2^n heralding patterns.
inline std::vector<BranchOutcome> fire_pipeline(const RegisterState& state, const std::vector<PpgPlacement>& gates) {
    if (state.dims().size() != 2 || state.dims()[1] != 2) {
        throw std::invalid_argument("fire_pipeline: state must be over (path x polarization)");
    }
    CircuitSpec c;
    c.paths = state.dims()[0];
    for (const auto& g : gates) {
        if (g.arm >= c.paths) throw std::out_of_range("fire_pipeline: gate arm outside register");
        c.elements.emplace_back(PpgElement{g});
    }
    return simulate(c, state).branches;
}

}  // namespace qrouter
