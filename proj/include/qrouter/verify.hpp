#pragma once

// Acceptance checks: every transformation law is reproduced by simulation,
// structured evolution agrees with the dense oracle, the heralded channel is
// sane, and the experiment format round-trips.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qrouter/dense_oracle.hpp"
#include "qrouter/dsl.hpp"
#include "qrouter/router.hpp"
#include "qrouter/sweep.hpp"

namespace qrouter::verify {

struct VerifyOptions {
    RunOptions run;
};

struct CheckResult {
    std::string id;
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    bool passed = false;
    std::string detail;

    std::string to_line() const {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s  %-4s %-34s measured=%-12.4g bound=%-8.3g", passed ? "PASS" : "FAIL",
                      id.c_str(), name.c_str(), measured, bound);
        std::string line = buf;
        while (!line.empty() && line.back() == ' ') line.pop_back();
        if (!detail.empty()) line += "  (" + detail + ")";
        return line;
    }
};

// ---------------------------------------------------------------------------
// Generators

inline JonesVector random_signal(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    return JonesVector::normalized({n(rng), n(rng)}, {n(rng), n(rng)});
}

inline double random_phase(std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(0.0, 2.0 * kPi)(rng);
}

/// Angle that is either a random double or a small rational multiple of pi.
inline double random_angle(std::mt19937_64& rng, double lo, double hi) {
    if (rng() % 2 == 0) return std::uniform_real_distribution<double>(lo, hi)(rng);
    int q = 1 + static_cast<int>(rng() % 8);
    int p = static_cast<int>(std::floor(lo / kPi * q)) + static_cast<int>(rng() % (1 + static_cast<int>((hi - lo) / kPi * q)));
    return static_cast<double>(p) / q * kPi;
}

inline dsl::ExperimentSpec random_spec(std::mt19937_64& rng) {
    dsl::ExperimentSpec spec;
    switch (rng() % 4) {
        case 0: spec.signal = JonesVector::horizontal(); break;
        case 1: spec.signal = JonesVector({0.6, 0.0}, {0.0, 0.8}); break;
        default: spec.signal = random_signal(rng);
    }
    Variant variant = static_cast<Variant>(rng() % 3);
    spec.config.variant = variant;
    for (int idx = 1; idx <= 4; ++idx) {
        if (!phase_allowed(variant, idx)) continue;
        bool optional_slot = idx == 2 || idx == 4;
        if (optional_slot && rng() % 2 == 0) continue;
        spec.config.set_phase(idx, random_angle(rng, -2.0 * kPi, 4.0 * kPi));
    }
    std::vector<int> allowed;
    for (int idx = 1; idx <= 4; ++idx)
        if (phase_allowed(variant, idx)) allowed.push_back(idx);
    std::size_t axes = std::min<std::size_t>(rng() % 3, allowed.size());
    std::shuffle(allowed.begin(), allowed.end(), rng);
    for (std::size_t i = 0; i < axes; ++i) {
        SweepAxis a;
        a.param = allowed[i];
        a.from = random_angle(rng, -kPi, kPi);
        a.to = random_angle(rng, 0.0, 3.0 * kPi);
        a.steps = 2 + rng() % 12;
        spec.sweeps.push_back(a);
    }
    std::size_t emits = rng() % 3;
    for (std::size_t i = 0; i < emits; ++i) {
        dsl::EmitTarget t;
        t.format = rng() % 2 ? dsl::EmitFormat::kCsv : dsl::EmitFormat::kJson;
        t.path = "results/run_" + std::to_string(rng() % 1000) + (t.format == dsl::EmitFormat::kCsv ? ".csv" : ".json");
        spec.emit.push_back(std::move(t));
    }
    return spec;
}

/// Fuzz input number i: raw bytes, token soup, or a mutated valid file.
inline std::string fuzz_input(std::mt19937_64& rng, std::size_t i) {
    static const std::vector<std::string> vocab = {
        "signal", "router", "basic", "full", "generalized", "phi1", "phi2", "phi3", "phi4", "phi0", "phi9",
        "sweep", "from", "to", "steps", "emit", "csv", "json", "alpha=", "beta=", "=", "0.5pi", "90deg",
        "1rad", "1", "0", "-1", "0.6+0.8i", "i", "-i", "1e400", "nan", "inf", "pi", "#", "\n", "\r\n", " ",
        "\t", "+", "-", "e", "1e-3", "out.csv", "2", "1000000000000000000000"};
    std::string s;
    switch (i % 3) {
        case 0: {
            std::size_t len = rng() % 160;
            for (std::size_t k = 0; k < len; ++k) s += static_cast<char>(rng() % 256);
            break;
        }
        case 1: {
            std::size_t len = rng() % 40;
            for (std::size_t k = 0; k < len; ++k) {
                s += vocab[rng() % vocab.size()];
                if (rng() % 3) s += ' ';
            }
            break;
        }
        default: {
            s = dsl::serialize(random_spec(rng));
            std::size_t edits = 1 + rng() % 6;
            for (std::size_t k = 0; k < edits && !s.empty(); ++k) {
                std::size_t pos = rng() % s.size();
                switch (rng() % 3) {
                    case 0: s.erase(pos, 1 + rng() % 4); break;
                    case 1: s.insert(pos, 1, static_cast<char>(rng() % 256)); break;
                    default: s[pos] = static_cast<char>(rng() % 256);
                }
            }
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Hand-expanded intermediate states of the basic interferometer over a {2, 2}
// register, index 2 * path + pol.

/// After the PPG stage:
/// (1+e)/2 (a|H>_1 + b|V>_2) + (1-e)/2 (a|V>_1 + b|H>_2).
inline std::vector<Amplitude> expected_after_ppg_stage(const JonesVector& s, double phi) {
    Amplitude e = std::polar(1.0, phi);
    Amplitude plus = (1.0 + e) / 2.0, minus = (1.0 - e) / 2.0;
    return {plus * s.h(), minus * s.h(), minus * s.v(), plus * s.v()};
}

/// After PBS2:
/// 1/2 [(1+e)(a|H>_1 - b|V>_1) + (1-e)(b|H>_2 + a|V>_2)].
inline std::vector<Amplitude> expected_after_pbs2(const JonesVector& s, double phi) {
    Amplitude e = std::polar(1.0, phi);
    return {(1.0 + e) * s.h() / 2.0, -(1.0 + e) * s.v() / 2.0, (1.0 - e) * s.v() / 2.0, (1.0 - e) * s.h() / 2.0};
}

inline double max_abs_diff(std::span<const Amplitude> a, std::span<const Amplitude> b) {
    double worst = a.size() == b.size() ? 0.0 : 1e300;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

/// Parses CSV produced by to_csv into optional numbers.
inline std::vector<std::vector<std::optional<double>>> read_csv_numbers(const std::string& csv) {
    std::vector<std::vector<std::optional<double>>> rows;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::vector<std::optional<double>> row;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            std::string field = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            row.push_back(field.empty() ? std::nullopt : std::optional<double>(std::strtod(field.c_str(), nullptr)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Number of cells where CSV and JSON renderings disagree.
inline std::size_t csv_json_mismatches(const std::vector<SweepRow>& rows) {
    auto csv = read_csv_numbers(to_csv(rows));
    auto doc = to_json(rows);
    std::size_t bad = csv.size() == doc["rows"].size() ? 0 : 1;
    for (std::size_t r = 0; r < std::min(csv.size(), doc["rows"].size()); ++r) {
        const auto& obj = doc["rows"][r];
        if (csv[r].size() != kSweepColumns.size()) {
            ++bad;
            continue;
        }
        for (std::size_t c = 0; c < kSweepColumns.size(); ++c) {
            const auto& j = obj[kSweepColumns[c]];
            if (j.is_null() != !csv[r][c].has_value()) ++bad;
            else if (!j.is_null() && j.get<double>() != *csv[r][c]) ++bad;
        }
    }
    return bad;
}

// ---------------------------------------------------------------------------
// Checks

namespace detail {

inline CheckResult finish(std::string id, std::string name, double measured, double bound, std::string detail = {}) {
    return {std::move(id), std::move(name), measured, bound, measured <= bound, std::move(detail)};
}

inline std::vector<JonesVector> signals(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::vector<JonesVector> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_signal(rng));
    return out;
}

}  // namespace detail

inline CheckResult check_routing_amplitudes(const VerifyOptions& o) {
    double worst = 0.0;
    for (const auto& s : detail::signals(101, 20)) {
        for (int k = 0; k < 64; ++k) {
            double phi = 2.0 * kPi * k / 64.0;
            Amplitude e = std::polar(1.0, phi);
            Amplitude a1 = (1.0 + e) / 2.0, a2 = (1.0 - e) / 2.0;
            std::array<Amplitude, 4> expected{a1 * s.h(), a1 * s.v(), a2 * s.h(), a2 * s.v()};
            auto sim = run(s, RouterConfig::basic(phi), o.run).amplitudes();
            worst = std::max(worst, max_discrepancy_up_to_phase(expected, sim));
        }
    }
    return detail::finish("C1", "routing-amplitudes", worst, 1e-10, "64 phi1 x 20 signals");
}

inline CheckResult check_transmissivity(const VerifyOptions& o) {
    double worst = 0.0;
    for (const auto& s : detail::signals(102, 20)) {
        for (int k = 0; k < 64; ++k) {
            double phi = 2.0 * kPi * k / 64.0;
            auto r = run(s, RouterConfig::basic(phi), o.run);
            double t = (1.0 + std::cos(phi)) / 2.0;
            worst = std::max({worst, std::abs(r.T - t), std::abs(r.R - (1.0 - t)), std::abs(r.T + r.R - 1.0)});
        }
        worst = std::max(worst, std::abs(run(s, RouterConfig::basic(0.0), o.run).T - 1.0));
        worst = std::max(worst, std::abs(run(s, RouterConfig::basic(kPi), o.run).T - 0.0));
    }
    return detail::finish("C2", "transmissivity", worst, 1e-12, "incl. T(0)=1, T(pi)=0");
}

inline CheckResult check_fixed_phase(const VerifyOptions& o) {
    double worst = 0.0;
    std::size_t points = 0;
    for (const auto& s : detail::signals(103, 10)) {
        for (int k = 0; k <= 63; ++k) {
            double phi = kPi * k / 63.0;
            auto r = run(s, RouterConfig::basic(phi), o.run);
            if (r.T < 1e-6 || r.R < 1e-6) continue;
            ++points;
            if (!r.interArmPhase) {
                worst = std::max(worst, kPi);
                continue;
            }
            worst = std::max(worst, std::abs(wrap_phase(*r.interArmPhase + kPi / 2)));
        }
    }
    return detail::finish("C3", "fixed-inter-arm-phase", worst, 1e-10,
                          std::to_string(points) + " points, phi1 in [0, pi]");
}

inline CheckResult check_success_probability(const VerifyOptions& o) {
    std::mt19937_64 rng(104);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        JonesVector s = random_signal(rng);
        double p1 = random_phase(rng), p3 = random_phase(rng);
        worst = std::max(worst, std::abs(run(s, RouterConfig::basic(p1), o.run).successProb - 0.25));
        worst = std::max(worst, std::abs(run(s, RouterConfig::full(p1, p3), o.run).successProb - 0.0625));
    }
    return detail::finish("C4", "success-probability", worst, 1e-12, "1000 fuzz cases, basic 1/4, full 1/16");
}

inline CheckResult check_polarization_preserved(const VerifyOptions& o) {
    std::mt19937_64 rng(105);
    double worst = 0.0;
    std::size_t arms = 0;
    auto account = [&](const RoutingResult& r) {
        for (const auto& f : {r.fidelity1, r.fidelity2}) {
            if (!f) continue;
            ++arms;
            worst = std::max(worst, std::abs(1.0 - *f));
        }
    };
    for (int i = 0; i < 500; ++i) {
        JonesVector s = random_signal(rng);
        double p1 = i < 64 ? 2.0 * kPi * i / 64.0 : random_phase(rng);
        account(run(s, RouterConfig::basic(p1), o.run));
        account(run(s, RouterConfig::full(p1, random_phase(rng)), o.run));
    }
    return detail::finish("C5", "polarization-preserved", worst, 1e-10, std::to_string(arms) + " non-empty arms");
}

inline CheckResult check_full_phase_law(const VerifyOptions& o) {
    double worst = 0.0;
    std::size_t points = 0;
    for (const auto& s : detail::signals(106, 3)) {
        for (int i = 0; i < 16; ++i) {
            double phi1 = kPi * i / 15.0;
            for (int j = 0; j < 16; ++j) {
                double phi3 = 2.0 * kPi * j / 16.0;
                auto r = run(s, RouterConfig::full(phi1, phi3), o.run);
                if (r.T < 1e-6 || r.R < 1e-6) continue;
                ++points;
                double got = r.interArmPhase ? *r.interArmPhase : phi3 + kPi;
                worst = std::max(worst, std::abs(wrap_phase(got - (phi3 - kPi / 2))));
            }
        }
    }
    return detail::finish("C6", "full-router-phase-law", worst, 1e-10,
                          std::to_string(points) + " points, 16x16 (phi1 in [0, pi], phi3)");
}

inline CheckResult check_generalized(const VerifyOptions& o) {
    std::mt19937_64 rng(107);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        auto cfg = RouterConfig::generalized(random_phase(rng), random_phase(rng), random_phase(rng), random_phase(rng));
        auto phis = cfg.effective();
        JonesVector s = random_signal(rng);
        AnalyticMap law = analytic(cfg);

        worst = std::max(worst, max_discrepancy_up_to_phase(law.predict(s), run(s, cfg, o.run).amplitudes()));

        // Per-polarization map, no phase alignment.
        auto h = run(JonesVector::horizontal(), cfg, o.run).amplitudes();
        auto v = run(JonesVector::vertical(), cfg, o.run).amplitudes();
        std::array<Amplitude, 4> h_expected{law.h[0], 0.0, law.h[1], 0.0};
        std::array<Amplitude, 4> v_expected{0.0, law.v[0], 0.0, law.v[1]};
        worst = std::max({worst, max_abs_diff(h_expected, h), max_abs_diff(v_expected, v)});

        // Weights T_N = (1 + cos phi_N) / 2.
        worst = std::max(worst, std::abs(std::norm(h[0]) - (1.0 + std::cos(phis[0])) / 2.0));
        worst = std::max(worst, std::abs(std::norm(v[1]) - (1.0 + std::cos(phis[1])) / 2.0));
    }
    return detail::finish("C7", "generalized-transformation", worst, 1e-10, "200 random (phi1..phi4, signal)");
}

inline CheckResult check_checkpoints(const VerifyOptions& o) {
    double worst = 0.0;
    for (const auto& s : detail::signals(108, 5)) {
        for (int k = 0; k < 8; ++k) {
            double phi = 2.0 * kPi * k / 8.0;
            CircuitSpec c = build_basic(RouterConfig::basic(phi), o.run);
            SimulationTrace t = simulate(c, input_register(s, c));
            worst = std::max(worst, max_abs_diff(expected_after_ppg_stage(s, phi), t.checkpoint(checkpoints::kPpgStage).amps()));
            worst = std::max(worst, max_abs_diff(expected_after_pbs2(s, phi), t.checkpoint(checkpoints::kPbs2).amps()));
        }
    }
    return detail::finish("C8", "intermediate-checkpoints", worst, 1e-12, "8 phi1 values x 5 signals");
}

inline CheckResult check_dense_oracle(const VerifyOptions& o) {
    std::mt19937_64 rng(109);
    double worst = 0.0;
    std::size_t circuits = 0;
    for (int i = 0; i < 60; ++i) {
        RouterConfig cfg;
        switch (i % 3) {
            case 0: cfg = RouterConfig::basic(random_phase(rng)); break;
            case 1: cfg = RouterConfig::full(random_phase(rng), random_phase(rng)); break;
            default:
                cfg = RouterConfig::generalized(random_phase(rng), random_phase(rng), random_phase(rng), random_phase(rng));
        }
        JonesVector s = random_signal(rng);
        CircuitSpec c = build_circuit(cfg, o.run);
        RegisterState in = input_register(s, c);
        auto structured = simulate(c, in).branches;
        auto brute = dense::evolve_branches(c, in);
        if (structured.size() != brute.size()) return detail::finish("C9", "dense-oracle-equivalence", 1.0, 1e-12, "branch count mismatch");
        for (std::size_t b = 0; b < brute.size(); ++b) worst = std::max(worst, max_abs_diff(brute[b], structured[b].state.amps()));
        ++circuits;
    }
    // Explicit two-qubit gate: generic subsystem application vs embedded dense CNOT.
    for (int i = 0; i < 50; ++i) {
        JonesVector s = random_signal(rng);
        RegisterState joint = tensor(RegisterState({1, 2}, {s.h(), s.v()}),
                                     RegisterState::polarization(program_state(ProgramPhase(random_phase(rng)))));
        SquareOperator cnot(4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0}, OperatorKind::kUnitary);
        auto structured = apply(joint, cnot, {1, 2});
        auto brute = dense::embed(cnot, {1, 2}, joint.dims()) * joint.amps();
        worst = std::max(worst, max_abs_diff(brute, structured.amps()));
        ++circuits;
    }
    return detail::finish("C9", "dense-oracle-equivalence", worst, 1e-12, std::to_string(circuits) + " circuits, all branches");
}

inline CheckResult check_channel(const VerifyOptions& o) {
    std::mt19937_64 rng(110);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto cfg = RouterConfig::generalized(random_phase(rng), random_phase(rng), random_phase(rng), random_phase(rng));
        CircuitSpec c = build_circuit(cfg, o.run);
        for (const auto& g : c.gates()) worst = std::max(worst, kraus_completeness_error(ppg_kraus(g, c.paths)));
        JonesVector s = random_signal(rng);
        worst = std::max(worst, std::abs(simulate(c, input_register(s, c)).total_probability() - 1.0));

        // Explicit two-qubit model vs Kraus elements for a photon at the gate.
        ProgramPhase phase(random_phase(rng));
        auto explicit_branches = ppg_explicit(s, phase);
        RegisterState at_gate({1, 2}, {s.h(), s.v()});
        PpgPlacement gate{0, phase, PpgModel::kKraus};
        worst = std::max(worst, max_abs_diff(explicit_branches[0].state.amps(),
                                             apply_ppg_branch(at_gate, gate, Herald::kSuccess).amps()));
        worst = std::max(worst, max_abs_diff(explicit_branches[1].state.amps(),
                                             apply_ppg_branch(at_gate, gate, Herald::kFailure).amps()));
        worst = std::max(worst, std::abs(explicit_branches[0].probability + explicit_branches[1].probability - 1.0));
    }
    return detail::finish("C10", "channel-sanity", worst, 1e-12, "completeness, branch sums, explicit vs Kraus");
}

inline CheckResult check_dsl(const VerifyOptions& o) {
    std::mt19937_64 rng(111);
    std::size_t violations = 0;
    std::string first;
    auto note = [&](std::string what) {
        if (violations++ == 0) first = std::move(what);
    };

    for (int i = 0; i < 500; ++i) {
        dsl::ExperimentSpec spec = random_spec(rng);
        auto back = dsl::parse(dsl::serialize(spec));
        if (!back.ok() || !(*back.spec == spec) || !back.diagnostics.empty()) note("round-trip #" + std::to_string(i));
    }

    for (std::size_t i = 0; i < 100000; ++i) {
        std::string input = fuzz_input(rng, i);
        try {
            auto res = dsl::parse(input);
            bool has_error = std::any_of(res.diagnostics.begin(), res.diagnostics.end(),
                                         [](const auto& d) { return d.severity == dsl::Severity::kError; });
            if (res.ok() == has_error) note("fuzz #" + std::to_string(i) + ": error/result mismatch");
            std::vector<std::size_t> lengths{0};
            for (char ch : input) {
                if (ch == '\n') lengths.push_back(0);
                else ++lengths.back();
            }
            for (const auto& d : res.diagnostics) {
                bool valid = d.line >= 1 && static_cast<std::size_t>(d.line) <= lengths.size() && d.column >= 1 &&
                             static_cast<std::size_t>(d.column) <= lengths[d.line - 1] + 1;
                if (!valid) note("fuzz #" + std::to_string(i) + ": diagnostic position out of range");
            }
        } catch (...) {
            note("fuzz #" + std::to_string(i) + ": exception escaped");
        }
    }

    for (int i = 0; i < 40; ++i) {
        dsl::ExperimentSpec spec = random_spec(rng);
        if (csv_json_mismatches(dsl::execute(spec, o.run)) != 0) note("csv/json parity #" + std::to_string(i));
    }
    return detail::finish("C11", "dsl-roundtrip-fuzz-parity", static_cast<double>(violations), 0.0,
                          violations ? first : "500 round-trips, 1e5 fuzz inputs, 40 sweeps");
}

/// T, R, success probability and the basic router's per-arm polarization do
/// not depend on the reflection-phase convention.
inline CheckResult check_convention_invariance(const VerifyOptions&) {
    std::mt19937_64 rng(112);
    RunOptions real{ReflectionPhase::kReal, 0.0};
    RunOptions imag{ReflectionPhase::kImaginary, 0.0};
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        JonesVector s = random_signal(rng);
        for (const auto& cfg : {RouterConfig::basic(random_phase(rng)), RouterConfig::full(random_phase(rng), random_phase(rng))}) {
            auto a = run(s, cfg, real);
            auto b = run(s, cfg, imag);
            worst = std::max({worst, std::abs(a.T - b.T), std::abs(a.R - b.R), std::abs(a.successProb - b.successProb)});
            if (cfg.variant != Variant::kBasic) continue;
            RegisterState ra({2, 2}, {a.ampH1, a.ampV1, a.ampH2, a.ampV2});
            RegisterState rb({2, 2}, {b.ampH1, b.ampV1, b.ampH2, b.ampV2});
            for (std::size_t p : {paths::kOut1, paths::kOut2}) {
                auto pa = project_path(ra, p), pb = project_path(rb, p);
                if (pa.conditional.has_value() != pb.conditional.has_value()) worst = std::max(worst, 1.0);
                else if (pa.conditional) worst = std::max(worst, std::abs(1.0 - fidelity(*pa.conditional, *pb.conditional)));
            }
        }
    }
    return detail::finish("X1", "pbs-convention-unobservability", worst, 1e-10, "T, R, successProb, conditional states");
}

inline std::vector<CheckResult> run_all(const VerifyOptions& o = {}) {
    struct Entry {
        const char* id;
        CheckResult (*fn)(const VerifyOptions&);
    };
    const Entry checks[] = {{"C1", check_routing_amplitudes},  {"C2", check_transmissivity},
                            {"C3", check_fixed_phase},         {"C4", check_success_probability},
                            {"C5", check_polarization_preserved}, {"C6", check_full_phase_law},
                            {"C7", check_generalized},         {"C8", check_checkpoints},
                            {"C9", check_dense_oracle},        {"C10", check_channel},
                            {"C11", check_dsl},                {"X1", check_convention_invariance}};
    std::vector<CheckResult> out;
    for (const auto& c : checks) {
        try {
            out.push_back(c.fn(o));
        } catch (const std::exception& e) {
            out.push_back({c.id, "raised", 1.0, 0.0, false, e.what()});
        }
    }
    return out;
}

}  // namespace qrouter::verify
