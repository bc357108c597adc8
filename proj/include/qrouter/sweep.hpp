#pragma once

// Parameter sweeps over program phases and their CSV / JSON renderings.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "qrouter/router.hpp"

namespace qrouter {

struct SweepAxis {
    int param = 1;  ///< program phase index, 1..4
    double from = 0.0;
    double to = 0.0;
    std::size_t steps = 2;

    /// Grid point i of steps, endpoints included.
    double at(std::size_t i) const {
        if (i + 1 == steps) return to;
        return from + static_cast<double>(i) * (to - from) / static_cast<double>(steps - 1);
    }

    friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

inline void validate_axes(Variant variant, const std::vector<SweepAxis>& axes) {
    if (axes.size() > 2) throw std::invalid_argument("at most 2 sweep axes");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const auto& a = axes[i];
        if (a.param < 1 || a.param > 4) throw std::invalid_argument("sweep parameter must be phi1..phi4");
        if (!phase_allowed(variant, a.param)) {
            throw std::invalid_argument("phi" + std::to_string(a.param) + " not valid for " + to_string(variant));
        }
        if (a.steps < 2) throw std::invalid_argument("sweep steps must be at least 2");
        if (!std::isfinite(a.from) || !std::isfinite(a.to)) throw std::invalid_argument("non-finite sweep bound");
        if (i == 1 && axes[0].param == a.param) throw std::invalid_argument("sweep axes must be distinct");
    }
}

/// One CSV/JSON row. Column order is the field order below.
struct SweepRow {
    std::array<std::optional<double>, 4> phi;  ///< empty for phases the variant does not use
    double T = 0.0;
    double R = 0.0;
    double successProb = 0.0;
    std::optional<double> fidelity1, fidelity2;
    double reA1 = 0.0, imA1 = 0.0, reA2 = 0.0, imA2 = 0.0;
    std::optional<double> interArmPhase;
};

inline constexpr std::array<const char*, 14> kSweepColumns = {
    "phi1", "phi2", "phi3", "phi4", "T", "R", "successProb", "fidelity1", "fidelity2",
    "reA1", "imA1", "reA2", "imA2", "interArmPhase"};

inline std::array<std::optional<double>, 14> row_values(const SweepRow& r) {
    return {r.phi[0], r.phi[1], r.phi[2], r.phi[3], r.T, r.R, r.successProb, r.fidelity1, r.fidelity2,
            r.reA1, r.imA1, r.reA2, r.imA2, r.interArmPhase};
}

/// `shown` overrides the phase columns (used to report the requested sweep value).
/// A tied phi2/phi4 column mirrors phi1/phi3.
inline SweepRow make_row(const RouterConfig& cfg, const RoutingResult& res,
                         const std::array<std::optional<double>, 4>& shown = {}) {
    SweepRow row;
    auto eff = cfg.effective();
    auto display = shown;
    if (!cfg.phi2 && !display[1]) display[1] = display[0];
    if (!cfg.phi4 && !display[3]) display[3] = display[2];
    for (int i = 0; i < 4; ++i) {
        if (cfg.variant == Variant::kBasic && i >= 2) continue;
        row.phi[i] = display[i] ? display[i] : eff[i];
    }
    row.T = res.T;
    row.R = res.R;
    row.successProb = res.successProb;
    row.fidelity1 = res.fidelity1;
    row.fidelity2 = res.fidelity2;
    row.reA1 = res.A1.real();
    row.imA1 = res.A1.imag();
    row.reA2 = res.A2.real();
    row.imA2 = res.A2.imag();
    row.interArmPhase = res.interArmPhase;
    return row;
}

/// Runs the grid, outer (first) axis major. No axes gives a single row.
inline std::vector<SweepRow> run_sweep(const JonesVector& signal, const RouterConfig& base,
                                       const std::vector<SweepAxis>& axes, const RunOptions& opts = {}) {
    base.validate();
    validate_axes(base.variant, axes);
    std::vector<SweepRow> rows;
    auto run_point = [&](const std::vector<std::pair<int, double>>& assignments) {
        RouterConfig cfg = base;
        std::array<std::optional<double>, 4> shown;
        for (auto [param, value] : assignments) {
            cfg.set_phase(param, value);
            shown[param - 1] = value;
        }
        rows.push_back(make_row(cfg, run(signal, cfg, opts), shown));
    };
    if (axes.empty()) {
        run_point({});
    } else if (axes.size() == 1) {
        for (std::size_t i = 0; i < axes[0].steps; ++i) run_point({{axes[0].param, axes[0].at(i)}});
    } else {
        for (std::size_t i = 0; i < axes[0].steps; ++i)
            for (std::size_t j = 0; j < axes[1].steps; ++j)
                run_point({{axes[0].param, axes[0].at(i)}, {axes[1].param, axes[1].at(j)}});
    }
    return rows;
}

/// 12 significant digits.
inline std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    for (std::size_t i = 0; i < kSweepColumns.size(); ++i) out << (i ? "," : "") << kSweepColumns[i];
    out << '\n';
    for (const auto& r : rows) {
        auto values = row_values(r);
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out << ',';
            if (values[i]) out << format_number(*values[i]);
        }
        out << '\n';
    }
    return out.str();
}

/// {"columns": [...], "rows": [{...}]}; numbers carry exactly the CSV digits.
inline nlohmann::ordered_json to_json(const std::vector<SweepRow>& rows) {
    nlohmann::ordered_json doc;
    doc["columns"] = kSweepColumns;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        auto values = row_values(r);
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i]) {
                obj[kSweepColumns[i]] = std::strtod(format_number(*values[i]).c_str(), nullptr);
            } else {
                obj[kSweepColumns[i]] = nullptr;
            }
        }
        doc["rows"].push_back(std::move(obj));
    }
    return doc;
}

}  // namespace qrouter
