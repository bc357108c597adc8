#pragma once

// Line-oriented experiment files (.qrt).
//
//   # comment
//   signal alpha=<complex> beta=<complex>
//   router basic|full|generalized
//   phi<N> = <angle>
//   sweep phi<N> from <angle> to <angle> steps <int>
//   emit csv|json <path>
//
// Complex literals: a, a+bi, a-bi, bi. Angles: <number>rad, <number>deg,
// <number>pi (multiples of pi), or a bare number in radians.
// Lines may end in LF or CRLF. Omitted signal/router default to |H> / basic.

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrouter/sweep.hpp"

namespace qrouter::dsl {

enum class Severity { kError, kWarning };

struct ParseDiagnostic {
    int line = 1;
    int column = 1;
    std::string message;
    Severity severity = Severity::kError;

    std::string to_string() const {
        return std::to_string(line) + ":" + std::to_string(column) + ": " +
               (severity == Severity::kError ? "error: " : "warning: ") + message;
    }
};

enum class EmitFormat { kCsv, kJson };

struct EmitTarget {
    EmitFormat format = EmitFormat::kCsv;
    std::string path;

    friend bool operator==(const EmitTarget&, const EmitTarget&) = default;
};

struct ExperimentSpec {
    JonesVector signal = JonesVector::horizontal();
    RouterConfig config;
    std::vector<SweepAxis> sweeps;
    std::vector<EmitTarget> emit;

    friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

struct ParseResult {
    std::optional<ExperimentSpec> spec;  ///< absent iff an error was reported
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const { return spec.has_value(); }
};

// ---------------------------------------------------------------------------
// Literals

inline std::optional<double> parse_real(std::string_view s) {
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty() || !(std::isdigit(static_cast<unsigned char>(s.front())) || s.front() == '.')) {
        return std::nullopt;
    }
    double value = 0.0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value, std::chars_format::general);
    if (ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
    return negative ? -value : value;
}

inline std::optional<Amplitude> parse_complex(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.back() != 'i') {
        auto re = parse_real(s);
        if (!re) return std::nullopt;
        return Amplitude{*re, 0.0};
    }
    std::string_view body = s.substr(0, s.size() - 1);
    auto imag_part = [](std::string_view t) -> std::optional<double> {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return parse_real(t);
    };
    std::size_t split = std::string_view::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string_view::npos) {
        auto im = imag_part(body);
        if (!im) return std::nullopt;
        return Amplitude{0.0, *im};
    }
    auto re = parse_real(body.substr(0, split));
    auto im = imag_part(body.substr(split));
    if (!re || !im) return std::nullopt;
    return Amplitude{*re, *im};
}

inline std::optional<double> parse_angle(std::string_view s) {
    auto ends_with = [&](std::string_view suffix) {
        return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
    };
    if (ends_with("pi")) {
        std::string_view num = s.substr(0, s.size() - 2);
        std::optional<double> m;
        if (num.empty() || num == "+") m = 1.0;
        else if (num == "-") m = -1.0;
        else m = parse_real(num);
        if (!m || !std::isfinite(*m * kPi)) return std::nullopt;
        return *m * kPi;
    }
    if (ends_with("deg")) {
        auto d = parse_real(s.substr(0, s.size() - 3));
        if (!d) return std::nullopt;
        double r = *d / 180.0 * kPi;
        return std::isfinite(r) ? std::optional<double>(r) : std::nullopt;
    }
    if (ends_with("rad")) return parse_real(s.substr(0, s.size() - 3));
    return parse_real(s);
}

inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_complex(Amplitude a) {
    std::string out = format_real(a.real());
    if (a.imag() == 0.0 && !std::signbit(a.imag())) return out;
    out += std::signbit(a.imag()) ? '-' : '+';
    out += format_real(std::abs(a.imag()));
    out += 'i';
    return out;
}

/// "<m>pi" when the angle is a small rational multiple of pi that re-parses
/// to the identical double, else "<x>rad".
inline std::string format_angle(double x) {
    if (x == 0.0) return std::signbit(x) ? "-0" : "0";
    for (int q = 1; q <= 64; ++q) {
        double p = std::round(x / kPi * q);
        double multiple = p / q;
        if (std::abs(x - multiple * kPi) > 1e-12) continue;
        for (int prec = 1; prec <= 17; ++prec) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.*g", prec, multiple);
            std::string candidate = std::string(buf) + "pi";
            auto back = parse_angle(candidate);
            if (back && std::bit_cast<std::uint64_t>(*back) == std::bit_cast<std::uint64_t>(x)) return candidate;
        }
        break;
    }
    return format_real(x) + "rad";
}

// ---------------------------------------------------------------------------
// Signal normalization shared by files and command-line flags.

struct SignalCheck {
    std::optional<JonesVector> signal;
    std::optional<std::string> warning;
    std::optional<std::string> error;
};

inline SignalCheck check_signal(Amplitude alpha, Amplitude beta) {
    double n = std::norm(alpha) + std::norm(beta);
    double off = std::abs(n - 1.0);
    char buf[96];
    std::snprintf(buf, sizeof buf, "|alpha|^2 + |beta|^2 = %.12g", n);
    SignalCheck out;
    if (!std::isfinite(n) || off > 1e-2) {
        out.error = std::string("signal is not normalized: ") + buf;
    } else if (off > 1e-6) {
        out.warning = std::string("signal renormalized: ") + buf;
        out.signal = JonesVector::normalized(alpha, beta);
    } else if (off > kInputTol) {
        out.signal = JonesVector::normalized(alpha, beta);
    } else {
        out.signal = JonesVector(alpha, beta);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace detail {

/// Cursor over one line with 1-based column reporting.
class LineScanner {
public:
    explicit LineScanner(std::string_view text) : text_(text) {}

    void skip_space() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }
    bool at_end() {
        skip_space();
        return pos_ >= text_.size();
    }
    int column() {
        skip_space();
        return static_cast<int>(pos_) + 1;
    }

    std::string_view word() {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        return text_.substr(start, pos_ - start);
    }

    /// Maximal run of non-blank characters, stopping before '=' when asked.
    std::string_view token(bool stop_at_equals = false) {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ' ' && text_[pos_] != '\t' &&
               !(stop_at_equals && text_[pos_] == '='))
            ++pos_;
        return text_.substr(start, pos_ - start);
    }

    bool consume(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string_view rest() {
        skip_space();
        std::string_view r = text_.substr(pos_);
        while (!r.empty() && (r.back() == ' ' || r.back() == '\t')) r.remove_suffix(1);
        pos_ = text_.size();
        return r;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

struct ParseError {
    int column;
    std::string message;
};

inline std::optional<int> phase_index(std::string_view w) {
    if (w.size() < 4 || w.substr(0, 3) != "phi") return std::nullopt;
    int n = 0;
    for (char c : w.substr(3)) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        n = std::min(n * 10 + (c - '0'), 1000);
    }
    return n;
}

inline std::string quoted(std::string_view s) {
    constexpr std::size_t kMax = 32;
    std::string out = "'";
    for (char c : s.substr(0, kMax)) {
        unsigned char u = static_cast<unsigned char>(c);
        if (u < 0x20 || u >= 0x7f) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\x%02x", u);
            out += buf;
        } else {
            out += c;
        }
    }
    if (s.size() > kMax) out += "...";
    return out + "'";
}

}  // namespace detail

inline ParseResult parse(std::string_view source) {
    using detail::ParseError;
    ParseResult result;
    ExperimentSpec spec;
    bool seen_signal = false;
    bool seen_router = false;
    std::array<bool, 4> seen_phase{};
    struct Use {
        int param, line, column;
    };
    std::vector<Use> phase_uses;
    int router_line = 0;

    auto error = [&](int line, int col, std::string msg) {
        result.diagnostics.push_back({line, col, std::move(msg), Severity::kError});
    };

    int line_no = 0;
    std::size_t start = 0;
    while (start <= source.size()) {
        std::size_t nl = source.find('\n', start);
        std::string_view raw = source.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        start = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);

        detail::LineScanner sc(raw);
        if (sc.at_end()) continue;
        int kw_col = sc.column();
        std::string_view kw = sc.word();
        try {
            if (kw.empty()) {
                throw ParseError{kw_col, "unexpected " + detail::quoted(sc.token())};
            }
            if (kw == "signal") {
                if (seen_signal) throw ParseError{kw_col, "duplicate 'signal' line"};
                seen_signal = true;
                std::optional<Amplitude> alpha, beta;
                while (!sc.at_end()) {
                    int col = sc.column();
                    std::string_view key = sc.word();
                    if (key != "alpha" && key != "beta") {
                        throw ParseError{col, "expected alpha= or beta=, got " + detail::quoted(key.empty() ? sc.token() : key)};
                    }
                    if (!sc.consume('=')) throw ParseError{sc.column(), "expected '=' after " + std::string(key)};
                    int vcol = sc.column();
                    std::string_view lit = sc.token();
                    auto value = parse_complex(lit);
                    if (!value) throw ParseError{vcol, "malformed complex literal " + detail::quoted(lit)};
                    auto& slot = key == "alpha" ? alpha : beta;
                    if (slot) throw ParseError{col, "duplicate " + std::string(key)};
                    slot = value;
                }
                if (!alpha || !beta) throw ParseError{kw_col, "signal requires both alpha= and beta="};
                SignalCheck chk = check_signal(*alpha, *beta);
                if (chk.error) throw ParseError{kw_col, *chk.error};
                if (chk.warning) result.diagnostics.push_back({line_no, kw_col, *chk.warning, Severity::kWarning});
                spec.signal = *chk.signal;
            } else if (kw == "router") {
                if (seen_router) throw ParseError{kw_col, "duplicate 'router' line"};
                seen_router = true;
                int col = sc.column();
                std::string_view name = sc.token();
                auto v = parse_variant(name);
                if (!v) throw ParseError{col, "unknown router variant " + detail::quoted(name)};
                spec.config.variant = *v;
                router_line = line_no;
            } else if (auto idx = detail::phase_index(kw)) {
                if (*idx < 1 || *idx > 4) throw ParseError{kw_col, "phi index outside 1..4: " + std::string(kw)};
                if (seen_phase[*idx - 1]) throw ParseError{kw_col, "duplicate " + std::string(kw)};
                seen_phase[*idx - 1] = true;
                if (!sc.consume('=')) throw ParseError{sc.column(), "expected '=' after " + std::string(kw)};
                int col = sc.column();
                std::string_view lit = sc.token();
                auto angle = parse_angle(lit);
                if (!angle) throw ParseError{col, "malformed angle " + detail::quoted(lit)};
                spec.config.set_phase(*idx, *angle);
                phase_uses.push_back({*idx, line_no, kw_col});
            } else if (kw == "sweep") {
                int pcol = sc.column();
                std::string_view pname = sc.word();
                auto idx = detail::phase_index(pname);
                if (!idx) throw ParseError{pcol, "expected phi<N> after sweep"};
                if (*idx < 1 || *idx > 4) throw ParseError{pcol, "phi index outside 1..4: " + std::string(pname)};
                SweepAxis axis;
                axis.param = *idx;
                auto expect_word = [&](std::string_view w) {
                    int c = sc.column();
                    if (sc.word() != w) throw ParseError{c, "expected '" + std::string(w) + "'"};
                };
                auto read_angle = [&] {
                    int c = sc.column();
                    std::string_view lit = sc.token();
                    auto a = parse_angle(lit);
                    if (!a) throw ParseError{c, "malformed angle " + detail::quoted(lit)};
                    return *a;
                };
                expect_word("from");
                axis.from = read_angle();
                expect_word("to");
                axis.to = read_angle();
                expect_word("steps");
                int scol = sc.column();
                std::string_view lit = sc.token();
                std::size_t steps = 0;
                auto [end, ec] = std::from_chars(lit.data(), lit.data() + lit.size(), steps);
                if (lit.empty() || ec != std::errc{} || end != lit.data() + lit.size()) {
                    throw ParseError{scol, "malformed step count " + detail::quoted(lit)};
                }
                if (steps < 2) throw ParseError{scol, "sweep needs at least 2 steps"};
                if (steps > 1000000) throw ParseError{scol, "sweep step count too large"};
                axis.steps = steps;
                for (const auto& other : spec.sweeps) {
                    if (other.param == axis.param) throw ParseError{pcol, "phi" + std::to_string(*idx) + " swept twice"};
                }
                if (spec.sweeps.size() == 2) throw ParseError{kw_col, "at most 2 sweep axes"};
                spec.sweeps.push_back(axis);
                phase_uses.push_back({*idx, line_no, pcol});
            } else if (kw == "emit") {
                int fcol = sc.column();
                std::string_view fmt = sc.word();
                EmitTarget target;
                if (fmt == "csv") target.format = EmitFormat::kCsv;
                else if (fmt == "json") target.format = EmitFormat::kJson;
                else throw ParseError{fcol, "unknown emit format " + detail::quoted(fmt.empty() ? sc.token() : fmt)};
                int pcol = sc.column();
                std::string_view path = sc.rest();
                if (path.empty()) throw ParseError{pcol, "emit requires an output path"};
                target.path = std::string(path);
                spec.emit.push_back(std::move(target));
                continue;
            } else {
                throw ParseError{kw_col, "unknown keyword " + detail::quoted(kw)};
            }
            if (!sc.at_end()) {
                int col = sc.column();
                throw ParseError{col, "unexpected " + detail::quoted(sc.token())};
            }
        } catch (const ParseError& e) {
            error(line_no, e.column, e.message);
        } catch (const std::exception& e) {
            error(line_no, kw_col, e.what());
        }
    }

    for (const auto& use : phase_uses) {
        if (!phase_allowed(spec.config.variant, use.param)) {
            std::string msg = "phi" + std::to_string(use.param) + " not valid for " + to_string(spec.config.variant);
            if (router_line > 0) msg += " (router declared on line " + std::to_string(router_line) + ")";
            error(use.line, use.column, msg);
        }
    }

    bool failed = std::any_of(result.diagnostics.begin(), result.diagnostics.end(),
                              [](const ParseDiagnostic& d) { return d.severity == Severity::kError; });
    if (!failed) result.spec = std::move(spec);
    return result;
}

inline std::string serialize(const ExperimentSpec& spec) {
    std::string out;
    out += "signal alpha=" + format_complex(spec.signal.h()) + " beta=" + format_complex(spec.signal.v()) + "\n";
    out += "router " + to_string(spec.config.variant) + "\n";
    const auto& c = spec.config;
    out += "phi1 = " + format_angle(c.phi1.radians()) + "\n";
    if (c.phi2) out += "phi2 = " + format_angle(c.phi2->radians()) + "\n";
    if (c.variant != Variant::kBasic) out += "phi3 = " + format_angle(c.phi3.radians()) + "\n";
    if (c.phi4) out += "phi4 = " + format_angle(c.phi4->radians()) + "\n";
    for (const auto& s : spec.sweeps) {
        out += "sweep phi" + std::to_string(s.param) + " from " + format_angle(s.from) + " to " + format_angle(s.to) +
               " steps " + std::to_string(s.steps) + "\n";
    }
    for (const auto& e : spec.emit) {
        out += std::string("emit ") + (e.format == EmitFormat::kCsv ? "csv " : "json ") + e.path + "\n";
    }
    return out;
}

/// Evaluates the experiment grid.
inline std::vector<SweepRow> execute(const ExperimentSpec& spec, const RunOptions& opts = {}) {
    return run_sweep(spec.signal, spec.config, spec.sweeps, opts);
}

}  // namespace qrouter::dsl
