#pragma once

// Command-line front end: route, sweep, verify, run.
// Exit codes: 0 success, 1 verification or runtime failure, 2 usage or parse error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qrouter/dsl.hpp"
#include "qrouter/router.hpp"
#include "qrouter/sweep.hpp"
#include "qrouter/verify.hpp"

namespace qrouter::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RouterFlags {
    std::string alpha = "1";
    std::string beta = "0";
    std::string variant = "basic";
    std::array<std::string, 4> phi;
    std::string convention = "real";

    void attach(CLI::App& cmd) {
        cmd.add_option("--alpha", alpha, "H amplitude of the signal (complex, e.g. 0.6 or 0.6+0.8i)");
        cmd.add_option("--beta", beta, "V amplitude of the signal");
        cmd.add_option("--variant", variant, "basic | full | generalized");
        for (int i = 0; i < 4; ++i) {
            cmd.add_option("--phi" + std::to_string(i + 1), phi[i], "program phase (rad, deg or pi suffix)");
        }
        cmd.add_option("--pbs-convention", convention, "reflection phase convention: real | imaginary");
    }

    JonesVector signal(std::ostream& err) const {
        auto a = dsl::parse_complex(alpha);
        if (!a) throw UsageError("--alpha: malformed complex literal '" + alpha + "'");
        auto b = dsl::parse_complex(beta);
        if (!b) throw UsageError("--beta: malformed complex literal '" + beta + "'");
        auto chk = dsl::check_signal(*a, *b);
        if (chk.error) throw UsageError("--alpha/--beta: " + *chk.error);
        if (chk.warning) err << "warning: " << *chk.warning << '\n';
        return *chk.signal;
    }

    RouterConfig config() const {
        auto v = parse_variant(variant);
        if (!v) throw UsageError("--variant: unknown router variant '" + variant + "'");
        RouterConfig cfg;
        cfg.variant = *v;
        for (int i = 0; i < 4; ++i) {
            if (phi[i].empty()) continue;
            std::string flag = "--phi" + std::to_string(i + 1);
            auto angle = dsl::parse_angle(phi[i]);
            if (!angle) throw UsageError(flag + ": malformed angle '" + phi[i] + "'");
            if (!phase_allowed(*v, i + 1)) throw UsageError(flag + " not valid for " + variant);
            cfg.set_phase(i + 1, *angle);
        }
        return cfg;
    }

    RunOptions options() const { return {parse_convention(convention), 0.0}; }

    static ReflectionPhase parse_convention(const std::string& s) {
        if (s == "real") return ReflectionPhase::kReal;
        if (s == "imaginary") return ReflectionPhase::kImaginary;
        throw UsageError("--pbs-convention: expected real or imaginary, got '" + s + "'");
    }
};

inline nlohmann::ordered_json complex_json(Amplitude a) { return {{"re", a.real()}, {"im", a.imag()}}; }

inline nlohmann::ordered_json optional_json(const std::optional<double>& x) {
    return x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr);
}

inline void render_route(const RouterConfig& cfg, const RoutingResult& r, const std::string& format, std::ostream& out) {
    auto eff = cfg.effective();
    if (format == "json") {
        nlohmann::ordered_json j;
        j["variant"] = to_string(cfg.variant);
        for (int i = 0; i < 4; ++i) {
            std::string key = "phi" + std::to_string(i + 1);
            j[key] = cfg.variant == Variant::kBasic && i >= 2 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(eff[i]);
        }
        j["T"] = r.T;
        j["R"] = r.R;
        j["successProb"] = r.successProb;
        j["fidelity1"] = optional_json(r.fidelity1);
        j["fidelity2"] = optional_json(r.fidelity2);
        j["A1"] = complex_json(r.A1);
        j["A2"] = complex_json(r.A2);
        j["interArmPhase"] = optional_json(r.interArmPhase);
        j["amplitudes"] = {{"H1", complex_json(r.ampH1)},
                           {"V1", complex_json(r.ampV1)},
                           {"H2", complex_json(r.ampH2)},
                           {"V2", complex_json(r.ampV2)}};
        out << j.dump(2) << '\n';
        return;
    }
    auto num = [](const std::optional<double>& x) { return x ? format_number(*x) : std::string("undefined"); };
    auto cplx = [](Amplitude a) { return format_number(a.real()) + (std::signbit(a.imag()) ? "-" : "+") +
                                         format_number(std::abs(a.imag())) + "i"; };
    auto row = [&](const std::string& k, const std::string& v) {
        out << k << std::string(k.size() < 15 ? 15 - k.size() : 1, ' ') << v << '\n';
    };
    row("variant", to_string(cfg.variant));
    for (int i = 0; i < 4; ++i) {
        if (cfg.variant == Variant::kBasic && i >= 2) continue;
        row("phi" + std::to_string(i + 1), format_number(eff[i]));
    }
    row("T", format_number(r.T));
    row("R", format_number(r.R));
    row("successProb", format_number(r.successProb));
    row("fidelity1", num(r.fidelity1));
    row("fidelity2", num(r.fidelity2));
    row("A1", cplx(r.A1));
    row("A2", cplx(r.A2));
    row("interArmPhase", num(r.interArmPhase));
    row("H1", cplx(r.ampH1));
    row("V1", cplx(r.ampV1));
    row("H2", cplx(r.ampH2));
    row("V2", cplx(r.ampV2));
}

/// phiN:from:to:steps
inline SweepAxis parse_sweep_flag(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 4) throw UsageError("--sweep: expected phiN:from:to:steps, got '" + text + "'");
    SweepAxis a;
    if (parts[0].size() != 4 || parts[0].substr(0, 3) != "phi" || parts[0][3] < '1' || parts[0][3] > '4') {
        throw UsageError("--sweep: parameter must be phi1..phi4, got '" + parts[0] + "'");
    }
    a.param = parts[0][3] - '0';
    auto from = dsl::parse_angle(parts[1]);
    auto to = dsl::parse_angle(parts[2]);
    if (!from || !to) throw UsageError("--sweep: malformed angle in '" + text + "'");
    a.from = *from;
    a.to = *to;
    std::size_t steps = 0;
    auto [end, ec] = std::from_chars(parts[3].data(), parts[3].data() + parts[3].size(), steps);
    if (parts[3].empty() || ec != std::errc{} || end != parts[3].data() + parts[3].size() || steps < 2) {
        throw UsageError("--sweep: steps must be an integer >= 2, got '" + parts[3] + "'");
    }
    a.steps = steps;
    return a;
}

inline std::string render_rows(const std::vector<SweepRow>& rows, const std::string& format) {
    if (format == "json") return to_json(rows).dump(2) + "\n";
    return to_csv(rows);
}

inline bool write_file(const std::filesystem::path& path, const std::string& content, std::ostream& err) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << content) || !f.flush()) {
        err << "error: cannot write " << path.string() << '\n';
        return false;
    }
    return true;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Linear-optical programmable quantum router simulator"};
    app.name("qrouter");
    app.require_subcommand(1);

    RouterFlags route_flags;
    std::string route_format = "table";
    auto* route = app.add_subcommand("route", "Simulate one router configuration");
    route_flags.attach(*route);
    route->add_option("--format", route_format, "table | json")->check(CLI::IsMember({"table", "json"}));

    RouterFlags sweep_flags;
    std::vector<std::string> sweep_specs;
    std::string sweep_format = "csv";
    std::string sweep_output;
    auto* sweep = app.add_subcommand("sweep", "Sweep one or two program phases");
    sweep_flags.attach(*sweep);
    sweep->add_option("--sweep", sweep_specs, "phiN:from:to:steps (one or two axes)")->required();
    sweep->add_option("--format", sweep_format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    sweep->add_option("--output,-o", sweep_output, "write to a file instead of stdout");

    std::string verify_convention = "real";
    std::string verify_offset;
    auto* verify_cmd = app.add_subcommand("verify", "Run the built-in acceptance checks");
    verify_cmd->add_option("--pbs-convention", verify_convention, "reflection phase convention: real | imaginary");
    verify_cmd->add_option("--inject-phi-offset", verify_offset, "fault injection: add this angle to every gate phase")
        ->group("");

    std::string run_path;
    std::string run_convention = "real";
    auto* run_cmd = app.add_subcommand("run", "Execute a .qrt experiment file");
    run_cmd->add_option("file", run_path, "experiment file")->required();
    run_cmd->add_option("--pbs-convention", run_convention, "reflection phase convention: real | imaginary");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (route->parsed()) {
            JonesVector s = route_flags.signal(err);
            RouterConfig cfg = route_flags.config();
            render_route(cfg, run(s, cfg, route_flags.options()), route_format, out);
            return kExitOk;
        }
        if (sweep->parsed()) {
            JonesVector s = sweep_flags.signal(err);
            RouterConfig cfg = sweep_flags.config();
            std::vector<SweepAxis> axes;
            for (const auto& spec : sweep_specs) axes.push_back(parse_sweep_flag(spec));
            try {
                validate_axes(cfg.variant, axes);
            } catch (const std::invalid_argument& e) {
                throw UsageError(std::string("--sweep: ") + e.what());
            }
            std::string text = render_rows(run_sweep(s, cfg, axes, sweep_flags.options()), sweep_format);
            if (sweep_output.empty()) {
                out << text;
                return kExitOk;
            }
            return write_file(sweep_output, text, err) ? kExitOk : kExitFailure;
        }
        if (verify_cmd->parsed()) {
            verify::VerifyOptions opts;
            opts.run.reflection = RouterFlags::parse_convention(verify_convention);
            if (!verify_offset.empty()) {
                auto off = dsl::parse_angle(verify_offset);
                if (!off) throw UsageError("--inject-phi-offset: malformed angle '" + verify_offset + "'");
                opts.run.fault_phi_offset = *off;
            }
            auto results = verify::run_all(opts);
            std::size_t failed = 0;
            for (const auto& r : results) {
                out << r.to_line() << '\n';
                failed += !r.passed;
            }
            out << (failed ? "FAILED: " : "OK: ") << results.size() - failed << "/" << results.size()
                << " checks passed\n";
            return failed ? kExitFailure : kExitOk;
        }
        if (run_cmd->parsed()) {
            RunOptions opts{RouterFlags::parse_convention(run_convention), 0.0};
            std::ifstream f(run_path, std::ios::binary);
            if (!f) {
                err << "error: cannot read " << run_path << '\n';
                return kExitFailure;
            }
            std::stringstream buf;
            buf << f.rdbuf();
            auto parsed = dsl::parse(buf.str());
            for (const auto& d : parsed.diagnostics) err << run_path << ":" << d.to_string() << '\n';
            if (!parsed.ok()) return kExitUsage;
            auto rows = dsl::execute(*parsed.spec, opts);
            if (parsed.spec->emit.empty()) {
                out << to_csv(rows);
                return kExitOk;
            }
            std::filesystem::path base = std::filesystem::path(run_path).parent_path();
            for (const auto& target : parsed.spec->emit) {
                std::string text = render_rows(rows, target.format == dsl::EmitFormat::kJson ? "json" : "csv");
                std::filesystem::path dest = std::filesystem::path(target.path);
                if (dest.is_relative()) dest = base / dest;
                if (!write_file(dest, text, err)) return kExitFailure;
                out << "wrote " << dest.string() << " (" << rows.size() << " rows)\n";
            }
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace qrouter::cli
