#include <random>

#include <gtest/gtest.h>

#include "qrouter/dsl.hpp"
#include "qrouter/verify.hpp"

namespace qrouter::dsl {
namespace {

const ParseDiagnostic* first_error(const ParseResult& r) {
    for (const auto& d : r.diagnostics)
        if (d.severity == Severity::kError) return &d;
    return nullptr;
}

TEST(Literals, Reals) {
    EXPECT_EQ(parse_real("1.5"), 1.5);
    EXPECT_EQ(parse_real("-2e3"), -2000.0);
    EXPECT_EQ(parse_real("+.5"), 0.5);
    EXPECT_FALSE(parse_real(""));
    EXPECT_FALSE(parse_real("1e999"));
    EXPECT_FALSE(parse_real("nan"));
    EXPECT_FALSE(parse_real("--1"));
    EXPECT_FALSE(parse_real("1.0x"));
}

TEST(Literals, Complex) {
    EXPECT_EQ(parse_complex("0.6"), Amplitude(0.6, 0));
    EXPECT_EQ(parse_complex("0.6+0.8i"), Amplitude(0.6, 0.8));
    EXPECT_EQ(parse_complex("0.6-0.8i"), Amplitude(0.6, -0.8));
    EXPECT_EQ(parse_complex("-0.8i"), Amplitude(0, -0.8));
    EXPECT_EQ(parse_complex("i"), Amplitude(0, 1));
    EXPECT_EQ(parse_complex("1e-3+2e-3i"), Amplitude(1e-3, 2e-3));
    EXPECT_FALSE(parse_complex("0.6+"));
    EXPECT_FALSE(parse_complex("ii"));
    EXPECT_FALSE(parse_complex("1+2j"));
}

TEST(Literals, Angles) {
    EXPECT_DOUBLE_EQ(*parse_angle("90deg"), kPi / 2);
    EXPECT_DOUBLE_EQ(*parse_angle("0.5pi"), kPi / 2);
    EXPECT_DOUBLE_EQ(*parse_angle("pi"), kPi);
    EXPECT_DOUBLE_EQ(*parse_angle("-pi"), -kPi);
    EXPECT_DOUBLE_EQ(*parse_angle("1.25rad"), 1.25);
    EXPECT_DOUBLE_EQ(*parse_angle("2"), 2.0);
    EXPECT_FALSE(parse_angle("1e308pi"));
    EXPECT_FALSE(parse_angle("deg"));
    EXPECT_FALSE(parse_angle("bogus"));
}

TEST(Literals, AngleFormattingRoundTrips) {
    std::mt19937_64 rng(40);
    std::uniform_real_distribution<double> u(-20, 20);
    for (int i = 0; i < 2000; ++i) {
        double x = i % 2 ? u(rng) : std::round(u(rng)) * kPi / (1 + rng() % 16);
        EXPECT_EQ(*parse_angle(format_angle(x)), x) << format_angle(x);
    }
    EXPECT_EQ(format_angle(kPi / 2), "0.5pi");
    EXPECT_EQ(format_angle(0.0), "0");
    EXPECT_EQ(format_angle(1.0), "1rad");
}

TEST(Signal, NormalizationTiers) {
    EXPECT_TRUE(check_signal(1.0, 0.0).signal);
    auto near = check_signal(1.0 + 1e-10, 0.0);
    EXPECT_TRUE(near.signal && !near.warning);
    auto warn = check_signal(0.6, 0.801);
    EXPECT_TRUE(warn.signal && warn.warning);
    EXPECT_NEAR(warn.signal->norm_sq(), 1.0, 1e-15);
    EXPECT_TRUE(check_signal(1.0, 1.0).error);
}

TEST(Parse, ExampleFile) {
    auto r = parse("signal alpha=1 beta=0\nrouter basic\nphi1=0.5pi\nemit csv out.csv");
    ASSERT_TRUE(r.ok()) << r.diagnostics.front().to_string();
    EXPECT_EQ(r.spec->config.variant, Variant::kBasic);
    EXPECT_DOUBLE_EQ(r.spec->config.phi1.radians(), kPi / 2);
    ASSERT_EQ(r.spec->emit.size(), 1u);
    EXPECT_EQ(r.spec->emit[0].path, "out.csv");
    EXPECT_EQ(r.spec->emit[0].format, EmitFormat::kCsv);
    auto back = parse(serialize(*r.spec));
    ASSERT_TRUE(back.ok());
    EXPECT_EQ(*back.spec, *r.spec);
}

TEST(Parse, Degrees) {
    auto r = parse("phi1=90deg");
    ASSERT_TRUE(r.ok());
    EXPECT_DOUBLE_EQ(r.spec->config.phi1.radians(), kPi / 2);
    EXPECT_EQ(r.spec->signal, JonesVector::horizontal());
}

TEST(Parse, PhaseNotValidForVariant) {
    auto r = parse("router basic\nphi3=1rad");
    EXPECT_FALSE(r.ok());
    auto* d = first_error(r);
    ASSERT_TRUE(d);
    EXPECT_EQ(d->line, 2);
    EXPECT_EQ(d->column, 1);
    EXPECT_NE(d->message.find("phi3 not valid for basic"), std::string::npos);
}

TEST(Parse, PhaseBeforeRouterLineStillChecked) {
    EXPECT_TRUE(parse("phi3 = 1\nrouter full\n").ok());
    EXPECT_FALSE(parse("phi4 = 1\nrouter full\n").ok());
    EXPECT_TRUE(parse("phi4 = 1\nrouter generalized\n").ok());
}

TEST(Parse, ErrorsCarryPositions) {
    struct Case {
        const char* src;
        int line, column;
        const char* needle;
    };
    const Case cases[] = {
        {"frobnicate 1", 1, 1, "unknown keyword"},
        {"router basic\nrouter full", 2, 1, "duplicate"},
        {"router fancy", 1, 8, "variant"},
        {"phi5 = 1", 1, 1, "outside 1..4"},
        {"phi1 = 1xyz", 1, 8, "malformed angle"},
        {"signal alpha=1 beta=1", 1, 1, "not normalized"},
        {"signal alpha=1+ beta=0", 1, 14, "malformed"},
        {"sweep phi1 from 0 to 1 steps 1", 1, 30, "at least 2"},
        {"sweep phi1 from 0 to 1 steps x", 1, 30, "step count"},
        {"sweep phi1 from 0 upto 1 steps 3", 1, 19, "'to'"},
        {"sweep phi1 from 0 to 1 steps 3\nsweep phi1 from 0 to 1 steps 3", 2, 7, "twice"},
        {"emit xml out", 1, 6, "emit format"},
        {"emit csv", 1, 9, "output path"},
        {"router basic extra", 1, 14, "unexpected"},
        {"  = 3", 1, 3, "unexpected"},
    };
    for (const auto& c : cases) {
        auto r = parse(c.src);
        EXPECT_FALSE(r.ok()) << c.src;
        auto* d = first_error(r);
        ASSERT_TRUE(d) << c.src;
        EXPECT_EQ(d->line, c.line) << c.src;
        EXPECT_EQ(d->column, c.column) << c.src << ": " << d->to_string();
        EXPECT_NE(d->message.find(c.needle), std::string::npos) << c.src << ": " << d->message;
    }
}

TEST(Parse, ThreeAxesRejected) {
    auto r = parse(
        "router generalized\nsweep phi1 from 0 to 1 steps 2\nsweep phi2 from 0 to 1 steps 2\n"
        "sweep phi3 from 0 to 1 steps 2\n");
    EXPECT_FALSE(r.ok());
    EXPECT_EQ(first_error(r)->line, 4);
}

TEST(Parse, CommentsCrlfAndBlankLines) {
    auto r = parse("# header\r\n\r\nrouter full   # trailing\r\nphi3 = 0.25pi\r\n");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.spec->config.variant, Variant::kFull);
    EXPECT_DOUBLE_EQ(r.spec->config.phi3.radians(), kPi / 4);
}

TEST(Parse, SignalWarning) {
    auto r = parse("signal alpha=0.6 beta=0.801i");
    ASSERT_TRUE(r.ok());
    ASSERT_EQ(r.diagnostics.size(), 1u);
    EXPECT_EQ(r.diagnostics[0].severity, Severity::kWarning);
}

TEST(Parse, MultipleErrorsReported) {
    auto r = parse("bogus\nphi9 = 1\nrouter basic\n");
    EXPECT_EQ(r.diagnostics.size(), 2u);
}

TEST(Serialize, RoundTripGenerated) {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 500; ++i) {
        auto spec = verify::random_spec(rng);
        auto text = serialize(spec);
        auto back = parse(text);
        ASSERT_TRUE(back.ok()) << text;
        EXPECT_TRUE(back.diagnostics.empty()) << text;
        EXPECT_EQ(*back.spec, spec) << text;
        EXPECT_EQ(serialize(*back.spec), text);
    }
}

// The parser must never throw, and every diagnostic must point inside the input.
TEST(Parse, FuzzTotal) {
    std::mt19937_64 rng(42);
    for (std::size_t i = 0; i < 20000; ++i) {
        std::string input = verify::fuzz_input(rng, i);
        ParseResult r;
        ASSERT_NO_THROW(r = parse(input)) << i;
        bool has_error = first_error(r) != nullptr;
        ASSERT_NE(r.ok(), has_error);
        std::size_t lines = 1 + std::count(input.begin(), input.end(), '\n');
        for (const auto& d : r.diagnostics) {
            ASSERT_GE(d.line, 1);
            ASSERT_LE(static_cast<std::size_t>(d.line), lines);
            ASSERT_GE(d.column, 1);
        }
    }
}

TEST(Execute, GridShape) {
    auto r = parse("router full\nsweep phi1 from 0 to pi steps 3\nsweep phi3 from 0 to 1 steps 4\n");
    ASSERT_TRUE(r.ok());
    auto rows = execute(*r.spec);
    ASSERT_EQ(rows.size(), 12u);
    EXPECT_DOUBLE_EQ(*rows[0].phi[0], 0.0);
    EXPECT_DOUBLE_EQ(*rows[3].phi[2], 1.0);
    EXPECT_DOUBLE_EQ(*rows[4].phi[0], kPi / 2);
    EXPECT_DOUBLE_EQ(*rows[11].phi[0], kPi);
}

}  // namespace
}  // namespace qrouter::dsl
