#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "qrouter/circuit.hpp"
#include "qrouter/ppg.hpp"
#include "test_support.hpp"

namespace qrouter {
namespace {

using testing::max_diff;
constexpr double kR = std::numbers::sqrt2 / 2;

TEST(ProgramPhase, Canonical) {
    EXPECT_DOUBLE_EQ(ProgramPhase(2 * kPi).radians(), 0.0);
    EXPECT_NEAR(ProgramPhase(-kPi / 2).radians(), 3 * kPi / 2, 1e-15);
    EXPECT_THROW(ProgramPhase{std::numeric_limits<double>::quiet_NaN()}, std::invalid_argument);
}

TEST(ProgramState, Examples) {
    auto s0 = program_state(ProgramPhase(0));
    EXPECT_LT(std::abs(s0.h() - kR) + std::abs(s0.v() - kR), 1e-15);
    auto s1 = program_state(ProgramPhase(kPi));
    EXPECT_LT(std::abs(s1.v() + kR), 1e-15);
    auto s2 = program_state(ProgramPhase(kPi / 2));
    EXPECT_LT(std::abs(s2.v() - kR * kI), 1e-15);
}

TEST(Kraus, ZeroPhaseGivesScaledIdentity) {
    auto k = ppg_kraus({1, ProgramPhase(0)}, 2);
    for (const auto* op : {&k.success, &k.failure}) {
        EXPECT_EQ(op->kind(), OperatorKind::kKraus);
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ((*op)(r, c), r == c ? Amplitude(kR) : Amplitude(0));
    }
}

TEST(Kraus, SuccessOnVerticalInArm) {
    auto k = ppg_kraus({0, ProgramPhase(kPi / 2)}, 1);
    auto out = apply(RegisterState::basis({1, 2}, 1), k.success, {0, 1});
    EXPECT_LT(std::abs(out[1] - kR * kI), 1e-15);
    EXPECT_EQ(out[0], Amplitude(0));
}

TEST(Kraus, CompletenessAcrossPhasesAndArms) {
    std::mt19937_64 rng(20);
    std::uniform_real_distribution<double> u(0, 2 * kPi);
    for (int i = 0; i < 200; ++i) {
        std::size_t paths = 1 + rng() % 4;
        auto k = ppg_kraus({rng() % paths, ProgramPhase(u(rng))}, paths);
        EXPECT_LT(kraus_completeness_error(k), 1e-12);
    }
}

TEST(Kraus, Errors) {
    EXPECT_THROW(ppg_kraus({2, ProgramPhase(0)}, 2), std::out_of_range);
    EXPECT_THROW(ppg_kraus({0, ProgramPhase(0), PpgModel::kExplicit}, 2), std::invalid_argument);
    EXPECT_THROW(apply_ppg_branch(RegisterState::basis({2, 2}, 0), {3, ProgramPhase(0)}, Herald::kSuccess),
                 std::out_of_range);
}

TEST(Kraus, StructuredBranchMatchesDenseElement) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0, 2 * kPi);
    for (int i = 0; i < 200; ++i) {
        std::size_t paths = 1 + rng() % 3;
        PpgPlacement g{rng() % paths, ProgramPhase(u(rng))};
        RegisterState s({paths, 2}, testing::random_vector(rng, 2 * paths));
        auto k = ppg_kraus(g, paths);
        EXPECT_LT(max_diff(apply_ppg_branch(s, g, Herald::kSuccess).amps(), apply(s, k.success, {0, 1}).amps()), 1e-15);
        EXPECT_LT(max_diff(apply_ppg_branch(s, g, Herald::kFailure).amps(), apply(s, k.failure, {0, 1}).amps()), 1e-15);
    }
}

TEST(Explicit, HorizontalUnchangedOnSuccess) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(0, 2 * kPi);
    for (int i = 0; i < 20; ++i) {
        auto out = ppg_explicit(JonesVector::horizontal(), ProgramPhase(u(rng)));
        ASSERT_EQ(out.size(), 2u);
        EXPECT_EQ(out[0].labels, std::vector<Herald>{Herald::kSuccess});
        auto normed = out[0].state.normalized();
        EXPECT_LT(max_diff(normed.amps(), std::vector<Amplitude>{1, 0}), 1e-15);
    }
}

TEST(Explicit, DiagonalPiSuccessGivesAntiDiagonal) {
    auto out = ppg_explicit(JonesVector::diagonal(), ProgramPhase(kPi));
    auto normed = out[0].state.normalized();
    EXPECT_LT(max_diff(normed.amps(), std::vector<Amplitude>{kR, -kR}), 1e-15);
}

TEST(Explicit, ProbabilitiesHalfAndMapMatchesKraus) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0, 2 * kPi);
    for (int i = 0; i < 500; ++i) {
        JonesVector s = testing::random_jones(rng);
        ProgramPhase phi(u(rng));
        auto out = ppg_explicit(s, phi);
        EXPECT_NEAR(out[0].probability, 0.5, 1e-12);
        EXPECT_NEAR(out[1].probability, 0.5, 1e-12);
        // S: alpha|H> + e^{i phi} beta|V>, F: alpha|H> + e^{-i phi} beta|V>, each with weight 1/sqrt2.
        std::vector<Amplitude> want_s{kR * s.h(), kR * std::polar(1.0, phi.radians()) * s.v()};
        std::vector<Amplitude> want_f{kR * s.h(), kR * std::polar(1.0, -phi.radians()) * s.v()};
        EXPECT_LT(max_diff(out[0].state.amps(), want_s), 1e-12);
        EXPECT_LT(max_diff(out[1].state.amps(), want_f), 1e-12);
    }
}

TEST(Pipeline, TwoGatesQuarterFourGatesSixteenth) {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> u(0, 2 * kPi);
    for (int i = 0; i < 100; ++i) {
        RegisterState s({3, 2}, testing::random_vector(rng, 6));
        std::vector<PpgPlacement> gates;
        for (int n = 0; n < 4; ++n) gates.push_back({rng() % 3, ProgramPhase(u(rng))});
        auto two = fire_pipeline(s, {gates[0], gates[1]});
        ASSERT_EQ(two.size(), 4u);
        EXPECT_NEAR(two[0].probability, 0.25, 1e-12);
        auto four = fire_pipeline(s, gates);
        ASSERT_EQ(four.size(), 16u);
        EXPECT_NEAR(four[0].probability, 1.0 / 16, 1e-12);
        double total = 0;
        for (const auto& b : four) total += b.probability;
        EXPECT_NEAR(total, 1.0, 1e-12);
        EXPECT_TRUE(four[0].all_success());
        EXPECT_EQ(four[1].labels,
                  (std::vector<Herald>{Herald::kSuccess, Herald::kSuccess, Herald::kSuccess, Herald::kFailure}));
    }
}

TEST(Pipeline, Errors) {
    EXPECT_THROW(fire_pipeline(RegisterState::basis({2, 2}, 0), {{2, ProgramPhase(0)}}), std::out_of_range);
    CircuitSpec c;
    c.paths = 1;
    c.elements.emplace_back(PpgElement{{0, ProgramPhase(0), PpgModel::kExplicit}});
    EXPECT_THROW(simulate(c, RegisterState::basis({1, 2}, 0)), std::invalid_argument);
}

}  // namespace
}  // namespace qrouter
