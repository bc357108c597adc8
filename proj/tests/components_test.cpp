#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "qrouter/components.hpp"
#include "test_support.hpp"

namespace qrouter {
namespace {

using testing::max_diff;
constexpr double kR = std::numbers::sqrt2 / 2;

std::vector<Amplitude> entries(const SquareOperator& op) { return {op.entries().begin(), op.entries().end()}; }

TEST(WavePlate, CanonicalAngle) {
    EXPECT_DOUBLE_EQ(WavePlateAngle(kPi).radians(), 0.0);
    EXPECT_NEAR(WavePlateAngle(-kPi / 4).radians(), 3 * kPi / 4, 1e-15);
    EXPECT_NEAR(WavePlateAngle::degrees(202.5).radians(), kPi / 8, 1e-15);
    EXPECT_THROW(WavePlateAngle{std::numeric_limits<double>::infinity()}, std::invalid_argument);
}

TEST(WavePlate, ZeroIsPiPhaseBetweenHAndV) {
    EXPECT_EQ(entries(hwp_matrix(WavePlateAngle(0.0))), (std::vector<Amplitude>{1, 0, 0, -1}));
}

TEST(WavePlate, TwentyTwoAndAHalfIsHadamard) {
    EXPECT_EQ(entries(hwp_matrix(WavePlateAngle::degrees(22.5))), (std::vector<Amplitude>{kR, kR, kR, -kR}));
}

TEST(WavePlate, FortyFiveSwaps) {
    EXPECT_EQ(entries(hwp_matrix(WavePlateAngle::degrees(45))), (std::vector<Amplitude>{0, 1, 1, 0}));
}

TEST(WavePlate, UnitaryAndSelfInverseEverywhere) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int i = 0; i < 500; ++i) {
        auto m = hwp_matrix(WavePlateAngle(u(rng)));
        EXPECT_LT(m.unitarity_error(), 1e-12);
        // Real symmetric and unitary, hence an involution.
        Amplitude a = m(0, 0), b = m(0, 1), d = m(1, 1);
        EXPECT_NEAR(std::abs(a * a + b * b - 1.0), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(b * (a + d)), 0.0, 1e-12);
    }
}

TEST(PbsWiring, Validation) {
    EXPECT_THROW(PbsWiring(0, 0, 0, 1), std::invalid_argument);
    EXPECT_THROW(PbsWiring(0, 1, 1, 1), std::invalid_argument);
    EXPECT_THROW(PbsWiring(0, 1, 0, 2), std::invalid_argument);
    PbsWiring w(1, 2, 1, 2);
    EXPECT_EQ(w.mirrored(), PbsWiring(2, 1, 2, 1));
    EXPECT_EQ(w.mirrored().mirrored(), w);
}

TEST(Pbs, SplitsPolarizationsIntoArms) {
    JonesVector j(0.6, Amplitude(0, 0.8));
    auto out = pbs_apply(RegisterState::routed(j, 2, 0), PbsWiring(0, 1, 0, 1));
    EXPECT_EQ(max_diff(out.amps(), std::vector<Amplitude>{j.h(), 0, 0, j.v()}), 0.0);
}

TEST(Pbs, TransmitsHorizontalFromBothPorts) {
    RegisterState s({2, 2}, {0.6, 0, 0.8, 0});
    EXPECT_EQ(pbs_apply(s, PbsWiring(0, 1, 0, 1)), s);
}

TEST(Pbs, UnitModulusAndNormPreserving) {
    std::mt19937_64 rng(11);
    for (auto phase : {ReflectionPhase::kReal, ReflectionPhase::kImaginary}) {
        for (std::size_t k = 0; k < 4; ++k) {
            auto out = pbs_apply(RegisterState::basis({2, 2}, k), PbsWiring(0, 1, 0, 1), phase);
            double ones = 0;
            for (auto a : out.amps()) ones += std::abs(a);
            EXPECT_DOUBLE_EQ(ones, 1.0);
        }
        for (int i = 0; i < 100; ++i) {
            RegisterState s({3, 2}, testing::random_vector(rng, 6));
            EXPECT_NEAR(pbs_apply(s, PbsWiring(2, 1, 1, 2), phase).norm_sq(), 1.0, 1e-12);
        }
    }
}

TEST(Pbs, MirroredIsInverseUnderRealConvention) {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 100; ++i) {
        RegisterState s({3, 2}, testing::random_vector(rng, 6));
        PbsWiring w(1, 2, 1, 2);
        auto back = pbs_apply(pbs_apply(s, w), w.mirrored());
        EXPECT_LT(max_diff(back.amps(), s.amps()), 1e-15);
    }
}

TEST(Pbs, ImaginaryConventionMultipliesReflectionsByI) {
    auto out = pbs_apply(RegisterState::basis({2, 2}, 1), PbsWiring(0, 1, 0, 1), ReflectionPhase::kImaginary);
    EXPECT_EQ(out[3], kI);
    out = pbs_apply(RegisterState::basis({2, 2}, 3), PbsWiring(0, 1, 0, 1), ReflectionPhase::kImaginary);
    EXPECT_EQ(out[1], kI);
}

TEST(Pbs, Errors) {
    EXPECT_THROW(pbs_apply(RegisterState::basis({2, 2}, 0), PbsWiring(1, 2, 1, 2)), std::out_of_range);
    EXPECT_THROW(pbs_apply(RegisterState::basis({4}, 0), PbsWiring(0, 1, 0, 1)), std::invalid_argument);
}

TEST(PhaseShifter, ZeroIsIdentity) {
    std::mt19937_64 rng(13);
    RegisterState s({2, 2}, testing::random_vector(rng, 4));
    EXPECT_EQ(apply_on_path(s, 1, phase_shifter(0.0)), s);
}

TEST(PhaseShifter, PiOnSecondPath) {
    RegisterState s({2, 2}, {kR, 0, kR, 0});
    auto out = apply_on_path(s, 1, phase_shifter(kPi));
    EXPECT_LT(max_diff(out.amps(), std::vector<Amplitude>{kR, 0, -kR, 0}), 1e-15);
}

TEST(ApplyOnPath, Errors) {
    auto s = RegisterState::basis({2, 2}, 0);
    EXPECT_THROW(apply_on_path(s, 2, phase_shifter(0)), std::out_of_range);
    EXPECT_THROW(apply_on_path(s, 0, SquareOperator::identity(3)), std::invalid_argument);
}

}  // namespace
}  // namespace qrouter
