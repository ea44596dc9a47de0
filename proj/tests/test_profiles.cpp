#include <gtest/gtest.h>

#include "compred/errors.hpp"
#include "compred/profiles.hpp"

using namespace compred;

TEST(Horizon, SampleCounts)
{
    const std::size_t expected[] = {26, 51, 76, 101, 126};
    for (std::size_t i = 0; i < kDefaultHorizonsMs.size(); ++i) {
        EXPECT_EQ(make_horizon(kDefaultHorizonsMs[i], 0.005).n_samples, expected[i]);
    }
    EXPECT_THROW(make_horizon(123.0, 0.005), InvalidArgument);
    EXPECT_THROW(make_horizon(0.0, 0.005), InvalidArgument);
    EXPECT_THROW(make_horizon(-125.0, 0.005), InvalidArgument);
}

TEST(Profile, ZeroGivesZeros)
{
    const auto p = generate_profile(ProfileKind::Zero, Accel3(1.0, -2.0, 3.0), make_horizon(125, 0.005));
    ASSERT_EQ(p.size(), 26u);
    for (const Accel3& a : p) {
        EXPECT_EQ(a.value, Vec3::Zero());
    }
}

TEST(Profile, ConstCopiesFirstSample)
{
    const Accel3 u1(0.3, -0.1, 0.2);
    const auto p = generate_profile(ProfileKind::Const, u1, make_horizon(125, 0.005));
    ASSERT_EQ(p.size(), 26u);
    for (const Accel3& a : p) {
        EXPECT_EQ(a, u1);
    }
}

TEST(Profile, CubicEndpointsAndMidpoint)
{
    const auto p = generate_profile(ProfileKind::CubicToZero, Accel3(1.0, 0.0, 0.0), make_horizon(250, 0.005));
    ASSERT_EQ(p.size(), 51u);
    EXPECT_EQ(p.front().value, Vec3(1.0, 0.0, 0.0));
    EXPECT_EQ(p.back().value, Vec3::Zero());
    EXPECT_DOUBLE_EQ(p[25].value.x(), 0.5);
}

TEST(Profile, CubicIsMonotoneAndLinearInU1)
{
    const Accel3 u1(2.0, -1.5, 0.25);
    for (double t : kDefaultHorizonsMs) {
        const HorizonSpec spec = make_horizon(t, 0.005);
        const auto p = generate_profile(ProfileKind::CubicToZero, u1, spec);
        const auto q = generate_profile(ProfileKind::CubicToZero, Accel3(3.0 * u1.value), spec);
        EXPECT_EQ(p.front(), u1);
        EXPECT_EQ(p.back().value, Vec3::Zero());
        for (std::size_t k = 1; k < p.size(); ++k) {
            for (int ax = 0; ax < 3; ++ax) {
                EXPECT_LE(std::abs(p[k].value(ax)), std::abs(p[k - 1].value(ax)));
                EXPECT_GE(p[k].value(ax) * u1.value(ax), 0.0);
            }
            EXPECT_LE((q[k].value - 3.0 * p[k].value).norm(), 1e-15 * q[k].value.norm() + 1e-300);
        }
    }
}

TEST(Profile, CubicEndJerkShrinksWithLength)
{
    double previous = INFINITY;
    for (double t : kDefaultHorizonsMs) {
        const auto p = generate_profile(ProfileKind::CubicToZero, Accel3(1.0, 0.0, 0.0), make_horizon(t, 0.005));
        const double first = std::abs(p[1].value.x() - p[0].value.x());
        const double last = std::abs(p[p.size() - 1].value.x() - p[p.size() - 2].value.x());
        EXPECT_LT(first, previous);
        EXPECT_NEAR(first, last, 1e-12);
        previous = first;
    }
    // Analytic slope of the blend at the ends.
    const double h = 1e-6;
    EXPECT_NEAR((cubic_to_zero_weight(h) - cubic_to_zero_weight(0.0)) / h, 0.0, 1e-5);
    EXPECT_NEAR((cubic_to_zero_weight(1.0) - cubic_to_zero_weight(1.0 - h)) / h, 0.0, 1e-5);
}

TEST(Profile, AllCoincideForZeroInput)
{
    const HorizonSpec spec = make_horizon(375, 0.005);
    const std::vector<Accel3> future(spec.n_samples);
    const auto zero = generate_profile(ProfileKind::Zero, Accel3{}, spec);
    EXPECT_EQ(generate_profile(ProfileKind::Const, Accel3{}, spec), zero);
    EXPECT_EQ(generate_profile(ProfileKind::CubicToZero, Accel3{}, spec), zero);
    EXPECT_EQ(generate_profile(ProfileKind::Oracle, Accel3{}, spec, std::span<const Accel3>(future)), zero);
}

TEST(Profile, OracleCopiesFuture)
{
    const HorizonSpec spec = make_horizon(125, 0.005);
    std::vector<Accel3> future(spec.n_samples);
    for (std::size_t i = 0; i < future.size(); ++i) {
        future[i] = Accel3(0.1 * i, -0.2 * i, 1.0);
    }
    EXPECT_EQ(generate_profile(ProfileKind::Oracle, future[0], spec, std::span<const Accel3>(future)), future);
}

TEST(Profile, OracleErrors)
{
    const HorizonSpec spec = make_horizon(125, 0.005);
    EXPECT_THROW(generate_profile(ProfileKind::Oracle, Accel3{}, spec), InvalidArgument);
    const std::vector<Accel3> short_future(spec.n_samples - 1);
    EXPECT_THROW(generate_profile(ProfileKind::Oracle, Accel3{}, spec, std::span<const Accel3>(short_future)),
                 InvalidArgument);
}

TEST(Profile, NamesRoundTrip)
{
    for (ProfileKind k : kAllProfiles) {
        EXPECT_EQ(parse_profile(to_string(k)), k);
    }
    EXPECT_EQ(to_string(ProfileKind::CubicToZero), "cubic");
    EXPECT_THROW(parse_profile("linear"), InvalidArgument);
}
