#include <gtest/gtest.h>

#include <random>

#include "compred/dynamics.hpp"
#include "compred/errors.hpp"

using namespace compred;

TEST(Discretize, ClosedFormAtFiveMilliseconds)
{
    const DiscreteModel m = discretize(0.005);
    for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 6; ++c) {
            double expected = r == c ? 1.0 : 0.0;
            if (r % 2 == 0 && c == r + 1) {
                expected = 0.005;
            }
            EXPECT_EQ(m.A()(r, c), expected) << r << "," << c;
        }
    }
    for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 3; ++c) {
            double expected = 0.0;
            if (r / 2 == c) {
                expected = r % 2 == 0 ? 1.25e-5 : 0.005;
            }
            EXPECT_DOUBLE_EQ(m.B()(r, c), expected) << r << "," << c;
        }
    }
}

TEST(Discretize, PositionGainIsHalfDtSquared)
{
    for (double d : {1e-4, 0.001, 0.005, 0.01, 0.1, 1.0, 3.0}) {
        EXPECT_EQ(discretize(d).position_input_gain(), d * d / 2.0);
    }
}

TEST(Discretize, RejectsBadDt)
{
    EXPECT_THROW(discretize(0.0), InvalidArgument);
    EXPECT_THROW(discretize(-0.005), InvalidArgument);
    EXPECT_THROW(discretize(std::nan("")), InvalidArgument);
    EXPECT_THROW(discretize(INFINITY), InvalidArgument);
}

TEST(Discretize, PowersOfAHaveLinearCoupling)
{
    const double dt = 0.005;
    const DiscreteModel m = discretize(dt);
    DiscreteModel::StateMatrix ak = DiscreteModel::StateMatrix::Identity();
    for (int k = 1; k <= 200; ++k) {
        ak = ak * m.A();
        for (int axis = 0; axis < 3; ++axis) {
            EXPECT_NEAR(ak(2 * axis, 2 * axis + 1), k * dt, 1e-12 * k);
            EXPECT_EQ(ak(2 * axis, 2 * axis), 1.0);
            EXPECT_EQ(ak(2 * axis + 1, 2 * axis + 1), 1.0);
        }
    }
    const DiscreteModel::StateMatrix n = m.A() - DiscreteModel::StateMatrix::Identity();
    EXPECT_EQ((n * n).norm(), 0.0);
}

TEST(GrfToAcceleration, QuietStanding)
{
    const double m = 68.3;
    const Accel3 a = grf_to_acceleration(Vec3(0.0, m * 9.81, 0.0), m);
    EXPECT_NEAR(a.value.norm(), 0.0, 1e-14);
}

TEST(GrfToAcceleration, FreeFall)
{
    const Accel3 a = grf_to_acceleration(Vec3::Zero(), 70.0, 9.81);
    EXPECT_EQ(a.value, Vec3(0.0, -9.81, 0.0));
}

TEST(GrfToAcceleration, DirectArithmetic)
{
    const Accel3 a = grf_to_acceleration(Vec3(10.0, 700.0, -5.0), 70.0, 9.81);
    EXPECT_NEAR(a.value.x(), 1.0 / 7.0, 1e-15);
    EXPECT_NEAR(a.value.y(), 0.19, 1e-14);
    EXPECT_NEAR(a.value.z(), -1.0 / 14.0, 1e-15);
}

TEST(GrfToAcceleration, RejectsBadMass)
{
    EXPECT_THROW(grf_to_acceleration(Vec3::Zero(), 0.0), InvalidArgument);
    EXPECT_THROW(grf_to_acceleration(Vec3::Zero(), -1.0), InvalidArgument);
}

TEST(Step, Examples)
{
    const DiscreteModel m = discretize(0.005);
    EXPECT_EQ(step(m, CoMState{}, Accel3{}), CoMState{});

    CoMState moving;
    moving.velocity = Vec3(1.0, 0.0, 0.0);
    const CoMState s1 = step(m, moving, Accel3{});
    EXPECT_DOUBLE_EQ(s1.position.x(), 0.005);
    EXPECT_DOUBLE_EQ(s1.velocity.x(), 1.0);

    const CoMState s2 = step(m, CoMState{}, Accel3(2.0, 0.0, 0.0));
    EXPECT_DOUBLE_EQ(s2.position.x(), 2.5e-5);
    EXPECT_DOUBLE_EQ(s2.velocity.x(), 0.01);
}

TEST(Step, MatchesMatrixForm)
{
    const DiscreteModel m = discretize(0.005);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        const CoMState x{Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng))};
        const Accel3 a(u(rng), u(rng), u(rng));
        const auto expected = m.A() * to_vector(x) + m.B() * a.value;
        const auto got = to_vector(step(m, x, a));
        EXPECT_LT((got - expected).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(Propagate, SingleSampleHorizon)
{
    const DiscreteModel m = discretize(0.005);
    const CoMState x1{Vec3(1.0, 2.0, 3.0), Vec3(-1.0, 0.5, 0.0)};
    const auto out = propagate(m, x1, std::span<const Accel3>{}, 1);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0], x1);
}

TEST(Propagate, LengthMismatchThrows)
{
    const DiscreteModel m = discretize(0.005);
    const std::vector<Accel3> inputs(10);
    EXPECT_THROW(propagate(m, CoMState{}, inputs, 10), InvalidArgument);
    EXPECT_NO_THROW(propagate(m, CoMState{}, inputs, 11));
}

TEST(Propagate, BallisticLine)
{
    const double dt = 0.005;
    const DiscreteModel m = discretize(dt);
    const CoMState x1{Vec3(0.1, 1.0, -0.2), Vec3(0.3, -0.7, 1.1)};
    const std::vector<Accel3> inputs(125);
    const auto out = propagate(m, x1, inputs);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const Vec3 expected = x1.position + static_cast<double>(k) * dt * x1.velocity;
        EXPECT_LT((out[k].position - expected).norm(), 1e-13);
    }
}

// p[k] = p[1] + (k-1) dt v[1] + sum_{i=1}^{k-1} ((k-1-i) dt^2 + dt^2/2) u[i]   (1-based k, i)
TEST(Propagate, MatchesClosedFormSum)
{
    const double dt = 0.005;
    const DiscreteModel m = discretize(dt);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const CoMState x1{Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng))};
    std::vector<Accel3> inputs(200);
    for (auto& a : inputs) {
        a = Accel3(u(rng), u(rng), u(rng));
    }
    const auto out = propagate(m, x1, inputs);
    for (std::size_t k = 1; k <= out.size(); ++k) {
        Vec3 p = x1.position + static_cast<double>(k - 1) * dt * x1.velocity;
        Vec3 v = x1.velocity;
        for (std::size_t i = 1; i <= k - 1; ++i) {
            p += (static_cast<double>(k - 1 - i) * dt * dt + dt * dt / 2.0) * inputs[i - 1].value;
            v += dt * inputs[i - 1].value;
        }
        EXPECT_LE((out[k - 1].position - p).norm(), 1e-12 * std::max(1.0, p.norm())) << k;
        EXPECT_LE((out[k - 1].velocity - v).norm(), 1e-12 * std::max(1.0, v.norm())) << k;
    }
}

TEST(Propagate, ConstantInputFromRest)
{
    const double dt = 0.005;
    const double c = 1.7;
    const auto out = propagate(discretize(dt), CoMState{}, std::vector<Accel3>(125, Accel3(c, 0.0, 0.0)));
    for (std::size_t k = 1; k <= out.size(); ++k) {
        const double expected = static_cast<double>((k - 1) * (k - 1)) / 2.0 * dt * dt * c;
        EXPECT_NEAR(out[k - 1].position.x(), expected, 1e-12 * std::max(expected, 1e-3));
    }
}

TEST(Propagate, AxesAreDecoupled)
{
    const DiscreteModel m = discretize(0.005);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CoMState x1{Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng))};
    std::vector<Accel3> inputs(60);
    for (auto& a : inputs) {
        a = Accel3(u(rng), u(rng), u(rng));
    }
    const auto base = propagate(m, x1, inputs);
    x1.position.x() += 5.0;
    x1.velocity.x() -= 2.0;
    for (auto& a : inputs) {
        a.value.x() += u(rng);
    }
    const auto perturbed = propagate(m, x1, inputs);
    for (std::size_t k = 0; k < base.size(); ++k) {
        EXPECT_EQ(base[k].position.y(), perturbed[k].position.y());
        EXPECT_EQ(base[k].position.z(), perturbed[k].position.z());
        EXPECT_EQ(base[k].velocity.y(), perturbed[k].velocity.y());
        EXPECT_EQ(base[k].velocity.z(), perturbed[k].velocity.z());
    }
}

TEST(Propagate, Superposition)
{
    const DiscreteModel m = discretize(0.005);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto random_state = [&] { return CoMState{Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng))}; };
    const CoMState xa = random_state();
    const CoMState xb = random_state();
    std::vector<Accel3> ua(125), ub(125), sum(125);
    for (std::size_t i = 0; i < ua.size(); ++i) {
        ua[i] = Accel3(u(rng), u(rng), u(rng));
        ub[i] = Accel3(u(rng), u(rng), u(rng));
        sum[i] = Accel3(ua[i].value + ub[i].value);
    }
    const auto pa = propagate(m, xa, ua);
    const auto pb = propagate(m, xb, ub);
    const auto ps = propagate(m, CoMState{xa.position + xb.position, xa.velocity + xb.velocity}, sum);
    for (std::size_t k = 0; k < ps.size(); ++k) {
        const Vec3 expected = pa[k].position + pb[k].position;
        EXPECT_LE((ps[k].position - expected).norm(), 1e-12 * std::max(1.0, expected.norm()));
    }
}

TEST(Propagate, PositionsOnlyMatchesFullStates)
{
    const DiscreteModel m = discretize(0.005);
    std::vector<Accel3> inputs(50);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        inputs[i] = Accel3(std::sin(0.1 * i), std::cos(0.2 * i), 0.3);
    }
    const CoMState x1{Vec3(0.0, 1.0, 0.0), Vec3(0.2, 0.0, -0.1)};
    const auto full = propagate(m, x1, inputs);
    std::vector<Vec3> positions;
    propagate_positions(m, x1, inputs, positions);
    ASSERT_EQ(positions.size(), full.size());
    for (std::size_t k = 0; k < full.size(); ++k) {
        EXPECT_EQ(positions[k], full[k].position);
    }
}
