#include "compred/dynamics.hpp"

#include <cmath>
#include <string>

#include "compred/errors.hpp"

namespace compred {

DiscreteModel discretize(double dt)
{
    if (!std::isfinite(dt) || dt <= 0.0) {
        throw InvalidArgument("discretize: dt must be positive and finite, got " + std::to_string(dt));
    }
    DiscreteModel::StateMatrix a = DiscreteModel::StateMatrix::Identity();
    DiscreteModel::InputMatrix b = DiscreteModel::InputMatrix::Zero();
    for (int axis = 0; axis < 3; ++axis) {
        const int p = 2 * axis;
        a(p, p + 1) = dt;
        b(p, axis) = 0.5 * dt * dt;
        b(p + 1, axis) = dt;
    }
    return DiscreteModel(dt, a, b);
}

Accel3 grf_to_acceleration(const Vec3& grf, double mass, double gravity)
{
    if (!std::isfinite(mass) || mass <= 0.0) {
        throw InvalidArgument("grf_to_acceleration: mass must be positive");
    }
    if (!grf.allFinite() || !std::isfinite(gravity)) {
        throw InvalidArgument("grf_to_acceleration: non-finite input");
    }
    return Accel3(grf.x() / mass, (grf.y() - mass * gravity) / mass, grf.z() / mass);
}

Eigen::Matrix<double, 6, 1> to_vector(const CoMState& x)
{
    Eigen::Matrix<double, 6, 1> v;
    for (int axis = 0; axis < 3; ++axis) {
        v(2 * axis) = x.position(axis);
        v(2 * axis + 1) = x.velocity(axis);
    }
    return v;
}

CoMState from_vector(const Eigen::Matrix<double, 6, 1>& v)
{
    CoMState x;
    for (int axis = 0; axis < 3; ++axis) {
        x.position(axis) = v(2 * axis);
        x.velocity(axis) = v(2 * axis + 1);
    }
    return x;
}

// A and B only couple (p, v) within an axis, so A x + B u is evaluated per axis
// with the coupling entries read back from the matrices.
CoMState step(const DiscreteModel& model, const CoMState& x, const Accel3& u)
{
    const double coupling = model.A()(0, 1);
    const double pos_gain = model.B()(0, 0);
    const double vel_gain = model.B()(1, 0);
    CoMState next;
    next.position = x.position + coupling * x.velocity + pos_gain * u.value;
    next.velocity = x.velocity + vel_gain * u.value;
    return next;
}

std::vector<CoMState> propagate(const DiscreteModel& model, const CoMState& x1,
                                std::span<const Accel3> inputs)
{
    std::vector<CoMState> out;
    out.reserve(inputs.size() + 1);
    out.push_back(x1);
    for (const Accel3& u : inputs) {
        out.push_back(step(model, out.back(), u));
    }
    return out;
}

std::vector<CoMState> propagate(const DiscreteModel& model, const CoMState& x1,
                                std::span<const Accel3> inputs, std::size_t n_samples)
{
    if (n_samples < 1 || inputs.size() + 1 != n_samples) {
        throw InvalidArgument("propagate: expected " + std::to_string(n_samples == 0 ? 0 : n_samples - 1) +
                              " inputs, got " + std::to_string(inputs.size()));
    }
    return propagate(model, x1, inputs);
}

void propagate_positions(const DiscreteModel& model, const CoMState& x1,
                         std::span<const Accel3> inputs, std::vector<Vec3>& positions)
{
    positions.resize(inputs.size() + 1);
    CoMState x = x1;
    positions[0] = x.position;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        x = step(model, x, inputs[i]);
        positions[i + 1] = x.position;
    }
}

} // namespace compred
