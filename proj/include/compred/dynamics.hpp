#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace compred {

using Vec3 = Eigen::Vector3d;

enum Axis : int { kX = 0, kY = 1, kZ = 2 };

/// Point-mass state. X and Z are horizontal, Y points up (against gravity).
struct CoMState {
    Vec3 position = Vec3::Zero();  // m
    Vec3 velocity = Vec3::Zero();  // m/s

    bool finite() const { return position.allFinite() && velocity.allFinite(); }

    friend bool operator==(const CoMState&, const CoMState&) = default;
};

/// CoM acceleration (m/s^2), the input of the double integrator.
struct Accel3 {
    Vec3 value = Vec3::Zero();

    Accel3() = default;
    explicit Accel3(const Vec3& v) : value(v) {}
    Accel3(double x, double y, double z) : value(x, y, z) {}

    bool finite() const { return value.allFinite(); }

    friend bool operator==(const Accel3&, const Accel3&) = default;
};

inline constexpr double kDefaultGravity = 9.81;

/// Zero-order-hold discretization of the 3-axis double integrator.
/// State ordering follows (pX, vX, pY, vY, pZ, vZ).
class DiscreteModel {
public:
    using StateMatrix = Eigen::Matrix<double, 6, 6>;
    using InputMatrix = Eigen::Matrix<double, 6, 3>;

    double dt() const { return dt_; }
    const StateMatrix& A() const { return a_; }
    const InputMatrix& B() const { return b_; }

    /// Position gain of the input, B(0,0) = dt^2/2.
    double position_input_gain() const { return b_(0, 0); }

private:
    friend DiscreteModel discretize(double dt);
    DiscreteModel(double dt, const StateMatrix& a, const InputMatrix& b) : dt_(dt), a_(a), b_(b) {}

    double dt_;
    StateMatrix a_;
    InputMatrix b_;
};

/// Exact closed-form A and B for sample period dt (the continuous system is
/// nilpotent, so no matrix exponential is involved). Throws InvalidArgument
/// for non-positive or non-finite dt.
DiscreteModel discretize(double dt);

/// GRF (N) to CoM acceleration: u = (R - m*g*ey) / m.
Accel3 grf_to_acceleration(const Vec3& grf, double mass, double gravity = kDefaultGravity);

/// x' = A x + B u.
CoMState step(const DiscreteModel& model, const CoMState& x, const Accel3& u);

/// Forward-integrates from x1 through inputs.size() steps; the result has
/// inputs.size() + 1 states and starts with x1.
std::vector<CoMState> propagate(const DiscreteModel& model, const CoMState& x1,
                                std::span<const Accel3> inputs);

/// Checked form: inputs must hold exactly n_samples - 1 accelerations.
std::vector<CoMState> propagate(const DiscreteModel& model, const CoMState& x1,
                                std::span<const Accel3> inputs, std::size_t n_samples);

/// Same as propagate(), but keeps positions only. Used in the hot sweep loop.
void propagate_positions(const DiscreteModel& model, const CoMState& x1,
                         std::span<const Accel3> inputs, std::vector<Vec3>& positions);

/// Stacks a state into the 6-vector layout used by A and B.
Eigen::Matrix<double, 6, 1> to_vector(const CoMState& x);
CoMState from_vector(const Eigen::Matrix<double, 6, 1>& v);

} // namespace compred
