#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "compred/dynamics.hpp"

namespace compred {

/// Assumed acceleration over a prediction horizon.
enum class ProfileKind {
    Zero,         // u_h = 0
    Const,        // u_h = u1
    CubicToZero,  // cubic from u1 to 0 with zero slope at both ends
    Oracle,       // measured future acceleration
};

inline constexpr std::array<ProfileKind, 4> kAllProfiles = {
    ProfileKind::Zero, ProfileKind::Const, ProfileKind::CubicToZero, ProfileKind::Oracle};

/// "zero" | "const" | "cubic" | "oracle"
std::string_view to_string(ProfileKind kind);
ProfileKind parse_profile(std::string_view name);

/// Horizon length T and its sample count at a given sample period.
struct HorizonSpec {
    double t_ms = 0.0;
    double dt = 0.0;
    std::size_t n_samples = 0;

    friend bool operator==(const HorizonSpec&, const HorizonSpec&) = default;
};

/// n_samples = T/dt + 1. Throws InvalidArgument when T is not a whole number of
/// samples or yields fewer than two samples.
HorizonSpec make_horizon(double t_ms, double dt);

/// Horizon lengths used by default, in milliseconds.
inline constexpr std::array<double, 5> kDefaultHorizonsMs = {125.0, 250.0, 375.0, 500.0, 625.0};

/// Cubic blend 1 - 3s^2 + 2s^3 on s in [0, 1].
double cubic_to_zero_weight(double s);

/// Generates u_h[1..N_s]. The last element is never consumed by propagation
/// but is kept so the profile can be inspected over the full horizon.
std::vector<Accel3> generate_profile(ProfileKind kind, const Accel3& u1, const HorizonSpec& spec,
                                     std::optional<std::span<const Accel3>> measured_future = std::nullopt);

} // namespace compred
