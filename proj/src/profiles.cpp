#include "compred/profiles.hpp"

#include <cmath>
#include <string>

#include "compred/errors.hpp"

namespace compred {

std::string_view to_string(ProfileKind kind)
{
    switch (kind) {
    case ProfileKind::Zero: return "zero";
    case ProfileKind::Const: return "const";
    case ProfileKind::CubicToZero: return "cubic";
    case ProfileKind::Oracle: return "oracle";
    }
    return "unknown";
}

ProfileKind parse_profile(std::string_view name)
{
    for (ProfileKind kind : kAllProfiles) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw InvalidArgument("unknown profile '" + std::string(name) + "' (expected zero|const|cubic|oracle)");
}

HorizonSpec make_horizon(double t_ms, double dt)
{
    if (!std::isfinite(dt) || dt <= 0.0) {
        throw InvalidArgument("make_horizon: dt must be positive");
    }
    if (!std::isfinite(t_ms) || t_ms <= 0.0) {
        throw InvalidArgument("make_horizon: horizon length must be positive");
    }
    const double steps = t_ms / 1000.0 / dt;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps)) {
        throw InvalidArgument("make_horizon: T = " + std::to_string(t_ms) +
                              " ms is not a whole number of samples at dt = " + std::to_string(dt));
    }
    HorizonSpec spec{t_ms, dt, static_cast<std::size_t>(rounded) + 1};
    if (spec.n_samples < 2) {
        throw InvalidArgument("make_horizon: horizon must span at least two samples");
    }
    return spec;
}

double cubic_to_zero_weight(double s)
{
    return 1.0 - 3.0 * s * s + 2.0 * s * s * s;
}

std::vector<Accel3> generate_profile(ProfileKind kind, const Accel3& u1, const HorizonSpec& spec,
                                     std::optional<std::span<const Accel3>> measured_future)
{
    const std::size_t n = spec.n_samples;
    if (n < 2) {
        throw InvalidArgument("generate_profile: horizon must span at least two samples");
    }
    if (!u1.finite()) {
        throw InvalidArgument("generate_profile: u1 is not finite");
    }
    switch (kind) {
    case ProfileKind::Zero:
        return std::vector<Accel3>(n, Accel3{});
    case ProfileKind::Const:
        return std::vector<Accel3>(n, u1);
    case ProfileKind::CubicToZero: {
        std::vector<Accel3> out(n);
        const double last = static_cast<double>(n - 1);
        for (std::size_t k = 0; k < n; ++k) {
            // Endpoints are set exactly rather than through the polynomial.
            if (k == 0) {
                out[k] = u1;
            } else if (k + 1 == n) {
                out[k] = Accel3{};
            } else {
                out[k] = Accel3(cubic_to_zero_weight(static_cast<double>(k) / last) * u1.value);
            }
        }
        return out;
    }
    case ProfileKind::Oracle:
        if (!measured_future) {
            throw InvalidArgument("generate_profile: oracle profile needs the measured future acceleration");
        }
        if (measured_future->size() != n) {
            throw InvalidArgument("generate_profile: oracle series has " + std::to_string(measured_future->size()) +
                                  " samples, horizon needs " + std::to_string(n));
        }
        return {measured_future->begin(), measured_future->end()};
    }
    throw InvalidArgument("generate_profile: unknown profile");
}

} // namespace compred
