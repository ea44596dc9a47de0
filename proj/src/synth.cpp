#include "compred/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "compred/errors.hpp"

namespace compred {

namespace {

// Mean of the continuous acceleration over [t0, t0 + h].
Vec3 hold_average(const SyntheticSpec& spec, double t0, double h)
{
    switch (spec.kind) {
    case SyntheticKind::ConstantDiscrepancy:
        return spec.assumed + spec.discrepancy;
    case SyntheticKind::ConstantAcceleration:
        return spec.discrepancy;
    case SyntheticKind::Sinusoid: {
        const double w = 2.0 * std::numbers::pi * spec.frequency_hz;
        const double factor = (std::cos(w * t0) - std::cos(w * (t0 + h))) / (w * h);
        return spec.amplitude * factor;
    }
    case SyntheticKind::PiecewiseConstant: {
        Vec3 acc = Vec3::Zero();
        double start = 0.0;
        for (const AccelSegment& seg : spec.segments) {
            const double end = start + seg.duration_s;
            const double overlap = std::min(end, t0 + h) - std::max(start, t0);
            if (overlap > 0.0) {
                acc += overlap * seg.acceleration;
            }
            start = end;
        }
        return acc / h;
    }
    }
    return Vec3::Zero();
}

void validate(const SyntheticSpec& spec)
{
    if (!(spec.dt > 0.0) || !std::isfinite(spec.dt)) {
        throw InvalidArgument("synthetic spec: dt must be positive");
    }
    if (!(spec.duration_s > 0.0) || !std::isfinite(spec.duration_s)) {
        throw InvalidArgument("synthetic spec: duration must be positive");
    }
    if (!(spec.mass > 0.0)) {
        throw InvalidArgument("synthetic spec: mass must be positive");
    }
    if (!(spec.noise_amplitude >= 0.0)) {
        throw InvalidArgument("synthetic spec: noise amplitude must be non-negative");
    }
    if (!spec.initial.finite() || !spec.discrepancy.allFinite() || !spec.assumed.allFinite() ||
        !spec.amplitude.allFinite()) {
        throw InvalidArgument("synthetic spec: non-finite parameter");
    }
    if (spec.kind == SyntheticKind::Sinusoid && !(spec.frequency_hz > 0.0)) {
        throw InvalidArgument("synthetic spec: sinusoid frequency must be positive");
    }
    if (spec.kind == SyntheticKind::PiecewiseConstant) {
        if (spec.segments.empty()) {
            throw InvalidArgument("synthetic spec: piecewise schedule is empty");
        }
        for (const AccelSegment& seg : spec.segments) {
            if (!(seg.duration_s > 0.0) || !std::isfinite(seg.duration_s) || !seg.acceleration.allFinite()) {
                throw InvalidArgument("synthetic spec: schedule segments need positive durations and finite values");
            }
        }
    }
}

} // namespace

std::string_view to_string(SyntheticKind kind)
{
    switch (kind) {
    case SyntheticKind::ConstantDiscrepancy: return "constant_discrepancy";
    case SyntheticKind::ConstantAcceleration: return "constant_acceleration";
    case SyntheticKind::Sinusoid: return "sinusoid";
    case SyntheticKind::PiecewiseConstant: return "piecewise_constant";
    }
    return "unknown";
}

SyntheticKind parse_synthetic_kind(std::string_view name)
{
    for (SyntheticKind k : {SyntheticKind::ConstantDiscrepancy, SyntheticKind::ConstantAcceleration,
                            SyntheticKind::Sinusoid, SyntheticKind::PiecewiseConstant}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw InvalidArgument("unknown synthetic kind '" + std::string(name) + "'");
}

std::size_t synthetic_length(const SyntheticSpec& spec)
{
    validate(spec);
    const double steps = spec.duration_s / spec.dt;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps) || rounded < 2.0) {
        throw InvalidArgument("synthetic spec: duration must be a whole number (>= 2) of samples");
    }
    return static_cast<std::size_t>(rounded);
}

Vec3 synthetic_acceleration(const SyntheticSpec& spec, double t)
{
    switch (spec.kind) {
    case SyntheticKind::ConstantDiscrepancy:
        return spec.assumed + spec.discrepancy;
    case SyntheticKind::ConstantAcceleration:
        return spec.discrepancy;
    case SyntheticKind::Sinusoid:
        return spec.amplitude * std::sin(2.0 * std::numbers::pi * spec.frequency_hz * t);
    case SyntheticKind::PiecewiseConstant: {
        double start = 0.0;
        for (const AccelSegment& seg : spec.segments) {
            if (t >= start && t < start + seg.duration_s) {
                return seg.acceleration;
            }
            start += seg.duration_s;
        }
        return Vec3::Zero();
    }
    }
    return Vec3::Zero();
}

Trial make_trial(const SyntheticSpec& spec, std::uint64_t seed)
{
    const std::size_t n = synthetic_length(spec);
    Trial trial;
    trial.subject_id = spec.subject_id;
    trial.activity_id = spec.activity_id;
    trial.repeat_index = spec.repeat_index;
    trial.is_static = spec.is_static;
    trial.mass = spec.mass;
    trial.dt = spec.dt;
    trial.accel_inputs.resize(n);
    trial.com_states.resize(n);

    if (!spec.continuous_truth) {
        const DiscreteModel model = discretize(spec.dt);
        for (std::size_t k = 0; k < n; ++k) {
            trial.accel_inputs[k] = Accel3(hold_average(spec, static_cast<double>(k) * spec.dt, spec.dt));
        }
        trial.com_states = propagate(model, spec.initial, std::span<const Accel3>(trial.accel_inputs.data(), n - 1));
    } else {
        constexpr int kSubsteps = 100;
        const double h = spec.dt / kSubsteps;
        const DiscreteModel fine = discretize(h);
        CoMState x = spec.initial;
        for (std::size_t k = 0; k < n; ++k) {
            const double t0 = static_cast<double>(k) * spec.dt;
            trial.com_states[k] = x;
            trial.accel_inputs[k] = Accel3(synthetic_acceleration(spec, t0));
            if (k + 1 == n) {
                break;
            }
            for (int j = 0; j < kSubsteps; ++j) {
                x = step(fine, x, Accel3(hold_average(spec, t0 + j * h, h)));
            }
        }
    }

    if (spec.noise_amplitude > 0.0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> noise(-spec.noise_amplitude, spec.noise_amplitude);
        for (Accel3& u : trial.accel_inputs) {
            for (int axis = 0; axis < 3; ++axis) {
                u.value(axis) += noise(rng);
            }
        }
    }
    return trial;
}

double analytic_error(std::size_t k, double dt, double c)
{
    if (k < 1) {
        throw InvalidArgument("analytic_error: k is 1-based");
    }
    const double kk = static_cast<double>(k);
    return (kk * kk - kk) / 2.0 * dt * dt * std::abs(c);
}

double expected_ae(std::size_t n_samples, double dt, double c)
{
    if (n_samples < 1) {
        throw InvalidArgument("expected_ae: at least one sample");
    }
    const double n = static_cast<double>(n_samples);
    return dt * dt * std::abs(c) * (n * n - 1.0) / 6.0;
}

double expected_me(std::size_t n_samples, double dt, double c)
{
    return analytic_error(n_samples, dt, c);
}

double zoh_error(std::size_t k, double dt, double c)
{
    if (k < 1) {
        throw InvalidArgument("zoh_error: k is 1-based");
    }
    const double j = static_cast<double>(k - 1);
    return j * j / 2.0 * dt * dt * std::abs(c);
}

double zoh_expected_ae(std::size_t n_samples, double dt, double c)
{
    if (n_samples < 1) {
        throw InvalidArgument("zoh_expected_ae: at least one sample");
    }
    const double n = static_cast<double>(n_samples);
    return dt * dt * std::abs(c) * (n - 1.0) * (2.0 * n - 1.0) / 12.0;
}

double zoh_expected_me(std::size_t n_samples, double dt, double c)
{
    return zoh_error(n_samples, dt, c);
}

QuadraticTrendReport verify_quadratic_trend(std::span<const Trial> trials, std::span<const double> horizons_ms,
                                            ProfileKind profile, double dt)
{
    if (trials.empty() || horizons_ms.size() < 4) {
        throw InvalidArgument("verify_quadratic_trend: needs trials and at least four horizon lengths");
    }
    QuadraticTrendReport report;
    for (double t_ms : horizons_ms) {
        const HorizonSpec spec = make_horizon(t_ms, dt);
        std::vector<std::vector<HorizonOutcome>> outcomes;
        outcomes.reserve(trials.size());
        for (const Trial& trial : trials) {
            outcomes.push_back(sweep_outcomes(trial, spec, profile));
        }
        LevelSamples level{t_ms, {}};
        for (const SubjectOutcomes& subject : group_outcomes(trials, outcomes)) {
            level.values.push_back(average_error(subject.activities));
        }
        report.ae_levels.push_back(std::move(level));
    }

    report.cascade = select_trend(report.ae_levels);
    report.quadratic = *report.cascade.quadratic;
    report.quadratic_vs_linear = nested_f_test(*report.cascade.linear, report.quadratic);
    if (report.cascade.cubic) {
        report.cubic_vs_quadratic = nested_f_test(report.quadratic, *report.cascade.cubic);
    }
    report.r_squared = report.quadratic.r_squared;
    report.quadratic_coefficient = report.quadratic.coefficients.at(2);
    report.degenerate = report.quadratic.degenerate || report.quadratic.any_weight_fallback();
    report.success = !report.quadratic.degenerate && report.r_squared >= 0.999 &&
                     report.quadratic_vs_linear.p_value < 0.001;
    return report;
}

std::vector<Trial> constant_discrepancy_family(std::size_t subjects, std::size_t repeats, double c, double jitter,
                                               double duration_s, std::uint64_t seed, double dt)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Trial> trials;
    for (std::size_t s = 0; s < subjects; ++s) {
        const double magnitude = c * (1.0 + jitter * unit(rng));
        Vec3 direction(unit(rng), unit(rng), unit(rng));
        if (direction.norm() < 1e-3) {
            direction = Vec3::UnitX();
        }
        direction.normalize();
        for (std::size_t r = 0; r < repeats; ++r) {
            SyntheticSpec spec;
            spec.kind = SyntheticKind::ConstantDiscrepancy;
            spec.discrepancy = magnitude * direction;
            spec.duration_s = duration_s;
            spec.dt = dt;
            spec.initial.position = Vec3(unit(rng), 1.0 + 0.1 * unit(rng), unit(rng));
            spec.initial.velocity = 0.2 * Vec3(unit(rng), unit(rng), unit(rng));
            spec.subject_id = "S" + std::to_string(s + 1);
            spec.activity_id = "constant";
            spec.repeat_index = static_cast<int>(r + 1);
            trials.push_back(make_trial(spec));
        }
    }
    return trials;
}

std::vector<Trial> reversal_family(std::size_t subjects, std::size_t repeats, std::uint64_t seed, double dt)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto on_grid = [dt](double seconds) { return std::max(1.0, std::round(seconds / dt)) * dt; };

    std::vector<Trial> trials;
    for (std::size_t s = 0; s < subjects; ++s) {
        for (std::size_t r = 0; r < repeats; ++r) {
            const double amp = 0.5 + unit(rng);
            const double phase = on_grid(0.3 + 0.3 * unit(rng));
            const double rest_before = on_grid(0.2 + 0.3 * unit(rng));
            const double rest_after = on_grid(0.2 + 0.3 * unit(rng));

            SyntheticSpec spec;
            spec.kind = SyntheticKind::PiecewiseConstant;
            spec.segments = {
                {rest_before, Vec3::Zero()},
                {phase, Vec3(amp, 0.0, 0.0)},
                {2.0 * phase, Vec3(-amp, 0.0, 0.0)},
                {phase, Vec3(amp, 0.0, 0.0)},
                {rest_after, Vec3::Zero()},
            };
            double total = 0.0;
            for (const AccelSegment& seg : spec.segments) {
                total += seg.duration_s;
            }
            spec.duration_s = std::round(total / dt) * dt;
            spec.dt = dt;
            spec.initial.position = Vec3(0.0, 1.0, 0.0);
            spec.subject_id = "S" + std::to_string(s + 1);
            spec.activity_id = "reach";
            spec.repeat_index = static_cast<int>(r + 1);
            trials.push_back(make_trial(spec));
        }
    }
    return trials;
}

} // namespace compred
