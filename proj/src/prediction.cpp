#include "compred/prediction.hpp"

#include <algorithm>
#include <cmath>

#include "compred/errors.hpp"

namespace compred {

namespace {

int sign(double v)
{
    return (v > 0.0) - (v < 0.0);
}

void check_horizon(const Trial& trial, std::size_t start, const HorizonSpec& spec)
{
    if (std::abs(trial.dt - spec.dt) > 1e-12 * spec.dt) {
        throw InvalidArgument("trial " + trial.label() + ": sample period does not match the horizon");
    }
    if (spec.n_samples < 1 || start + spec.n_samples > trial.size()) {
        throw OutOfRange("trial " + trial.label() + ": horizon starting at " + std::to_string(start) + " with " +
                         std::to_string(spec.n_samples) + " samples runs past the end (" +
                         std::to_string(trial.size()) + " samples)");
    }
}

void build_profile(const Trial& trial, std::size_t start, const HorizonSpec& spec, ProfileKind kind,
                   std::vector<Accel3>& out)
{
    const Accel3& u1 = trial.accel_inputs[start];
    if (kind == ProfileKind::Oracle) {
        const std::span<const Accel3> future(trial.accel_inputs.data() + start, spec.n_samples);
        out.assign(future.begin(), future.end());
        return;
    }
    out = generate_profile(kind, u1, spec);
}

} // namespace

std::string Trial::label() const
{
    return subject_id + "/" + activity_id + "/" + std::to_string(repeat_index);
}

void validate_trial(const Trial& trial)
{
    if (trial.com_states.size() != trial.accel_inputs.size()) {
        throw InvalidArgument("trial " + trial.label() + ": states and accelerations differ in length");
    }
    if (trial.com_states.size() < 2) {
        throw InvalidArgument("trial " + trial.label() + ": needs at least two samples");
    }
    if (!(trial.dt > 0.0) || !(trial.mass > 0.0)) {
        throw InvalidArgument("trial " + trial.label() + ": dt and mass must be positive");
    }
    for (std::size_t k = 0; k < trial.size(); ++k) {
        const CoMState& s = trial.com_states[k];
        if (!s.position.allFinite() || !s.velocity.allFinite() || !trial.accel_inputs[k].value.allFinite()) {
            throw InvalidArgument("trial " + trial.label() + ": non-finite value at sample " + std::to_string(k));
        }
    }
}

HorizonOutcome summarize(const HorizonResult& result)
{
    HorizonOutcome out;
    out.score = result.direction_score;
    if (result.error_series.empty()) {
        return out;
    }
    double sum = 0.0;
    for (double e : result.error_series) {
        sum += e;
        out.max_error = std::max(out.max_error, e);
    }
    out.mean_error = sum / static_cast<double>(result.error_series.size());
    return out;
}

Axis dominant_axis(const Vec3& displacement)
{
    Axis best = kX;
    for (int axis : {kY, kZ}) {
        if (std::abs(displacement(axis)) > std::abs(displacement(best))) {
            best = static_cast<Axis>(axis);
        }
    }
    return best;
}

int direction_score(const Trial& trial, std::size_t start, const HorizonSpec& spec, std::span<const Vec3> predicted)
{
    check_horizon(trial, start, spec);
    if (predicted.size() != spec.n_samples) {
        throw InvalidArgument("direction_score: predicted series length does not match the horizon");
    }
    const Vec3& origin = trial.com_states[start].position;
    const Vec3 reference = trial.com_states[start + spec.n_samples - 1].position - origin;
    const Axis m = dominant_axis(reference);
    const double predicted_disp = predicted.back()(m) - origin(m);
    return sign(predicted_disp) == sign(reference(m)) ? 1 : 0;
}

HorizonResult predict_horizon(const Trial& trial, std::size_t start, const HorizonSpec& spec, ProfileKind kind)
{
    check_horizon(trial, start, spec);
    const DiscreteModel model = discretize(spec.dt);
    std::vector<Accel3> profile;
    build_profile(trial, start, spec, kind, profile);

    HorizonResult result;
    result.start_index = start;
    propagate_positions(model, trial.com_states[start],
                        std::span<const Accel3>(profile.data(), spec.n_samples - 1), result.predicted_positions);
    result.error_series.resize(spec.n_samples);
    for (std::size_t k = 0; k < spec.n_samples; ++k) {
        result.error_series[k] = (result.predicted_positions[k] - trial.com_states[start + k].position).norm();
    }
    result.direction_score = direction_score(trial, start, spec, result.predicted_positions);
    return result;
}

HorizonOutcome evaluate_horizon(const Trial& trial, const DiscreteModel& model, std::size_t start,
                                const HorizonSpec& spec, ProfileKind kind, HorizonScratch& scratch)
{
    check_horizon(trial, start, spec);
    build_profile(trial, start, spec, kind, scratch.profile);
    propagate_positions(model, trial.com_states[start],
                        std::span<const Accel3>(scratch.profile.data(), spec.n_samples - 1), scratch.positions);
    HorizonOutcome out;
    double sum = 0.0;
    for (std::size_t k = 0; k < spec.n_samples; ++k) {
        const double e = (scratch.positions[k] - trial.com_states[start + k].position).norm();
        sum += e;
        out.max_error = std::max(out.max_error, e);
    }
    out.mean_error = sum / static_cast<double>(spec.n_samples);
    out.score = direction_score(trial, start, spec, scratch.positions);
    return out;
}

std::size_t horizon_count(std::size_t trial_length, std::size_t n_samples, std::size_t stride)
{
    if (stride < 1) {
        throw InvalidArgument("stride must be at least 1");
    }
    if (trial_length < n_samples) {
        return 0;
    }
    return (trial_length - n_samples) / stride + 1;
}

namespace {

void require_length(const Trial& trial, const HorizonSpec& spec)
{
    validate_trial(trial);
    if (trial.size() < spec.n_samples) {
        throw TrialTooShort("trial " + trial.label() + " is too short for T = " + std::to_string(spec.t_ms) +
                            " ms (" + std::to_string(trial.size()) + " samples, horizon needs " +
                            std::to_string(spec.n_samples) + ")");
    }
}

} // namespace

std::vector<HorizonResult> sweep(const Trial& trial, const HorizonSpec& spec, ProfileKind kind, std::size_t stride)
{
    require_length(trial, spec);
    const std::size_t count = horizon_count(trial.size(), spec.n_samples, stride);
    std::vector<HorizonResult> out;
    out.reserve(count);
    for (std::size_t h = 0; h < count; ++h) {
        out.push_back(predict_horizon(trial, h * stride, spec, kind));
    }
    return out;
}

std::vector<HorizonOutcome> sweep_outcomes(const Trial& trial, const HorizonSpec& spec, ProfileKind kind,
                                           std::size_t stride)
{
    require_length(trial, spec);
    const DiscreteModel model = discretize(spec.dt);
    const std::size_t count = horizon_count(trial.size(), spec.n_samples, stride);
    std::vector<HorizonOutcome> out;
    out.reserve(count);
    HorizonScratch scratch;
    for (std::size_t h = 0; h < count; ++h) {
        out.push_back(evaluate_horizon(trial, model, h * stride, spec, kind, scratch));
    }
    return out;
}

} // namespace compred
