#pragma once

#include <string>
#include <vector>

#include "compred/dynamics.hpp"
#include "compred/profiles.hpp"

namespace compred {

/// One recording: reference CoM states and CoM accelerations on a common timebase.
struct Trial {
    std::string subject_id;
    std::string activity_id;
    int repeat_index = 0;
    bool is_static = false;
    double mass = 0.0;  // kg
    double dt = 0.0;    // s
    std::vector<CoMState> com_states;
    std::vector<Accel3> accel_inputs;
    /// Velocities were reconstructed by central differences.
    bool velocity_from_differences = false;

    std::size_t size() const { return com_states.size(); }
    /// "subject/activity/repeat", used in messages and reports.
    std::string label() const;
};

/// Throws InvalidArgument when a Trial breaks its invariants.
void validate_trial(const Trial& trial);

struct HorizonResult {
    std::size_t start_index = 0;          // 0-based sample of the trial
    std::vector<Vec3> predicted_positions;  // N_s
    std::vector<double> error_series;       // e[k], N_s
    int direction_score = 0;                // 0 or 1
};

/// Reduced form of a HorizonResult; the metric layer only needs these.
struct HorizonOutcome {
    double mean_error = 0.0;
    double max_error = 0.0;
    int score = 0;

    friend bool operator==(const HorizonOutcome&, const HorizonOutcome&) = default;
};

HorizonOutcome summarize(const HorizonResult& result);

/// Predicts positions over [start, start + N_s) from the reference state at
/// `start` and the profile built from accel_inputs[start].
HorizonResult predict_horizon(const Trial& trial, std::size_t start, const HorizonSpec& spec, ProfileKind kind);

/// Same computation without materialising the series. `scratch` is reused
/// between calls to avoid allocations in long sweeps.
struct HorizonScratch {
    std::vector<Accel3> profile;
    std::vector<Vec3> positions;
};
HorizonOutcome evaluate_horizon(const Trial& trial, const DiscreteModel& model, std::size_t start,
                                const HorizonSpec& spec, ProfileKind kind, HorizonScratch& scratch);

/// 1 when the predicted displacement along the reference's dominant axis has
/// the reference's sign. Ties between axes resolve X, then Y, then Z.
int direction_score(const Trial& trial, std::size_t start, const HorizonSpec& spec,
                    std::span<const Vec3> predicted);

/// Axis with the largest |p[N_s] - p[1]| of a reference displacement.
Axis dominant_axis(const Vec3& displacement);

/// Horizons starting at 0, stride, 2*stride, ... while the horizon fits.
std::vector<HorizonResult> sweep(const Trial& trial, const HorizonSpec& spec, ProfileKind kind,
                                 std::size_t stride = 1);

/// Outcome-only sweep used by the pipeline.
std::vector<HorizonOutcome> sweep_outcomes(const Trial& trial, const HorizonSpec& spec, ProfileKind kind,
                                           std::size_t stride = 1);

/// Number of horizon starts a sweep visits.
std::size_t horizon_count(std::size_t trial_length, std::size_t n_samples, std::size_t stride = 1);

} // namespace compred
