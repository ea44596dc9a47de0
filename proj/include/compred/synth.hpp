#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "compred/analysis.hpp"
#include "compred/metrics.hpp"
#include "compred/prediction.hpp"

namespace compred {

enum class SyntheticKind { ConstantDiscrepancy, ConstantAcceleration, Sinusoid, PiecewiseConstant };

std::string_view to_string(SyntheticKind kind);
SyntheticKind parse_synthetic_kind(std::string_view name);

struct AccelSegment {
    double duration_s = 0.0;
    Vec3 acceleration = Vec3::Zero();
};

struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::ConstantAcceleration;

    /// ConstantDiscrepancy: the true acceleration is `assumed + discrepancy`.
    /// ConstantAcceleration: the true acceleration is `discrepancy`.
    Vec3 discrepancy = Vec3::Zero();
    Vec3 assumed = Vec3::Zero();

    /// Sinusoid: amplitude * sin(2 pi f t), per axis.
    Vec3 amplitude = Vec3::Zero();
    double frequency_hz = 1.0;

    /// PiecewiseConstant: consecutive segments, zero acceleration afterwards.
    std::vector<AccelSegment> segments;

    double duration_s = 1.0;
    double dt = 0.005;
    double mass = 70.0;
    CoMState initial;

    /// Uniform noise on the recorded accelerations only, +-noise_amplitude.
    double noise_amplitude = 0.0;
    /// Integrate at dt/100 and decimate, instead of using the ZOH model itself.
    bool continuous_truth = false;

    std::string subject_id = "S01";
    std::string activity_id = "synthetic";
    int repeat_index = 1;
    bool is_static = false;
};

/// Sample count for a spec (duration / dt, must be a whole number).
std::size_t synthetic_length(const SyntheticSpec& spec);

/// Continuous acceleration of the spec at time t.
Vec3 synthetic_acceleration(const SyntheticSpec& spec, double t);

/// Builds a trial whose reference states come from propagating the true
/// acceleration. Each sample's input is the mean of the continuous acceleration
/// over its hold interval, so sinusoids converge at second order in dt.
Trial make_trial(const SyntheticSpec& spec, std::uint64_t seed = 0);

/// (k^2 - k)/2 * dt^2 * |c|, k is 1-based. Exact when the input enters
/// position with gain dt^2 (A^(k-1-i) B = (k - i) dt^2).
double analytic_error(std::size_t k, double dt, double c);
/// Mean of analytic_error over k = 1..n: dt^2 |c| (n^2 - 1) / 6.
double expected_ae(std::size_t n_samples, double dt, double c);
/// analytic_error at k = n.
double expected_me(std::size_t n_samples, double dt, double c);

/// Exact error of the zero-order-hold model (position gain dt^2/2) under a
/// constant discrepancy: (k - 1)^2 / 2 * dt^2 * |c|.
double zoh_error(std::size_t k, double dt, double c);
/// Mean over k = 1..n: dt^2 |c| (n - 1)(2n - 1) / 12.
double zoh_expected_ae(std::size_t n_samples, double dt, double c);
double zoh_expected_me(std::size_t n_samples, double dt, double c);

struct QuadraticTrendReport {
    std::vector<LevelSamples> ae_levels;
    FitResult quadratic;
    TrendSelection cascade;
    TestResult quadratic_vs_linear;
    std::optional<TestResult> cubic_vs_quadratic;
    double r_squared = 0.0;
    double quadratic_coefficient = 0.0;
    bool degenerate = false;
    bool success = false;
};

/// Sweeps every trial at every horizon, reduces to per-subject AE and fits a
/// quadratic in T. Succeeds when R^2 >= 0.999 and quadratic-vs-linear p < 0.001.
QuadraticTrendReport verify_quadratic_trend(std::span<const Trial> trials, std::span<const double> horizons_ms,
                                            ProfileKind profile, double dt = 0.005);

/// Constant-discrepancy trials: one per subject and repeat, |c| jittered by
/// +-jitter (relative) between subjects.
std::vector<Trial> constant_discrepancy_family(std::size_t subjects, std::size_t repeats, double c, double jitter,
                                               double duration_s, std::uint64_t seed, double dt = 0.005);

/// Reach-and-return movements along X: accelerate, brake through a reversal,
/// come back and stop, with rest at both ends. Durations and amplitudes vary
/// per subject and repeat.
std::vector<Trial> reversal_family(std::size_t subjects, std::size_t repeats, std::uint64_t seed, double dt = 0.005);

} // namespace compred
