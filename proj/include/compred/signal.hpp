#pragma once

#include <optional>
#include <span>
#include <vector>

#include "compred/dynamics.hpp"

namespace compred {

/// Closed index range [first, last] at the series' own sample rate (0-based).
struct SampleInterval {
    std::size_t first = 0;
    std::size_t last = 0;

    friend bool operator==(const SampleInterval&, const SampleInterval&) = default;
};

struct ForceSeries {
    double sample_rate = 1000.0;  // Hz
    std::vector<Vec3> samples;    // N
    std::vector<SampleInterval> contact_intervals;
};

struct FilterSpec {
    int order = 5;
    double cutoff_hz = 20.0;
    /// Reflection length for zero-phase filtering; 3*(2*order+1) when unset.
    std::optional<std::size_t> padding;

    std::size_t padding_length() const { return padding.value_or(3 * (2 * static_cast<std::size_t>(order) + 1)); }
};

/// One second-order section, direct form II transposed, a0 = 1.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;

    double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

/// Digital Butterworth lowpass as cascaded sections (bilinear transform with
/// prewarping). Odd orders end in a first-order section stored with b2 = a2 = 0.
/// Every section has unit DC gain.
std::vector<Biquad> design_butterworth_lowpass(int order, double cutoff_hz, double sample_rate);

/// Runs the cascade over one channel. The section states start at the steady
/// state for a constant input equal to x[0].
std::vector<double> sos_filter(std::span<const Biquad> sections, std::span<const double> x);

/// Forward-backward application with odd reflective padding.
std::vector<double> sos_filtfilt(std::span<const Biquad> sections, std::span<const double> x, std::size_t padding);

/// Samples outside every contact interval become exactly zero.
ForceSeries clamp_noncontact(const ForceSeries& series);

/// Filters each axis independently.
ForceSeries butterworth_lowpass(const ForceSeries& series, const FilterSpec& spec, bool zero_phase = true);

/// Keeps samples 0, factor, 2*factor, ... and divides the sample rate.
ForceSeries downsample(const ForceSeries& series, std::size_t factor);

/// Runs of the vertical (Y) force above rise_threshold lasting at least
/// hold_samples samples.
std::vector<SampleInterval> detect_contact(const ForceSeries& series, double rise_threshold, std::size_t hold_samples);

/// clamp -> lowpass -> downsample.
ForceSeries preprocess_grf(const ForceSeries& series, const FilterSpec& spec, bool zero_phase,
                           std::size_t downsample_factor, bool filter_enabled = true);

void validate_intervals(std::span<const SampleInterval> intervals, std::size_t length);

} // namespace compred
