#include "compred/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "compred/errors.hpp"

namespace compred {

namespace {

using Complex = std::complex<double>;

struct SectionState {
    double z1 = 0.0;
    double z2 = 0.0;
};

SectionState steady_state(const Biquad& s, double x)
{
    const double y = s.dc_gain() * x;
    return {y - s.b0 * x, s.b2 * x - s.a2 * y};
}

std::vector<double> axis_values(const ForceSeries& series, int axis)
{
    std::vector<double> out(series.samples.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = series.samples[i](axis);
    }
    return out;
}

} // namespace

void validate_intervals(std::span<const SampleInterval> intervals, std::size_t length)
{
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const SampleInterval& iv = intervals[i];
        if (iv.first > iv.last || iv.last >= length) {
            throw InvalidArgument("contact interval [" + std::to_string(iv.first) + ", " + std::to_string(iv.last) +
                                  "] is empty or outside a series of " + std::to_string(length) + " samples");
        }
        if (i > 0 && iv.first <= intervals[i - 1].last) {
            throw InvalidArgument("contact intervals must be sorted and non-overlapping");
        }
    }
}

std::vector<Biquad> design_butterworth_lowpass(int order, double cutoff_hz, double sample_rate)
{
    if (order < 1) {
        throw InvalidArgument("butterworth: order must be at least 1");
    }
    if (!(sample_rate > 0.0) || !(cutoff_hz > 0.0) || cutoff_hz >= sample_rate / 2.0) {
        throw InvalidArgument("butterworth: cutoff " + std::to_string(cutoff_hz) +
                              " Hz must lie strictly between 0 and Nyquist (" + std::to_string(sample_rate / 2.0) + " Hz)");
    }
    const double two_fs = 2.0 * sample_rate;
    const double warped = two_fs * std::tan(std::numbers::pi * cutoff_hz / sample_rate);

    auto to_digital = [&](Complex s) { return (two_fs + s) / (two_fs - s); };

    std::vector<Biquad> sections;
    const int n = order;
    // Upper-half-plane poles of each conjugate pair; the real pole (odd n) last.
    for (int k = 0; k < n / 2; ++k) {
        const double theta = std::numbers::pi * (2.0 * k + n + 1) / (2.0 * n);
        const Complex z = to_digital(warped * std::polar(1.0, theta));
        Biquad s;
        s.a1 = -2.0 * z.real();
        s.a2 = std::norm(z);
        const double g = (1.0 + s.a1 + s.a2) / 4.0;
        s.b0 = g;
        s.b1 = 2.0 * g;
        s.b2 = g;
        sections.push_back(s);
    }
    if (n % 2 == 1) {
        const double z = to_digital(Complex(-warped, 0.0)).real();
        Biquad s;
        s.a1 = -z;
        s.a2 = 0.0;
        const double g = (1.0 - z) / 2.0;
        s.b0 = g;
        s.b1 = g;
        s.b2 = 0.0;
        sections.push_back(s);
    }
    return sections;
}

std::vector<double> sos_filter(std::span<const Biquad> sections, std::span<const double> x)
{
    std::vector<double> y(x.begin(), x.end());
    if (y.empty()) {
        return y;
    }
    for (const Biquad& s : sections) {
        SectionState st = steady_state(s, y.front());
        for (double& v : y) {
            const double in = v;
            const double out = s.b0 * in + st.z1;
            st.z1 = s.b1 * in - s.a1 * out + st.z2;
            st.z2 = s.b2 * in - s.a2 * out;
            v = out;
        }
    }
    return y;
}

std::vector<double> sos_filtfilt(std::span<const Biquad> sections, std::span<const double> x, std::size_t padding)
{
    const std::size_t n = x.size();
    if (n < 2) {
        return {x.begin(), x.end()};
    }
    const std::size_t pad = std::min(padding, n - 1);
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) {
        ext.push_back(2.0 * x[0] - x[i]);
    }
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) {
        ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);
    }
    std::vector<double> fwd = sos_filter(sections, ext);
    std::reverse(fwd.begin(), fwd.end());
    std::vector<double> bwd = sos_filter(sections, fwd);
    std::reverse(bwd.begin(), bwd.end());
    return {bwd.begin() + static_cast<std::ptrdiff_t>(pad), bwd.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

ForceSeries clamp_noncontact(const ForceSeries& series)
{
    validate_intervals(series.contact_intervals, series.samples.size());
    ForceSeries out = series;
    std::size_t next = 0;
    for (const SampleInterval& iv : series.contact_intervals) {
        for (std::size_t i = next; i < iv.first; ++i) {
            out.samples[i].setZero();
        }
        next = iv.last + 1;
    }
    for (std::size_t i = next; i < out.samples.size(); ++i) {
        out.samples[i].setZero();
    }
    return out;
}

ForceSeries butterworth_lowpass(const ForceSeries& series, const FilterSpec& spec, bool zero_phase)
{
    const std::vector<Biquad> sections = design_butterworth_lowpass(spec.order, spec.cutoff_hz, series.sample_rate);
    ForceSeries out = series;
    for (int axis = 0; axis < 3; ++axis) {
        const std::vector<double> in = axis_values(series, axis);
        const std::vector<double> filtered =
            zero_phase ? sos_filtfilt(sections, in, spec.padding_length()) : sos_filter(sections, in);
        for (std::size_t i = 0; i < filtered.size(); ++i) {
            out.samples[i](axis) = filtered[i];
        }
    }
    return out;
}

ForceSeries downsample(const ForceSeries& series, std::size_t factor)
{
    if (factor < 1) {
        throw InvalidArgument("downsample: factor must be at least 1");
    }
    ForceSeries out;
    out.sample_rate = series.sample_rate / static_cast<double>(factor);
    for (std::size_t i = 0; i < series.samples.size(); i += factor) {
        out.samples.push_back(series.samples[i]);
    }
    for (const SampleInterval& iv : series.contact_intervals) {
        const std::size_t first = (iv.first + factor - 1) / factor;
        const std::size_t last = iv.last / factor;
        if (first <= last) {
            out.contact_intervals.push_back({first, last});
        }
    }
    return out;
}

std::vector<SampleInterval> detect_contact(const ForceSeries& series, double rise_threshold, std::size_t hold_samples)
{
    if (!(rise_threshold > 0.0)) {
        throw InvalidArgument("detect_contact: threshold must be positive");
    }
    const std::size_t hold = std::max<std::size_t>(hold_samples, 1);
    std::vector<SampleInterval> out;
    const std::size_t n = series.samples.size();
    std::size_t i = 0;
    while (i < n) {
        if (series.samples[i].y() <= rise_threshold) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && series.samples[j + 1].y() > rise_threshold) {
            ++j;
        }
        if (j - i + 1 >= hold) {
            out.push_back({i, j});
        }
        i = j + 1;
    }
    return out;
}

ForceSeries preprocess_grf(const ForceSeries& series, const FilterSpec& spec, bool zero_phase,
                           std::size_t downsample_factor, bool filter_enabled)
{
    ForceSeries out = clamp_noncontact(series);
    if (filter_enabled) {
        out = butterworth_lowpass(out, spec, zero_phase);
    }
    return downsample(out, downsample_factor);
}

} // namespace compred
