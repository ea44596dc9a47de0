#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "compred/config.hpp"
#include "compred/prediction.hpp"
#include "compred/signal.hpp"
#include "compred/synth.hpp"

namespace compred {

/// Signed permutation from the lab frame to X / Y(up) / Z. Entry i names the
/// lab axis feeding output axis i.
struct AxisMap {
    std::array<int, 3> source{0, 1, 2};
    std::array<double, 3> sign{1.0, 1.0, 1.0};

    Vec3 apply(const Vec3& v) const;
    /// Parses ["x", "-z", "y"]-style specs.
    static AxisMap parse(const std::vector<std::string>& spec);
    std::vector<std::string> to_strings() const;

    friend bool operator==(const AxisMap&, const AxisMap&) = default;
};

/// A named sub-range [first, last] of CoM samples analysed as its own trial.
struct PhaseMarker {
    std::string name;
    std::size_t first = 0;
    std::size_t last = 0;

    friend bool operator==(const PhaseMarker&, const PhaseMarker&) = default;
};

struct ManifestEntry {
    std::string subject_id;
    std::string activity_id;
    int repeat_index = 1;
    bool is_static = false;
    std::optional<double> mass;
    std::filesystem::path com_file;
    std::filesystem::path grf_file;
    std::optional<double> com_rate_hz;
    std::optional<double> grf_rate_hz;
    /// Manual contact labels at GRF rate; detected automatically when absent.
    std::optional<std::vector<SampleInterval>> contacts;
    AxisMap axis_map;
    std::vector<PhaseMarker> phases;

    std::string label() const { return subject_id + "/" + activity_id + "/" + std::to_string(repeat_index); }
};

struct Manifest {
    std::vector<ManifestEntry> entries;
};

/// JSON manifest; relative file paths resolve against the manifest directory.
Manifest load_manifest(const std::filesystem::path& path);
Manifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir);
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Raw CoM file contents. Velocities are absent when the file only has positions.
struct ComSeries {
    std::vector<double> time_s;
    std::vector<Vec3> positions;
    std::optional<std::vector<Vec3>> velocities;
};

struct GrfSeries {
    std::vector<double> time_s;
    std::vector<Vec3> forces;
};

/// time_s,px,py,pz,vx,vy,vz (or time_s,px,py,pz).
ComSeries read_com_csv(const std::filesystem::path& path);
/// time_s,fx,fy,fz.
GrfSeries read_grf_csv(const std::filesystem::path& path);

void write_com_csv(const std::filesystem::path& path, const std::vector<CoMState>& states, double dt);
void write_grf_csv(const std::filesystem::path& path, const std::vector<Vec3>& forces, double sample_rate);
/// Processed trial: time_s,px,py,pz,vx,vy,vz,ax,ay,az.
void write_trial_csv(const std::filesystem::path& path, const Trial& trial);

/// Central differences (one-sided at the ends).
std::vector<Vec3> finite_difference_velocity(const std::vector<Vec3>& positions, double dt);

/// Reads both files, runs the GRF chain, converts to acceleration, aligns the
/// two timebases and splits phases. An entry with phases yields one trial per
/// phase, named "<activity>_<phase>". Truncations and velocity fallbacks are
/// appended to `notes` when given.
std::vector<Trial> load_trial(const ManifestEntry& entry, const RunConfig& config,
                              std::vector<std::string>* notes = nullptr);

/// Writes each trial as CoM and GRF CSVs (GRF held for `grf_factor` samples per
/// CoM sample) plus a manifest. Returns the manifest path.
struct SyntheticRecording {
    Trial trial;
    std::vector<PhaseMarker> phases;
};
std::filesystem::path write_synthetic_dataset(const std::vector<SyntheticRecording>& recordings,
                                              const std::filesystem::path& out_dir, double gravity = kDefaultGravity,
                                              std::size_t grf_factor = 5);

/// Ten-subject-style synthetic study: 14 activities (4 static), split phases
/// for one_leg, squat and shoe_lace.
std::vector<SyntheticRecording> synthetic_study(std::size_t subjects, std::size_t activities, std::size_t repeats,
                                                std::uint64_t seed, double dt = 0.005);

} // namespace compred
