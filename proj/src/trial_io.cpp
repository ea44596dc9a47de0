#include "compred/trial_io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "compred/errors.hpp"

namespace compred {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string_view> split_csv(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    for (auto& field : out) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) {
            field.remove_suffix(1);
        }
        while (!field.empty() && field.front() == ' ') {
            field.remove_prefix(1);
        }
    }
    return out;
}

std::string join(const std::vector<std::string_view>& fields)
{
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        out += (i ? "," : "") + std::string(fields[i]);
    }
    return out;
}

// Reads a numeric CSV whose header must equal one of `headers`. Returns the
// index of the matched header and the rows.
std::pair<std::size_t, std::vector<std::vector<double>>> read_numeric_csv(
    const fs::path& path, const std::vector<std::vector<std::string_view>>& headers)
{
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError(path.string() + ": empty file");
    }
    const auto header = split_csv(line);
    std::size_t which = headers.size();
    for (std::size_t h = 0; h < headers.size(); ++h) {
        if (header == headers[h]) {
            which = h;
            break;
        }
    }
    if (which == headers.size()) {
        throw SchemaError(path.string() + ": unexpected header '" + join(header) + "', expected '" +
                          join(headers.front()) + "'");
    }
    const std::size_t columns = headers[which].size();
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != columns) {
            throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(columns) + " columns, got " + std::to_string(fields.size()));
        }
        std::vector<double> row(columns);
        for (std::size_t c = 0; c < columns; ++c) {
            try {
                row[c] = parse_double(fields[c]);
            } catch (const InvalidArgument&) {
                throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": '" + std::string(fields[c]) +
                                  "' is not a number");
            }
            if (!std::isfinite(row[c])) {
                throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": non-finite value");
            }
        }
        if (!rows.empty() && !(row[0] > rows.back()[0])) {
            throw NonMonotoneTime(path.string() + ":" + std::to_string(line_no) +
                                  ": timestamps must be strictly increasing");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw SchemaError(path.string() + ": no samples");
    }
    return {which, std::move(rows)};
}

std::ofstream open_for_write(const fs::path& path)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

void write_row(std::ostream& out, std::initializer_list<double> values)
{
    bool first = true;
    for (double v : values) {
        out << (first ? "" : ",") << format_double(v);
        first = false;
    }
    out << '\n';
}

template <typename T>
T require(const json& node, const char* key, const std::string& where)
{
    if (!node.contains(key)) {
        throw ManifestError("manifest: " + std::string(key) + " required (" + where + ")");
    }
    try {
        return node.at(key).get<T>();
    } catch (const json::exception&) {
        throw ManifestError("manifest: '" + std::string(key) + "' has the wrong type (" + where + ")");
    }
}

fs::path resolve(const fs::path& base, const std::string& p)
{
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

} // namespace

Vec3 AxisMap::apply(const Vec3& v) const
{
    return Vec3(sign[0] * v(source[0]), sign[1] * v(source[1]), sign[2] * v(source[2]));
}

AxisMap AxisMap::parse(const std::vector<std::string>& spec)
{
    if (spec.size() != 3) {
        throw ManifestError("manifest: axis_map needs three entries");
    }
    AxisMap map;
    std::array<bool, 3> used{false, false, false};
    for (std::size_t i = 0; i < 3; ++i) {
        std::string_view s = spec[i];
        double sign = 1.0;
        if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
            sign = s.front() == '-' ? -1.0 : 1.0;
            s.remove_prefix(1);
        }
        int axis = -1;
        if (s == "x" || s == "X") {
            axis = 0;
        } else if (s == "y" || s == "Y") {
            axis = 1;
        } else if (s == "z" || s == "Z") {
            axis = 2;
        }
        if (axis < 0 || used[static_cast<std::size_t>(axis)]) {
            throw ManifestError("manifest: axis_map must be a signed permutation of x, y, z");
        }
        used[static_cast<std::size_t>(axis)] = true;
        map.source[i] = axis;
        map.sign[i] = sign;
    }
    return map;
}

std::vector<std::string> AxisMap::to_strings() const
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < 3; ++i) {
        out.push_back(std::string(sign[i] < 0 ? "-" : "") + "xyz"[source[i]]);
    }
    return out;
}

Manifest parse_manifest(std::string_view json_text, const fs::path& base_dir)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ManifestError(std::string("manifest: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("trials") || !doc["trials"].is_array()) {
        throw ManifestError("manifest: expected an object with a 'trials' array");
    }
    Manifest manifest;
    std::size_t index = 0;
    for (const json& node : doc["trials"]) {
        const std::string where = "entry " + std::to_string(index++);
        ManifestEntry e;
        e.subject_id = require<std::string>(node, "subject_id", where);
        e.activity_id = require<std::string>(node, "activity_id", where);
        e.repeat_index = require<int>(node, "repeat_index", where);
        e.is_static = node.value("is_static", false);
        if (!node.contains("mass") || node["mass"].is_null()) {
            throw ManifestError("manifest: mass required (" + where + ")");
        }
        e.mass = require<double>(node, "mass", where);
        if (!(*e.mass > 0.0)) {
            throw ManifestError("manifest: mass must be positive (" + where + ")");
        }
        e.com_file = resolve(base_dir, require<std::string>(node, "com_file", where));
        e.grf_file = resolve(base_dir, require<std::string>(node, "grf_file", where));
        for (const fs::path* p : {&e.com_file, &e.grf_file}) {
            if (!fs::exists(*p)) {
                throw ManifestError("manifest: file not found: " + p->string() + " (" + where + ")");
            }
        }
        if (node.contains("com_rate_hz")) {
            e.com_rate_hz = require<double>(node, "com_rate_hz", where);
        }
        if (node.contains("grf_rate_hz")) {
            e.grf_rate_hz = require<double>(node, "grf_rate_hz", where);
        }
        if (node.contains("contacts")) {
            std::vector<SampleInterval> contacts;
            for (const auto& pair : require<std::vector<std::vector<std::size_t>>>(node, "contacts", where)) {
                if (pair.size() != 2) {
                    throw ManifestError("manifest: contacts are [first, last] pairs (" + where + ")");
                }
                contacts.push_back({pair[0], pair[1]});
            }
            e.contacts = std::move(contacts);
        }
        if (node.contains("axis_map")) {
            e.axis_map = AxisMap::parse(require<std::vector<std::string>>(node, "axis_map", where));
        }
        if (node.contains("phases")) {
            for (const json& phase : node["phases"]) {
                PhaseMarker m;
                m.name = require<std::string>(phase, "name", where);
                m.first = require<std::size_t>(phase, "first", where);
                m.last = require<std::size_t>(phase, "last", where);
                if (m.first >= m.last) {
                    throw ManifestError("manifest: phase '" + m.name + "' is empty (" + where + ")");
                }
                e.phases.push_back(std::move(m));
            }
        }
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

Manifest load_manifest(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ManifestError("cannot read manifest " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_manifest(buffer.str(), path.parent_path());
}

void save_manifest(const Manifest& manifest, const fs::path& path)
{
    const fs::path base = path.parent_path();
    json trials = json::array();
    for (const ManifestEntry& e : manifest.entries) {
        json node;
        node["subject_id"] = e.subject_id;
        node["activity_id"] = e.activity_id;
        node["repeat_index"] = e.repeat_index;
        node["is_static"] = e.is_static;
        node["mass"] = e.mass.value_or(0.0);
        node["com_file"] = fs::proximate(e.com_file, base).generic_string();
        node["grf_file"] = fs::proximate(e.grf_file, base).generic_string();
        if (e.com_rate_hz) {
            node["com_rate_hz"] = *e.com_rate_hz;
        }
        if (e.grf_rate_hz) {
            node["grf_rate_hz"] = *e.grf_rate_hz;
        }
        if (e.contacts) {
            json contacts = json::array();
            for (const SampleInterval& iv : *e.contacts) {
                contacts.push_back({iv.first, iv.last});
            }
            node["contacts"] = contacts;
        }
        node["axis_map"] = e.axis_map.to_strings();
        if (!e.phases.empty()) {
            json phases = json::array();
            for (const PhaseMarker& m : e.phases) {
                phases.push_back({{"name", m.name}, {"first", m.first}, {"last", m.last}});
            }
            node["phases"] = phases;
        }
        trials.push_back(node);
    }
    auto out = open_for_write(path);
    out << json{{"trials", trials}}.dump(2) << '\n';
}

ComSeries read_com_csv(const fs::path& path)
{
    const auto [which, rows] = read_numeric_csv(
        path, {{"time_s", "px", "py", "pz", "vx", "vy", "vz"}, {"time_s", "px", "py", "pz"}});
    ComSeries out;
    if (which == 0) {
        out.velocities.emplace();
    }
    for (const auto& r : rows) {
        out.time_s.push_back(r[0]);
        out.positions.emplace_back(r[1], r[2], r[3]);
        if (out.velocities) {
            out.velocities->emplace_back(r[4], r[5], r[6]);
        }
    }
    return out;
}

GrfSeries read_grf_csv(const fs::path& path)
{
    const auto [which, rows] = read_numeric_csv(path, {{"time_s", "fx", "fy", "fz"}});
    (void)which;
    GrfSeries out;
    for (const auto& r : rows) {
        out.time_s.push_back(r[0]);
        out.forces.emplace_back(r[1], r[2], r[3]);
    }
    return out;
}

void write_com_csv(const fs::path& path, const std::vector<CoMState>& states, double dt)
{
    auto out = open_for_write(path);
    out << "time_s,px,py,pz,vx,vy,vz\n";
    for (std::size_t k = 0; k < states.size(); ++k) {
        const CoMState& s = states[k];
        write_row(out, {static_cast<double>(k) * dt, s.position.x(), s.position.y(), s.position.z(), s.velocity.x(),
                        s.velocity.y(), s.velocity.z()});
    }
}

void write_grf_csv(const fs::path& path, const std::vector<Vec3>& forces, double sample_rate)
{
    auto out = open_for_write(path);
    out << "time_s,fx,fy,fz\n";
    for (std::size_t j = 0; j < forces.size(); ++j) {
        write_row(out, {static_cast<double>(j) / sample_rate, forces[j].x(), forces[j].y(), forces[j].z()});
    }
}

void write_trial_csv(const fs::path& path, const Trial& trial)
{
    auto out = open_for_write(path);
    out << "time_s,px,py,pz,vx,vy,vz,ax,ay,az\n";
    for (std::size_t k = 0; k < trial.size(); ++k) {
        const CoMState& s = trial.com_states[k];
        const Vec3& a = trial.accel_inputs[k].value;
        write_row(out, {static_cast<double>(k) * trial.dt, s.position.x(), s.position.y(), s.position.z(),
                        s.velocity.x(), s.velocity.y(), s.velocity.z(), a.x(), a.y(), a.z()});
    }
}

std::vector<Vec3> finite_difference_velocity(const std::vector<Vec3>& positions, double dt)
{
    const std::size_t n = positions.size();
    std::vector<Vec3> v(n, Vec3::Zero());
    if (n < 2) {
        return v;
    }
    v.front() = (positions[1] - positions[0]) / dt;
    v.back() = (positions[n - 1] - positions[n - 2]) / dt;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        v[k] = (positions[k + 1] - positions[k - 1]) / (2.0 * dt);
    }
    return v;
}

std::vector<Trial> load_trial(const ManifestEntry& entry, const RunConfig& config, std::vector<std::string>* notes)
{
    if (!entry.mass) {
        throw ManifestError("manifest: mass required (" + entry.label() + ")");
    }
    const double com_rate = entry.com_rate_hz.value_or(config.com_rate_hz);
    const double grf_rate = entry.grf_rate_hz.value_or(config.grf_rate_hz);
    if (std::abs(com_rate * config.dt - 1.0) > 1e-9) {
        throw ManifestError("manifest: CoM rate " + format_double(com_rate) + " Hz does not match dt = " +
                            format_double(config.dt) + " s (" + entry.label() + ")");
    }
    const double ratio = grf_rate / com_rate;
    if (ratio < 1.0 || std::abs(ratio - std::round(ratio)) > 1e-9) {
        throw ManifestError("manifest: GRF rate must be an integer multiple of the CoM rate (" + entry.label() + ")");
    }
    const auto factor = static_cast<std::size_t>(std::round(ratio));

    ComSeries com = read_com_csv(entry.com_file);
    const GrfSeries grf = read_grf_csv(entry.grf_file);

    ForceSeries forces;
    forces.sample_rate = grf_rate;
    forces.samples.reserve(grf.forces.size());
    for (const Vec3& f : grf.forces) {
        forces.samples.push_back(entry.axis_map.apply(f));
    }
    if (entry.contacts) {
        forces.contact_intervals = *entry.contacts;
    } else {
        forces.contact_intervals = detect_contact(forces, config.contact_threshold_n, config.contact_hold_samples);
    }
    try {
        validate_intervals(forces.contact_intervals, forces.samples.size());
    } catch (const InvalidArgument& e) {
        throw ManifestError(std::string("manifest: ") + e.what() + " (" + entry.label() + ")");
    }
    const ForceSeries processed =
        preprocess_grf(forces, config.filter, config.zero_phase, factor, config.filter_enabled);

    const std::size_t n_com = com.positions.size();
    const std::size_t n_grf = processed.samples.size();
    const std::size_t gap = n_com > n_grf ? n_com - n_grf : n_grf - n_com;
    if (gap > config.length_tolerance) {
        throw LengthMismatch(entry.label() + ": CoM has " + std::to_string(n_com) +
                             " samples but the downsampled GRF has " + std::to_string(n_grf));
    }
    const std::size_t n = std::min(n_com, n_grf);
    if (notes && gap > 0) {
        notes->push_back(entry.label() + ": truncated to " + std::to_string(n) + " samples (CoM " +
                         std::to_string(n_com) + ", GRF " + std::to_string(n_grf) + ")");
    }

    Trial trial;
    trial.subject_id = entry.subject_id;
    trial.activity_id = entry.activity_id;
    trial.repeat_index = entry.repeat_index;
    trial.is_static = entry.is_static;
    trial.mass = *entry.mass;
    trial.dt = config.dt;

    std::vector<Vec3> positions(n);
    for (std::size_t k = 0; k < n; ++k) {
        positions[k] = entry.axis_map.apply(com.positions[k]);
    }
    std::vector<Vec3> velocities;
    if (com.velocities) {
        velocities.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            velocities[k] = entry.axis_map.apply((*com.velocities)[k]);
        }
    } else if (config.velocity_fallback) {
        velocities = finite_difference_velocity(positions, config.dt);
        trial.velocity_from_differences = true;
        if (notes) {
            notes->push_back(entry.label() + ": velocities from central differences");
        }
    } else {
        throw SchemaError(entry.com_file.string() + ": velocity columns missing and velocity_fallback is off");
    }
    trial.com_states.resize(n);
    trial.accel_inputs.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        trial.com_states[k] = CoMState{positions[k], velocities[k]};
        trial.accel_inputs[k] = grf_to_acceleration(processed.samples[k], trial.mass, config.gravity);
    }
    if (trial.size() < 2) {
        throw LengthMismatch(entry.label() + ": fewer than two aligned samples");
    }

    if (entry.phases.empty()) {
        return {std::move(trial)};
    }
    std::vector<Trial> out;
    for (const PhaseMarker& phase : entry.phases) {
        if (phase.last >= n) {
            throw ManifestError("manifest: phase '" + phase.name + "' ends past the trial (" + entry.label() + ")");
        }
        Trial part = trial;
        part.activity_id = entry.activity_id + "_" + phase.name;
        part.com_states.assign(trial.com_states.begin() + static_cast<std::ptrdiff_t>(phase.first),
                               trial.com_states.begin() + static_cast<std::ptrdiff_t>(phase.last + 1));
        part.accel_inputs.assign(trial.accel_inputs.begin() + static_cast<std::ptrdiff_t>(phase.first),
                                 trial.accel_inputs.begin() + static_cast<std::ptrdiff_t>(phase.last + 1));
        out.push_back(std::move(part));
    }
    return out;
}

fs::path write_synthetic_dataset(const std::vector<SyntheticRecording>& recordings, const fs::path& out_dir,
                                 double gravity, std::size_t grf_factor)
{
    if (grf_factor < 1) {
        throw InvalidArgument("write_synthetic_dataset: GRF factor must be at least 1");
    }
    Manifest manifest;
    for (const SyntheticRecording& rec : recordings) {
        const Trial& t = rec.trial;
        validate_trial(t);
        const std::string stem = t.subject_id + "_" + t.activity_id + "_" + std::to_string(t.repeat_index);
        ManifestEntry e;
        e.subject_id = t.subject_id;
        e.activity_id = t.activity_id;
        e.repeat_index = t.repeat_index;
        e.is_static = t.is_static;
        e.mass = t.mass;
        e.com_file = out_dir / "trials" / (stem + "_com.csv");
        e.grf_file = out_dir / "trials" / (stem + "_grf.csv");
        const double com_rate = 1.0 / t.dt;
        e.com_rate_hz = com_rate;
        e.grf_rate_hz = com_rate * static_cast<double>(grf_factor);

        std::vector<Vec3> forces(t.size() * grf_factor);
        for (std::size_t j = 0; j < forces.size(); ++j) {
            const Vec3& a = t.accel_inputs[j / grf_factor].value;
            forces[j] = t.mass * (a + Vec3(0.0, gravity, 0.0));
        }
        e.contacts = std::vector<SampleInterval>{{0, forces.size() - 1}};
        e.phases = rec.phases;
        write_com_csv(e.com_file, t.com_states, t.dt);
        write_grf_csv(e.grf_file, forces, *e.grf_rate_hz);
        manifest.entries.push_back(std::move(e));
    }
    const fs::path manifest_path = out_dir / "manifest.json";
    save_manifest(manifest, manifest_path);
    return manifest_path;
}

namespace {

struct ActivityTemplate {
    const char* id;
    bool is_static;
    bool split;
    bool returns;  // out-and-back movement rather than move-and-stop
    Vec3 direction;
};

const std::array<ActivityTemplate, 14> kStudyActivities = {{
    {"sit_to_stand", false, false, false, Vec3(0.3, 1.0, 0.0)},
    {"stand_to_sit", false, false, false, Vec3(-0.3, -1.0, 0.0)},
    {"foot_on_chair", false, false, true, Vec3(0.2, 0.3, 1.0)},
    {"stride", false, false, false, Vec3(1.0, 0.0, 0.1)},
    {"look_behind", true, false, false, Vec3::Zero()},
    {"feet_together", true, false, false, Vec3::Zero()},
    {"eyes_closed", true, false, false, Vec3::Zero()},
    {"turn", false, false, true, Vec3(0.2, 0.0, 1.0)},
    {"tandem_feet", true, false, false, Vec3::Zero()},
    {"one_leg", false, true, true, Vec3(0.0, 0.1, 1.0)},
    {"squat", false, true, true, Vec3(0.1, -1.0, 0.0)},
    {"reach_forward", false, false, true, Vec3(1.0, -0.1, 0.0)},
    {"object_pickup", false, false, true, Vec3(0.6, -1.0, 0.0)},
    {"shoe_lace", false, true, true, Vec3(0.4, -1.0, 0.0)},
}};

} // namespace

std::vector<SyntheticRecording> synthetic_study(std::size_t subjects, std::size_t activities, std::size_t repeats,
                                                std::uint64_t seed, double dt)
{
    if (activities > kStudyActivities.size()) {
        throw InvalidArgument("synthetic_study: at most " + std::to_string(kStudyActivities.size()) + " activities");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    auto on_grid = [dt](double seconds) { return std::max(1.0, std::round(seconds / dt)) * dt; };
    auto samples = [dt](double seconds) { return static_cast<std::size_t>(std::round(seconds / dt)); };

    std::vector<SyntheticRecording> out;
    for (std::size_t s = 0; s < subjects; ++s) {
        const std::string subject_id = (s + 1 < 10 ? "S0" : "S") + std::to_string(s + 1);
        const double mass = uniform(50.0, 80.0);
        for (std::size_t a = 0; a < activities; ++a) {
            const ActivityTemplate& tmpl = kStudyActivities[a];
            for (std::size_t r = 0; r < repeats; ++r) {
                SyntheticSpec spec;
                spec.dt = dt;
                spec.mass = mass;
                spec.subject_id = subject_id;
                spec.activity_id = tmpl.id;
                spec.repeat_index = static_cast<int>(r + 1);
                spec.is_static = tmpl.is_static;
                spec.initial.position = Vec3(uniform(-0.05, 0.05), uniform(0.9, 1.0), uniform(-0.05, 0.05));
                std::vector<PhaseMarker> phases;

                if (tmpl.is_static) {
                    spec.kind = SyntheticKind::Sinusoid;
                    spec.frequency_hz = uniform(0.3, 0.8);
                    spec.amplitude = Vec3(uniform(0.02, 0.08), uniform(0.0, 0.01), uniform(0.02, 0.08));
                    const double w = 2.0 * std::numbers::pi * spec.frequency_hz;
                    spec.initial.velocity = -spec.amplitude / w;
                    spec.duration_s = on_grid(uniform(2.0, 3.0));
                } else {
                    spec.kind = SyntheticKind::PiecewiseConstant;
                    const Vec3 dir = tmpl.direction.normalized();
                    const double amp = uniform(0.5, 2.0);
                    const double d = on_grid(uniform(0.3, 0.6));
                    const double rest_before = on_grid(uniform(0.3, 0.6));
                    const double rest_after = on_grid(uniform(0.3, 0.6));
                    const Vec3 push = amp * dir;
                    spec.segments.push_back({rest_before, Vec3::Zero()});
                    if (tmpl.split) {
                        const double hold = on_grid(uniform(0.8, 1.2));
                        spec.segments.push_back({d, push});
                        spec.segments.push_back({d, -push});
                        spec.segments.push_back({hold, Vec3::Zero()});
                        spec.segments.push_back({d, -push});
                        spec.segments.push_back({d, push});
                        const double start_end = rest_before + 2.0 * d + 0.2;
                        const double return_begin = rest_before + 2.0 * d + hold - 0.2;
                        spec.segments.push_back({rest_after, Vec3::Zero()});
                        double total = 0.0;
                        for (const AccelSegment& seg : spec.segments) {
                            total += seg.duration_s;
                        }
                        spec.duration_s = on_grid(total);
                        phases.push_back({"start", 0, samples(start_end)});
                        phases.push_back({"return", samples(return_begin), samples(spec.duration_s) - 1});
                    } else if (tmpl.returns) {
                        spec.segments.push_back({d, push});
                        spec.segments.push_back({2.0 * d, -push});
                        spec.segments.push_back({d, push});
                    } else {
                        spec.segments.push_back({d, push});
                        spec.segments.push_back({d, -push});
                    }
                    if (!tmpl.split) {
                        spec.segments.push_back({rest_after, Vec3::Zero()});
                        double total = 0.0;
                        for (const AccelSegment& seg : spec.segments) {
                            total += seg.duration_s;
                        }
                        spec.duration_s = on_grid(total);
                    }
                }
                out.push_back({make_trial(spec), std::move(phases)});
            }
        }
    }
    return out;
}

} // namespace compred
