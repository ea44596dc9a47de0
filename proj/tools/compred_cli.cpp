// Command-line front end: preprocess, predict, metrics, analyze, synth, run, report.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "compred/errors.hpp"
#include "compred/export.hpp"
#include "compred/pipeline.hpp"
#include "compred/synth.hpp"
#include "compred/trial_io.hpp"

namespace fs = std::filesystem;
using namespace compred;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string manifest_path;
    std::string out_dir;
    std::string profiles;
    std::string horizons;
    std::string stride;
    std::string threads;
    std::string format;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_manifest)
{
    cmd->add_option("--config", o.config_path, "key = value run configuration")->check(CLI::ExistingFile);
    auto* manifest = cmd->add_option("--manifest", o.manifest_path, "trial manifest (JSON)");
    if (needs_manifest) {
        manifest->required();
    }
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--profiles", o.profiles, "comma list of zero,const,cubic,oracle");
    cmd->add_option("--horizons", o.horizons, "comma list of horizon lengths in ms");
    cmd->add_option("--stride", o.stride, "horizon start stride in samples");
    cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    cmd->add_option("--format", o.format, "csv, json or both");
}

RunConfig make_config(const CommonOptions& o)
{
    RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    const std::pair<const char*, const std::string*> overrides[] = {
        {"profiles", &o.profiles}, {"horizons_ms", &o.horizons}, {"stride", &o.stride},
        {"threads", &o.threads},   {"format", &o.format},        {"output_dir", &o.out_dir},
    };
    for (const auto& [key, value] : overrides) {
        if (!value->empty()) {
            apply_setting(c, key, *value);
        }
    }
    validate_config(c);
    return c;
}

void print_written(const std::vector<fs::path>& files)
{
    for (const fs::path& f : files) {
        std::cout << f.string() << '\n';
    }
}

void create_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    }
}

int cmd_preprocess(const CommonOptions& o)
{
    const RunConfig config = make_config(o);
    const LoadedTrials loaded = load_trials(config, load_manifest(o.manifest_path));
    const fs::path dir = config.output_dir / "trials";
    create_dir(dir);
    for (const Trial& t : loaded.trials) {
        const fs::path path = dir / (t.subject_id + "_" + t.activity_id + "_" + std::to_string(t.repeat_index) + ".csv");
        write_trial_csv(path, t);
        std::cout << path.string() << '\n';
    }
    for (const std::string& n : loaded.notes) {
        std::cerr << "note: " << n << '\n';
    }
    return 0;
}

SweepSet load_and_sweep(const RunConfig& config, const std::string& manifest_path, std::vector<std::string>& notes)
{
    const Manifest manifest = load_manifest(manifest_path);
    if (manifest.entries.empty()) {
        throw ManifestError("manifest: no trials");
    }
    LoadedTrials loaded = load_trials(config, manifest);
    notes = std::move(loaded.notes);
    return sweep_trials(config, std::move(loaded.trials));
}

int cmd_predict(const CommonOptions& o)
{
    const RunConfig config = make_config(o);
    std::vector<std::string> notes;
    const SweepSet sweeps = load_and_sweep(config, o.manifest_path, notes);
    create_dir(config.output_dir);
    write_horizons_csv(config.output_dir / "horizons.csv", config, sweeps);
    std::cout << (config.output_dir / "horizons.csv").string() << '\n';
    for (const SkipRecord& s : sweeps.skips) {
        std::cerr << "skipped " << s.subject_id << "/" << s.activity_id << "/" << s.repeat_index << ": " << s.reason
                  << '\n';
    }
    return 0;
}

int cmd_metrics(const CommonOptions& o)
{
    const RunConfig config = make_config(o);
    ResultBundle bundle;
    const SweepSet sweeps = load_and_sweep(config, o.manifest_path, bundle.notes);
    if (sweeps.trials.empty()) {
        throw AggregationError("no trial is long enough for the longest horizon");
    }
    bundle.config = config_echo(config);
    bundle.skips = sweeps.skips;
    bundle.metrics = compute_metrics(config, sweeps);
    create_dir(config.output_dir);
    std::ofstream out(config.output_dir / "metrics.csv", std::ios::binary);
    out << metrics_csv(bundle.metrics);
    if (!out) {
        throw std::runtime_error("cannot write metrics.csv");
    }
    std::cout << (config.output_dir / "metrics.csv").string() << '\n';
    return 0;
}

int cmd_analyze(const CommonOptions& o, const std::string& metrics_path)
{
    RunConfig config = make_config(o);
    ResultBundle bundle;
    bundle.config = config_echo(config);
    bundle.metrics = read_metrics_csv(metrics_path);
    if (bundle.metrics.empty()) {
        throw SchemaError(metrics_path + ": no rows");
    }
    analyze_metrics(config, bundle);
    print_written(export_results(bundle, config.output_dir, config.format));
    return 0;
}

int cmd_run(const CommonOptions& o)
{
    const RunConfig config = make_config(o);
    const ResultBundle bundle = run_pipeline(config, load_manifest(o.manifest_path));
    print_written(export_results(bundle, config.output_dir, config.format));
    return 0;
}

int cmd_report(const CommonOptions& o, const std::string& bundle_path, double step_ms)
{
    const RunConfig config = make_config(o);
    print_written({export_report(load_bundle(bundle_path), config.output_dir, step_ms)});
    return 0;
}

struct SynthOptions {
    std::string family = "study";
    std::size_t subjects = 10;
    std::size_t activities = 14;
    std::size_t repeats = 3;
    std::uint64_t seed = 1;
    double discrepancy = 1.0;
    double jitter = 0.02;
    double duration_s = 3.0;
};

int cmd_synth(const CommonOptions& o, const SynthOptions& s)
{
    const RunConfig config = make_config(o);
    std::vector<SyntheticRecording> recordings;
    if (s.family == "study") {
        recordings = synthetic_study(s.subjects, s.activities, s.repeats, s.seed, config.dt);
    } else if (s.family == "constant" || s.family == "reversal") {
        const std::vector<Trial> trials =
            s.family == "constant"
                ? constant_discrepancy_family(s.subjects, s.repeats, s.discrepancy, s.jitter, s.duration_s, s.seed,
                                              config.dt)
                : reversal_family(s.subjects, s.repeats, s.seed, config.dt);
        for (const Trial& t : trials) {
            recordings.push_back({t, {}});
        }
    } else {
        throw ConfigError("synth: family must be study, constant or reversal");
    }
    const double ratio = config.grf_rate_hz / config.com_rate_hz;
    const auto factor = static_cast<std::size_t>(std::llround(ratio));
    if (factor < 1 || std::abs(ratio - static_cast<double>(factor)) > 1e-9) {
        throw ConfigError("synth: GRF rate must be an integer multiple of the CoM rate");
    }
    std::cout << write_synthetic_dataset(recordings, config.output_dir, config.gravity, factor).string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Centre-of-mass trajectory prediction: horizon sweeps, error metrics and statistics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    CommonOptions common;
    std::string metrics_path;
    std::string bundle_path;
    double step_ms = 5.0;
    SynthOptions synth;

    auto* preprocess = app.add_subcommand("preprocess", "run the GRF signal chain and write processed trials");
    add_common(preprocess, common, true);
    auto* predict = app.add_subcommand("predict", "sweep horizons and write per-horizon errors");
    add_common(predict, common, true);
    auto* metrics = app.add_subcommand("metrics", "compute per-subject AE/ME/ADA/MDA");
    add_common(metrics, common, true);
    auto* analyze = app.add_subcommand("analyze", "fits and profile comparisons from a metrics table");
    add_common(analyze, common, false);
    analyze->add_option("--metrics", metrics_path, "metrics.csv from the metrics command")
        ->required()
        ->check(CLI::ExistingFile);
    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic validation dataset and manifest");
    add_common(synth_cmd, common, false);
    synth_cmd->add_option("--family", synth.family, "study, constant or reversal");
    synth_cmd->add_option("--subjects", synth.subjects);
    synth_cmd->add_option("--activities", synth.activities, "study only, at most 14");
    synth_cmd->add_option("--repeats", synth.repeats);
    synth_cmd->add_option("--seed", synth.seed);
    synth_cmd->add_option("--discrepancy", synth.discrepancy, "constant family |c| in m/s^2");
    synth_cmd->add_option("--jitter", synth.jitter, "constant family relative spread of |c| between subjects");
    synth_cmd->add_option("--duration", synth.duration_s, "constant family trial length in s");
    auto* run = app.add_subcommand("run", "end to end: load, sweep, metrics, statistics, export");
    add_common(run, common, true);
    auto* report = app.add_subcommand("report", "plot data (fitted curves and level intervals) from a bundle");
    add_common(report, common, false);
    report->add_option("--bundle", bundle_path, "bundle.json")->required()->check(CLI::ExistingFile);
    report->add_option("--step", step_ms, "curve spacing in ms");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*preprocess) {
            return cmd_preprocess(common);
        }
        if (*predict) {
            return cmd_predict(common);
        }
        if (*metrics) {
            return cmd_metrics(common);
        }
        if (*analyze) {
            return cmd_analyze(common, metrics_path);
        }
        if (*synth_cmd) {
            return cmd_synth(common, synth);
        }
        if (*run) {
            return cmd_run(common);
        }
        if (*report) {
            return cmd_report(common, bundle_path, step_ms);
        }
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
