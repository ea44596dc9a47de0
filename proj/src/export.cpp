#include "compred/export.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "compred/errors.hpp"

namespace compred {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(s);
    }
    std::string out = "\"";
    for (char c : s) {
        out += c == '"' ? "\"\"" : std::string(1, c);
    }
    return out + "\"";
}

std::string opt(const std::optional<double>& v)
{
    return v ? format_double(*v) : "";
}

std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back();
        } else if (c != '\r') {
            out.back() += c;
        }
    }
    return out;
}

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

ojson num(double v)
{
    if (std::isfinite(v)) {
        return v;
    }
    return format_double(v);
}

ojson num(const std::optional<double>& v)
{
    return v ? num(*v) : ojson(nullptr);
}

double get_num(const ojson& j)
{
    if (j.is_number()) {
        return j.get<double>();
    }
    if (j.is_string()) {
        return parse_double(j.get<std::string>());
    }
    throw SchemaError("bundle: expected a number");
}

std::optional<double> get_opt(const ojson& j)
{
    if (j.is_null()) {
        return std::nullopt;
    }
    return get_num(j);
}

std::string comparisons_csv(const std::vector<ComparisonRow>& rows)
{
    std::string out = "metric,horizon_ms,comparison,statistic,df1,df2,p_value,adjusted_p,cohens_d,effect,note\n";
    for (const ComparisonRow& r : rows) {
        out += r.metric + "," + format_double(r.horizon_ms) + "," + csv_field(r.comparison) + "," +
               format_double(r.statistic) + "," + format_double(r.df1) + "," + format_double(r.df2) + "," +
               format_double(r.p_value) + "," + opt(r.adjusted_p) + "," + opt(r.cohens_d) + "," + r.effect + "," +
               csv_field(r.note) + "\n";
    }
    return out;
}

std::string fits_csv(const std::vector<FitRow>& rows)
{
    std::string out = "metric,profile,degree,selected,c0,c1,c2,c3,r_squared,f_p_value,weight_fallback,degenerate\n";
    for (const FitRow& r : rows) {
        out += r.metric + "," + std::string(to_string(r.profile)) + "," + std::to_string(r.degree) + "," +
               (r.selected ? "1" : "0");
        for (std::size_t j = 0; j < 4; ++j) {
            out += "," + (j < r.coefficients.size() ? format_double(r.coefficients[j]) : std::string());
        }
        out += "," + format_double(r.r_squared) + "," + opt(r.f_p_value) + "," + (r.weight_fallback ? "1" : "0") +
               "," + (r.degenerate ? "1" : "0") + "\n";
    }
    return out;
}

std::string levels_csv(const std::vector<LevelRow>& rows)
{
    std::string out = "metric,profile,horizon_ms,n,mean,ci_low,ci_high\n";
    for (const LevelRow& r : rows) {
        out += r.metric + "," + std::string(to_string(r.profile)) + "," + format_double(r.horizon_ms) + "," +
               std::to_string(r.n) + "," + format_double(r.mean) + "," + format_double(r.ci_low) + "," +
               format_double(r.ci_high) + "\n";
    }
    return out;
}

std::string skips_csv(const std::vector<SkipRecord>& rows)
{
    std::string out = "subject_id,activity_id,repeat_index,reason\n";
    for (const SkipRecord& r : rows) {
        out += csv_field(r.subject_id) + "," + csv_field(r.activity_id) + "," + std::to_string(r.repeat_index) + "," +
               csv_field(r.reason) + "\n";
    }
    return out;
}

fs::path write_text(const fs::path& dir, const char* name, const std::string& text)
{
    const fs::path path = dir / name;
    auto out = open_output(path);
    out << text;
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return path;
}

} // namespace

std::string metrics_csv(const std::vector<MetricSummary>& rows)
{
    std::string out = std::string(kMetricsHeader) + "\n";
    for (const MetricSummary& r : rows) {
        out += csv_field(r.subject_id) + "," + std::string(to_string(r.profile)) + "," + format_double(r.horizon_ms) +
               "," + format_double(r.ae) + "," + format_double(r.me) + "," + opt(r.ada) + "," + opt(r.mda) + "\n";
    }
    return out;
}

std::vector<MetricSummary> read_metrics_csv(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kMetricsHeader)) {
        throw SchemaError(path.string() + ": expected header '" + kMetricsHeader + "'");
    }
    std::vector<MetricSummary> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto f = split_csv_line(line);
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (f.size() != 7) {
            throw SchemaError(where + ": expected 7 columns");
        }
        try {
            MetricSummary r;
            r.subject_id = f[0];
            r.profile = parse_profile(f[1]);
            r.horizon_ms = parse_double(f[2]);
            r.ae = parse_double(f[3]);
            r.me = parse_double(f[4]);
            if (!f[5].empty()) {
                r.ada = parse_double(f[5]);
            }
            if (!f[6].empty()) {
                r.mda = parse_double(f[6]);
            }
            rows.push_back(std::move(r));
        } catch (const InvalidArgument& e) {
            throw SchemaError(where + ": " + e.what());
        }
    }
    return rows;
}

std::string bundle_to_json(const ResultBundle& b)
{
    ojson doc;
    doc["version"] = b.version;
    ojson config = ojson::object();
    for (const auto& [key, value] : b.config) {
        config[key] = value;
    }
    doc["config"] = config;

    ojson metrics = ojson::array();
    for (const MetricSummary& r : b.metrics) {
        metrics.push_back({{"subject_id", r.subject_id},
                           {"profile", to_string(r.profile)},
                           {"horizon_ms", num(r.horizon_ms)},
                           {"ae_m", num(r.ae)},
                           {"me_m", num(r.me)},
                           {"ada", num(r.ada)},
                           {"mda", num(r.mda)}});
    }
    doc["metrics"] = metrics;

    ojson fits = ojson::array();
    for (const FitRow& r : b.fits) {
        ojson coefficients = ojson::array();
        for (double c : r.coefficients) {
            coefficients.push_back(num(c));
        }
        fits.push_back({{"metric", r.metric},
                        {"profile", to_string(r.profile)},
                        {"degree", r.degree},
                        {"selected", r.selected},
                        {"coefficients", coefficients},
                        {"r_squared", num(r.r_squared)},
                        {"f_p_value", num(r.f_p_value)},
                        {"weight_fallback", r.weight_fallback},
                        {"degenerate", r.degenerate}});
    }
    doc["fits"] = fits;

    ojson levels = ojson::array();
    for (const LevelRow& r : b.levels) {
        levels.push_back({{"metric", r.metric},
                          {"profile", to_string(r.profile)},
                          {"horizon_ms", num(r.horizon_ms)},
                          {"n", r.n},
                          {"mean", num(r.mean)},
                          {"ci_low", num(r.ci_low)},
                          {"ci_high", num(r.ci_high)}});
    }
    doc["levels"] = levels;

    ojson comparisons = ojson::array();
    for (const ComparisonRow& r : b.comparisons) {
        comparisons.push_back({{"metric", r.metric},
                               {"horizon_ms", num(r.horizon_ms)},
                               {"comparison", r.comparison},
                               {"statistic", num(r.statistic)},
                               {"df1", num(r.df1)},
                               {"df2", num(r.df2)},
                               {"p_value", num(r.p_value)},
                               {"adjusted_p", num(r.adjusted_p)},
                               {"cohens_d", num(r.cohens_d)},
                               {"effect", r.effect},
                               {"note", r.note}});
    }
    doc["comparisons"] = comparisons;

    ojson skips = ojson::array();
    for (const SkipRecord& r : b.skips) {
        skips.push_back({{"subject_id", r.subject_id},
                         {"activity_id", r.activity_id},
                         {"repeat_index", r.repeat_index},
                         {"reason", r.reason}});
    }
    doc["skips"] = skips;
    doc["notes"] = b.notes;
    return doc.dump(2) + "\n";
}

ResultBundle bundle_from_json(std::string_view text)
{
    ResultBundle b;
    try {
        const ojson doc = ojson::parse(text);
        b.version = doc.at("version").get<std::string>();
        for (const auto& [key, value] : doc.at("config").items()) {
            b.config.emplace_back(key, value.get<std::string>());
        }
        for (const ojson& j : doc.at("metrics")) {
            MetricSummary r;
            r.subject_id = j.at("subject_id").get<std::string>();
            r.profile = parse_profile(j.at("profile").get<std::string>());
            r.horizon_ms = get_num(j.at("horizon_ms"));
            r.ae = get_num(j.at("ae_m"));
            r.me = get_num(j.at("me_m"));
            r.ada = get_opt(j.at("ada"));
            r.mda = get_opt(j.at("mda"));
            b.metrics.push_back(std::move(r));
        }
        for (const ojson& j : doc.at("fits")) {
            FitRow r;
            r.metric = j.at("metric").get<std::string>();
            r.profile = parse_profile(j.at("profile").get<std::string>());
            r.degree = j.at("degree").get<int>();
            r.selected = j.at("selected").get<bool>();
            for (const ojson& c : j.at("coefficients")) {
                r.coefficients.push_back(get_num(c));
            }
            r.r_squared = get_num(j.at("r_squared"));
            r.f_p_value = get_opt(j.at("f_p_value"));
            r.weight_fallback = j.at("weight_fallback").get<bool>();
            r.degenerate = j.at("degenerate").get<bool>();
            b.fits.push_back(std::move(r));
        }
        for (const ojson& j : doc.at("levels")) {
            LevelRow r;
            r.metric = j.at("metric").get<std::string>();
            r.profile = parse_profile(j.at("profile").get<std::string>());
            r.horizon_ms = get_num(j.at("horizon_ms"));
            r.n = j.at("n").get<std::size_t>();
            r.mean = get_num(j.at("mean"));
            r.ci_low = get_num(j.at("ci_low"));
            r.ci_high = get_num(j.at("ci_high"));
            b.levels.push_back(std::move(r));
        }
        for (const ojson& j : doc.at("comparisons")) {
            ComparisonRow r;
            r.metric = j.at("metric").get<std::string>();
            r.horizon_ms = get_num(j.at("horizon_ms"));
            r.comparison = j.at("comparison").get<std::string>();
            r.statistic = get_num(j.at("statistic"));
            r.df1 = get_num(j.at("df1"));
            r.df2 = get_num(j.at("df2"));
            r.p_value = get_num(j.at("p_value"));
            r.adjusted_p = get_opt(j.at("adjusted_p"));
            r.cohens_d = get_opt(j.at("cohens_d"));
            r.effect = j.at("effect").get<std::string>();
            r.note = j.at("note").get<std::string>();
            b.comparisons.push_back(std::move(r));
        }
        for (const ojson& j : doc.at("skips")) {
            b.skips.push_back({j.at("subject_id").get<std::string>(), j.at("activity_id").get<std::string>(),
                               j.at("repeat_index").get<int>(), j.at("reason").get<std::string>()});
        }
        b.notes = doc.at("notes").get<std::vector<std::string>>();
    } catch (const ojson::exception& e) {
        throw SchemaError(std::string("bundle: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw SchemaError(std::string("bundle: ") + e.what());
    }
    return b;
}

ResultBundle load_bundle(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return bundle_from_json(buffer.str());
}

std::vector<fs::path> export_results(const ResultBundle& bundle, const fs::path& out_dir, OutputFormat format)
{
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
        throw std::runtime_error("cannot create output directory " + out_dir.string());
    }
    std::vector<fs::path> written;
    if (format != OutputFormat::Json) {
        written.push_back(write_text(out_dir, "metrics.csv", metrics_csv(bundle.metrics)));
        written.push_back(write_text(out_dir, "fits.csv", fits_csv(bundle.fits)));
        written.push_back(write_text(out_dir, "levels.csv", levels_csv(bundle.levels)));
        written.push_back(write_text(out_dir, "comparisons.csv", comparisons_csv(bundle.comparisons)));
        written.push_back(write_text(out_dir, "skips.csv", skips_csv(bundle.skips)));
        std::string config = "# version: " + bundle.version + "\n";
        for (const auto& [key, value] : bundle.config) {
            config += key + " = " + value + "\n";
        }
        written.push_back(write_text(out_dir, "config.txt", config));
        std::string notes;
        for (const std::string& n : bundle.notes) {
            notes += n + "\n";
        }
        written.push_back(write_text(out_dir, "notes.txt", notes));
    }
    if (format != OutputFormat::Csv) {
        written.push_back(write_text(out_dir, "bundle.json", bundle_to_json(bundle)));
    }
    return written;
}

void write_horizons_csv(const fs::path& path, const RunConfig& config, const SweepSet& sweeps)
{
    auto out = open_output(path);
    out << "subject_id,activity_id,repeat_index,profile,horizon_ms,start_index,mean_error_m,max_error_m,"
           "direction_score\n";
    for (std::size_t i = 0; i < sweeps.trials.size(); ++i) {
        const Trial& t = sweeps.trials[i];
        const std::string prefix =
            csv_field(t.subject_id) + "," + csv_field(t.activity_id) + "," + std::to_string(t.repeat_index) + ",";
        for (std::size_t p = 0; p < config.profiles.size(); ++p) {
            for (std::size_t h = 0; h < config.horizons_ms.size(); ++h) {
                const auto& outcomes = sweeps.outcomes[i][p][h];
                for (std::size_t k = 0; k < outcomes.size(); ++k) {
                    out << prefix << to_string(config.profiles[p]) << ',' << format_double(config.horizons_ms[h])
                        << ',' << k * config.stride << ',' << format_double(outcomes[k].mean_error) << ','
                        << format_double(outcomes[k].max_error) << ',' << outcomes[k].score << '\n';
                }
            }
        }
    }
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

fs::path export_report(const ResultBundle& bundle, const fs::path& out_dir, double step_ms)
{
    if (!(step_ms > 0.0)) {
        throw InvalidArgument("export_report: step must be positive");
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    std::string text = "metric,profile,kind,horizon_ms,value,ci_low,ci_high\n";
    for (const FitRow& fit : bundle.fits) {
        if (!fit.selected) {
            continue;
        }
        double lo = INFINITY;
        double hi = -INFINITY;
        for (const LevelRow& l : bundle.levels) {
            if (l.metric == fit.metric && l.profile == fit.profile) {
                lo = std::min(lo, l.horizon_ms);
                hi = std::max(hi, l.horizon_ms);
            }
        }
        const std::string prefix = fit.metric + "," + std::string(to_string(fit.profile)) + ",";
        const auto steps = static_cast<std::size_t>(std::floor((hi - lo) / step_ms + 1e-9));
        for (std::size_t i = 0; i <= steps && lo <= hi; ++i) {
            const double t = lo + static_cast<double>(i) * step_ms;
            double v = 0.0;
            for (std::size_t j = fit.coefficients.size(); j-- > 0;) {
                v = v * t + fit.coefficients[j];
            }
            text += prefix + "fit," + format_double(t) + "," + format_double(v) + ",,\n";
        }
        for (const LevelRow& l : bundle.levels) {
            if (l.metric == fit.metric && l.profile == fit.profile) {
                text += prefix + "level," + format_double(l.horizon_ms) + "," + format_double(l.mean) + "," +
                        format_double(l.ci_low) + "," + format_double(l.ci_high) + "\n";
            }
        }
    }
    return write_text(out_dir, "curves.csv", text);
}

} // namespace compred
