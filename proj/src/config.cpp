#include "compred/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "compred/errors.hpp"

namespace compred {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto piece = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (!piece.empty()) {
            out.push_back(piece);
        }
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::size_t parse_count(std::string_view key, std::string_view text)
{
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError("config: '" + std::string(key) + "' expects a non-negative integer, got '" +
                          std::string(text) + "'");
    }
    return v;
}

double parse_number(std::string_view key, std::string_view text)
{
    try {
        return parse_double(text);
    } catch (const InvalidArgument&) {
        throw ConfigError("config: '" + std::string(key) + "' expects a number, got '" + std::string(text) + "'");
    }
}

bool parse_flag(std::string_view key, std::string_view text)
{
    if (text == "true" || text == "1" || text == "yes" || text == "on") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no" || text == "off") {
        return false;
    }
    throw ConfigError("config: '" + std::string(key) + "' expects true/false, got '" + std::string(text) + "'");
}

std::string join_numbers(const std::vector<double>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? "," : "") + format_double(values[i]);
    }
    return out;
}

std::string flag(bool b)
{
    return b ? "true" : "false";
}

} // namespace

std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double parse_double(std::string_view text)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw InvalidArgument("not a number: '" + std::string(text) + "'");
    }
    return v;
}

std::string_view to_string(OutputFormat format)
{
    switch (format) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
    case OutputFormat::Both: return "both";
    }
    return "both";
}

OutputFormat parse_output_format(std::string_view name)
{
    if (name == "csv") {
        return OutputFormat::Csv;
    }
    if (name == "json") {
        return OutputFormat::Json;
    }
    if (name == "both") {
        return OutputFormat::Both;
    }
    throw ConfigError("config: format must be csv, json or both");
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view raw)
{
    const std::string_view value = trim(raw);
    try {
        if (key == "dt") {
            c.dt = parse_number(key, value);
        } else if (key == "horizons_ms") {
            c.horizons_ms.clear();
            for (auto piece : split_list(value)) {
                c.horizons_ms.push_back(parse_number(key, piece));
            }
        } else if (key == "profiles") {
            c.profiles.clear();
            for (auto piece : split_list(value)) {
                c.profiles.push_back(parse_profile(piece));
            }
        } else if (key == "stride") {
            c.stride = parse_count(key, value);
        } else if (key == "aggregation") {
            c.aggregation = parse_aggregation(value);
        } else if (key == "alpha") {
            c.stats.alpha = parse_number(key, value);
        } else if (key == "bonferroni_m_pairs") {
            c.stats.bonferroni_m_pairs = parse_count(key, value);
        } else if (key == "bonferroni_m_oracle") {
            c.stats.bonferroni_m_oracle = parse_count(key, value);
        } else if (key == "cohens_d") {
            c.stats.d_variant = parse_cohens_d(value);
        } else if (key == "zero_variance_epsilon") {
            c.stats.zero_variance_epsilon = parse_number(key, value);
        } else if (key == "ci_level") {
            c.stats.ci_level = parse_number(key, value);
        } else if (key == "gravity") {
            c.gravity = parse_number(key, value);
        } else if (key == "filter_order") {
            c.filter.order = static_cast<int>(parse_count(key, value));
        } else if (key == "filter_cutoff_hz") {
            c.filter.cutoff_hz = parse_number(key, value);
        } else if (key == "filter_padding") {
            c.filter.padding = parse_count(key, value);
        } else if (key == "filter_enabled") {
            c.filter_enabled = parse_flag(key, value);
        } else if (key == "filter_zero_phase") {
            c.zero_phase = parse_flag(key, value);
        } else if (key == "com_rate_hz") {
            c.com_rate_hz = parse_number(key, value);
        } else if (key == "grf_rate_hz") {
            c.grf_rate_hz = parse_number(key, value);
        } else if (key == "contact_threshold_n") {
            c.contact_threshold_n = parse_number(key, value);
        } else if (key == "contact_hold_samples") {
            c.contact_hold_samples = parse_count(key, value);
        } else if (key == "length_tolerance") {
            c.length_tolerance = parse_count(key, value);
        } else if (key == "velocity_fallback") {
            c.velocity_fallback = parse_flag(key, value);
        } else if (key == "threads") {
            c.threads = parse_count(key, value);
        } else if (key == "output_dir") {
            c.output_dir = std::string(value);
        } else if (key == "format") {
            c.format = parse_output_format(value);
        } else {
            throw ConfigError("config: unknown key '" + std::string(key) + "'");
        }
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

RunConfig parse_config(std::string_view text)
{
    RunConfig config;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) {
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        apply_setting(config, trim(view.substr(0, eq)), view.substr(eq + 1));
    }
    validate_config(config);
    return config;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

void validate_config(const RunConfig& c)
{
    if (!(c.dt > 0.0)) {
        throw ConfigError("config: dt must be positive");
    }
    if (c.horizons_ms.empty()) {
        throw ConfigError("config: at least one horizon length is required");
    }
    for (double t : c.horizons_ms) {
        try {
            make_horizon(t, c.dt);
        } catch (const InvalidArgument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
    if (c.profiles.empty()) {
        throw ConfigError("config: at least one profile is required");
    }
    if (c.stride < 1) {
        throw ConfigError("config: stride must be at least 1");
    }
    if (!(c.stats.alpha > 0.0 && c.stats.alpha < 1.0) || !(c.stats.ci_level > 0.0 && c.stats.ci_level < 1.0)) {
        throw ConfigError("config: alpha and ci_level must lie in (0, 1)");
    }
    if (c.stats.bonferroni_m_pairs < 1 || c.stats.bonferroni_m_oracle < 1) {
        throw ConfigError("config: Bonferroni family sizes must be at least 1");
    }
    if (!(c.stats.zero_variance_epsilon > 0.0)) {
        throw ConfigError("config: zero_variance_epsilon must be positive");
    }
    if (c.filter.order < 1 || !(c.filter.cutoff_hz > 0.0) || !(c.gravity >= 0.0)) {
        throw ConfigError("config: filter order/cutoff and gravity must be positive");
    }
    if (!(c.com_rate_hz > 0.0) || !(c.grf_rate_hz > 0.0) || !(c.contact_threshold_n > 0.0)) {
        throw ConfigError("config: sample rates and contact threshold must be positive");
    }
}

std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& c)
{
    std::string profiles;
    for (std::size_t i = 0; i < c.profiles.size(); ++i) {
        profiles += (i ? "," : "") + std::string(to_string(c.profiles[i]));
    }
    return {
        {"dt", format_double(c.dt)},
        {"horizons_ms", join_numbers(c.horizons_ms)},
        {"profiles", profiles},
        {"stride", std::to_string(c.stride)},
        {"aggregation", std::string(to_string(c.aggregation))},
        {"alpha", format_double(c.stats.alpha)},
        {"bonferroni_m_pairs", std::to_string(c.stats.bonferroni_m_pairs)},
        {"bonferroni_m_oracle", std::to_string(c.stats.bonferroni_m_oracle)},
        {"cohens_d", std::string(to_string(c.stats.d_variant))},
        {"zero_variance_epsilon", format_double(c.stats.zero_variance_epsilon)},
        {"ci_level", format_double(c.stats.ci_level)},
        {"gravity", format_double(c.gravity)},
        {"filter_enabled", flag(c.filter_enabled)},
        {"filter_order", std::to_string(c.filter.order)},
        {"filter_cutoff_hz", format_double(c.filter.cutoff_hz)},
        {"filter_zero_phase", flag(c.zero_phase)},
        {"filter_padding", std::to_string(c.filter.padding_length())},
        {"com_rate_hz", format_double(c.com_rate_hz)},
        {"grf_rate_hz", format_double(c.grf_rate_hz)},
        {"contact_threshold_n", format_double(c.contact_threshold_n)},
        {"contact_hold_samples", std::to_string(c.contact_hold_samples)},
        {"length_tolerance", std::to_string(c.length_tolerance)},
        {"velocity_fallback", flag(c.velocity_fallback)},
    };
}

} // namespace compred
