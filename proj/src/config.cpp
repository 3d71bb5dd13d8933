#include "tunnelion/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "tunnelion/errors.hpp"

namespace tunnelion {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError("key '" + std::string(key) + "': not a number: '" + std::string(text) + "'");
    return v;
}

// Accepts "1/30" as well as plain numbers.
double to_ratio(std::string_view key, std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return to_double(key, text);
    const double num = to_double(key, trim(text.substr(0, slash)));
    const double den = to_double(key, trim(text.substr(slash + 1)));
    if (den == 0.0) throw ConfigError("key '" + std::string(key) + "': zero denominator");
    return num / den;
}

}  // namespace

Config Config::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

Config Config::parse(std::string_view text, std::string_view origin) {
    Config cfg;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        if (line.find('=') == std::string_view::npos)
            throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) +
                              ": expected key=value");
        cfg.assign(line);
    }
    return cfg;
}

void Config::assign(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
    const auto key = trim(assignment.substr(0, eq));
    const auto value = trim(assignment.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key in '" + std::string(assignment) + "'");
    if (value.empty()) throw ConfigError("empty value for key '" + std::string(key) + "'");
    set(std::string(key), std::string(value));
}

void Config::set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }

bool Config::has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

std::optional<std::string> Config::get(std::string_view key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

double Config::get_double(std::string_view key, double fallback) const {
    const auto v = get(key);
    return v ? to_ratio(key, *v) : fallback;
}

double Config::require_double(std::string_view key) const {
    const auto v = get(key);
    if (!v) throw ConfigError("missing key '" + std::string(key) + "'");
    return to_ratio(key, *v);
}

int Config::get_int(std::string_view key, int fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    int out = 0;
    const auto* end = v->data() + v->size();
    auto [ptr, ec] = std::from_chars(v->data(), end, out);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError("key '" + std::string(key) + "': not an integer: '" + *v + "'");
    return out;
}

std::vector<double> Config::get_list(std::string_view key, std::vector<double> fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    std::vector<double> out;
    std::string_view rest = *v;
    while (true) {
        const auto comma = rest.find(',');
        out.push_back(to_ratio(key, trim(rest.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return out;
}

std::string Config::get_string(std::string_view key, std::string fallback) const {
    const auto v = get(key);
    return v ? *v : std::move(fallback);
}

void Config::require_known(std::span<const std::string_view> allowed) const {
    for (const auto& [key, value] : entries_) {
        bool ok = false;
        for (auto a : allowed) ok = ok || a == key;
        if (!ok) throw ConfigError("unknown config key '" + key + "'");
    }
}

double parse_number(std::string_view key, std::string_view text) { return to_ratio(key, trim(text)); }

std::span<const std::string_view> param_keys() {
    static constexpr std::array<std::string_view, 6> keys{"kappa", "c", "E0_over_Ea", "omega",
                                                          "ip_mode", "tier"};
    return keys;
}

PhysParams params_from_config(const Config& cfg, const PhysParams& defaults) {
    PhysParams p = defaults;
    const double ratio = defaults.E0 / (defaults.kappa * defaults.kappa * defaults.kappa);
    p.kappa = cfg.get_double("kappa", defaults.kappa);
    p.c = cfg.get_double("c", defaults.c);
    p.omega = cfg.get_double("omega", defaults.omega);
    p.E0 = cfg.get_double("E0_over_Ea", ratio) * p.kappa * p.kappa * p.kappa;
    if (auto m = cfg.get("ip_mode")) p.ip_mode = parse_ip_mode(*m);
    if (auto t = cfg.get("tier")) p.tier = parse_tier(*t);
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return p;
}

}  // namespace tunnelion
