#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tunnelion/core.hpp"

namespace tunnelion {

// Flat key=value configuration. Lines starting with '#' are comments.
class Config {
public:
    static Config load_file(const std::filesystem::path& path);
    static Config parse(std::string_view text, std::string_view origin = "<string>");

    // "key=value"
    void assign(std::string_view assignment);
    void set(std::string key, std::string value);

    bool has(std::string_view key) const;
    std::optional<std::string> get(std::string_view key) const;
    double get_double(std::string_view key, double fallback) const;
    double require_double(std::string_view key) const;
    int get_int(std::string_view key, int fallback) const;
    std::string get_string(std::string_view key, std::string fallback) const;
    // Comma-separated numbers (each may be a ratio such as 1/30).
    std::vector<double> get_list(std::string_view key, std::vector<double> fallback) const;

    // Throws ConfigError naming the first key not in `allowed`.
    void require_known(std::span<const std::string_view> allowed) const;

    const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

private:
    std::map<std::string, std::string, std::less<>> entries_;
};

// Number or ratio "a/b"; ConfigError names the key on failure.
double parse_number(std::string_view key, std::string_view text);

// Keys understood by params_from_config.
std::span<const std::string_view> param_keys();

PhysParams params_from_config(const Config& cfg, const PhysParams& defaults = {});

}  // namespace tunnelion
