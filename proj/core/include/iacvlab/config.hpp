#pragma once

#include "iacvlab/simulator.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace iacvlab {

/// Flat key-value configuration with sections: INI-style files
/// ([section] then key = value lines, '#' or ';' comments) addressed as
/// "section.key". Environment variables IACVLAB_<SECTION>_<KEY> override
/// file values (section names contain no underscores; the remainder of
/// the variable name is the key, lower-cased).
struct Config {
    std::map<std::string, std::string> values;

    static Config load(const std::string& path);
    static Config parse(const std::string& text, const std::string& origin = "<config>");

    /// Folds IACVLAB_* environment variables into the map.
    void apply_env_overrides();

    std::optional<std::string> get(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& fallback) const;

    /// Digest of the canonical serialization (sorted keys), for manifests.
    std::uint64_t digest() const;
};

/// Builds a simulation scenario from the [scenario] section; unknown keys
/// in that section are rejected so typos cannot silently fall back to
/// defaults. Validates the result.
ScenarioConfig scenario_from_config(const Config& config);

} // namespace iacvlab
