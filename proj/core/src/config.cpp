#include "iacvlab/config.hpp"

#include "iacvlab/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

extern char** environ;

namespace iacvlab {

namespace {

std::string trim(std::string_view text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) {
        return {};
    }
    const auto end = text.find_last_not_of(" \t\r");
    return std::string(text.substr(begin, end - begin + 1));
}

std::string to_lower(std::string text) {
    std::transform(text.begin(), text.end(), text.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return text;
}

double parse_double(const std::string& key, const std::string& text) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw std::invalid_argument("config key " + key + ": '" + text +
                                    "' is not a number");
    }
    return value;
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
    std::int64_t value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw std::invalid_argument("config key " + key + ": '" + text +
                                    "' is not an integer");
    }
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string lowered = to_lower(text);
    if (lowered == "true" || lowered == "1" || lowered == "yes" || lowered == "on") {
        return true;
    }
    if (lowered == "false" || lowered == "0" || lowered == "no" || lowered == "off") {
        return false;
    }
    throw std::invalid_argument("config key " + key + ": '" + text +
                                "' is not a boolean");
}

} // namespace

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path);
}

Config Config::parse(const std::string& text, const std::string& origin) {
    Config config;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#' || stripped.front() == ';') {
            continue;
        }
        if (stripped.front() == '[') {
            if (stripped.back() != ']' || stripped.size() < 3) {
                throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                            ": malformed section header");
            }
            section = to_lower(trim(stripped.substr(1, stripped.size() - 2)));
            if (section.find('_') != std::string::npos) {
                throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                            ": section names must not contain '_'");
            }
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                        ": expected key = value");
        }
        const std::string key = to_lower(trim(stripped.substr(0, eq)));
        if (key.empty()) {
            throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                        ": empty key");
        }
        const std::string full_key = section.empty() ? key : section + "." + key;
        config.values[full_key] = trim(stripped.substr(eq + 1));
    }
    return config;
}

void Config::apply_env_overrides() {
    static constexpr std::string_view prefix = "IACVLAB_";
    for (char** entry = environ; entry != nullptr && *entry != nullptr; ++entry) {
        const std::string_view var(*entry);
        if (var.substr(0, prefix.size()) != prefix) {
            continue;
        }
        const auto eq = var.find('=');
        if (eq == std::string_view::npos) {
            continue;
        }
        const std::string_view name = var.substr(prefix.size(), eq - prefix.size());
        const auto split = name.find('_');
        if (split == std::string_view::npos || split == 0 || split + 1 >= name.size()) {
            continue; // reserved variables such as IACVLAB_TIMESTAMP
        }
        const std::string section = to_lower(std::string(name.substr(0, split)));
        const std::string key = to_lower(std::string(name.substr(split + 1)));
        values[section + "." + key] = std::string(var.substr(eq + 1));
    }
}

std::optional<std::string> Config::get(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto value = get(key);
    return value ? parse_double(key, *value) : fallback;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
    const auto value = get(key);
    return value ? parse_int(key, *value) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto value = get(key);
    return value ? parse_bool(key, *value) : fallback;
}

std::vector<double> Config::get_list(const std::string& key,
                                     const std::vector<double>& fallback) const {
    const auto value = get(key);
    if (!value) {
        return fallback;
    }
    std::vector<double> items;
    std::string chunk;
    std::istringstream in(*value);
    while (std::getline(in, chunk, ',')) {
        items.push_back(parse_double(key, trim(chunk)));
    }
    if (items.empty()) {
        throw std::invalid_argument("config key " + key + ": empty list");
    }
    return items;
}

std::uint64_t Config::digest() const {
    std::string canonical;
    for (const auto& [key, value] : values) { // std::map iterates sorted
        canonical += key;
        canonical += '=';
        canonical += value;
        canonical += '\n';
    }
    return fnv1a_digest(canonical);
}

ScenarioConfig scenario_from_config(const Config& config) {
    ScenarioConfig scenario;
    static constexpr std::string_view prefix = "scenario.";
    for (const auto& [full_key, value] : config.values) {
        if (full_key.size() <= prefix.size() ||
            std::string_view(full_key).substr(0, prefix.size()) != prefix) {
            continue;
        }
        const std::string key = full_key.substr(prefix.size());
        if (key == "seed") {
            scenario.seed = static_cast<std::uint64_t>(parse_int(full_key, value));
        } else if (key == "n_exposures") {
            scenario.n_exposures = static_cast<std::size_t>(parse_int(full_key, value));
        } else if (key == "term") {
            scenario.term = static_cast<std::size_t>(parse_int(full_key, value));
        } else if (key == "period_unit") {
            const std::string unit = to_lower(value);
            if (unit == "year") {
                scenario.period_unit = PeriodUnit::year;
            } else if (unit == "month") {
                scenario.period_unit = PeriodUnit::month;
            } else {
                throw std::invalid_argument("config key " + full_key +
                                            ": expected year or month");
            }
        } else if (key == "amortization") {
            const std::string kind = to_lower(value);
            if (kind == "bullet" || kind == "level_coupon_bullet") {
                scenario.amortization = Amortization::level_coupon_bullet;
            } else if (kind == "annuity") {
                scenario.amortization = Amortization::annuity;
            } else if (kind == "linear") {
                scenario.amortization = Amortization::linear;
            } else {
                throw std::invalid_argument("config key " + full_key +
                                            ": expected bullet, annuity or linear");
            }
        } else if (key == "hazard_shape") {
            const std::string shape = to_lower(value);
            if (shape == "neutral") {
                scenario.hazard_shape = HazardShape::neutral;
            } else if (shape == "delayed") {
                scenario.hazard_shape = HazardShape::delayed;
            } else if (shape == "late_peak") {
                scenario.hazard_shape = HazardShape::late_peak;
            } else {
                throw std::invalid_argument("config key " + full_key +
                                            ": expected neutral, delayed or late_peak");
            }
        } else if (key == "delay_periods") {
            scenario.delay_periods = static_cast<std::size_t>(parse_int(full_key, value));
        } else if (key == "contract_rate") {
            scenario.contract_rate = parse_double(full_key, value);
        } else if (key == "risk_level") {
            scenario.risk_level = parse_double(full_key, value);
        } else if (key == "principal") {
            scenario.principal = parse_double(full_key, value);
        } else if (key == "pd_period") {
            scenario.pd_period = parse_double(full_key, value);
        } else if (key == "lgd_mean") {
            scenario.lgd_mean = parse_double(full_key, value);
        } else if (key == "lgd_half_width") {
            scenario.lgd_half_width = parse_double(full_key, value);
        } else if (key == "ead_half_width") {
            scenario.ead_half_width = parse_double(full_key, value);
        } else if (key == "correlation") {
            scenario.correlation = parse_double(full_key, value);
        } else if (key == "true_pd_multiple") {
            scenario.true_pd_multiple = parse_double(full_key, value);
        } else if (key == "ead_drift_at_default") {
            scenario.ead_drift_at_default = parse_double(full_key, value);
        } else if (key == "lgd_shift_at_default") {
            scenario.lgd_shift_at_default = parse_double(full_key, value);
        } else if (key == "recovery_timing") {
            scenario.recovery_timing = config.get_list(full_key, scenario.recovery_timing);
        } else if (key == "collateral_timing") {
            scenario.collateral_timing = config.get_list(full_key, scenario.collateral_timing);
        } else if (key == "collateral_fraction") {
            scenario.collateral_fraction = parse_double(full_key, value);
        } else if (key == "lgd_unsecured") {
            scenario.lgd_unsecured = parse_double(full_key, value);
        } else if (key == "lgd_bias") {
            scenario.lgd_bias = parse_double(full_key, value);
        } else if (key == "recovery_noise") {
            scenario.recovery_noise = parse_double(full_key, value);
        } else if (key == "cure_fraction") {
            scenario.cure_fraction = parse_double(full_key, value);
        } else if (key == "cure_first_period") {
            scenario.cure_first_period = static_cast<std::size_t>(parse_int(full_key, value));
        } else if (key == "cure_last_period") {
            scenario.cure_last_period = static_cast<std::size_t>(parse_int(full_key, value));
        } else if (key == "method_adjustment_factor") {
            scenario.method_adjustment_factor = parse_double(full_key, value);
        } else if (key == "method_adjustment_period") {
            scenario.method_adjustment_period =
                static_cast<std::size_t>(parse_int(full_key, value));
        } else if (key == "periods" || key == "kind") {
            // Consumed by the simulate command (simulation length and output
            // kind), not the scenario itself.
        } else {
            throw std::invalid_argument("unknown scenario config key: " + full_key);
        }
    }
    scenario.validate();
    return scenario;
}

} // namespace iacvlab
