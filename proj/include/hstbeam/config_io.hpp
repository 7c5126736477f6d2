#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hstbeam/scenario.hpp"

namespace hstbeam {
namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError({key + ": cannot parse '" + value + "' as a number"});
    }
    if (pos != value.size())
        throw ConfigError({key + ": trailing characters in '" + value + "'"});
    return v;
}

inline std::int64_t parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    const auto i = static_cast<std::int64_t>(std::llround(v));
    if (std::abs(v - static_cast<double>(i)) > 1e-9)
        throw ConfigError({key + ": expected an integer, got '" + value + "'"});
    return i;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError({key + ": expected true/false, got '" + value + "'"});
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError({key + ": expected a comma-separated list of numbers"});
    return out;
}

}  // namespace detail

/// Apply one `key = value` assignment. Unknown keys are errors: a silent typo
/// in a physics constant is worse than a hard failure.
inline void apply_config_entry(ScenarioConfig& cfg, const std::string& key,
                               const std::string& value) {
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_double_list;
    using detail::parse_int;

    static const std::map<std::string, std::function<void(ScenarioConfig&, const std::string&,
                                                          const std::string&)>>
        handlers = {
            {"mrrh_spacing_m", [](auto& c, auto& k, auto& v) { c.mrrh_spacing_m = parse_double(k, v); }},
            {"track_offset_m", [](auto& c, auto& k, auto& v) { c.track_offset_m = parse_double(k, v); }},
            {"building_offset_m",
             [](auto& c, auto& k, auto& v) { c.building_offset_m = parse_double(k, v); }},
            {"carrier_hz", [](auto& c, auto& k, auto& v) { c.carrier_hz = parse_double(k, v); }},
            {"tx_antenna_gain_dbi",
             [](auto& c, auto& k, auto& v) { c.tx_antenna_gain_dbi = parse_double(k, v); }},
            {"rx_antenna_gain_dbi",
             [](auto& c, auto& k, auto& v) { c.rx_antenna_gain_dbi = parse_double(k, v); }},
            {"tx_power_dbm", [](auto& c, auto& k, auto& v) { c.tx_power_dbm = parse_double(k, v); }},
            {"noise_power_dbm",
             [](auto& c, auto& k, auto& v) { c.noise_power_dbm = parse_double(k, v); }},
            {"train_speed_kmh",
             [](auto& c, auto& k, auto& v) { c.train_speed_kmh = parse_double(k, v); }},
            {"tti_s", [](auto& c, auto& k, auto& v) { c.tti_s = parse_double(k, v); }},
            {"slots_per_traverse",
             [](auto& c, auto& k, auto& v) { c.slots_per_traverse = parse_int(k, v); }},
            {"num_traverses",
             [](auto& c, auto& k, auto& v) { c.num_traverses = static_cast<int>(parse_int(k, v)); }},
            {"n_t", [](auto& c, auto& k, auto& v) { c.n_t = static_cast<int>(parse_int(k, v)); }},
            {"n_r", [](auto& c, auto& k, auto& v) { c.n_r = static_cast<int>(parse_int(k, v)); }},
            {"m_measurements",
             [](auto& c, auto& k, auto& v) { c.m_measurements = static_cast<int>(parse_int(k, v)); }},
            {"d_streams",
             [](auto& c, auto& k, auto& v) { c.d_streams = static_cast<int>(parse_int(k, v)); }},
            {"exploration_c",
             [](auto& c, auto& k, auto& v) { c.exploration_c = parse_double(k, v); }},
            {"bin_len_slots", [](auto& c, auto& k, auto& v) { c.bin_len_slots = parse_int(k, v); }},
            {"update_measured_arms",
             [](auto& c, auto& k, auto& v) { c.update_measured_arms = parse_bool(k, v); }},
            {"reward_ref_rate",
             [](auto& c, auto& k, auto& v) { c.reward_ref_rate = parse_double(k, v); }},
            {"pilot_length",
             [](auto& c, auto& k, auto& v) { c.pilot_length = static_cast<int>(parse_int(k, v)); }},
            {"pilot_fraction",
             [](auto& c, auto& k, auto& v) { c.pilot_fraction = parse_double(k, v); }},
            {"wss_window_s",
             [](auto& c, auto& k, auto& v) { c.dynamics.wss_window_s = parse_double(k, v); }},
            {"birth_prob",
             [](auto& c, auto& k, auto& v) { c.dynamics.set_uniform_birth_prob(parse_double(k, v)); }},
            {"birth_probs",
             [](auto& c, auto& k, auto& v) { c.dynamics.birth_probs_per_window = parse_double_list(k, v); }},
            {"max_paths",
             [](auto& c, auto& k, auto& v) { c.dynamics.max_paths = static_cast<int>(parse_int(k, v)); }},
            {"lifetime_mean_s",
             [](auto& c, auto& k, auto& v) { c.dynamics.lifetime_mean_s = parse_double(k, v); }},
            {"lifetime_std_s",
             [](auto& c, auto& k, auto& v) { c.dynamics.lifetime_std_s = parse_double(k, v); }},
            {"lifetime_min_s",
             [](auto& c, auto& k, auto& v) { c.dynamics.lifetime_min_s = parse_double(k, v); }},
            {"lifetime_max_s",
             [](auto& c, auto& k, auto& v) { c.dynamics.lifetime_max_s = parse_double(k, v); }},
            {"nlos_extra_loss_db",
             [](auto& c, auto& k, auto& v) { c.dynamics.nlos_extra_loss_db = parse_double(k, v); }},
            {"nlos_order_loss_db",
             [](auto& c, auto& k, auto& v) { c.dynamics.nlos_order_loss_db = parse_double(k, v); }},
            {"seed",
             [](auto& c, auto& k, auto& v) { c.seed = static_cast<std::uint64_t>(parse_int(k, v)); }},
            {"fresh_schedule_per_traverse",
             [](auto& c, auto& k, auto& v) { c.fresh_schedule_per_traverse = parse_bool(k, v); }},
        };

    const auto it = handlers.find(key);
    if (it == handlers.end()) throw ConfigError({"unknown configuration key '" + key + "'"});
    it->second(cfg, key, value);
}

inline ScenarioConfig parse_config_text(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError({"line " + std::to_string(line_no) + ": expected 'key = value'"});
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        try {
            apply_config_entry(cfg, key, value);
        } catch (const ConfigError& e) {
            std::vector<std::string> problems;
            for (const std::string& p : e.problems())
                problems.push_back("line " + std::to_string(line_no) + ": " + p);
            throw ConfigError(problems);
        }
    }
    return cfg;
}

inline ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace hstbeam
