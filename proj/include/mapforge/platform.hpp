// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"

namespace mapforge {

/// Area/bandwidth/energy coefficients and the design budget of a target
/// platform. Energies are relative pJ-scale values.
struct Platform {
    double area_budget = 0.2;   // mm^2
    count_t max_pes = 4096;
    double a_pe = 4.0e-5;       // mm^2 per PE
    double a_sram = 4.0e-7;     // mm^2 per byte
    count_t word_bytes = 2;
    double bw_dram = 16.0;      // words / cycle
    double bw_l2 = 64.0;        // words / cycle
    double e_mac = 1.0;
    double e_l2 = 2.0;
    double e_dram = 64.0;
    count_t max_pi = 0;         // per-level cap on pi; 0 means max_pes

    count_t pi_cap() const { return max_pi > 0 && max_pi < max_pes ? max_pi : max_pes; }

    /// Powers of two up to pi_cap(); the values pi genes are drawn from.
    std::vector<count_t> allowed_pi() const
    {
        std::vector<count_t> out;
        for (count_t v = 1; v <= pi_cap(); v *= 2) out.push_back(v);
        return out;
    }

    friend bool operator==(const Platform&, const Platform&) = default;
};

inline Platform edge_platform()
{
    Platform p;
    p.area_budget = 0.2;
    p.max_pes = 4096;
    return p;
}

inline Platform cloud_platform()
{
    Platform p;
    p.area_budget = 7.0;
    p.max_pes = 65536;
    return p;
}

inline void validate_platform(const Platform& p, const std::string& where = "platform")
{
    auto positive = [&](const char* field, double v) {
        if (!(v > 0)) throw InputError(where + ": '" + field + "' must be positive");
    };
    positive("area_budget", p.area_budget);
    positive("max_pes", static_cast<double>(p.max_pes));
    positive("a_pe", p.a_pe);
    positive("a_sram", p.a_sram);
    positive("word_bytes", static_cast<double>(p.word_bytes));
    positive("bw_dram", p.bw_dram);
    positive("bw_l2", p.bw_l2);
    positive("e_mac", p.e_mac);
    positive("e_l2", p.e_l2);
    positive("e_dram", p.e_dram);
    if (p.max_pi < 0) throw InputError(where + ": 'max_pi' must be >= 0");
}

namespace detail {

inline std::string trim(std::string s)
{
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

/// Reads a flat TOML document of `key = number` pairs. Tables, arrays and
/// strings are rejected; the platform schema has none.
inline std::map<std::string, std::string> read_flat_toml(const std::string& text, const std::string& where)
{
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError(where + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw InputError(where + ":" + std::to_string(lineno) + ": expected 'key = value'");
        value.erase(std::remove(value.begin(), value.end(), '_'), value.end());
        if (!out.emplace(key, value).second)
            throw InputError(where + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    return out;
}

inline double parse_number(const std::string& s, const std::string& where, const std::string& key)
{
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw InputError(where + ": '" + key + "' is not a number: " + s);
    return v;
}

inline count_t parse_integer(const std::string& s, const std::string& where, const std::string& key)
{
    count_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw InputError(where + ": '" + key + "' is not an integer: " + s);
    return v;
}

} // namespace detail

/// Parses a platform profile. Every field is optional and defaults to the
/// edge profile; unknown keys are rejected.
inline Platform parse_platform(const std::string& text, const std::string& where = "platform")
{
    Platform p;
    for (const auto& [key, value] : detail::read_flat_toml(text, where)) {
        if (key == "area_budget") p.area_budget = detail::parse_number(value, where, key);
        else if (key == "max_pes") p.max_pes = detail::parse_integer(value, where, key);
        else if (key == "a_pe") p.a_pe = detail::parse_number(value, where, key);
        else if (key == "a_sram") p.a_sram = detail::parse_number(value, where, key);
        else if (key == "word_bytes") p.word_bytes = detail::parse_integer(value, where, key);
        else if (key == "bw_dram") p.bw_dram = detail::parse_number(value, where, key);
        else if (key == "bw_l2") p.bw_l2 = detail::parse_number(value, where, key);
        else if (key == "e_mac") p.e_mac = detail::parse_number(value, where, key);
        else if (key == "e_l2") p.e_l2 = detail::parse_number(value, where, key);
        else if (key == "e_dram") p.e_dram = detail::parse_number(value, where, key);
        else if (key == "max_pi") p.max_pi = detail::parse_integer(value, where, key);
        else throw InputError(where + ": unknown field '" + key + "'");
    }
    validate_platform(p, where);
    return p;
}

/// "edge" and "cloud" name the bundled profiles; anything else is a file path.
inline Platform load_platform(const std::string& source)
{
    if (source == "edge") return edge_platform();
    if (source == "cloud") return cloud_platform();
    std::ifstream in(source, std::ios::binary);
    if (!in) throw InputError(source + ": cannot open platform file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_platform(buf.str(), source);
}

} // namespace mapforge
