#pragma once

// Flat key=value run configuration. Precedence: --set overrides > file > defaults.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qsnom/error.hpp"

namespace qsnom::config {

using KeyValues = std::map<std::string, std::string>;

// Every accepted key with its default ("" = unset).
inline const KeyValues& defaults()
{
    static const KeyValues d{
        {"epsilon_d", "1"},
        {"R_nm", "1"},
        {"omega_eV", "1"},
        {"kappa", "0.05"},
        {"n_max", "1"},
        {"photon_energy_eV", ""},
        {"near_field_factor", "0.1"},
        {"tol_deg", "1e-12"},
        {"shift_model", "paper"},
        {"seed", "0"},
        {"observed_omega_s", ""},
        {"bracket_lo", "1.000000001"},
        {"bracket_hi", "1e6"},
        {"tol_rel", "1e-10"},
        {"max_iter", "200"},
        {"sweep.axis", "epsilon_d"},
        {"sweep.values", ""},
        {"sweep.start", ""},
        {"sweep.stop", ""},
        {"sweep.count", ""},
        {"sweep.scale", "linear"},
        {"sweep.outputs", "all"},
        {"oracle.alpha_values", "0,0.1,0.5,0.9"},
        {"oracle.R_values", "0.5,1,2,4"},
    };
    return d;
}

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::pair<std::string, std::string> split_assignment(std::string_view line, std::string_view where)
{
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
        throw Error(ErrorKind::Config, std::string(where) + ": expected key=value, got '" + std::string(line) + "'");
    auto key = trim(line.substr(0, eq));
    if (key.empty())
        throw Error(ErrorKind::Config, std::string(where) + ": empty key");
    return {std::move(key), trim(line.substr(eq + 1))};
}

inline void require_known(const std::string& key, std::string_view where)
{
    if (!defaults().count(key))
        throw Error(ErrorKind::Config, std::string(where) + ": unknown key '" + key + "'");
}

inline KeyValues parse_text(std::istream& in, std::string_view name)
{
    KeyValues kv;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const std::string where = std::string(name) + ":" + std::to_string(lineno);
        auto [k, v] = split_assignment(t, where);
        require_known(k, where);
        if (!kv.emplace(k, v).second)
            throw Error(ErrorKind::Config, where + ": duplicate key '" + k + "'");
    }
    return kv;
}

inline KeyValues load_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::Config, "cannot read config file '" + path + "'");
    return parse_text(in, path);
}

inline KeyValues resolve(const std::optional<std::string>& path, const std::vector<std::string>& overrides)
{
    KeyValues kv = defaults();
    if (path)
        for (auto& [k, v] : load_file(*path))
            kv[k] = v;
    for (const auto& o : overrides) {
        auto [k, v] = split_assignment(o, "--set");
        require_known(k, "--set");
        kv[k] = v;
    }
    return kv;
}

// Typed accessors; every failure names the offending key.

inline double parse_number(const std::string& key, std::string_view text)
{
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw Error(ErrorKind::Config, key + ": not a number ('" + std::string(text) + "')");
    return v;
}

inline double get_double(const KeyValues& kv, const std::string& key)
{
    return parse_number(key, trim(kv.at(key)));
}

inline std::optional<double> get_optional_double(const KeyValues& kv, const std::string& key)
{
    const auto t = trim(kv.at(key));
    if (t.empty())
        return std::nullopt;
    return parse_number(key, t);
}

inline std::uint64_t get_uint(const KeyValues& kv, const std::string& key)
{
    const auto t = trim(kv.at(key));
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
        throw Error(ErrorKind::Config, key + ": not a non-negative integer ('" + t + "')");
    return v;
}

inline std::vector<std::string> get_list(const KeyValues& kv, const std::string& key)
{
    std::vector<std::string> out;
    const auto& s = kv.at(key);
    if (trim(s).empty())
        return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(trim(item));
    return out;
}

inline std::vector<double> get_number_list(const KeyValues& kv, const std::string& key)
{
    std::vector<double> out;
    for (const auto& item : get_list(kv, key))
        out.push_back(parse_number(key, item));
    return out;
}

} // namespace qsnom::config
