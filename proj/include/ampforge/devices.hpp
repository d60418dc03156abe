#ifndef AMPFORGE_DEVICES_HPP
#define AMPFORGE_DEVICES_HPP

// Device parameter records and the key=value parameter file format.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ampforge/values.hpp"

namespace ampforge {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Small-signal h-parameters and junction constants of one NPN type.
struct BjtParams {
    std::string name = "2N2222";
    double h_fe_typ = 100.0;
    double h_fe_min = 50.0;
    double h_fe_max = 300.0;
    double h_ie = 1100.0;    // ohm
    double h_re = 2e-4;
    double h_oe = 25e-6;     // siemens
    double v_be_on = 0.7;    // volt
    double v_ce_sat = 0.2;   // volt
    double i_c_min = 0.0;    // ampere

    bool operator==(const BjtParams&) const = default;
};

/// Ideal op-amp realized as a single VCVS.
struct OpAmpModel {
    double open_loop_gain = 1e7;

    bool operator==(const OpAmpModel&) const = default;
};

/// h_ie*h_oe - h_fe*h_re, evaluated with the typical current gain.
inline double h_composite(const BjtParams& p) { return p.h_ie * p.h_oe - p.h_fe_typ * p.h_re; }

/// Throws ConfigError naming the first offending key.
inline void validate(const BjtParams& p) {
    auto positive = [](double v, const char* key) {
        if (!std::isfinite(v) || v <= 0.0) throw ConfigError(std::string(key) + " must be positive");
    };
    positive(p.h_fe_typ, "h_fe_typ");
    positive(p.h_fe_min, "h_fe_min");
    positive(p.h_fe_max, "h_fe_max");
    positive(p.h_ie, "h_ie");
    positive(p.h_oe, "h_oe");
    positive(p.v_be_on, "v_be_on");
    positive(p.v_ce_sat, "v_ce_sat");
    if (!std::isfinite(p.h_re) || p.h_re < 0.0) throw ConfigError("h_re must be non-negative");
    if (!std::isfinite(p.i_c_min) || p.i_c_min < 0.0) throw ConfigError("i_c_min must be non-negative");
    if (p.h_fe_min > p.h_fe_typ) throw ConfigError("h_fe_min must not exceed h_fe_typ");
    if (p.h_fe_typ > p.h_fe_max) throw ConfigError("h_fe_typ must not exceed h_fe_max");
    if (std::abs(h_composite(p)) >= 1.0) throw ConfigError("h_ie*h_oe - h_fe*h_re must lie in (-1, 1)");
}

inline void validate(const OpAmpModel& m) {
    if (!std::isfinite(m.open_loop_gain) || m.open_loop_gain < 1e6)
        throw ConfigError("open_loop_gain must be at least 1e6");
}

struct DeviceSet {
    BjtParams bjt;
    OpAmpModel opamp;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parses parameter text. Mandatory: h_fe_typ, h_fe_max, h_ie, h_re, h_oe.
/// h_fe_min defaults to h_fe_typ; the remaining keys keep their defaults.
inline DeviceSet parse_params(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        if (!kv.emplace(key, value).second) throw ConfigError(key + " given twice");
    }

    DeviceSet out;
    auto number = [&](const std::string& key, double& field, bool required) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            if (required) throw ConfigError(key + " required");
            return false;
        }
        try {
            field = parse_magnitude(it->second);
        } catch (const std::exception&) {
            throw ConfigError(key + ": bad value '" + it->second + "'");
        }
        kv.erase(it);
        return true;
    };

    if (auto it = kv.find("name"); it != kv.end()) {
        out.bjt.name = it->second;
        kv.erase(it);
    }
    number("h_fe_typ", out.bjt.h_fe_typ, true);
    number("h_fe_max", out.bjt.h_fe_max, true);
    number("h_ie", out.bjt.h_ie, true);
    number("h_re", out.bjt.h_re, true);
    number("h_oe", out.bjt.h_oe, true);
    if (!number("h_fe_min", out.bjt.h_fe_min, false)) out.bjt.h_fe_min = out.bjt.h_fe_typ;
    number("v_be_on", out.bjt.v_be_on, false);
    number("v_ce_sat", out.bjt.v_ce_sat, false);
    number("i_c_min", out.bjt.i_c_min, false);
    number("open_loop_gain", out.opamp.open_loop_gain, false);
    if (!kv.empty()) throw ConfigError("unknown key " + kv.begin()->first);

    validate(out.bjt);
    validate(out.opamp);
    return out;
}

inline DeviceSet load_devices(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open parameter file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_params(ss.str());
}

inline BjtParams load_params(const std::string& path) { return load_devices(path).bjt; }

/// Writes every field with round-trip precision.
inline std::string to_param_text(const DeviceSet& d) {
    auto line = [](const char* key, double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s = %.17g\n", key, v);
        return std::string(buf);
    };
    const BjtParams& p = d.bjt;
    std::string s = "name = " + p.name + "\n";
    s += line("h_fe_typ", p.h_fe_typ);
    s += line("h_fe_min", p.h_fe_min);
    s += line("h_fe_max", p.h_fe_max);
    s += line("h_ie", p.h_ie);
    s += line("h_re", p.h_re);
    s += line("h_oe", p.h_oe);
    s += line("v_be_on", p.v_be_on);
    s += line("v_ce_sat", p.v_ce_sat);
    s += line("i_c_min", p.i_c_min);
    s += line("open_loop_gain", d.opamp.open_loop_gain);
    return s;
}

}  // namespace ampforge

#endif  // AMPFORGE_DEVICES_HPP
