// config.hpp - flat `key = value` run configuration with [section] headers
//
// A run is described by a map "section.key" -> string. Each command declares a
// schema (the accepted keys with their defaults); values from a file and from
// command-line overrides are layered on top, and any key outside the schema is
// rejected. The resolved map doubles as the output manifest.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cavityspec/error.hpp"
#include "cavityspec/model.hpp"

namespace cavityspec::config {

using Entries = std::map<std::string, std::string>;

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

/// Parse config text. Keys before any [section] header are taken verbatim.
inline Entries parse(std::string_view text, const std::string& origin = "<config>") {
    Entries out;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        const auto hash = line.find_first_of("#;");
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        auto where = [&] { return origin + ":" + std::to_string(lineno) + ": "; };
        if (body.front() == '[') {
            if (body.back() != ']') throw ValidationError(where() + "unterminated section header");
            section = trim(std::string_view(body).substr(1, body.size() - 2));
            if (section.empty()) throw ValidationError(where() + "empty section name");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ValidationError(where() + "expected 'key = value'");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw ValidationError(where() + "missing key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (out.count(full)) throw ValidationError(where() + "duplicate key '" + full + "'");
        out[full] = value;
    }
    return out;
}

inline Entries load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

/// "section.key=value" from the command line.
inline std::pair<std::string, std::string> parse_override(std::string_view s) {
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
        throw ValidationError("override '" + std::string(s) + "' is not of the form key=value");
    return {trim(s.substr(0, eq)), trim(s.substr(eq + 1))};
}

/// Apply `layer` on top of `base`; every key must already exist in `base`.
inline void overlay(Entries& base, const Entries& layer) {
    for (const auto& [k, v] : layer) {
        auto it = base.find(k);
        if (it == base.end()) throw ValidationError("unknown configuration key '" + k + "'");
        it->second = v;
    }
}

/// Shortest text form used everywhere numbers are written: %.17g, "inf", "nan".
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// typed access

inline double to_double(const std::string& key, const std::string& v) {
    if (v == "inf" || v == "+inf" || v == "infinity") return std::numeric_limits<double>::infinity();
    double x{};
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc{} || ptr != end)
        throw ValidationError("key '" + key + "': '" + v + "' is not a number");
    return x;
}

inline long to_long(const std::string& key, const std::string& v) {
    long x{};
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc{} || ptr != end)
        throw ValidationError("key '" + key + "': '" + v + "' is not an integer");
    return x;
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw ValidationError("key '" + key + "': '" + v + "' is not a boolean");
}

inline std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    return out;
}

inline std::vector<std::string> to_strings(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

class View {
public:
    explicit View(const Entries& e) : e_(e) {}
    const std::string& str(const std::string& k) const {
        auto it = e_.find(k);
        if (it == e_.end()) throw ValidationError("missing configuration key '" + k + "'");
        return it->second;
    }
    double num(const std::string& k) const { return to_double(k, str(k)); }
    long integer(const std::string& k) const { return to_long(k, str(k)); }
    bool flag(const std::string& k) const { return to_bool(k, str(k)); }
    std::vector<double> list(const std::string& k) const { return to_list(k, str(k)); }
    std::vector<std::string> strings(const std::string& k) const { return to_strings(str(k)); }
    bool is(const std::string& k, std::string_view v) const { return str(k) == v; }

private:
    const Entries& e_;
};

// ---------------------------------------------------------------------------
// physical parameters

inline Entries params_schema() {
    return {
        {"params.nU", "0.1"},
        {"params.omega_bar_P", "0.01"},
        {"params.U0_mag", "0.001"},
        {"params.N_C", "50000"},
        {"params.L_x", "60"},
        {"params.L_y", "11"},
        {"params.Delta_C", "2"},
        {"params.kappa", "1.25"},
        {"params.omega_D", "1000000000"},
        {"params.beta", "inf"},
        {"params.n_max", "10000"},
        {"params.omega_R_Hz", "3560"},
        {"params.atom_mass_kg", format_number(constants::mass_rb87)},
        {"params.ir_cutoff", "cell"},
    };
}

inline IrCutoff parse_ir_cutoff(const std::string& v) {
    if (v == "cell") return IrCutoff::cell();
    if (v == "none") return IrCutoff::none();
    return IrCutoff::fixed(to_double("params.ir_cutoff", v));
}

inline PhysicalParams to_params(const Entries& e) {
    const View v(e);
    PhysicalParams p;
    p.nU = v.num("params.nU");
    p.omega_bar_P = v.num("params.omega_bar_P");
    p.U0_mag = v.num("params.U0_mag");
    p.N_C = v.num("params.N_C");
    p.L_x = v.num("params.L_x");
    p.L_y = v.num("params.L_y");
    p.Delta_C = v.num("params.Delta_C");
    p.kappa = v.num("params.kappa");
    p.omega_D = v.num("params.omega_D");
    p.beta = v.num("params.beta");
    p.n_max = v.integer("params.n_max");
    p.omega_R_Hz = v.num("params.omega_R_Hz");
    p.atom_mass_kg = v.num("params.atom_mass_kg");
    p.ir_cutoff = parse_ir_cutoff(v.str("params.ir_cutoff"));
    return p;
}

}  // namespace cavityspec::config
