// emit.hpp - CSV / JSON output of result tables with a manifest header

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cavityspec/config.hpp"
#include "cavityspec/error.hpp"

namespace cavityspec::emit {

inline constexpr const char* tool_version = "1.0.0";

using Cell = std::variant<double, std::string>;

struct Table {
    std::string name;                 // file stem
    config::Entries manifest;         // resolved configuration plus tool.* keys
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) {
        if (row.size() != columns.size())
            throw std::logic_error("table '" + name + "': row width does not match the header");
        rows.push_back(std::move(row));
    }
};

enum class Format { Csv, Json };

inline Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    throw ValidationError("unknown format '" + s + "' (expected csv or json)");
}

inline const char* extension(Format f) { return f == Format::Csv ? ".csv" : ".json"; }

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace detail

/// `# key = value` manifest lines, then the header row, then one line per row.
inline void write_csv(std::ostream& os, const Table& t) {
    for (const auto& [k, v] : t.manifest) os << "# " << k << " = " << v << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            if (const auto* d = std::get_if<double>(&row[i])) os << config::format_number(*d);
            else os << detail::csv_field(std::get<std::string>(row[i]));
        }
        os << '\n';
    }
}

/// Same content as the CSV. Numbers are written through the same %.17g text,
/// non-finite values as the strings "nan" / "inf".
inline void write_json(std::ostream& os, const Table& t) {
    nlohmann::ordered_json j;
    j["manifest"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.manifest) j["manifest"][k] = v;
    j["columns"] = t.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        auto r = nlohmann::ordered_json::array();
        for (const auto& c : row) {
            if (const auto* d = std::get_if<double>(&c)) {
                if (std::isfinite(*d)) r.push_back(nlohmann::ordered_json::parse(config::format_number(*d)));
                else r.push_back(config::format_number(*d));
            } else {
                r.push_back(std::get<std::string>(c));
            }
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    os << j.dump(1) << '\n';
}

inline void write(std::ostream& os, const Table& t, Format f) {
    if (f == Format::Csv) write_csv(os, t);
    else write_json(os, t);
}

inline std::filesystem::path write_file(const std::filesystem::path& dir, const Table& t, Format f) {
    std::filesystem::create_directories(dir);
    const auto path = dir / (t.name + extension(f));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    write(out, t, f);
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
    return path;
}

/// Manifest of a CSV written by write_csv, or of a JSON written by write_json.
inline config::Entries read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    config::Entries out;
    if (path.extension() == ".json") {
        const auto j = nlohmann::json::parse(in);
        for (const auto& [k, v] : j.at("manifest").items()) out[k] = v.get<std::string>();
        return out;
    }
    std::string line;
    while (std::getline(in, line) && line.rfind("# ", 0) == 0) {
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) throw ValidationError("malformed manifest line: " + line);
        out[line.substr(2, eq - 2)] = line.substr(eq + 3);
    }
    return out;
}

}  // namespace cavityspec::emit
